import math

import mpmath
import numpy as np
import pytest

from fklab.errors import ConfigurationError, ModelError
from fklab.kernels import (
    DiracStepLaw,
    PolynomialStepLaw,
    audit,
    build_metric_kernel,
    build_nn_kernel,
    build_nonreversible_kernel,
    build_product_kernel,
    build_subordinate_kernel,
)
from fklab.space import Exhaustion, build_space

LINE = build_space("line")
EX = Exhaustion(LINE)

# independent series oracle: mu0 = sum_y (1+|y|)^-3 = 2 zeta(3) - 1
MU0_REF = 2.0 * float(mpmath.zeta(3)) - 1.0


def test_metric_normalizer_against_series_oracle():
    k = build_metric_kernel(LINE, beta=3.0)
    assert k.mu0 == pytest.approx(MU0_REF, abs=1e-12)
    assert k.mu0 == pytest.approx(1.4041138, abs=1e-7)


def test_metric_normalizer_exponential_tilt_oracle():
    k = build_metric_kernel(LINE, beta=3.0, kappa=0.5)
    ref = 1.0 + 2.0 * float(
        mpmath.nsum(lambda r: (1 + r) ** -3 * mpmath.exp(-0.5 * r), [1, mpmath.inf])
    )
    assert k.mu0 == pytest.approx(ref, rel=1e-12)
    assert k.mu0_err <= 1e-12 * k.mu0


def test_metric_entry_value():
    k = build_metric_kernel(LINE, beta=3.0)
    assert k.P_entry(0, 1) == pytest.approx(0.125 / MU0_REF, rel=1e-12)
    assert k.P_entry(0, 1) == pytest.approx(0.089024, abs=1e-6)


def test_metric_symmetry():
    k = build_metric_kernel(LINE, beta=3.0, kappa=0.2)
    win = list(EX.window(10))
    P = k.P_matrix(win, win)
    np.testing.assert_allclose(P, P.T, rtol=1e-14)


def test_divergent_normalizer_rejected():
    with pytest.raises(ModelError):
        build_metric_kernel(LINE, beta=1.0, kappa=0.0)


def test_row_tail_bound_is_sound():
    k = build_metric_kernel(LINE, beta=3.0)
    win = list(EX.window(500))
    row = k.P_matrix([0], win)[0]
    inside = row[np.abs(np.asarray(win)) <= 30].sum()
    assert 1.0 - inside <= k.row_tail_bound(30)
    assert k.row_tail_bound(30) <= 5 * (1.0 - inside)


def test_duality_residual_all_builders():
    builders = [
        build_metric_kernel(LINE, beta=3.0),
        build_metric_kernel(LINE, beta=3.0, kappa=0.5),
        build_nonreversible_kernel(LINE, "weighted", eta=0.3),
        build_nonreversible_kernel(LINE, "shifted", shift=2),
        build_nn_kernel(LINE, lazy=0.5),
        build_subordinate_kernel(build_nn_kernel(LINE, 0.5), PolynomialStepLaw(1.5), 64),
    ]
    for k in builders:
        win = list(EX.window(20))
        P = k.P_matrix(win, win)
        Phat = k.Phat_matrix(win, win)
        mu = k.mu_vector(win)
        lhs = mu[:, None] * P
        rhs = (mu[:, None] * Phat).T
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(mu)


def test_density_closed_form_profile_kernel():
    k = build_metric_kernel(LINE, beta=3.0, kappa=0.1)
    win = list(EX.window(15))
    p = k.p_matrix(win, win)
    d = np.abs(np.asarray(win)[:, None] - np.asarray(win)[None, :])
    closed = (1.0 + d) ** -3.0 * np.exp(-0.1 * d) / k.mu0**2
    np.testing.assert_allclose(p, closed, rtol=1e-12)


# -- non-reversible ---------------------------------------------------------

def test_weighted_variant_ratio():
    k = build_nonreversible_kernel(LINE, "weighted", eta=0.3)
    assert k.P_entry(0, 1) / k.P_entry(0, -1) == pytest.approx(7.0 / 3.0, rel=1e-13)


def test_weighted_variant_dual_is_transposed():
    k = build_nonreversible_kernel(LINE, "weighted", eta=0.3)
    # constant mu makes P-hat(0,1) = P(1,0)
    assert k.Phat_matrix([0], [1])[0, 0] == pytest.approx(k.P_entry(1, 0), rel=1e-14)


def test_weighted_duality_residual_tiny():
    k = build_nonreversible_kernel(LINE, "weighted", eta=0.3)
    a = audit(k, EX, 30)
    assert a.duality_residual <= 1e-14


def test_degenerate_eta_rejected():
    for eta in (0.0, 0.5, 1.0):
        with pytest.raises(ModelError):
            build_nonreversible_kernel(LINE, "weighted", eta=eta)


def test_weighted_step_profile_normalized():
    k = build_nonreversible_kernel(LINE, "weighted", eta=0.3)
    win = list(EX.window(4000))
    assert k.P_matrix([0], win)[0].sum() == pytest.approx(1.0, abs=1e-7)
    assert k.dsp_convolution_residual(20) < 10.0


def test_shifted_variant_row_sums():
    k = build_nonreversible_kernel(LINE, "shifted", shift=1)
    win = list(EX.window(3000))
    assert k.P_matrix([0], win)[0].sum() == pytest.approx(1.0, abs=1e-6)


# -- nearest neighbour + subordination ---------------------------------------

def test_nn_values_and_row_sum():
    k = build_nn_kernel(LINE, lazy=0.5)
    assert k.P_entry(0, 1) == pytest.approx(0.25)
    win = list(EX.window(5))
    assert k.P_matrix([0], win)[0].sum() == pytest.approx(1.0, abs=1e-15)


def test_nn_audit_fails_with_witness():
    a = audit(build_nn_kernel(LINE, lazy=0.5), EX, 10)
    assert a.verdicts["A1"] == "fail"
    assert a.witness == (0, 2)
    assert not a.passed
    assert a.verdicts["A2"] == "pass"


def test_identity_subordination():
    nn = build_nn_kernel(LINE, lazy=0.5)
    k = build_subordinate_kernel(nn, DiracStepLaw(1), n_cut=8,
                                 require_unbounded=False)
    win = list(EX.window(6))
    np.testing.assert_allclose(k.P_matrix(win, win), nn.P_matrix(win, win),
                               atol=1e-15)
    assert k.kill == 0.0


def test_bounded_step_law_rejected_by_default():
    with pytest.raises(ModelError):
        build_subordinate_kernel(build_nn_kernel(LINE, 0.5), DiracStepLaw(1), 8)


def test_subordinate_positive_within_cut():
    nn = build_nn_kernel(LINE, lazy=0.5)
    k = build_subordinate_kernel(nn, PolynomialStepLaw(1.5), n_cut=40)
    row = k.P_matrix([0], list(range(-40, 41)))[0]
    assert np.all(row > 0)
    # matrix-power accumulation oracle for one entry
    step = np.zeros(81)
    step[39] = step[41] = 0.25
    step[40] = 0.5
    law = PolynomialStepLaw(1.5)
    acc = np.zeros(81)
    w = np.zeros(81)
    w[40] = 1.0
    for n in range(1, 41):
        w = np.convolve(w, step)[40:121]
        acc += w * float(law.pmf(n))
    assert k.P_entry(0, 3) == pytest.approx(acc[43], rel=1e-12)


def test_subordinate_kill_mass_is_certified_tail():
    law = PolynomialStepLaw(1.5)
    k = build_subordinate_kernel(build_nn_kernel(LINE, 0.5), law, n_cut=64)
    assert k.kill == pytest.approx(law.tail_mass(64), rel=1e-14)
    win = list(EX.window(64))
    rowsum = k.P_matrix([0], win)[0].sum()
    assert rowsum == pytest.approx(1.0 - k.kill, abs=1e-12)


def test_subordinate_dsp_ratio_stable_as_cut_doubles():
    # the cut must clear the two-step audit diameter (4 * radius) before the
    # ratio stabilizes; below that the one-step mass near the cut is starved
    nn = build_nn_kernel(LINE, lazy=0.5)
    ratios = []
    for n_cut in (128, 256):
        k = build_subordinate_kernel(nn, PolynomialStepLaw(1.5), n_cut=n_cut)
        a = audit(k, EX, 20)
        assert math.isfinite(a.c_star)
        ratios.append(a.c_star)
    assert ratios[1] == pytest.approx(ratios[0], rel=0.05)


# -- products -----------------------------------------------------------------

def test_product_kernel_tensor_values():
    k1 = build_metric_kernel(LINE, beta=3.0)
    k2 = build_metric_kernel(build_space("line"), beta=3.0)
    prod = build_product_kernel(k1, k2)
    got = prod.P_entry((0, 0), (1, 0))
    assert got == pytest.approx(k1.P_entry(0, 1) * k2.P_entry(0, 0), rel=1e-14)
    assert prod.mu_entry((2, -1)) == pytest.approx(
        k1.mu_entry(2) * k2.mu_entry(-1), rel=1e-14)


def test_product_audit_submultiplicative():
    k1 = build_metric_kernel(LINE, beta=3.0)
    k2 = build_metric_kernel(build_space("line"), beta=4.0)
    prod = build_product_kernel(k1, k2)
    ex_p = Exhaustion(prod.space)
    a1 = audit(k1, EX, 10)
    a2 = audit(k2, EX, 10)
    ap = audit(prod, ex_p, 10)
    assert ap.passed
    # max of a product is at most the product of maxes, entry by entry
    assert ap.c_star_window <= a1.c_star_window * a2.c_star_window * (1 + 1e-12)


# -- audit behaviour ----------------------------------------------------------

def test_audit_reference_model_passes_certified():
    k = build_metric_kernel(LINE, beta=3.0)
    a = audit(k, EX, 30)
    assert a.passed
    assert a.certificate == "certified"
    assert a.verdicts == {"A1": "pass", "A2": "pass", "A3": "pass"}
    assert math.isfinite(a.c_star) and a.c_star >= 1.0


def test_audit_constant_diagonal():
    k = build_nn_kernel(LINE, lazy=0.42)
    for radius in (5, 10):
        assert audit(k, EX, radius).c_minus == pytest.approx(0.42)


def test_audit_doubling_keeps_verdicts():
    k = build_metric_kernel(LINE, beta=3.0)
    small, big = audit(k, EX, 15), audit(k, EX, 30)
    for key in ("A2", "A3"):
        assert small.verdicts[key] == big.verdicts[key] == "pass"
    # the window sup grows with the window; c_minus is constant here
    assert big.c_star_window >= small.c_star_window - 1e-12
    assert big.c_minus <= small.c_minus + 1e-12


def test_audit_needs_radius_two():
    with pytest.raises(ConfigurationError):
        audit(build_metric_kernel(LINE, beta=3.0), EX, 1)
