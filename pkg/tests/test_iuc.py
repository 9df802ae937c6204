import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import lambertw

from fklab.errors import ModelError, PreconditionError
from fklab.iuc import (
    ClosedFormPlan,
    TrivialExhaustion,
    agsd_check,
    aiuc_test,
    classify_cell,
    heat_kernel_comparability,
    ihc_necessary,
    measure_profile,
    nn_diagnostics,
    piuc_exhaustion,
    recommended_n0,
    solve_a,
    table1_exhaustion,
)
from fklab.models import AIUC_CELLS, PIUC_CELLS, cell_model, nn_model


# -- solve_a ------------------------------------------------------------------

def test_solve_a_fixed_points():
    assert solve_a(math.e) == pytest.approx(math.e, abs=1e-11)
    assert solve_a(1.0) == pytest.approx(1.76322, abs=1e-5)


@given(st.floats(min_value=1e-3, max_value=50.0))
def test_solve_a_against_lambert_oracle(rhs):
    # a log a = rhs  <=>  log a = W(rhs)
    want = math.exp(float(lambertw(rhs).real))
    assert solve_a(rhs) == pytest.approx(want, abs=1e-10, rel=1e-10)


def test_solve_a_monotone_to_one():
    values = [solve_a(rhs) for rhs in (1e-6, 1e-4, 1e-2)]
    assert values[0] < values[1] < values[2]
    assert values[0] == pytest.approx(1.0, abs=1e-3)


def test_solve_a_rejects_nonpositive():
    with pytest.raises(PreconditionError):
        solve_a(0.0)


# -- closed-form plan indices --------------------------------------------------

def test_table1_spot_value():
    assert table1_exhaustion("poly-log", 5, 3.0, 0.0, 1.0, 1.0) == 2


def test_table1_k1_is_one():
    for cell in PIUC_CELLS:
        assert table1_exhaustion(cell, 1, 3.0, 0.5, 1.0, 1.0) == 1


def test_table1_exact_against_independent_formula():
    # the oracle re-evaluates the printed closed forms in high precision
    beta, kappa, rho, ct, eps = 3.0, 0.5, 1.0, 1.3, 0.5
    a = math.exp(float(lambertw(ct ** (-1.0 / rho)).real))
    with mpmath.workdps(60):
        for n in range(2, 51):
            m = mpmath.mpf(n - 1) * rho
            want = int(mpmath.floor(
                mpmath.power(2, mpmath.mpf(-1) / (2 * beta))
                * (m / mpmath.mpf(ct) ** (1 / mpmath.mpf(rho))) ** (m / (2 * beta))
            ))
            assert table1_exhaustion("poly-log", n, beta, 0.0, rho, ct) == max(want, 1)

            arg = m / mpmath.mpf(ct) ** (1 / mpmath.mpf(rho))
            want = int(mpmath.floor(m * mpmath.log(arg) / (2 * kappa + eps))) if arg > 1 else 1
            assert table1_exhaustion("exp-poly", n, beta, kappa, rho, ct, eps) == max(want, 1)

            want = int(mpmath.floor(m * mpmath.log(a) / (2 * kappa + eps)))
            assert table1_exhaustion("exp-log", n, beta, kappa, rho, ct, eps) == max(want, 1)


def test_table1_scan_oracle_poly_log():
    # largest k with 2 k^(2 beta) <= u*_n reproduces the printed floor
    beta, rho, ct = 3.0, 1.0, 1.0
    for n in range(2, 20):
        u_star = ((n - 1) * rho / ct ** (1 / rho)) ** ((n - 1) * rho)
        k = 0
        while 2.0 * (k + 1) ** (2 * beta) <= u_star:
            k += 1
        assert table1_exhaustion("poly-log", n, beta, 0.0, rho, ct) == max(k, 1)


def test_table1_exp_log_linear_in_n():
    ks = [table1_exhaustion("exp-log", n, 3.0, 0.5, 1.0, 0.7) for n in (10, 20, 40)]
    assert ks[2] - ks[1] == pytest.approx(2 * (ks[1] - ks[0]), abs=2)


def test_table1_aiuc_cells_signal_trivial():
    for cell in AIUC_CELLS:
        with pytest.raises(TrivialExhaustion):
            table1_exhaustion(cell, 5, 3.0, 0.0, 1.0, 1.0)


# -- classification -------------------------------------------------------------

@pytest.fixture(scope="module")
def verdicts():
    out = {}
    for cell in AIUC_CELLS + PIUC_CELLS:
        model = cell_model(cell)
        n0 = recommended_n0(cell, 3.0, 0.5 if cell.startswith("exp") else 0.0, 1.0)
        out[cell] = aiuc_test(model.kernel, model.potential, model.exhaustion,
                              n0, 200)
    return out


def test_aiuc_cells_consistent(verdicts):
    for cell in AIUC_CELLS:
        assert verdicts[cell].verdict == "consistent", cell


def test_piuc_cells_refuted(verdicts):
    for cell in PIUC_CELLS:
        assert verdicts[cell].verdict == "refuted", cell


def test_log_potential_refuted_for_all_small_n0():
    model = cell_model("poly-log")
    for n0 in range(2, 11):
        v = aiuc_test(model.kernel, model.potential, model.exhaustion, n0, 200)
        assert v.verdict == "refuted"


def test_n0_one_rejected():
    model = cell_model("poly-poly")
    with pytest.raises(PreconditionError):
        aiuc_test(model.kernel, model.potential, model.exhaustion, 1, 50)


# -- progressive exhaustion -----------------------------------------------------

@pytest.fixture(scope="module")
def log_plan(log_model):
    radius = 250
    gs = log_model.ground_state(radius)
    aud = log_model.audit(radius)
    return piuc_exhaustion(log_model.kernel, log_model.potential,
                           log_model.exhaustion, gs, aud, radius,
                           n_range=range(2, 21))


def test_plan_levels_nondecreasing(log_plan):
    levels = [log_plan.level(n) for n in range(2, 21)]
    assert levels == sorted(levels)


def test_plan_strictly_inside_window(log_plan):
    assert all(log_plan.level(n) < log_plan.radius for n in range(2, 21))
    assert not any(log_plan.capped.values())


def test_plan_contains_level_set(log_plan, log_model):
    # D contains every state with lambda0 V <= C, so l(n) reaches at least
    # the level-set radius
    lam0 = log_plan.lam0
    edge = math.exp(log_plan.C / lam0) - 1.0
    assert log_plan.level(2) >= math.floor(edge) - 1


def test_closed_form_is_lower_approximation(log_plan, log_model):
    # the printed indices approximate the level-set plan from below
    gs = log_model.ground_state(250)
    aud = log_model.audit(250)
    prof = measure_profile(log_model.kernel, log_model.potential,
                           log_model.exhaustion, gs, aud, 250, "poly-log",
                           3.0, 0.0, 1.0)
    for n in range(2, 15):
        k = table1_exhaustion("poly-log", n, 3.0, 0.0, 1.0, prof.C_tilde)
        assert k <= log_plan.level(n)


def test_exp_potential_plan_becomes_trivial():
    model = cell_model("poly-exp")
    radius = 40
    gs = model.ground_state(radius)
    aud = model.audit(radius)
    plan = piuc_exhaustion(model.kernel, model.potential, model.exhaustion,
                           gs, aud, radius, n_range=range(2, 15))
    assert plan.trivial_from is not None
    assert plan.level(14) == radius


def test_level_set_covering_window_raises(log_model):
    gs = log_model.ground_state(50)
    aud = log_model.audit(50)
    with pytest.raises(ModelError):
        piuc_exhaustion(log_model.kernel, log_model.potential,
                        log_model.exhaustion, gs, aud, 50)


def test_profile_constants_bracket(log_model):
    gs = log_model.ground_state(250)
    aud = log_model.audit(250)
    prof = measure_profile(log_model.kernel, log_model.potential,
                           log_model.exhaustion, gs, aud, 250, "poly-log",
                           3.0, 0.0, 1.0)
    assert prof.C0 >= 1.0
    assert 0 < prof.C1 <= prof.C2
    assert prof.C_tilde > 0
    # the potential sits inside [C1 h, C2 h] by construction of the fit
    states = list(log_model.exhaustion.window(250))
    alpha = log_model.exhaustion.alpha_array(states).astype(float)
    r = 2.0 * (1.0 + alpha) ** 6
    h = np.log(r)
    V = log_model.potential.values(states)
    assert np.all(V >= prof.C1 * h - 1e-12)
    assert np.all(V <= prof.C2 * h + 1e-12)


# -- comparability tables --------------------------------------------------------

@pytest.fixture(scope="module")
def ref_comparability(ref_model):
    radius = 50
    slab = ref_model.slab(radius, 12)
    gs = ref_model.ground_state(radius)
    aud = ref_model.audit(radius)
    B = list(ref_model.exhaustion.window(3))
    return heat_kernel_comparability(slab, gs, None, aud, B)


def test_inner_ratio_single_bracket(ref_comparability):
    comp = ref_comparability
    ct = comp.inner_constant()
    for n in comp.n_values:
        assert comp.inner_max[n] <= ct + 1e-9
        assert comp.inner_min[n] >= 1.0 / ct - 1e-12


def test_inner_ratio_stable_across_n(ref_comparability):
    comp = ref_comparability
    values = [comp.inner_max[n] for n in range(2, 13)]
    assert max(values) <= 1.3 * min(values) / 0.7   # within +-30% band


def test_outer_tables_bounded(ref_comparability):
    comp = ref_comparability
    for n in range(1, 13):
        assert comp.outer_max[n] < math.inf
        assert comp.outer_min[n] > 0.0


def test_origin_ratio_finite(ref_model, ref_comparability):
    op = ref_model.operator(50)
    gs = ref_model.ground_state(50)
    slab = ref_model.slab(50, 12)
    i0 = op.index_of(0)
    val = slab.u[1][i0, i0] / (gs.lam0 * gs.phi0[i0] * gs.phi0_hat[i0])
    assert 0 < val < math.inf


def test_progressive_restriction_tames_sup(log_model, log_plan):
    radius = 250
    slab = log_model.slab(radius, 12, want_dual=False)
    gs = log_model.ground_state(radius)
    aud = log_model.audit(radius)
    comp = heat_kernel_comparability(slab, gs, log_plan, aud,
                                     B=list(log_model.exhaustion.window(3)),
                                     n_values=[12])
    assert comp.sup_q_restricted[12] <= 0.05 * comp.sup_q_full[12]


# -- domination, hypercontractivity, short-range negatives ------------------------

def test_agsd_stable_on_regular_model(ref_model):
    ratios = {}
    for radius in (50, 100):
        slab = ref_model.slab(radius, 15)
        gs = ref_model.ground_state(radius)
        intr = ref_model.intrinsic(radius, 15)
        ratios[radius] = agsd_check(slab, gs, 7, intr=intr)
    assert ratios[100]["ratio"] == pytest.approx(ratios[50]["ratio"], rel=0.1)
    assert ratios[100]["ratio_dual"] == pytest.approx(ratios[50]["ratio_dual"], rel=0.1)
    assert "K_2n0_plus_1" in ratios[50]


def test_agsd_grows_on_progressive_model(log_model):
    ratios = {}
    for radius in (100, 400):
        slab = log_model.slab(radius, 7, want_dual=False)
        gs = log_model.ground_state(radius)
        ratios[radius] = agsd_check(slab, gs, 7)["ratio"]
    assert ratios[400] >= 1.5 * ratios[100]


def test_agsd_lower_containment(ref_model):
    # U_{n0} 1 >= lambda0^{n0} phi0 / ||phi0||_inf
    radius, n0 = 50, 7
    slab = ref_model.slab(radius, n0)
    gs = ref_model.ground_state(radius)
    op = ref_model.operator(radius)
    un1 = slab.u[n0] @ op.mu
    lower = gs.lam0**n0 * gs.phi0 / np.max(gs.phi0)
    assert np.all(un1 >= lower - 1e-15)


def test_ihc_trends_match_aiuc(ref_model, log_model):
    good = ihc_necessary(ref_model, 4.0, 7, radii=(50, 100, 200))
    bad = ihc_necessary(log_model, 4.0, 7, radii=(50, 100, 200))
    assert good["verdict"] == "possible"
    assert bad["verdict"] == "refuted"


def test_ihc_needs_p_above_two(ref_model):
    with pytest.raises(PreconditionError):
        ihc_necessary(ref_model, 2.0, 7)


def test_nn_diagnostics_growth(lazy_walk_model):
    d = nn_diagnostics(lazy_walk_model, n0=5, windows=(50, 100), p=4.0, n_ihc=7)
    assert all(g >= 2.0 for g in d["growth_factors"])
    assert all(f <= 0.5 for f in d["ihc_decay_factors"])


def test_nn_diagnostics_growth_exponential_potential():
    model = nn_model(lazy=0.5, pot="exp", rho=1.0)
    d = nn_diagnostics(model, n0=5, windows=(16, 32), p=4.0, n_ihc=7)
    assert all(g >= 2.0 for g in d["growth_factors"])


def test_dsp_control_shows_no_growth(ref_model):
    from fklab.iuc import diagonal_sup
    logs = [diagonal_sup(ref_model, radius, 7) for radius in (100, 200)]
    assert math.exp(logs[1] - logs[0]) == pytest.approx(1.0, abs=1e-6)


def test_classify_cell_end_to_end():
    result = classify_cell(cell_model("poly-poly"), "poly-poly", 100)
    assert result["classification"] == "aIUC"
    result = classify_cell(cell_model("exp-poly"), "exp-poly", 100,
                           n_range=range(2, 11))
    assert result["classification"] == "pIUC"
    assert "k" in result and "profile" in result
