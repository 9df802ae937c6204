import math

import numpy as np
import pytest

from fklab.errors import ConfigurationError, PreconditionError
from fklab.potentials import build_potential, confinement_level_set
from fklab.space import Exhaustion, build_space


@pytest.fixture
def exhaustion():
    return Exhaustion(build_space("line"))


def test_poly_evaluation(exhaustion):
    pot = build_potential("poly", 1.0, exhaustion)
    assert pot(7) == 7.0
    assert pot(-7) == 7.0
    assert pot(0) == 1.0   # alpha(0) = 1


def test_log_lower_bound(exhaustion):
    pot = build_potential("log", 1.0, exhaustion)
    assert pot.v_min == pytest.approx(math.log(2.0), rel=1e-12)


def test_exp_evaluation(exhaustion):
    pot = build_potential("exp", 1.0, exhaustion)
    assert pot(3) == pytest.approx(math.exp(3.0), rel=1e-12)


def test_nonpositive_exponent_rejected(exhaustion):
    with pytest.raises(ConfigurationError):
        build_potential("poly", 0.0, exhaustion)
    with pytest.raises(ConfigurationError):
        build_potential("log", -1.0, exhaustion)


def test_monotone_with_exhaustion(exhaustion):
    for kind, rho in (("log", 0.7), ("poly", 2.0), ("exp", 0.3)):
        pot = build_potential(kind, rho, exhaustion)
        win = list(exhaustion.window(20))
        alphas = exhaustion.alpha_array(win)
        vals = pot.values(win)
        for i in range(len(win)):
            for j in range(len(win)):
                if alphas[i] < alphas[j]:
                    assert vals[i] <= vals[j]


def test_level_set_linear_profile(exhaustion):
    pot = build_potential("poly", 1.0, exhaustion)
    assert sorted(confinement_level_set(pot, 4.0)) == list(range(-3, 4))


def test_level_set_log_profile_matches_scan(exhaustion):
    pot = build_potential("log", 1.0, exhaustion)
    level = 2.0
    got = set(confinement_level_set(pot, level))
    # direct scan over a generous window
    want = {x for x in exhaustion.window(30) if pot(x) < level}
    assert got == want
    # closed rule: alpha <= ceil(e^2 - 1) - 1
    assert max(exhaustion.alpha(x) for x in got) == math.ceil(math.e**2 - 1) - 1


def test_level_below_minimum_signalled(exhaustion):
    pot = build_potential("poly", 1.0, exhaustion)
    with pytest.raises(PreconditionError):
        confinement_level_set(pot, 0.5)


def test_level_sets_nest(exhaustion):
    pot = build_potential("log", 1.5, exhaustion)
    small = set(confinement_level_set(pot, 1.2))
    big = set(confinement_level_set(pot, 2.5))
    assert small <= big


def test_profile_floor_is_outside_infimum(exhaustion):
    pot = build_potential("poly", 2.0, exhaustion)
    assert pot.profile_floor(10) == pytest.approx(11.0**2)


def test_table_profile_roundtrip(tmp_path, exhaustion):
    path = tmp_path / "w.csv"
    path.write_text("n,W(n)\n" + "\n".join(f"{n},{n * 0.5 + 1}" for n in range(1, 21)))
    pot = build_potential("table", 1.0, exhaustion, table_path=str(path))
    assert pot(4) == pytest.approx(3.0)
    assert pot.v_min == pytest.approx(1.5)


def test_table_profile_must_be_nondecreasing(tmp_path, exhaustion):
    path = tmp_path / "bad.csv"
    path.write_text("1,5.0\n2,4.0\n")
    with pytest.raises(ConfigurationError):
        build_potential("table", 1.0, exhaustion, table_path=str(path))


def test_log_values_match_log_of_values(exhaustion):
    pot = build_potential("exp", 1.0, exhaustion)
    win = list(exhaustion.window(10))
    np.testing.assert_allclose(pot.log_values(win), np.log(pot.values(win)),
                               rtol=1e-12)
