import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fklab.errors import ConfigurationError, ResourceError
from fklab.space import Exhaustion, LatticeSpace, LineSpace, ProductSpace, build_space


def test_line_enumeration_spiral():
    line = build_space("line")
    assert line.enumerate_states(7) == [0, 1, -1, 2, -2, 3, -3]


@given(st.integers(min_value=-500, max_value=500))
def test_line_index_state_roundtrip(x):
    line = LineSpace()
    assert line.state(line.index(x)) == x


def test_enumeration_bijective_on_window():
    lat = build_space("lattice", d=2)
    states = lat.enumerate_states(81)
    assert len(set(states)) == 81
    for i in (0, 5, 33, 80):
        assert lat.index(states[i]) == i


def test_lattice_radial_shell_ordering():
    lat = build_space("lattice", d=2)
    states = lat.enumerate_states(25)
    assert states[0] == (0, 0)
    radii = [max(abs(a), abs(b)) for a, b in states]
    # every state at distance 1 precedes every state at distance 2
    assert radii == sorted(radii)


def test_product_of_lines_matches_lattice_windows():
    lat = build_space("lattice", d=2)
    prod = build_space("product", factors=(LineSpace(), LineSpace()))
    ex_l, ex_p = Exhaustion(lat), Exhaustion(prod)
    for n in range(1, 11):
        got = {(a, b) for a, b in ex_p.window(n)}
        want = set(ex_l.window(n))
        assert got == want


def test_unsupported_kind_raises():
    with pytest.raises(ConfigurationError):
        build_space("tree")
    with pytest.raises(ConfigurationError):
        build_space("lattice", d=0)


def test_alpha_values_on_line():
    ex = Exhaustion(build_space("line"))
    assert ex.alpha(0) == 1
    assert ex.alpha(-7) == 7
    assert ex.alpha(3) == 3


def test_alpha_box_exhaustion_on_lattice():
    ex = Exhaustion(build_space("lattice", d=2))
    assert ex.alpha((3, -5)) == 5
    assert ex.alpha((3, -5)) == ex.alpha_bruteforce((3, -5))


def test_alpha_closed_rule_matches_bruteforce_scan():
    ex = Exhaustion(build_space("line"))
    for x in ex.window(20):
        assert ex.alpha(x) == ex.alpha_bruteforce(x)


def test_alpha_monotone_in_radius():
    ex = Exhaustion(build_space("lattice", d=2))
    win = ex.window(6)
    for x, y in itertools.islice(itertools.combinations(win, 2), 500):
        if ex.space.radius(x) <= ex.space.radius(y):
            assert ex.alpha(x) <= ex.alpha(y)


def test_window_sizes_and_contents():
    line = build_space("line")
    ex = Exhaustion(line)
    assert list(ex.window(2)) == [0, 1, -1, 2, -2]
    w50 = ex.window(50)
    assert len(w50) == 101
    assert w50[-1] == -50
    lat2 = Exhaustion(build_space("lattice", d=2))
    assert len(lat2.window(1)) == 9


def test_windows_nest_with_stable_prefix():
    ex = Exhaustion(build_space("lattice", d=2))
    for n in range(1, 8):
        a, b = ex.window(n), ex.window(n + 1)
        assert set(a) < set(b)
        assert b[: len(a)] == a


def test_window_budget():
    ex = Exhaustion(build_space("line"), max_window=50)
    with pytest.raises(ResourceError):
        ex.window(40)


def test_distance_metric_axioms_sampled():
    lat = build_space("lattice", d=2)
    pts = lat.enumerate_states(25)
    rng = np.random.default_rng(0)
    for _ in range(200):
        x, y, z = (pts[i] for i in rng.integers(0, 25, size=3))
        assert lat.distance(x, y) == lat.distance(y, x)
        assert lat.distance(x, x) == 0
        assert lat.distance(x, z) <= lat.distance(x, y) + lat.distance(y, z)


def test_shell_counts_match_enumeration():
    for space in (build_space("line"), build_space("lattice", d=2),
                  ProductSpace(LineSpace(), LatticeSpace(2))):
        for r in range(4):
            assert space.shell_count(r) == len(space.shell(r))


def test_every_state_appears_in_some_window():
    ex = Exhaustion(build_space("line"))
    for x in ex.space.enumerate_states(30):
        assert x in ex.window(ex.alpha(x))
