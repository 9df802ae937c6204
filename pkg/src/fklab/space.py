"""Countably infinite state spaces, radial exhaustions and first-appearance indices.

States are plain integers on the line and coordinate tuples on lattices and
products.  Every space carries a total enumeration ordered by increasing
distance from the origin (ties broken with positive coordinates first), so a
radius-N window is always a prefix of the radius-(N+1) window and truncated
operator matrices are principal submatrices of each other.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, ResourceError

DEFAULT_MAX_WINDOW = 1 << 21


def _shell_key(coords):
    # positive coordinates first at equal radius: 0, 1, -1, 2, -2, ...
    return tuple(-c for c in coords)


class StateSpace:
    """Base class: enumeration, metric, and shell combinatorics."""

    kind = "abstract"
    dim = 0

    def coords(self, x) -> tuple:
        raise NotImplementedError

    def from_coords(self, coords: tuple):
        raise NotImplementedError

    def distance(self, x, y) -> int:
        raise NotImplementedError

    def radius(self, x) -> int:
        """Distance from the origin state."""
        raise NotImplementedError

    def origin(self):
        raise NotImplementedError

    def shell(self, r: int) -> list:
        """All states at distance exactly r from the origin, in enumeration order."""
        raise NotImplementedError

    def shell_count(self, r: int) -> int:
        """Number of states at distance exactly r from any fixed state.

        All supported spaces are translation invariant, so the count does not
        depend on the centre.
        """
        raise NotImplementedError

    def ball_size(self, n: int) -> int:
        return sum(self.shell_count(r) for r in range(n + 1))

    # -- enumeration ------------------------------------------------------

    def enumerate_states(self, count: int) -> list:
        """First `count` states of the canonical enumeration."""
        out = []
        r = 0
        while len(out) < count:
            out.extend(self.shell(r))
            r += 1
        return out[:count]

    def state(self, i: int):
        return self.enumerate_states(i + 1)[i]

    def index(self, x) -> int:
        r = self.radius(x)
        below = self.ball_size(r - 1) if r > 0 else 0
        return below + self.shell(r).index(x)

    def coords_array(self, states) -> np.ndarray:
        return np.array([self.coords(x) for x in states], dtype=np.int64)

    def distance_matrix(self, rows, cols) -> np.ndarray:
        a = self.coords_array(rows)
        b = self.coords_array(cols)
        return np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)


class LineSpace(StateSpace):
    """The integers with |x - y| distance; enumeration 0, 1, -1, 2, -2, ..."""

    kind = "line"
    dim = 1

    def coords(self, x):
        return (int(x),)

    def from_coords(self, coords):
        return int(coords[0])

    def distance(self, x, y):
        return abs(int(x) - int(y))

    def radius(self, x):
        return abs(int(x))

    def origin(self):
        return 0

    def shell(self, r):
        if r == 0:
            return [0]
        return [r, -r]

    def shell_count(self, r):
        return 1 if r == 0 else 2

    def ball_size(self, n):
        return 2 * n + 1

    def index(self, x):
        x = int(x)
        if x == 0:
            return 0
        return 2 * x - 1 if x > 0 else -2 * x

    def distance_matrix(self, rows, cols):
        a = np.asarray(rows, dtype=np.int64)
        b = np.asarray(cols, dtype=np.int64)
        return np.abs(a[:, None] - b[None, :])

    def coords_array(self, states):
        return np.asarray(states, dtype=np.int64)[:, None]


class LatticeSpace(StateSpace):
    """ℤ^d with the max-coordinate (box) distance."""

    kind = "lattice"

    def __init__(self, d: int):
        if d < 1:
            raise ConfigurationError(f"lattice dimension must be >= 1, got {d}")
        self.dim = d

    def coords(self, x):
        return tuple(int(c) for c in x)

    def from_coords(self, coords):
        return tuple(int(c) for c in coords)

    def distance(self, x, y):
        return max(abs(a - b) for a, b in zip(x, y))

    def radius(self, x):
        return max(abs(c) for c in x)

    def origin(self):
        return (0,) * self.dim

    def shell(self, r):
        if r == 0:
            return [self.origin()]
        pts = [
            p
            for p in itertools.product(range(-r, r + 1), repeat=self.dim)
            if max(abs(c) for c in p) == r
        ]
        pts.sort(key=_shell_key)
        return pts

    def shell_count(self, r):
        if r == 0:
            return 1
        return (2 * r + 1) ** self.dim - (2 * r - 1) ** self.dim

    def ball_size(self, n):
        return (2 * n + 1) ** self.dim


class ProductSpace(StateSpace):
    """Product of two spaces with max(δ1, δ2) distance; windows factorize."""

    kind = "product"

    def __init__(self, first: StateSpace, second: StateSpace):
        self.first = first
        self.second = second
        self.dim = first.dim + second.dim

    def coords(self, x):
        a, b = x
        return tuple(self.first.coords(a)) + tuple(self.second.coords(b))

    def from_coords(self, coords):
        d1 = self.first.dim
        return (
            self.first.from_coords(coords[:d1]),
            self.second.from_coords(coords[d1:]),
        )

    def split(self, states):
        return [a for a, _ in states], [b for _, b in states]

    def distance(self, x, y):
        return max(
            self.first.distance(x[0], y[0]), self.second.distance(x[1], y[1])
        )

    def radius(self, x):
        return max(self.first.radius(x[0]), self.second.radius(x[1]))

    def origin(self):
        return (self.first.origin(), self.second.origin())

    def shell(self, r):
        if r == 0:
            return [self.origin()]
        ball1 = [s for q in range(r) for s in self.first.shell(q)]
        ball2 = [s for q in range(r + 1) for s in self.second.shell(q)]
        pts = [(a, b) for a in self.first.shell(r) for b in ball2]
        pts += [(a, b) for a in ball1 for b in self.second.shell(r)]
        pts.sort(key=lambda x: _shell_key(self.coords(x)))
        return pts

    def shell_count(self, r):
        if r == 0:
            return 1
        c1 = self.first.shell_count(r) * self.second.ball_size(r)
        c2 = self.first.ball_size(r - 1) * self.second.shell_count(r)
        return c1 + c2

    def ball_size(self, n):
        return self.first.ball_size(n) * self.second.ball_size(n)


def build_space(kind: str, d: int = 1, factors: tuple = ()) -> StateSpace:
    """Construct a state space.

    kind is one of "line", "lattice" (with dimension d) or "product"
    (with a pair of factor spaces).
    """
    if kind == "line":
        return LineSpace()
    if kind == "lattice":
        return LatticeSpace(d)
    if kind == "product":
        if len(factors) != 2:
            raise ConfigurationError("product space needs exactly two factors")
        return ProductSpace(*factors)
    raise ConfigurationError(f"unsupported space kind: {kind!r}")


class Exhaustion:
    """Radial exhaustion B_n = {x : δ(x0, x) <= n}, n = 1, 2, ...

    Exhaustions start at B_1, so the first-appearance index of the origin is 1:
    alpha(x) = max(δ(x0, x), 1).
    """

    def __init__(self, space: StateSpace, max_window: int = DEFAULT_MAX_WINDOW):
        self.space = space
        self.x0 = space.origin()
        self.max_window = max_window

    def alpha(self, x) -> int:
        return max(self.space.radius(x), 1)

    def alpha_array(self, states) -> np.ndarray:
        coords = self.space.coords_array(states)
        return np.maximum(np.max(np.abs(coords), axis=1), 1)

    @lru_cache(maxsize=None)
    def window(self, n: int) -> tuple:
        """B_n in enumeration order (a prefix of the canonical enumeration)."""
        if n < 1:
            raise ConfigurationError(f"window radius must be >= 1, got {n}")
        size = self.space.ball_size(n)
        if size > self.max_window:
            raise ResourceError(
                f"window B_{n} has {size} states, exceeding the budget of "
                f"{self.max_window}"
            )
        return tuple(self.space.enumerate_states(size))

    def alpha_bruteforce(self, x, n_max: int = 64) -> int:
        """First n with x in B_n, by direct membership scan (test oracle)."""
        for n in range(1, n_max + 1):
            if x in self.window(n):
                return n
        raise LookupError(f"{x!r} not found in any window up to B_{n_max}")


def window(space: StateSpace, exhaustion: Exhaustion, n: int) -> list:
    return list(exhaustion.window(n))


def alpha(space: StateSpace, exhaustion: Exhaustion, x) -> int:
    return exhaustion.alpha(x)
