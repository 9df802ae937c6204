"""Confining potentials V = W(alpha(x)) built from increasing profiles.

Profiles are pinned to the same radial exhaustion as the kernel windows, so V
is increasing with respect to the exhaustion by construction and level sets
are certified complete by monotonicity.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from .errors import ConfigurationError, PreconditionError, ResourceError
from .space import Exhaustion


class Potential:
    """Potential V(x) = W(alpha(x)) with an increasing profile W on {1, 2, ...}."""

    def __init__(self, kind: str, exhaustion: Exhaustion, profile, inverse, label: str):
        self.kind = kind
        self.exhaustion = exhaustion
        self._w = profile
        self._w_inverse = inverse  # minimal integer n with W(n) >= M, or None
        self.label = label
        self.v_min = float(profile(1))
        if not self.v_min > 0:
            raise ConfigurationError("potential profile must be positive at 1")

    def W(self, n):
        return self._w(n)

    def __call__(self, x) -> float:
        return float(self._w(self.exhaustion.alpha(x)))

    def values(self, states) -> np.ndarray:
        return self._w(self.exhaustion.alpha_array(states)).astype(float)

    def log_values(self, states) -> np.ndarray:
        """log V on a window; exact for the exp profile even when V overflows."""
        if self.kind == "exp":
            return self.rho * self.exhaustion.alpha_array(states).astype(float)
        return np.log(self.values(states))

    def profile_floor(self, n: int) -> float:
        """inf of V outside B_n, i.e. W(n+1), by monotonicity."""
        return float(self._w(n + 1))

    def min_radius_reaching(self, level: float, n_max: int = 10**7) -> int:
        """Minimal n with W(n) >= level."""
        if self._w_inverse is not None:
            n = self._w_inverse(level)
            if n > n_max:
                raise ResourceError(
                    f"level {level} first reached at radius {n} > budget {n_max}"
                )
            return max(1, n)
        # tabulated profile: linear scan
        n = 1
        while self._w(n) < level:
            n += 1
            if n > n_max:
                raise ResourceError(f"level {level} not reached within radius {n_max}")
        return n


def build_potential(kind: str, rho: float, exhaustion: Exhaustion,
                    table_path: str | None = None) -> Potential:
    """Build a log / poly / exp / tabulated potential profile.

    log:   W(n) = log(1+n)^rho
    poly:  W(n) = n^rho
    exp:   W(n) = exp(rho * n)
    table: W read from a CSV with rows "n,W(n)"; must be nondecreasing.
    """
    if kind != "table" and not rho > 0:
        raise ConfigurationError(f"potential exponent must be positive, got {rho}")

    if kind == "log":
        w = lambda n: np.log1p(n) ** rho
        inv = lambda M: math.ceil(math.exp(M ** (1.0 / rho)) - 1.0)
        label = f"log^{rho}(1+n)"
    elif kind == "poly":
        w = lambda n: np.asarray(n, dtype=float) ** rho
        inv = lambda M: math.ceil(M ** (1.0 / rho))
        label = f"n^{rho}"
    elif kind == "exp":
        w = lambda n: np.exp(rho * np.asarray(n, dtype=float))
        inv = lambda M: math.ceil(math.log(M) / rho)
        label = f"exp({rho} n)"
    elif kind == "table":
        if table_path is None:
            raise ConfigurationError("table potential needs potential.table_path")
        table = _load_table(table_path)
        w = lambda n: table[np.minimum(np.asarray(n, dtype=np.int64), len(table) - 1)]
        inv = None
        label = f"table({table_path})"
    else:
        raise ConfigurationError(f"unsupported potential kind: {kind!r}")

    pot = Potential(kind, exhaustion, w, inv, label)
    pot.rho = rho
    return pot


def _load_table(path: str) -> np.ndarray:
    rows = {}
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().startswith("#") or rec[0].strip() == "n":
                continue
            rows[int(rec[0])] = float(rec[1])
    if not rows or min(rows) != 1:
        raise ConfigurationError("potential table must start at n=1")
    n_max = max(rows)
    table = np.empty(n_max + 1)
    table[0] = rows[1]
    for n in range(1, n_max + 1):
        if n not in rows:
            raise ConfigurationError(f"potential table misses n={n}")
        table[n] = rows[n]
    if np.any(np.diff(table[1:]) < 0):
        raise ConfigurationError("tabulated potential profile must be nondecreasing")
    return table


def confinement_level_set(potential: Potential, level: float) -> list:
    """All states with V < level, certified complete by profile monotonicity."""
    if level <= potential.v_min:
        raise PreconditionError(
            f"level {level} does not exceed the potential lower bound "
            f"{potential.v_min}"
        )
    n_star = potential.min_radius_reaching(level)
    window = potential.exhaustion.window(n_star)
    vals = potential.values(window)
    return [x for x, v in zip(window, vals) if v < level]
