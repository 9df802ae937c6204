"""Path-sampling oracle for the weighted-path expectations, independent of the
matrix pipeline.

All supported kernels are translation invariant, so one increment law (built
once, with its certified tail lumped into a kill event) drives every step;
sampling is the inverse-CDF lookup vectorized over all live paths.  The lump
bias is reported: treating escaped mass as killed can only lower an estimate,
by at most lump * n * V_-^{-n} * max|f|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ModelError
from .kernels import DualKernelPair
from .potentials import Potential
from .space import Exhaustion

BATCH = 1 << 19
DEFAULT_LUMP_TOL = 1e-10
MAX_INCREMENT_RADIUS = 1 << 20


@dataclass
class McEstimate:
    target: object            # state y, or "mass" for the full semigroup mass
    value: float
    std_error: float
    paths: int
    seed: int
    n_steps: int
    lump: float               # discarded one-step mass treated as kill
    bias_bound: float         # worst-case downward bias from the lump

    def to_dict(self):
        return {
            "target": repr(self.target), "value": self.value,
            "std_error": self.std_error, "paths": self.paths,
            "seed": self.seed, "n": self.n_steps,
            "lump": self.lump, "bias_bound": self.bias_bound,
        }


class _IncrementSampler:
    """Shared one-step increment law P(x, x + u) with kill lump beyond a radius."""

    def __init__(self, kernel: DualKernelPair, dual: bool, lump_tol: float):
        space = kernel.space
        radius = 1
        while True:
            tail = kernel.row_tail_bound(radius)
            if tail is None:
                raise ModelError("path sampling needs a kernel with certified row tails")
            if tail <= lump_tol or radius >= MAX_INCREMENT_RADIUS:
                break
            radius *= 2
        x0 = space.origin()
        states = space.enumerate_states(space.ball_size(radius))
        if dual:
            probs = kernel.Phat_matrix([x0], states)[0]
        else:
            probs = kernel.P_matrix([x0], states)[0]
        self.increments = space.coords_array(states) - np.asarray(
            space.coords(x0), dtype=np.int64
        )
        self.cdf = np.cumsum(probs)
        self.total = float(self.cdf[-1])
        self.lump = max(1.0 - self.total, 0.0)
        self.radius = radius

    def step(self, coords: np.ndarray, alive: np.ndarray, rng) -> None:
        """Advance live paths in place; draws beyond the total mass are kills."""
        idx_alive = np.nonzero(alive)[0]
        if idx_alive.size == 0:
            return
        u = rng.random(idx_alive.size)
        picks = np.searchsorted(self.cdf, u, side="right")
        # the lump (tail + kernel kill mass) sits beyond the last cdf entry
        killed = picks >= len(self.cdf)
        survivors = idx_alive[~killed]
        coords[survivors] += self.increments[picks[~killed]]
        alive[idx_alive[killed]] = False


def _alpha_of(coords: np.ndarray) -> np.ndarray:
    return np.maximum(np.max(np.abs(coords), axis=1), 1)


def _run_paths(kernel, potential: Potential, exhaustion: Exhaustion, x, n: int,
               targets, paths: int, seed: int, dual: bool, lump_tol: float):
    sampler = _IncrementSampler(kernel, dual, lump_tol)
    space = kernel.space
    x_coords = np.asarray(space.coords(x), dtype=np.int64)
    target_list = [t for t in targets if t != "mass"]
    want_mass = any(t == "mass" for t in targets)
    target_coords = [np.asarray(space.coords(t), dtype=np.int64) for t in target_list]

    sums = np.zeros(len(target_list) + (1 if want_mass else 0))
    sq_sums = np.zeros_like(sums)
    seeds = np.random.SeedSequence(seed).spawn((paths + BATCH - 1) // BATCH)
    done = 0
    while done < paths:
        m = min(BATCH, paths - done)
        rng = np.random.default_rng(seeds[done // BATCH])
        coords = np.tile(x_coords, (m, 1))
        alive = np.ones(m, dtype=bool)
        weight = np.ones(m)
        if dual:
            # dual functional: weights collected over the positions after each step
            for _ in range(n):
                sampler.step(coords, alive, rng)
                w_step = potential.W(_alpha_of(coords)).astype(float)
                weight[alive] /= w_step[alive]
        else:
            for _ in range(n):
                w_step = potential.W(_alpha_of(coords)).astype(float)
                weight[alive] /= w_step[alive]
                sampler.step(coords, alive, rng)
        weight[~alive] = 0.0
        col = 0
        for tc in target_coords:
            hit = np.all(coords == tc[None, :], axis=1) & alive
            contrib = weight * hit
            sums[col] += contrib.sum()
            sq_sums[col] += (contrib**2).sum()
            col += 1
        if want_mass:
            sums[col] += weight.sum()
            sq_sums[col] += (weight**2).sum()
        done += m

    out = []
    v_min = potential.v_min
    labels = target_list + (["mass"] if want_mass else [])
    for col, label in enumerate(labels):
        mean = sums[col] / paths
        var = max(sq_sums[col] / paths - mean**2, 0.0)
        se = float(np.sqrt(var / paths))
        bias = sampler.lump * n * v_min ** (-n)
        out.append(McEstimate(
            target=label, value=float(mean), std_error=se, paths=paths,
            seed=seed, n_steps=n, lump=sampler.lump, bias_bound=float(bias),
        ))
    return out


def simulate_fk(kernel: DualKernelPair, potential: Potential,
                exhaustion: Exhaustion, x, n: int, targets=("mass",),
                paths: int = 10**5, seed: int = 0,
                lump_tol: float = DEFAULT_LUMP_TOL) -> list:
    """Estimate the weighted-path functionals by forward simulation.

    targets may contain states y (estimating u_n(x,y) mu(y), the mass sent to
    y) and/or "mass" (the full semigroup mass at x).  The path weight is the
    product of 1/V over the first n positions, the arrival state excluded.
    n = 0 returns the exact deterministic value.
    """
    if paths < 10**3:
        raise ConfigurationError("need at least 1000 paths")
    if n < 0:
        raise ConfigurationError("n must be >= 0")
    if n == 0:
        out = []
        for t in targets:
            val = 1.0 if (t == "mass" or t == x) else 0.0
            out.append(McEstimate(target=t if t == "mass" else t, value=val,
                                  std_error=0.0, paths=paths, seed=seed,
                                  n_steps=0, lump=0.0, bias_bound=0.0))
        return out
    return _run_paths(kernel, potential, exhaustion, x, n, targets, paths, seed,
                      dual=False, lump_tol=lump_tol)


def simulate_dual_fk(kernel: DualKernelPair, potential: Potential,
                     exhaustion: Exhaustion, x, n: int, targets=("mass",),
                     paths: int = 10**5, seed: int = 0,
                     lump_tol: float = DEFAULT_LUMP_TOL) -> list:
    """Dual-chain estimates; the weight product runs over positions 1..n
    (shifted against the forward functional)."""
    if paths < 10**3:
        raise ConfigurationError("need at least 1000 paths")
    if n < 0:
        raise ConfigurationError("n must be >= 0")
    if n == 0:
        return simulate_fk(kernel, potential, exhaustion, x, 0, targets, paths, seed)
    return _run_paths(kernel, potential, exhaustion, x, n, targets, paths, seed,
                      dual=True, lump_tol=lump_tol)
