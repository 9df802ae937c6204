"""Uniform ergodicity and quasi-ergodicity traces of the transformed chains.

Test families over the unit balls are exact on a window: the supremum of the
linear functional f -> Q_n f(x) - nu_bar(f) over the l1(nu) unit ball is
attained at scaled one-point indicators, and over an l^p ball it equals the
dual-norm of the centred row.  Total variation is computed both as the half
l1 distance and through indicator test sets; the two agree up to the window
conservativity defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .intrinsic import IntrinsicKernel, MeasureSet

FLOOR = 1e-13


@dataclass
class GeometricFit:
    rate: float
    log_level: float
    r_squared: float
    n_lo: int
    n_hi: int

    @property
    def points(self) -> int:
        return self.n_hi - self.n_lo + 1

    def to_dict(self):
        return {"rate": self.rate, "r_squared": self.r_squared,
                "n_lo": self.n_lo, "n_hi": self.n_hi, "points": self.points}


def fit_geometric(ns, values, r2_min: float = 0.99, min_points: int = 8):
    """Least-squares geometric rate on the largest suffix with R^2 >= r2_min.

    Trailing values at the numerical floor (or non-monotone tail noise) are
    dropped before fitting; returns None when no admissible suffix exists.
    """
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > FLOOR * max(values.max(), 1.0)
    ns, values = ns[keep], values[keep]
    while len(ns) >= min_points:
        y = np.log(values)
        slope, intercept = np.polyfit(ns, y, 1)
        resid = y - (slope * ns + intercept)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
        if r2 >= r2_min:
            return GeometricFit(rate=float(np.exp(slope)), log_level=float(intercept),
                                r_squared=r2, n_lo=int(ns[0]), n_hi=int(ns[-1]))
        ns, values = ns[1:], values[1:]
    return None


# ---------------------------------------------------------------------------
# l-infinity: total variation against the stationary law
# ---------------------------------------------------------------------------

@dataclass
class UniformErgodicityReport:
    n_values: list
    e_inf: list                      # sup_x TV(Q_n(x,.), nu_bar)
    doeblin_floor: float             # min q_1 > 0
    doeblin_coefficient: float       # |nu| * min q_1
    tv_cross_check: float            # max gap between the two TV computations
    fit: GeometricFit | None

    def to_dict(self):
        return {"n_values": self.n_values, "e_inf": self.e_inf,
                "doeblin_floor": self.doeblin_floor,
                "doeblin_coefficient": self.doeblin_coefficient,
                "tv_cross_check": self.tv_cross_check,
                "fit": self.fit.to_dict() if self.fit else None}


def tv_from_rows(q: np.ndarray, nu: np.ndarray, nu_mass: float) -> np.ndarray:
    """TV(Q_n(x,.), nu_bar) per row x, as half the l1 distance of the laws."""
    return 0.5 * np.abs(q * nu[None, :] - nu[None, :] / nu_mass).sum(axis=1)


def tv_from_indicators(q: np.ndarray, nu: np.ndarray, nu_mass: float) -> np.ndarray:
    """Same suprema through the extreme indicator sets {q nu >= nu_bar}."""
    diff = q * nu[None, :] - nu[None, :] / nu_mass
    return np.maximum(diff, 0.0).sum(axis=1)


def uniform_ergodicity(intr: IntrinsicKernel, meas: MeasureSet,
                       n_values=None) -> UniformErgodicityReport:
    """Geometric l-infinity ergodicity of the intrinsic chain on the window."""
    if n_values is None:
        n_values = list(range(1, intr.n_max + 1))
    nu, nu_mass = meas.nu, meas.nu_mass
    e_inf, cross = [], 0.0
    for n in n_values:
        q = intr.q(n)
        tv = tv_from_rows(q, nu, nu_mass)
        tv2 = tv_from_indicators(q, nu, nu_mass)
        cross = max(cross, float(np.max(np.abs(tv - tv2))))
        e_inf.append(float(np.max(tv)))
    floor = intr.doeblin_floor()
    return UniformErgodicityReport(
        n_values=list(n_values), e_inf=e_inf, doeblin_floor=floor,
        doeblin_coefficient=floor * nu_mass, tv_cross_check=cross,
        fit=fit_geometric(n_values, e_inf),
    )


# ---------------------------------------------------------------------------
# l1 traces along an exhaustion plan
# ---------------------------------------------------------------------------

def _split(n: int, n0: int):
    """k + l + j = n - 1 with l = j = floor((n-1)/3) clamped to >= n0."""
    l = j = max((n - 1) // 3, n0)
    k = n - 1 - l - j
    if k < 0:
        return None
    return k, l, j


def _plan_mask(plan, n: int, states) -> np.ndarray:
    a_set = set(plan.A(n))
    return np.array([s in a_set for s in states])


@dataclass
class ProgressiveTrace:
    n_values: list
    e1: list                  # sup_{x in A_l} |Q_n f(x) - nu_bar(f)| over unit l1(nu)
    envelope: list            # sup_{A_j^c} 1/V + gap^k
    envelope_potential: list  # the 1/V part alone
    splits: dict
    C_envelope: float         # smallest constant with e1 <= C * envelope
    fit: GeometricFit | None = None

    def to_dict(self):
        return {"n_values": self.n_values, "e1": self.e1,
                "envelope": self.envelope,
                "envelope_potential": self.envelope_potential,
                "splits": {str(k): v for k, v in self.splits.items()},
                "C_envelope": self.C_envelope,
                "fit": self.fit.to_dict() if self.fit else None}


def progressive_rates(intr: IntrinsicKernel, meas: MeasureSet, plan, n0: int,
                      n_values=None, gap: float | None = None) -> ProgressiveTrace:
    """l1(nu) uniform ergodicity along the plan with the split-rule envelope.

    For each n the time is split k + l + j = n - 1 (l = j ~ (n-1)/3, both at
    least n0); the trace takes x over A_l and the exact extreme-point family
    f = 1_{y}/nu(y), and is compared against sup_{A_j^c} 1/V + gap^k.
    """
    if gap is None:
        gap = intr.gs.gap
    if gap is None:
        raise PreconditionError("spectral gap required for the envelope")
    op = intr.slab.op
    states = op.states
    nu, nu_mass = meas.nu, meas.nu_mass
    if n_values is None:
        n_values = [n for n in range(2 * n0 + 2, intr.n_max + 1)]
    e1, env, env_pot, splits = [], [], [], {}
    for n in n_values:
        parts = _split(n, n0)
        if parts is None:
            raise PreconditionError(f"n={n} admits no split with l, j >= n0={n0}")
        k, l, j = parts
        splits[n] = [k, l, j]
        mask = _plan_mask(plan, l, states)
        dev = np.abs(intr.q(n)[mask, :] - 1.0 / nu_mass)
        e1.append(float(np.max(dev)))
        v_out = op.potential.profile_floor(plan.level(j))
        env_pot.append(1.0 / v_out)
        env.append(1.0 / v_out + gap**k)
    C_env = float(np.max(np.asarray(e1) / np.asarray(env)))
    return ProgressiveTrace(
        n_values=list(n_values), e1=e1, envelope=env, envelope_potential=env_pot,
        splits=splits, C_envelope=C_env, fit=fit_geometric(n_values, e1),
    )


@dataclass
class QuasiErgodicTrace:
    n_values: list
    qe: list
    splits: dict
    fit: GeometricFit | None = None

    def to_dict(self):
        return {"n_values": self.n_values, "qe": self.qe,
                "splits": {str(k): v for k, v in self.splits.items()},
                "fit": self.fit.to_dict() if self.fit else None}


def quasi_ergodicity(intr: IntrinsicKernel, meas: MeasureSet, plan, n0: int,
                     n_values=None) -> QuasiErgodicTrace:
    """Quasi-ergodic trace sup_{x in A_l} |U_n f(x)/U_n 1(x) - m(f)| on unit l1(m).

    The extreme family f = 1_{y}/m(y) turns the inner supremum into
    max_y |u_n(x,y) |phi0_hat|_1 / (phi0_hat(y) U_n 1(x)) - 1|, evaluated in
    the ground-state normalization (all factors order one, no underflow):
    u_n/U_n1 = q_n(x,y) phi0_hat(y) / sum_z q_n(x,z) phi0_hat(z) mu(z).
    """
    op = intr.slab.op
    states = op.states
    if n_values is None:
        n_values = [n for n in range(2 * n0 + 2, intr.n_max + 1)]
    weights = intr.gs.phi0_hat * op.mu
    qe, splits = [], {}
    for n in n_values:
        parts = _split(n, n0)
        if parts is None:
            raise PreconditionError(f"n={n} admits no split with l, j >= n0={n0}")
        k, l, j = parts
        splits[n] = [k, l, j]
        mask = _plan_mask(plan, l, states)
        qn = intr.q(n)[mask, :]
        mass = qn @ weights                       # U_n 1 in eigen-normalization
        ratio = qn * meas.phi0_hat_l1 / mass[:, None]
        qe.append(float(np.max(np.abs(ratio - 1.0))))
    return QuasiErgodicTrace(n_values=list(n_values), qe=qe, splits=splits,
                             fit=fit_geometric(n_values, qe))


@dataclass
class KappaEquivalence:
    n_values: list
    ratio: list                  # e1(n) / qe(n)
    c: float                     # single constant with ratio in [1/c, c]
    restricted_to: list          # admissible suffix actually compared

    def to_dict(self):
        return {"n_values": self.n_values, "ratio": self.ratio, "c": self.c,
                "restricted_to": self.restricted_to}


def kappa_equivalence(prog: ProgressiveTrace, quasi: QuasiErgodicTrace,
                      qe_cap: float = 1.0) -> KappaEquivalence:
    """Two-sided rate comparison of the intrinsic and quasi-ergodic traces.

    The reverse implication between the traces needs the quasi-ergodic side
    below one, so the comparison is restricted to that suffix (and to entries
    above the numerical floor).
    """
    if prog.n_values != quasi.n_values:
        raise PreconditionError("traces must share the n grid and plan")
    ns, ratios, used = [], [], []
    for n, a, b in zip(prog.n_values, prog.e1, quasi.qe):
        if b >= qe_cap or a <= FLOOR or b <= FLOOR:
            continue
        ns.append(n)
        ratios.append(a / b)
        used.append(n)
    if not ratios:
        raise PreconditionError("no admissible overlap between the traces")
    c = float(max(max(ratios), 1.0 / min(ratios)))
    return KappaEquivalence(n_values=ns, ratio=ratios, c=c, restricted_to=used)


# ---------------------------------------------------------------------------
# interpolated l^p rates
# ---------------------------------------------------------------------------

@dataclass
class LpTrace:
    p: float
    n_values: list
    e_p: list
    fit: GeometricFit | None

    def to_dict(self):
        return {"p": self.p, "n_values": self.n_values, "e_p": self.e_p,
                "fit": self.fit.to_dict() if self.fit else None}


def lp_rates(intr: IntrinsicKernel, meas: MeasureSet, plan, p: float,
             n_values=None) -> LpTrace:
    """sup over A_{n-1} of the l^p(nu) -> value deviation norm, with its dual
    norm computed in closed form from each centred row."""
    if not 1.0 < p < math.inf:
        raise PreconditionError("p must lie in (1, infinity)")
    q_dual = p / (p - 1.0)
    op = intr.slab.op
    states = op.states
    nu, nu_mass = meas.nu, meas.nu_mass
    if n_values is None:
        n_values = list(range(2, intr.n_max + 1))
    out = []
    for n in n_values:
        mask = _plan_mask(plan, n - 1, states)
        rows = np.abs(intr.q(n)[mask, :] - 1.0 / nu_mass)
        norms = (rows**q_dual @ nu) ** (1.0 / q_dual)
        out.append(float(np.max(norms)))
    return LpTrace(p=p, n_values=list(n_values), e_p=out,
                   fit=fit_geometric(n_values, out))
