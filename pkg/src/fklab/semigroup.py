"""Truncated Feynman-Kac operators and n-step heat-kernel tables.

All tables are kept in density normalization: u_1(x,y) = p(x,y)/V(x) and
u_{n+1}(x,y) = sum_z u_n(x,z) p(z,y) mu(z)/V(z), so the composition rule
u_{m+n}(x,y) = sum_z u_m(x,z) u_n(z,y) mu(z) holds exactly on the window.

Window tables are monotone lower bounds of the infinite-space kernels (all
path weights are positive); each slab carries a per-entry certificate
u_n <= u_n^(window) + eps_n built from the one-step escape mass, plus an
optional empirical doubling gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, PreconditionError, ResourceError
from .kernels import AssumptionAudit, DualKernelPair
from .potentials import Potential
from .space import Exhaustion

MATRIX_BUDGET_BYTES = 4 << 30


@dataclass
class TruncatedOperator:
    """Dense window restriction of the weighted transfer operator and its dual."""

    kernel: DualKernelPair
    potential: Potential
    exhaustion: Exhaustion
    radius: int
    states: list
    U: np.ndarray          # U[x][z] = P(x,z)/V(x)
    U_hat: np.ndarray      # U_hat[x][z] = P-hat(x,z)/V(z)
    p: np.ndarray
    p_hat: np.ndarray
    mu: np.ndarray
    V: np.ndarray
    kill: np.ndarray
    escape: np.ndarray     # per-row one-step mass leaving the window

    @property
    def size(self) -> int:
        return len(self.states)

    def index_of(self, x) -> int:
        return self.states.index(x)

    def indices_of(self, states) -> np.ndarray:
        lookup = {s: i for i, s in enumerate(self.states)}
        return np.array([lookup[s] for s in states], dtype=np.int64)

    def row_sum_deficiency(self) -> np.ndarray:
        """1 - V(x) * sum_z U[x][z] per row (window escape + kill)."""
        return 1.0 - self.V * self.U.sum(axis=1)


def assemble(kernel: DualKernelPair, potential: Potential, exhaustion: Exhaustion,
             radius: int, audit_result: AssumptionAudit | None = None,
             allow_unaudited: bool = False) -> TruncatedOperator:
    """Materialize the window operator matrices on B_radius."""
    if audit_result is not None and not audit_result.passed and not allow_unaudited:
        raise PreconditionError(
            f"assumption audit failed ({audit_result.verdicts}); "
            "pass allow_unaudited=True to proceed with diagnostics"
        )
    states = list(exhaustion.window(radius))
    w = len(states)
    if 3 * 8 * w * w > MATRIX_BUDGET_BYTES:
        raise ResourceError(f"window of {w} states exceeds the dense-matrix budget")
    P = kernel.P_matrix(states, states)
    mu = kernel.mu_vector(states)
    V = potential.values(states)
    kill = kernel.kill_vector(states)
    p = P / mu[None, :]
    p_hat = kernel.phat_matrix(states, states)
    U = P / V[:, None]
    U_hat = kernel.Phat_matrix(states, states) / V[None, :]
    escape = 1.0 - kill - P.sum(axis=1)
    return TruncatedOperator(
        kernel=kernel, potential=potential, exhaustion=exhaustion, radius=radius,
        states=states, U=U, U_hat=U_hat, p=p, p_hat=p_hat, mu=mu, V=V, kill=kill,
        escape=np.maximum(escape, 0.0),
    )


@dataclass
class HeatKernelSlab:
    """Stack of n-step kernel tables u_n, their duals, and truncation certificates.

    u[0] is the Kronecker table; compositions apply the mu weight explicitly.
    eps_outer(n) together with the row/column factors gives the analytic
    per-entry certificate; gap holds the empirical doubling gap when computed.
    """

    op: TruncatedOperator
    n_max: int
    inner_radius: int
    u: np.ndarray            # shape (n_max+1, w, w)
    u_hat: np.ndarray | None
    escape_sup: float
    gap: np.ndarray | None = None   # doubling gap, same shape as u
    _inner: np.ndarray = field(default=None, repr=False)

    @property
    def states(self):
        return self.op.states

    def inner_indices(self) -> np.ndarray:
        if self._inner is None:
            inner = set(self.op.exhaustion.window(self.inner_radius))
            self._inner = np.array(
                [i for i, s in enumerate(self.op.states) if s in inner], dtype=np.int64
            )
        return self._inner

    def eps(self, n: int) -> np.ndarray:
        """Analytic per-entry bound on u_n - u_n^(window), from escape mass.

        A path contributing to the defect leaves the window at one of its
        n-1 interior times; its weight is at most V(x)^-1 V_-^{-(n-1)}.
        """
        if n == 0:
            return np.zeros((self.op.size, self.op.size))
        v_min = self.op.potential.v_min
        factor = (n - 1) * self.escape_sup * v_min ** (-(n - 1))
        return factor * np.outer(1.0 / self.op.V, 1.0 / self.op.mu)

    def width(self, n: int) -> np.ndarray:
        """Tightest available certificate width for u_n, per entry."""
        eps = self.eps(n)
        if self.gap is not None:
            return np.minimum(eps, 2.0 * self.gap[n])
        return eps

    def lower(self, n: int) -> np.ndarray:
        return self.u[n]

    def upper(self, n: int) -> np.ndarray:
        return self.u[n] + self.width(n)


def heat_kernels(op: TruncatedOperator, n_max: int, inner_radius: int | None = None,
                 doubling_op: TruncatedOperator | None = None,
                 want_dual: bool = True) -> HeatKernelSlab:
    """Compute u_n, dual tables and certificates for n = 0..n_max.

    When doubling_op (same model on B_{2 radius}) is given, the per-entry
    doubling gap u_n^(2N) - u_n^(N) is recorded as the empirical certificate.
    want_dual=False skips the independently recursed dual stack (u_hat is
    then None); use it for large windows where only u_n is consumed.
    """
    if n_max < 1:
        raise ConfigurationError("n_max must be >= 1")
    if inner_radius is None:
        inner_radius = max(op.radius // 2, 1)
    if inner_radius > op.radius:
        raise ConfigurationError("inner radius cannot exceed the window radius")
    w = op.size
    stacks = 2 if want_dual else 1
    if (n_max + 1) * stacks * 8 * w * w > MATRIX_BUDGET_BYTES:
        raise ResourceError("heat-kernel slab exceeds the dense-matrix budget")

    u = np.empty((n_max + 1, w, w))
    u[0] = np.eye(w)
    u[1] = op.p / op.V[:, None]
    G = op.p * (op.mu / op.V)[:, None]          # G[z,y] = mu(z) p(z,y) / V(z)
    for n in range(1, n_max):
        u[n + 1] = u[n] @ G
    u_hat = None
    if want_dual:
        u_hat = np.empty_like(u)
        u_hat[0] = np.eye(w)
        u_hat[1] = op.p_hat / op.V[None, :]
        G_hat = op.mu[:, None] * op.p_hat / op.V[None, :]
        for n in range(1, n_max):
            u_hat[n + 1] = u_hat[n] @ G_hat

    gap = None
    if doubling_op is not None:
        if doubling_op.radius < op.radius:
            raise ConfigurationError("doubling operator must cover a larger window")
        sub = doubling_op.indices_of(op.states)
        Gd = doubling_op.p * (doubling_op.mu / doubling_op.V)[:, None]
        gap = np.empty_like(u)
        gap[0] = 0.0
        cur = doubling_op.p / doubling_op.V[:, None]
        gap[1] = cur[np.ix_(sub, sub)] - u[1]
        for n in range(1, n_max):
            cur = cur @ Gd
            gap[n + 1] = cur[np.ix_(sub, sub)] - u[n + 1]
        gap = np.maximum(gap, 0.0)

    return HeatKernelSlab(
        op=op, n_max=n_max, inner_radius=inner_radius, u=u, u_hat=u_hat,
        escape_sup=float(np.max(op.escape)), gap=gap,
    )


def direct_two_step_table(op: TruncatedOperator, n: int) -> np.ndarray:
    """S_n(x,y) = V(x)^-1 sum_z p(x,z) p(z,y) mu(z)/V(z)^(n-1) over the window."""
    if n < 2:
        raise PreconditionError("the two-step comparison table needs n >= 2")
    wz = op.mu / op.V ** (n - 1)
    return (op.p * wz[None, :]) @ op.p / op.V[:, None]


def direct_two_step_tail(op: TruncatedOperator, n: int,
                         target_radius: int) -> np.ndarray | None:
    """Per-entry bound on the z-tail of S_n for y within B_target_radius."""
    kernel = op.kernel
    bound = kernel.entry_bound_at_distance(op.radius - target_radius)
    if bound is None:
        sup_p = kernel.sup_density_bound()
        if sup_p is None:
            return None
        p_out = sup_p * np.ones(op.size)
    else:
        p_out = np.full(op.size, bound) / op.mu
    v_floor = op.potential.profile_floor(op.radius)
    col = p_out / v_floor ** (n - 1)
    return np.outer(op.escape / op.V, col)


@dataclass
class SandwichReport:
    """Entrywise verification of the two-sided direct-step kernel bounds."""

    n_range: list
    c1: float
    c2: float
    violations: int
    worst_lower_slack: float   # min over entries of u_n / (c1^(n-2) S_n)
    worst_upper_slack: float   # max over entries of u_n / (c2^(n-2) S_n)
    assumptions_met: bool

    def to_dict(self):
        return {
            "n_range": list(self.n_range), "c1": self.c1, "c2": self.c2,
            "violations": self.violations,
            "worst_lower_slack": self.worst_lower_slack,
            "worst_upper_slack": self.worst_upper_slack,
            "assumptions_met": self.assumptions_met,
        }


def check_sandwich(slab: HeatKernelSlab, audit_result: AssumptionAudit,
                   n_range=None) -> SandwichReport:
    """Check c1^(n-2) S_n <= u_n <= c2^(n-2) S_n with c1 = c_minus, c2 = 2 c_star.

    The comparison is entrywise on the inner window, widened by the slab's
    truncation certificate on the left and the S_n z-tail on the right.
    """
    op = slab.op
    if n_range is None:
        n_range = range(2, slab.n_max + 1)
    assumptions_met = audit_result.passed
    c1 = audit_result.c_minus
    c2 = 2.0 * audit_result.c_star
    inner = slab.inner_indices()
    sel = np.ix_(inner, inner)

    violations = 0
    worst_lower = np.inf
    worst_upper = 0.0
    for n in n_range:
        S = direct_two_step_table(op, n)
        S_tail = direct_two_step_tail(op, n, slab.inner_radius)
        u_n = slab.u[n][sel]
        eps = slab.width(n)[sel]
        s_in = S[sel]
        s_hi = s_in + (S_tail[sel] if S_tail is not None else 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            lower_ok = c1 ** (n - 2) * s_in <= u_n + eps
            upper_ok = u_n <= c2 ** (n - 2) * s_hi
            violations += int(np.sum(~lower_ok) + np.sum(~upper_ok))
            pos = s_in > 0.0
            ratio = u_n[pos] / s_in[pos]
            if ratio.size:
                worst_lower = min(worst_lower, float(np.min(ratio) / c1 ** (n - 2)))
                if np.isfinite(c2):
                    worst_upper = max(worst_upper, float(np.max(ratio) / c2 ** (n - 2)))
    return SandwichReport(
        n_range=list(n_range), c1=c1, c2=c2, violations=violations,
        worst_lower_slack=worst_lower, worst_upper_slack=worst_upper,
        assumptions_met=assumptions_met,
    )


def correction_term(kernel: DualKernelPair, potential: Potential,
                    exhaustion: Exhaustion, B, n: int, x, y) -> float:
    """Weighted two-step transfer from x to y through B^c inside the shared
    exhaustion level: V(x)^-1 sum_z p(x,z) p(z,y) mu(z)/V(z)^(n-1),
    z running over (A_{alpha(x)} ∩ A_{alpha(y)}) \\ B.
    """
    B = set(B)
    if x in B or y in B:
        raise PreconditionError("correction term is defined for x, y outside B")
    level = min(exhaustion.alpha(x), exhaustion.alpha(y))
    zs = [z for z in exhaustion.window(level) if z not in B]
    if not zs:
        return 0.0
    p_xz = kernel.p_matrix([x], zs)[0]
    p_zy = kernel.p_matrix(zs, [y])[:, 0]
    mu_z = kernel.mu_vector(zs)
    v_z = potential.values(zs)
    v_x = float(potential.values([x])[0])
    return float(np.sum(p_xz * p_zy * mu_z / v_z ** (n - 1)) / v_x)


def correction_tables(op: TruncatedOperator, B, n_values) -> dict:
    """F_n tables over the whole window for each n in n_values.

    Entries are valid (and the mask True) only for x, y outside B; the z-sum
    is grouped by first-appearance level so each level contributes a low-rank
    update to all pairs whose levels dominate it.
    """
    ex = op.exhaustion
    states = op.states
    alpha = ex.alpha_array(states)
    in_B = np.array([s in set(B) for s in states])
    w = len(states)
    out = {n: np.zeros((w, w)) for n in n_values}
    levels = np.unique(alpha)
    for a in levels:
        zsel = np.where((alpha == a) & ~in_B)[0]
        if len(zsel) == 0:
            continue
        row_ok = alpha >= a
        p_xz = op.p[:, zsel]
        p_zy = op.p[zsel, :]
        for n in n_values:
            wz = op.mu[zsel] / op.V[zsel] ** (n - 1)
            contrib = (p_xz * wz[None, :]) @ p_zy
            out[n][np.ix_(row_ok, row_ok)] += contrib[np.ix_(row_ok, row_ok)]
    for n in n_values:
        out[n] /= op.V[:, None]
        out[n][in_B, :] = np.nan
        out[n][:, in_B] = np.nan
    return {"tables": out, "valid": ~in_B}
