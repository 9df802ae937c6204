"""Principal eigendata of the truncated transfer operator.

The window matrices are strictly positive under the direct-step assumptions,
so the top eigenvalue is simple with positive left/right eigenvectors; plain
power iteration from the all-ones vector is the production path, a dense
full-spectrum solve is kept for small test oracles only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .semigroup import TruncatedOperator

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200_000


@dataclass
class GroundState:
    """Eigentriple (lambda0, phi0, phi0_hat) on a window, l2(mu)-normalized."""

    lam0: float
    lam0_dual: float
    phi0: np.ndarray
    phi0_hat: np.ndarray
    residual: float
    residual_hat: float
    iterations: int
    mu: np.ndarray
    gap: float | None = None     # |lambda1| / lambda0, filled by spectral_gap

    @property
    def nu_mass(self) -> float:
        """sum phi0 phi0_hat mu; positive and <= 1 by Cauchy-Schwarz."""
        return float(np.sum(self.phi0 * self.phi0_hat * self.mu))

    def to_dict(self) -> dict:
        return {
            "lambda0": self.lam0,
            "lambda0_dual": self.lam0_dual,
            "residual": self.residual,
            "residual_hat": self.residual_hat,
            "iterations": self.iterations,
            "gap": self.gap,
            "nu_mass": self.nu_mass,
        }


def _mu_norm(v: np.ndarray, mu: np.ndarray) -> float:
    return float(np.sqrt(np.sum(mu * v * v)))


def _power_iteration(A: np.ndarray, mu: np.ndarray, tol: float, max_iter: int):
    """Return (lambda, vector, residual, iterations) for the dominant eigenpair.

    Deterministic from the all-ones start; convergence needs both Rayleigh
    stabilization and the l2(mu) eigen-residual below tol * lambda.
    """
    v = np.ones(A.shape[0])
    v /= _mu_norm(v, mu)
    lam_prev = 0.0
    for it in range(1, max_iter + 1):
        w = A @ v
        lam = float(np.sum(mu * w * v))   # Rayleigh quotient, <v, v>_mu = 1
        nrm = _mu_norm(w, mu)
        if nrm == 0.0:
            raise NumericalError("power iteration collapsed to the zero vector")
        w /= nrm
        if abs(lam - lam_prev) <= tol * abs(lam):
            res = _mu_norm(A @ w - lam * w, mu)
            if res <= tol * abs(lam):
                return lam, w, res, it
        lam_prev = lam
        v = w
    raise NumericalError(
        f"power iteration did not converge in {max_iter} iterations; "
        f"last Rayleigh increment {abs(lam - lam_prev):.3e} "
        "(the spectral gap may be too small)"
    )


def principal_eigs(op: TruncatedOperator, tol: float = DEFAULT_TOL,
                   max_iter: int = DEFAULT_MAX_ITER) -> GroundState:
    """Ground states of the operator and its dual by power iteration."""
    lam, phi, res, it1 = _power_iteration(op.U, op.mu, tol, max_iter)
    lam_d, phi_hat, res_d, it2 = _power_iteration(op.U_hat, op.mu, tol, max_iter)
    return GroundState(
        lam0=lam, lam0_dual=lam_d, phi0=phi, phi0_hat=phi_hat,
        residual=res, residual_hat=res_d, iterations=it1 + it2, mu=op.mu,
    )


def dense_oracle(op: TruncatedOperator):
    """Full spectrum of the window operator (test oracle for small windows)."""
    vals, vecs = np.linalg.eig(op.U)
    order = np.argsort(-np.abs(vals))
    vals = vals[order]
    vecs = vecs[:, order]
    lam0 = float(np.real(vals[0]))
    phi = np.real(vecs[:, 0])
    if phi.sum() < 0:
        phi = -phi
    phi /= _mu_norm(phi, op.mu)
    return vals, lam0, phi


def spectral_gap(op: TruncatedOperator, gs: GroundState, tol: float = 1e-10,
                 max_rounds: int = 4000, krylov: int = 6) -> float:
    """|lambda1| / lambda0 via power iteration on the deflated operator.

    The principal pair is removed with the mu-weighted left eigenvector
    (phi0_hat * mu), which is exact also for non-reversible windows.  The
    modulus is read off a small Krylov block of the current iterate, so a
    complex conjugate dominant pair (rotating iterates) converges as well.
    """
    w_left = gs.phi0_hat * op.mu
    denom = float(w_left @ gs.phi0)
    if denom <= 0:
        raise NumericalError("deflation breakdown: left/right eigenvectors not paired")
    A = op.U - gs.lam0 * np.outer(gs.phi0, w_left) / denom

    def deflate(x):
        return x - gs.phi0 * (w_left @ x) / denom

    v = deflate(np.ones(op.size) + np.linspace(0.0, 1.0, op.size))
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise NumericalError("deflation breakdown: start vector annihilated")
    v /= nrm
    est_prev = None
    for _ in range(max_rounds):
        for _ in range(20):
            w = deflate(A @ v)
            nrm = np.linalg.norm(w)
            if nrm == 0.0:
                gs.gap = 0.0
                return 0.0
            v = w / nrm
        block = np.empty((op.size, krylov))
        block[:, 0] = v
        for j in range(1, krylov):
            block[:, j] = deflate(A @ block[:, j - 1])
        q, _ = np.linalg.qr(block)
        h = q.T @ A @ q
        est = float(np.max(np.abs(np.linalg.eigvals(h))))
        if est_prev is not None and abs(est - est_prev) <= tol * max(est, 1e-300):
            gs.gap = est / gs.lam0
            return gs.gap
        est_prev = est
    raise NumericalError("second-eigenvalue iteration did not converge")


@dataclass
class ComparabilityReport:
    """Spread of the ground states against the one-step density shape."""

    r1: float       # max/min of phi0(x) V(x) / p(x, x0) over the inner window
    r2: float       # max/min of phi0_hat(x) / p-hat(x, x0)
    sample_ratio1: float
    sample_ratio2: float

    def to_dict(self):
        return {"r1": self.r1, "r2": self.r2,
                "sample_ratio1": self.sample_ratio1,
                "sample_ratio2": self.sample_ratio2}


def ground_state_bounds(gs: GroundState, op: TruncatedOperator, x0=None,
                        inner_radius: int | None = None) -> ComparabilityReport:
    """Empirical two-sided comparability of phi0 with p(., x0)/V (dually for phi0_hat)."""
    ex = op.exhaustion
    if x0 is None:
        x0 = ex.x0
    if inner_radius is None:
        inner_radius = max(op.radius // 2, 1)
    inner = set(ex.window(inner_radius))
    sel = np.array([i for i, s in enumerate(op.states) if s in inner])
    i0 = op.index_of(x0)

    with np.errstate(divide="ignore"):
        # zero one-step density (short-range kernels) makes the bracket
        # infinite: the comparability bound fails outright there
        shape1 = gs.phi0[sel] * op.V[sel] / op.p[sel, i0]
        shape2 = gs.phi0_hat[sel] / op.p_hat[sel, i0]
    r1 = float(np.max(shape1) / np.min(shape1))
    r2 = float(np.max(shape2) / np.min(shape2))
    j = int(np.where(sel == i0)[0][0])
    return ComparabilityReport(
        r1=r1, r2=r2,
        sample_ratio1=float(shape1[j]), sample_ratio2=float(shape2[j]),
    )
