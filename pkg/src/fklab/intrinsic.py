"""Ground-state transformed kernels and the stationary / quasi-stationary measures.

The intrinsic kernel q_n(x,y) = u_n(x,y) / (lambda0^n phi0(x) phi0_hat(y))
defines a conservative Markov kernel against nu(y) = phi0 phi0_hat mu; it is
always derived from the u_n tables of a slab rather than by iterating a
transformed matrix, so the eigenvalue normalization is exact per entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .semigroup import HeatKernelSlab
from .spectral import GroundState

LOG_SPACE_THRESHOLD = 600.0


@dataclass
class MeasureSet:
    """nu, its normalization, and the quasi-stationary measures m, m_hat."""

    nu: np.ndarray
    nu_mass: float                  # total nu mass on the window, <= 1
    nu_bar: np.ndarray              # nu / |nu|
    m: np.ndarray                   # phi0_hat mu, normalized to probability
    m_hat: np.ndarray               # phi0 mu, normalized
    phi0_l1: float
    phi0_hat_l1: float
    tail_bounds: dict = field(default_factory=dict)  # heuristic l1 tails

    def to_dict(self):
        return {
            "nu_mass": self.nu_mass,
            "phi0_l1": self.phi0_l1,
            "phi0_hat_l1": self.phi0_hat_l1,
            "tail_bounds": self.tail_bounds,
        }


def measures(gs: GroundState, op) -> MeasureSet:
    """Window measures from a converged ground state.

    The l1 normalizers carry heuristic tail estimates shaped like the
    ground-state comparability bounds with window-measured constants; they are
    labelled heuristic because those constants are themselves empirical.
    """
    nu = gs.phi0 * gs.phi0_hat * op.mu
    nu_mass = float(nu.sum())
    phi0_l1 = float(np.sum(gs.phi0 * op.mu))
    phi0_hat_l1 = float(np.sum(gs.phi0_hat * op.mu))

    tails = {}
    tail = op.kernel.row_tail_bound(op.radius)
    if tail is not None:
        i0 = op.index_of(op.exhaustion.x0)
        c1 = float(np.max(gs.phi0 * op.V / op.p[:, i0]))
        c2 = float(np.max(gs.phi0_hat / op.p_hat[:, i0]))
        v_floor = op.potential.profile_floor(op.radius)
        tails = {
            "phi0_l1": c1 * tail / v_floor,
            "phi0_hat_l1": c2 * tail,
            "status": "heuristic",
        }

    return MeasureSet(
        nu=nu,
        nu_mass=nu_mass,
        nu_bar=nu / nu_mass,
        m=gs.phi0_hat * op.mu / phi0_hat_l1,
        m_hat=gs.phi0 * op.mu / phi0_l1,
        phi0_l1=phi0_l1,
        phi0_hat_l1=phi0_hat_l1,
        tail_bounds=tails,
    )


@dataclass
class IntrinsicKernel:
    """Lazy view of the q_n tables of a slab together with their sup functionals."""

    slab: HeatKernelSlab
    gs: GroundState
    log_lam0: float
    K_full: dict = field(default_factory=dict)      # sup q_n over the window
    conservativity_defect: dict = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return self.slab.n_max

    @property
    def nu(self) -> np.ndarray:
        return self.gs.phi0 * self.gs.phi0_hat * self.slab.op.mu

    def q(self, n: int) -> np.ndarray:
        """q_n table; switches to log space when lambda0^n would under/overflow."""
        gs = self.gs
        scale = n * abs(self.log_lam0)
        denom_outer = np.outer(gs.phi0, gs.phi0_hat)
        if scale <= LOG_SPACE_THRESHOLD:
            return self.slab.u[n] / (gs.lam0**n * denom_outer)
        with np.errstate(divide="ignore"):
            log_q = (
                np.log(self.slab.u[n])
                - n * self.log_lam0
                - np.log(denom_outer)
            )
        out = np.exp(log_q)
        if not np.all(np.isfinite(out)):
            raise NumericalError(f"q_{n} overflowed even in log space")
        return out

    def q_hat(self, n: int) -> np.ndarray:
        return self.q(n).T

    def doeblin_floor(self) -> float:
        return float(np.min(self.q(1)))


def intrinsic_kernels(slab: HeatKernelSlab, gs: GroundState) -> IntrinsicKernel:
    """Wrap a slab with its ground-state transform; record sup and mass defects."""
    if gs.lam0 <= 0:
        raise NumericalError("ground state eigenvalue must be positive")
    intr = IntrinsicKernel(slab=slab, gs=gs, log_lam0=float(np.log(gs.lam0)))
    nu = intr.nu
    for n in range(1, slab.n_max + 1):
        qn = intr.q(n)
        intr.K_full[n] = float(np.max(qn))
        intr.conservativity_defect[n] = float(np.max(np.abs(qn @ nu - 1.0)))
    return intr
