"""Model container tying a space, kernel and potential, with cached pipeline stages."""

from __future__ import annotations

from .errors import ConfigurationError
from .intrinsic import intrinsic_kernels, measures
from .kernels import (
    PolynomialStepLaw,
    audit,
    build_metric_kernel,
    build_nn_kernel,
    build_nonreversible_kernel,
    build_product_kernel,
    build_subordinate_kernel,
)
from .potentials import build_potential
from .semigroup import assemble, heat_kernels
from .space import Exhaustion, build_space
from .spectral import principal_eigs, spectral_gap


class Model:
    """A concrete experiment: space + exhaustion + kernel + potential.

    Pipeline stages are memoized per window radius so analyses can share the
    expensive slabs.
    """

    def __init__(self, name, space, exhaustion, kernel, potential,
                 allow_unaudited: bool = False):
        self.name = name
        self.space = space
        self.exhaustion = exhaustion
        self.kernel = kernel
        self.potential = potential
        self.allow_unaudited = allow_unaudited
        self._audits = {}
        self._ops = {}
        self._gs = {}
        self._slabs = {}

    def audit(self, radius: int):
        if radius not in self._audits:
            self._audits[radius] = audit(self.kernel, self.exhaustion, radius)
        return self._audits[radius]

    def operator(self, radius: int):
        if radius not in self._ops:
            self._ops[radius] = assemble(
                self.kernel, self.potential, self.exhaustion, radius,
                audit_result=self.audit(radius) if not self.allow_unaudited else None,
                allow_unaudited=self.allow_unaudited,
            )
        return self._ops[radius]

    def ground_state(self, radius: int, tol: float = 1e-12, with_gap: bool = False):
        if radius not in self._gs:
            self._gs[radius] = principal_eigs(self.operator(radius), tol=tol)
        gs = self._gs[radius]
        if with_gap and gs.gap is None:
            spectral_gap(self.operator(radius), gs)
        return gs

    def slab(self, radius: int, n_max: int, doubling: bool = False,
             want_dual: bool = True):
        key = (radius, n_max, doubling, want_dual)
        if key not in self._slabs:
            doubling_op = self.operator(2 * radius) if doubling else None
            self._slabs[key] = heat_kernels(
                self.operator(radius), n_max, doubling_op=doubling_op,
                want_dual=want_dual,
            )
        return self._slabs[key]

    def intrinsic(self, radius: int, n_max: int):
        slab = self.slab(radius, n_max)
        gs = self.ground_state(radius)
        return intrinsic_kernels(slab, gs)

    def measures(self, radius: int):
        return measures(self.ground_state(radius), self.operator(radius))


#: Table cell -> (kernel profile, potential profile) parameter bundles.
CELLS = {
    "poly-log": dict(kernel="metric", beta=3.0, kappa=0.0, pot="log", rho=1.0),
    "poly-poly": dict(kernel="metric", beta=3.0, kappa=0.0, pot="poly", rho=1.0),
    "poly-exp": dict(kernel="metric", beta=3.0, kappa=0.0, pot="exp", rho=1.0),
    "exp-log": dict(kernel="metric", beta=3.0, kappa=0.5, pot="log", rho=1.0),
    "exp-poly": dict(kernel="metric", beta=3.0, kappa=0.5, pot="poly", rho=1.0),
    "exp-exp": dict(kernel="metric", beta=3.0, kappa=0.5, pot="exp", rho=1.0),
}

AIUC_CELLS = ("poly-poly", "poly-exp", "exp-exp")
PIUC_CELLS = ("poly-log", "exp-poly", "exp-log")


def cell_model(cell: str, **overrides) -> Model:
    """Reference model for one profile/potential cell on the line."""
    if cell not in CELLS:
        raise ConfigurationError(f"unknown cell {cell!r}; expected one of {sorted(CELLS)}")
    params = dict(CELLS[cell])
    params.update(overrides)
    space = build_space("line")
    ex = Exhaustion(space)
    kernel = build_metric_kernel(space, beta=params["beta"], kappa=params["kappa"])
    pot = build_potential(params["pot"], params["rho"], ex)
    return Model(f"cell:{cell}", space, ex, kernel, pot)


def reference_model(**overrides) -> Model:
    """The REF model: polynomial kernel beta=3 with linear potential on the line."""
    return cell_model("poly-poly", **overrides)


def nn_model(lazy: float = 0.5, pot: str = "poly", rho: float = 1.0) -> Model:
    """Lazy nearest-neighbour walk (fails the direct-step audit by design)."""
    space = build_space("line")
    ex = Exhaustion(space)
    kernel = build_nn_kernel(space, lazy=lazy)
    potential = build_potential(pot, rho, ex)
    return Model(f"nn:{pot}", space, ex, kernel, potential, allow_unaudited=True)


def nonreversible_model(eta: float = 0.3, beta: float = 3.0, pot: str = "poly",
                        rho: float = 1.0) -> Model:
    space = build_space("line")
    ex = Exhaustion(space)
    kernel = build_nonreversible_kernel(space, "weighted", beta=beta, eta=eta)
    potential = build_potential(pot, rho, ex)
    return Model("nonreversible", space, ex, kernel, potential)


def subordinate_model(s: float = 1.5, lazy: float = 0.5, n_cut: int = 64,
                      pot: str = "poly", rho: float = 1.0) -> Model:
    space = build_space("line")
    ex = Exhaustion(space)
    nn = build_nn_kernel(space, lazy=lazy)
    kernel = build_subordinate_kernel(nn, PolynomialStepLaw(s), n_cut=n_cut)
    potential = build_potential(pot, rho, ex)
    return Model("subordinate", space, ex, kernel, potential)


def product_model(beta1: float = 3.0, kappa1: float = 0.0, beta2: float = 3.0,
                  kappa2: float = 0.0, pot: str = "poly", rho: float = 1.0) -> Model:
    line = build_space("line")
    k1 = build_metric_kernel(line, beta=beta1, kappa=kappa1)
    k2 = build_metric_kernel(build_space("line"), beta=beta2, kappa=kappa2)
    kernel = build_product_kernel(k1, k2)
    ex = Exhaustion(kernel.space)
    potential = build_potential(pot, rho, ex)
    return Model("product", kernel.space, ex, kernel, potential)
