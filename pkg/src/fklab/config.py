"""Experiment configuration: flat dotted keys, JSON alternative, stable hashing.

The canonical text format is one `key = value` per line with `#` comments;
a file whose first non-blank character is `{` is parsed as a flat JSON object
with the same keys.  The cache key hashes only the keys that affect the
numerical artifact, in canonical order, so cosmetic config edits do not
invalidate caches.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .kernels import (
    PolynomialStepLaw,
    build_metric_kernel,
    build_nn_kernel,
    build_nonreversible_kernel,
    build_product_kernel,
    build_subordinate_kernel,
)
from .models import Model
from .potentials import build_potential
from .space import Exhaustion, build_space

#: keys that determine the numerical artifact (everything else is plumbing)
ARTIFACT_KEYS = (
    "space.kind", "space.d",
    "kernel.kind", "kernel.beta", "kernel.kappa", "kernel.eta", "kernel.shift",
    "kernel.s", "kernel.lazy", "kernel.ncut",
    "kernel.beta1", "kernel.kappa1", "kernel.beta2", "kernel.kappa2",
    "potential.kind", "potential.rho", "potential.table_path",
    "run.trunc", "run.inner", "run.nmax", "run.n0", "run.seed", "run.paths",
    "iuc.eps", "iuc.cell", "iuc.ctilde",
)

DEFAULTS = {
    "space.kind": "line",
    "space.d": 1,
    "kernel.kind": "metric",
    "kernel.beta": 3.0,
    "kernel.kappa": 0.0,
    "kernel.eta": 0.3,
    "kernel.shift": 1,
    "kernel.s": 1.5,
    "kernel.lazy": 0.5,
    "kernel.ncut": 64,
    "kernel.beta1": 3.0,
    "kernel.kappa1": 0.0,
    "kernel.beta2": 3.0,
    "kernel.kappa2": 0.0,
    "potential.kind": "poly",
    "potential.rho": 1.0,
    "potential.table_path": None,
    "run.inner": None,
    "run.n0": None,
    "run.seed": 1234,
    "run.paths": 0,
    "iuc.eps": 0.5,
    "iuc.cell": None,
    "iuc.ctilde": None,
    "tol.spectral": 1e-12,
    "tol.certificate": None,
}

REQUIRED = ("space.kind", "kernel.kind", "potential.kind", "run.trunc", "run.nmax")

_INT_KEYS = {"space.d", "kernel.shift", "kernel.ncut", "run.trunc", "run.inner",
             "run.nmax", "run.n0", "run.seed", "run.paths"}
_FLOAT_KEYS = {"kernel.beta", "kernel.kappa", "kernel.eta", "kernel.s",
               "kernel.lazy", "kernel.beta1", "kernel.kappa1", "kernel.beta2",
               "kernel.kappa2", "potential.rho", "iuc.eps", "iuc.ctilde",
               "tol.spectral", "tol.certificate"}


def _coerce(key: str, value):
    if value is None or value == "":
        return None
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    return str(value)


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        stripped = text.lstrip()
        if stripped.startswith("{"):
            raw = json.loads(text)
            values = {k: _coerce(k, v) for k, v in raw.items()}
            return cls(values)
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigurationError(f"line {lineno}: expected key = value")
            key, _, val = body.partition("=")
            values[key.strip()] = _coerce(key.strip(), val.strip())
        return cls(values)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_text(fh.read())

    def get(self, key: str):
        if key in self.values:
            return self.values[key]
        if key in DEFAULTS:
            return DEFAULTS[key]
        raise ConfigurationError(f"unknown configuration key: {key}")

    def missing_keys(self) -> list:
        return [k for k in REQUIRED if self.values.get(k) is None
                and DEFAULTS.get(k) is None and k not in self.values]

    def override(self, **kwargs) -> None:
        for key, value in kwargs.items():
            if value is not None:
                self.values[key] = _coerce(key, value)

    # -- derived quantities -------------------------------------------------

    @property
    def trunc(self) -> int:
        return int(self.get("run.trunc"))

    @property
    def inner(self) -> int:
        val = self.get("run.inner")
        return int(val) if val is not None else max(self.trunc // 2, 1)

    @property
    def n_max(self) -> int:
        return int(self.get("run.nmax"))

    def artifact_hash(self) -> str:
        payload = "\n".join(
            f"{k}={self.values.get(k, DEFAULTS.get(k))!r}" for k in ARTIFACT_KEYS
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def cell_label(self) -> str:
        cell = self.get("iuc.cell")
        if cell:
            return cell
        r = "exp" if float(self.get("kernel.kappa")) > 0 else "poly"
        w = {"log": "log", "poly": "poly", "exp": "exp"}.get(
            self.get("potential.kind"), self.get("potential.kind")
        )
        return f"{r}-{w}"

    def build_model(self, allow_unaudited: bool = False) -> Model:
        kind = self.get("kernel.kind")
        if kind == "product":
            line = build_space("line")
            k1 = build_metric_kernel(line, self.get("kernel.beta1"),
                                     self.get("kernel.kappa1"))
            k2 = build_metric_kernel(build_space("line"), self.get("kernel.beta2"),
                                     self.get("kernel.kappa2"))
            kernel = build_product_kernel(k1, k2)
            space = kernel.space
        else:
            space = build_space(self.get("space.kind"), d=int(self.get("space.d")))
            if kind == "metric":
                kernel = build_metric_kernel(space, self.get("kernel.beta"),
                                             self.get("kernel.kappa"))
            elif kind == "nonreversible":
                variant = self.values.get("kernel.variant", "weighted")
                kernel = build_nonreversible_kernel(
                    space, variant, beta=self.get("kernel.beta"),
                    eta=self.get("kernel.eta"), shift=int(self.get("kernel.shift")),
                )
            elif kind == "nn":
                kernel = build_nn_kernel(space, lazy=self.get("kernel.lazy"))
            elif kind == "subordinate":
                nn = build_nn_kernel(space, lazy=self.get("kernel.lazy"))
                kernel = build_subordinate_kernel(
                    nn, PolynomialStepLaw(self.get("kernel.s")),
                    n_cut=int(self.get("kernel.ncut")),
                )
            else:
                raise ConfigurationError(f"unknown kernel kind {kind!r}")
        exhaustion = Exhaustion(kernel.space)
        potential = build_potential(
            self.get("potential.kind"), float(self.get("potential.rho")),
            exhaustion, table_path=self.get("potential.table_path"),
        )
        return Model(self.cell_label(), kernel.space, exhaustion, kernel,
                     potential, allow_unaudited=allow_unaudited)
