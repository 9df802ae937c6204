"""Command-line entry point: experiment orchestration, caching and reports.

Stages run in dependency order (audit -> assemble -> heat kernels -> spectral
-> intrinsic -> classification -> ergodic); heat-kernel slabs are cached in
FKLAB_CACHE_DIR (or <out>/.cache) keyed by the artifact hash of the config.
Artifacts are byte-stable across reruns; wall-clock timings go to a sidecar
run.log only.

Exit codes: 0 success, 1 bad/missing configuration, 2 assumption-audit
failure (without --allow-unaudited), 3 truncation certificate wider than the
configured tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigurationError, FkLabError, TruncationError
from .ergodic import progressive_rates, quasi_ergodicity, uniform_ergodicity
from .iuc import (
    TrivialPlan,
    TrivialExhaustion,
    classify_cell,
    heat_kernel_comparability,
    piuc_exhaustion,
    recommended_n0,
    table1_exhaustion,
)
from .errors import ModelError
from .mc import simulate_fk
from .spectral import spectral_gap

SCHEMA_VERSION = 1
SUBCOMMANDS = ("audit", "spectral", "heatkernel", "iuc", "ergodic",
               "mc-validate", "table1", "full")


def state_str(state) -> str:
    if isinstance(state, tuple):
        return "|".join(state_str(part) for part in state)
    return str(state)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _log(out: Path, message: str) -> None:
    with open(out / "run.log", "a") as fh:
        fh.write(f"[{time.strftime('%Y-%m-%dT%H:%M:%S')}] {message}\n")


class Runner:
    def __init__(self, cfg: ExperimentConfig, out: Path, allow_unaudited: bool):
        self.cfg = cfg
        self.out = out
        self.allow_unaudited = allow_unaudited
        self.model = cfg.build_model(allow_unaudited=allow_unaudited)
        self.report = {"schema_version": SCHEMA_VERSION,
                       "config_hash": cfg.artifact_hash(),
                       "model": self.model.kernel.describe()}

    # -- cache ----------------------------------------------------------

    def _cache_dir(self) -> Path:
        env = os.environ.get("FKLAB_CACHE_DIR")
        base = Path(env) if env else self.out / ".cache"
        base.mkdir(parents=True, exist_ok=True)
        return base

    def slab(self):
        radius, n_max = self.cfg.trunc, self.cfg.n_max
        key = self._cache_dir() / f"slab-{self.cfg.artifact_hash()}.npz"
        slab = self.model.slab(radius, n_max)
        if not key.exists():
            np.savez_compressed(key, u=slab.u, u_hat=slab.u_hat)
        else:
            cached = np.load(key)
            if cached["u"].shape == slab.u.shape:
                slab.u[:] = cached["u"]
                if slab.u_hat is not None and "u_hat" in cached:
                    slab.u_hat[:] = cached["u_hat"]
        return slab

    # -- stages ----------------------------------------------------------

    def stage_audit(self) -> int:
        aud = self.model.audit(self.cfg.trunc)
        self.report["audit"] = aud.to_dict()
        _write_json(self.out / "audit.json", aud.to_dict())
        if not aud.passed and not self.allow_unaudited:
            return 2
        return 0

    def stage_spectral(self) -> int:
        gs = self.model.ground_state(self.cfg.trunc,
                                     tol=float(self.cfg.get("tol.spectral")),
                                     with_gap=True)
        op = self.model.operator(self.cfg.trunc)
        self.report["spectral"] = gs.to_dict()
        _write_json(self.out / "spectral.json", gs.to_dict())
        with open(self.out / "ground_state.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x_index", "state", "phi0", "phi0hat"])
            for i, s in enumerate(op.states):
                w.writerow([i, state_str(s), repr(gs.phi0[i]), repr(gs.phi0_hat[i])])
        print(f"lambda0 = {gs.lam0!r}  gap = {gs.gap!r}  "
              f"residuals = ({gs.residual:.3e}, {gs.residual_hat:.3e})")
        return 0

    def stage_heatkernel(self) -> int:
        slab = self.slab()
        inner = slab.inner_indices()
        states = slab.op.states
        with open(self.out / "heatkernel.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "x", "y", "u_lower", "u_upper"])
            for n in range(1, slab.n_max + 1):
                lower = slab.lower(n)
                upper = slab.upper(n)
                for i in inner:
                    for j in inner:
                        w.writerow([n, state_str(states[i]), state_str(states[j]),
                                    repr(lower[i, j]), repr(upper[i, j])])
        tol = self.cfg.get("tol.certificate")
        widths = {n: float(np.max(slab.width(n)[np.ix_(inner, inner)])
                           / np.max(slab.u[n]))
                  for n in range(1, slab.n_max + 1)}
        self.report["heatkernel"] = {"relative_widths": widths,
                                     "escape_sup": slab.escape_sup}
        _write_json(self.out / "heatkernel.json", self.report["heatkernel"])
        if tol is not None and max(widths.values()) > float(tol):
            raise TruncationError(
                f"certificate width {max(widths.values()):.3e} exceeds "
                f"{tol}; suggest doubling run.trunc to {2 * self.cfg.trunc}",
                suggested_radius=2 * self.cfg.trunc)
        return 0

    def stage_iuc(self) -> int:
        radius = self.cfg.trunc
        cell = self.cfg.cell_label()
        result = classify_cell(self.model, cell, radius)
        self.report["classification"] = result
        _write_json(self.out / "iuc_report.json", result)

        gs = self.model.ground_state(radius)
        aud = self.model.audit(radius)
        slab = self.slab()
        plan = None
        if result["classification"] == "pIUC" and result["plan"].get("kind") != "window-capped":
            plan = piuc_exhaustion(self.model.kernel, self.model.potential,
                                   self.model.exhaustion, gs, aud, radius)
        comp = heat_kernel_comparability(
            slab, gs, plan, aud, B=list(self.model.exhaustion.window(3)))
        with open(self.out / "comparability.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "inner_min", "inner_max", "outer_min", "outer_max",
                        "sup_q_restricted", "sup_q_full"])
            for n in comp.n_values:
                w.writerow([n, repr(comp.inner_min[n]), repr(comp.inner_max[n]),
                            repr(comp.outer_min[n]), repr(comp.outer_max[n]),
                            repr(comp.sup_q_restricted.get(n, float("nan"))),
                            repr(comp.sup_q_full[n])])
        print(f"cell {cell}: {result['classification']} (n0 = {result['n0']})")
        return 0

    def stage_ergodic(self) -> int:
        radius = self.cfg.trunc
        gs = self.model.ground_state(radius, with_gap=True)
        slab = self.slab()
        intr = self.model.intrinsic(radius, self.cfg.n_max)
        meas = self.model.measures(radius)
        unif = uniform_ergodicity(intr, meas)

        cls = self.report.get("classification") or classify_cell(
            self.model, self.cfg.cell_label(), radius)
        if cls["classification"] == "pIUC" and cls.get("plan", {}).get("kind") != "window-capped":
            plan = piuc_exhaustion(self.model.kernel, self.model.potential,
                                   self.model.exhaustion, gs,
                                   self.model.audit(radius), radius)
        else:
            plan = TrivialPlan(self.model.exhaustion, radius)
        n0 = self.cfg.get("run.n0") or 2
        n_values = [n for n in range(2 * n0 + 2, self.cfg.n_max + 1)]
        summary = {"uniform": unif.to_dict()}
        if n_values:
            prog = progressive_rates(intr, meas, plan, n0, n_values=n_values,
                                     gap=gs.gap)
            quasi = quasi_ergodicity(intr, meas, plan, n0, n_values=n_values)
            summary["progressive"] = prog.to_dict()
            summary["quasi"] = quasi.to_dict()
            e1 = dict(zip(prog.n_values, prog.e1))
            qe = dict(zip(quasi.n_values, quasi.qe))
            env = dict(zip(prog.n_values, prog.envelope))
        else:
            e1, qe, env = {}, {}, {}
        self.report["ergodic"] = summary
        _write_json(self.out / "ergodic.json", summary)
        with open(self.out / "ergodic_trace.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "e_inf", "e_1", "qe", "envelope"])
            for n, e in zip(unif.n_values, unif.e_inf):
                w.writerow([n, repr(e), repr(e1.get(n, float("nan"))),
                            repr(qe.get(n, float("nan"))),
                            repr(env.get(n, float("nan")))])
        _write_json(self.out / "intrinsic_summary.json", {
            "K_n": {str(n): v for n, v in intr.K_full.items()},
            "doeblin_floor": intr.doeblin_floor(),
            "conservativity_defect": {str(n): v for n, v
                                      in intr.conservativity_defect.items()},
            "measures": meas.to_dict(),
        })
        inner = slab.inner_indices()
        states = slab.op.states
        with open(self.out / "intrinsic.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "x", "y", "q_n"])
            for n in range(1, slab.n_max + 1):
                qn = intr.q(n)
                for i in inner:
                    for j in inner:
                        w.writerow([n, state_str(states[i]), state_str(states[j]),
                                    repr(qn[i, j])])
        if unif.fit:
            print(f"e_inf geometric rate {unif.fit.rate:.6f} "
                  f"(R^2 = {unif.fit.r_squared:.4f})")
        return 0

    def stage_mc(self) -> int:
        paths = int(self.cfg.get("run.paths") or 10**5)
        seed = int(self.cfg.get("run.seed"))
        n = min(5, self.cfg.n_max)
        slab = self.slab()
        op = slab.op
        x0 = self.model.exhaustion.x0
        targets = [op.states[op.index_of(x0) + 1] if op.size > 1 else x0, "mass"]
        ests = simulate_fk(self.model.kernel, self.model.potential,
                           self.model.exhaustion, x0, n, targets=targets,
                           paths=paths, seed=seed)
        i0 = op.index_of(x0)
        deltas = {}
        for est in ests:
            if est.target == "mass":
                truth = float(slab.u[n][i0] @ op.mu)
            else:
                j = op.index_of(targets[0])
                truth = float(slab.u[n][i0, j] * op.mu[j])
            deltas[str(est.target)] = {
                "matrix": truth, "mc": est.value, "std_error": est.std_error,
                "sigmas": (est.value - truth) / est.std_error if est.std_error else 0.0,
            }
        payload = {"n": n, "paths": paths, "seed": seed,
                   "estimates": [e.to_dict() for e in ests], "deltas": deltas}
        self.report["mc"] = payload
        _write_json(self.out / "mc.json", payload)
        worst = max(abs(d["sigmas"]) for d in deltas.values())
        print(f"mc-validate: worst |delta| = {worst:.2f} standard errors")
        return 0


def cmd_table1(args) -> int:
    cell = args.cell
    if cell is None:
        print("table1 needs --cell (poly-log | exp-poly | exp-log)", file=sys.stderr)
        return 1
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig({})
    beta = float(cfg.get("kernel.beta"))
    kappa = float(cfg.get("kernel.kappa"))
    rho = float(cfg.get("potential.rho"))
    c_tilde = cfg.get("iuc.ctilde") or 1.0
    eps = float(cfg.get("iuc.eps"))
    if cell in ("exp-poly", "exp-log") and kappa == 0.0:
        kappa = 0.5
    n_hi = args.n or 10
    try:
        row = {n: table1_exhaustion(cell, n, beta, kappa, rho, c_tilde, eps)
               for n in range(1, n_hi + 1)}
    except TrivialExhaustion as exc:
        print(f"trivial exhaustion: {exc}")
        return 0
    print(f"cell={cell} beta={beta} kappa={kappa} rho={rho} "
          f"c_tilde={c_tilde} eps={eps}")
    print(" ".join(f"k({n})={k}" for n, k in row.items()))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fklab",
        description="Feynman-Kac chain laboratory: heat kernels, ground states "
                    "and ergodic rates of weighted Markov chains.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=Path, help="experiment configuration file")
    parser.add_argument("--out", type=Path, default=Path("fklab-out"))
    parser.add_argument("--trunc", type=int, help="override run.trunc")
    parser.add_argument("--nmax", type=int, help="override run.nmax")
    parser.add_argument("--seed", type=int, help="override run.seed")
    parser.add_argument("--allow-unaudited", action="store_true")
    parser.add_argument("--cell", help="profile cell for table1")
    parser.add_argument("--n", type=int, help="largest plan index for table1")
    args = parser.parse_args(argv)

    if args.subcommand == "table1":
        return cmd_table1(args)

    if args.config is None:
        print("missing --config", file=sys.stderr)
        return 1
    try:
        cfg = ExperimentConfig.from_file(args.config)
    except (OSError, ConfigurationError, json.JSONDecodeError) as exc:
        print(f"bad configuration: {exc}", file=sys.stderr)
        return 1
    cfg.override(**{"run.trunc": args.trunc, "run.nmax": args.nmax,
                    "run.seed": args.seed})
    missing = cfg.missing_keys()
    if missing:
        print("missing configuration keys: " + ", ".join(missing), file=sys.stderr)
        return 1

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        runner = Runner(cfg, out, allow_unaudited=args.allow_unaudited)
    except (ConfigurationError, ModelError) as exc:
        print(f"bad configuration: {exc}", file=sys.stderr)
        return 1

    stages = {
        "audit": ["audit"],
        "spectral": ["audit", "spectral"],
        "heatkernel": ["audit", "heatkernel"],
        "iuc": ["audit", "spectral", "heatkernel", "iuc"],
        "ergodic": ["audit", "spectral", "heatkernel", "ergodic"],
        "mc-validate": ["audit", "mc"],
        "full": ["audit", "spectral", "heatkernel", "iuc", "ergodic"]
                + (["mc"] if cfg.get("run.paths") else []),
    }[args.subcommand]

    try:
        for stage in stages:
            started = time.time()
            code = getattr(runner, f"stage_{stage}")()
            _log(out, f"stage {stage} finished in {time.time() - started:.2f}s")
            if code != 0:
                if stage == "audit":
                    print("assumption audit failed; see audit.json "
                          "(use --allow-unaudited for diagnostics)", file=sys.stderr)
                return code
    except TruncationError as exc:
        print(f"truncation certificate failure: {exc}", file=sys.stderr)
        return 3
    except FkLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    _write_json(out / "run_report.json", runner.report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
