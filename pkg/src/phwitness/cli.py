"""Command-line front end.

Single results go to stdout as JSON; sweeps are written as CSV.  Exit codes:
0 ok, 2 parse error, 3 state invariant violation, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import states
from .linalg import Dims, DimensionError
from .optimize import OptimizerConfig, build_report, classify, label_for, maximize_i_ph
from .sampler import DEFAULT_RESAMPLES, estimate_i_ph, sample_shots
from .states import InvalidStateError, StateFormatError
from .unitaries import local_unitaries
from .witness import (
    chsh_max,
    degree_of_entanglement,
    i_ph,
    joint_probabilities,
    mems_formula,
    werner_formula,
)

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_IO = 0, 2, 3, 4
AUDIT_BAND = 1e-3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class SweepSpec:
    family: str
    theta_range: tuple[float, float] = (0.0, np.pi)
    alpha_range: tuple[float, float] = (0.0, 1.0)
    gamma_range: tuple[float, float] = (0.0, 1.0)
    steps: int = 11
    out: str | None = None

    def __post_init__(self):
        if self.family not in ("werner", "mems"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")

    def grid(self) -> list[tuple[float, ...]]:
        if self.family == "mems":
            return [(g,) for g in np.linspace(*self.gamma_range, self.steps)]
        thetas = np.linspace(*self.theta_range, self.steps)
        alphas = np.linspace(*self.alpha_range, self.steps)
        return [(t, a) for t in thetas for a in alphas]

    @property
    def columns(self) -> list[str]:
        keys = ["gamma"] if self.family == "mems" else ["theta", "alpha"]
        return keys + [
            "i_ph_max_numeric", "i_ph_formula", "abs_diff",
            "ppt_min_eig", "chsh_max", "concurrence", "p_e",
        ]


def _sweep_point(args) -> list[float]:
    family, point, cfg = args
    if family == "mems":
        rho = states.mems(point[0])
        formula = mems_formula(point[0])
    else:
        rho = states.werner(*point)
        formula = werner_formula(*point)
    value = maximize_i_ph(rho, cfg).best_value
    return [
        *point, value, formula, abs(value - formula),
        states.ppt_min_eigenvalue(rho), chsh_max(rho), states.concurrence(rho),
        degree_of_entanglement(value),
    ]


def _map(func, items, workers: int):
    if workers <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def run_sweep(spec: SweepSpec, cfg: OptimizerConfig, workers: int = 1) -> list[list[float]]:
    """Rows in grid order (theta slow, alpha fast for the Werner family)."""
    return _map(_sweep_point, [(spec.family, p, cfg) for p in spec.grid()], workers)


def write_sweep_csv(spec: SweepSpec, rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(spec.columns)
        for row in rows:
            writer.writerow([f"{v:.12g}" for v in row])


def _audit_state(args) -> dict:
    dims, kind, terms, seed, index, cfg = args
    key = [seed, index]
    if kind == "separable":
        rho = states.random_separable(dims, terms, key)
    else:
        rho = states.random_state(dims, key)
    ppt = states.ppt_min_eigenvalue(rho)
    value = maximize_i_ph(rho, cfg).best_value
    label = label_for(value)
    in_band = abs(ppt) < AUDIT_BAND
    return {
        "index": index,
        "ppt_min_eig": ppt,
        "i_ph_max": value,
        "label": label,
        "in_band": in_band,
        "agree": (label == "entangled") == (ppt < 0.0),
    }


def run_audit(dims: Dims, n_states: int, seed: int, cfg: OptimizerConfig, kind: str = "random",
              terms: int = 4, workers: int = 1) -> dict:
    """Compare the maximized witness against the PPT oracle on a random ensemble.

    State ``k`` is drawn with seed ``(seed, k)``.  Agreement means the
    witness labels a state entangled exactly when its partial transpose
    has a negative eigenvalue; states with |ppt_min_eig| < 1e-3 are
    reported but excluded from the agreement count.
    """
    if kind not in ("random", "separable"):
        raise ValueError(f"unknown ensemble {kind!r}")
    jobs = [(dims, kind, terms, seed, k, cfg) for k in range(n_states)]
    records = _map(_audit_state, jobs, workers)
    scored = [r for r in records if not r["in_band"]]
    return {
        "dims": str(dims),
        "kind": kind,
        "n": n_states,
        "seed": seed,
        "restarts": cfg.restarts,
        "agreements": sum(r["agree"] for r in scored),
        "scored": len(scored),
        "boundary_excluded": n_states - len(scored),
        # every member of a separable ensemble is separable, whatever its PT spectrum says numerically
        "false_positives": sum(
            r["label"] == "entangled" and (kind == "separable" or r["ppt_min_eig"] >= 0.0) for r in records
        ),
        "false_negatives": sum(r["label"] != "entangled" and r["ppt_min_eig"] < 0.0 for r in scored),
        "records": records,
    }


# --- argument handling ---------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise CliError(f"cannot parse number list {text!r}", EXIT_PARSE) from exc


def _range(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise CliError(f"range must be 'lo,hi', got {text!r}", EXIT_PARSE)
    return vals[0], vals[1]


def _load_state(path) -> states.DensityMatrix:
    try:
        return states.load_state(path)
    except StateFormatError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    except (InvalidStateError, DimensionError) as exc:
        raise CliError(str(exc), EXIT_INVARIANT) from exc
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc


def _config(args) -> OptimizerConfig:
    try:
        cfg = OptimizerConfig.from_json(args.config) if getattr(args, "config", None) else OptimizerConfig()
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_IO) from exc
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad optimizer config: {exc}", EXIT_PARSE) from exc
    changes = {}
    if getattr(args, "restarts", None) is not None:
        changes["restarts"] = args.restarts
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    try:
        return cfg.replace(**changes)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc


def _settings(args, dims: Dims) -> np.ndarray:
    nb = 3 if dims.b == 2 else 8
    u = _floats(args.u) if args.u else [0.0] * 3
    v = _floats(args.v) if args.v else [0.0] * nb
    if len(u) != 3 or len(v) != nb:
        raise CliError(f"--u needs 3 angles and --v needs {nb} values for dims {dims}", EXIT_PARSE)
    return np.array(u + v)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _write(path, writer) -> None:
    try:
        writer(path)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def cmd_state(args) -> int:
    try:
        if args.family == "werner":
            rho = states.werner(args.theta, args.alpha)
        elif args.family == "mems":
            rho = states.mems(args.gamma)
        elif args.family == "bell":
            rho = states.bell_state()
        elif args.family == "mixed":
            rho = states.maximally_mixed(Dims.parse(args.dims))
        elif args.family == "product":
            rho = states.pure([1, 0, 0, 0])
        elif args.family == "random":
            rho = states.random_state(Dims.parse(args.dims), args.seed)
        else:
            rho = states.random_separable(Dims.parse(args.dims), args.terms, args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    if args.out:
        _write(args.out, lambda p: states.save_state(rho, p))
    else:
        _emit(rho.to_dict())
    return EXIT_OK


def cmd_eval(args) -> int:
    rho = _load_state(args.state)
    params = _settings(args, rho.dims)
    u, v = local_unitaries(params, rho.dims)
    value = i_ph(rho, u, v)
    report = build_report(rho, params, value, OptimizerConfig(seed=0), restarts_used=0)
    out = report.to_dict()
    out["i_ph"] = value
    _emit(out)
    return EXIT_OK


def cmd_maximize(args) -> int:
    rho = _load_state(args.state)
    cfg = _config(args)
    _, report = classify(rho, cfg)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        if args.spec:
            data = json.loads(Path(args.spec).read_text())
            spec = SweepSpec(
                family=data["family"],
                theta_range=tuple(data.get("theta_range", (0.0, np.pi))),
                alpha_range=tuple(data.get("alpha_range", (0.0, 1.0))),
                gamma_range=tuple(data.get("gamma_range", (0.0, 1.0))),
                steps=int(data.get("steps", 11)),
                out=data.get("out"),
            )
            if data.get("config") and not args.config:
                args.config = data["config"]
        else:
            spec = SweepSpec(
                family=args.family,
                theta_range=_range(args.theta_range) if args.theta_range else (0.0, np.pi),
                alpha_range=_range(args.alpha_range) if args.alpha_range else (0.0, 1.0),
                gamma_range=_range(args.gamma_range) if args.gamma_range else (0.0, 1.0),
                steps=args.steps,
                out=args.out,
            )
    except OSError as exc:
        raise CliError(f"cannot read sweep spec: {exc}", EXIT_IO) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad sweep spec: {exc}", EXIT_PARSE) from exc
    out = args.out or spec.out
    if not out:
        raise CliError("sweep needs an output path (--out)", EXIT_PARSE)
    cfg = _config(args)
    try:
        Path(out).open("w").close()
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc
    rows = run_sweep(spec, cfg, workers=args.workers)
    _write(out, lambda p: write_sweep_csv(spec, rows, p))
    diffs = [row[spec.columns.index("abs_diff")] for row in rows]
    _emit({"out": str(out), "rows": len(rows), "max_abs_diff": max(diffs)})
    return EXIT_OK


def cmd_audit(args) -> int:
    try:
        dims = Dims.parse(args.dims)
    except (ValueError, DimensionError) as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    cfg = _config(args)
    summary = run_audit(dims, args.n_states, args.seed, cfg, kind=args.kind, terms=args.terms,
                        workers=args.workers)
    if args.out:
        _write(args.out, lambda p: Path(p).write_text(json.dumps(summary, indent=1)))
        summary = {k: v for k, v in summary.items() if k != "records"}
    _emit(summary)
    return EXIT_OK


def cmd_sample(args) -> int:
    rho = _load_state(args.state)
    if args.optimize:
        cfg = _config(args)
        u, v = maximize_i_ph(rho, cfg).settings()
    else:
        u, v = local_unitaries(_settings(args, rho.dims), rho.dims)
    table = joint_probabilities(rho, u, v)
    if args.shots < 1:
        raise CliError("--shots must be >= 1", EXIT_PARSE)
    record = sample_shots(table, args.shots, args.seed)
    if args.counts_out:
        _write(args.counts_out, record.to_csv)
    report = estimate_i_ph(record, resamples=args.resamples, seed=args.seed)
    out = report.to_dict()
    out["seed"] = args.seed
    out["i_ph_exact"] = i_ph(rho, u, v)
    _emit(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phwitness", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def optimizer_flags(p):
        p.add_argument("--restarts", type=int, help="multistart count (default 32)")
        p.add_argument("--seed", type=int, help="optimizer seed (default 0)")
        p.add_argument("--config", help="optimizer config JSON")

    p = sub.add_parser("state", help="write a state JSON file")
    p.add_argument("--family", required=True,
                   choices=["werner", "mems", "bell", "mixed", "product", "random", "separable"])
    p.add_argument("--theta", type=float, default=np.pi / 4)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--dims", default="2x2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--terms", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("eval", help="witness value at fixed settings")
    p.add_argument("--state", required=True)
    p.add_argument("--u", help="phi,theta,psi for party A (default identity); write --u=-1,... for negatives")
    p.add_argument("--v", help="3 Euler angles (qubit) or 8 Gell-Mann coefficients (qutrit)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("maximize", help="maximize the witness and classify the state")
    p.add_argument("--state", required=True)
    optimizer_flags(p)
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("sweep", help="sweep a state family and write CSV")
    p.add_argument("--family", choices=["werner", "mems"])
    p.add_argument("--spec", help="sweep spec JSON (family, ranges, steps, out, config)")
    p.add_argument("--theta-range")
    p.add_argument("--alpha-range")
    p.add_argument("--gamma-range")
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    optimizer_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("audit", help="compare the witness with the PPT oracle on random states")
    p.add_argument("--dims", default="2x2")
    p.add_argument("--n-states", type=int, default=100)
    p.add_argument("--kind", choices=["random", "separable"], default="random")
    p.add_argument("--terms", type=int, default=4, help="product terms per separable mixture")
    p.add_argument("--out", help="write the full summary with per-state records here")
    p.add_argument("--workers", type=int, default=1)
    optimizer_flags(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sample", help="simulate finite-shot statistics and estimate the witness")
    p.add_argument("--state", required=True)
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--optimize", action="store_true", help="sample at the maximizing settings")
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--resamples", type=int, default=DEFAULT_RESAMPLES)
    p.add_argument("--counts-out", help="write counts CSV (i,j,count)")
    p.add_argument("--restarts", type=int)
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "audit" and args.seed is None:
        args.seed = 0
    if getattr(args, "command", None) == "sweep" and not (args.family or args.spec):
        parser.error("sweep needs --family or --spec")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"phwitness: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
