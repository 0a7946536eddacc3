"""Command-line entry point: ``frspace {verify,eval,theorems,geodesic}``.

Exit codes: 0 success / all checks pass, 1 a check failed or the command
could not complete, 2 usage error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cartan import cartan
from .errors import FrspaceError, StepRejected
from .fields import bundled_field, bundled_fields, integrate_geodesic, jet_at, load_field
from .jets import load_jet, save_jet
from .landsberg import (
    dotA_closed,
    dotA_numeric,
    fitted_k,
    landsberg_to_berwald_probe,
    PRECONDITION_TOL,
)
from .metric import metric_K, metric_tensor
from .spray import spray_eval
from .verify import PROFILES, SUITES, run_verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# argument helpers ------------------------------------------------------------------


def _vector(text: str) -> list[float]:
    """'1, 2, 3' or '1 2 3' -> [1.0, 2.0, 3.0]."""
    parts = text.replace(",", " ").split()
    if not parts:
        raise argparse.ArgumentTypeError("empty vector")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _seeds(text: str) -> list[int]:
    """'5' -> 0..4, '3:7' -> 3..6, '1,4,9' -> that list."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi = (int(p) for p in text.split(":"))
            seeds = list(range(lo, hi))
        elif "," in text or " " in text:
            seeds = _int_list(text)
        else:
            seeds = list(range(int(text)))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed specification {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("no seeds selected")
    return seeds


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _dim(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError(f"dimension must be >= 2, got {v}")
    return v


def _dims(text: str) -> list[int]:
    dims = _int_list(text)
    if not dims or any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError(f"dimensions must be >= 2, got {text!r}")
    return dims


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(_to_jsonable(data), indent=2) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _resolve_field(spec: str):
    """A path to a field JSON file, or the name of a bundled field."""
    p = Path(spec)
    if p.suffix == ".json" or p.exists():
        return load_field(p)
    return bundled_field(spec)


# verify ----------------------------------------------------------------------------------


def cmd_verify(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    reports = [
        run_verification(s, args.dim, args.samples, args.seed, args.tol_profile, args.jobs).to_dict()
        for s in suites
    ]
    passed = all(r["pass"] for r in reports)
    doc = {
        "schema_version": reports[0]["schema_version"],
        "version": __version__,
        "suite": args.suite,
        "dim": args.dim,
        "samples": args.samples,
        "seed": args.seed,
        "tol_profile": args.tol_profile,
        "timestamp": reports[0]["timestamp"],
        "pass": passed,
        "suites": [{k: r[k] for k in ("suite", "pass", "cells")} for r in reports],
    }
    _emit(doc, args.out)
    for r in reports:
        bad = [c["check_id"] for c in r["cells"] if not c["pass"]]
        status = "PASS" if r["pass"] else "FAIL " + ", ".join(bad)
        print(f"{r['suite']:10s} {len(r['cells']):3d} checks  {status}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


# eval ----------------------------------------------------------------------------------------


def evaluate_point(jet, y) -> dict:
    """Every pointwise object at (jet, y), as plain JSON-ready data."""
    y = np.asarray(y, dtype=float)
    K, _, sc = metric_K(jet, y)
    me = metric_tensor(jet, y)
    ca = cartan(jet, y)
    sp = spray_eval(jet, y)
    out = {
        "dim": jet.dim,
        "y": y,
        "c": jet.c,
        "g": jet.g,
        "K": K,
        "scalars": {k: getattr(sc, k) for k in sc.__dataclass_fields__},
        "y_low": me.y_low,
        "g_ij": me.gmat,
        "g_inv": me.ginv,
        "det_g": me.det_g,
        "cartan": {
            "A_ijk": ca.A3,
            "A_i": ca.A1,
            "A_norm2": ca.AA,
            "X": ca.X,
            "e_i": ca.e,
            "main_scalar": ca.I,
        },
        "spray": {
            "G": sp.G,
            "E": sp.E,
            "G_k": sp.G1,
            "bdot": sp.bdot,
            "Db_n": sp.Dbn,
        },
    }
    Adot = dotA_numeric(jet, y)
    land = {"Adot_numeric": Adot, "norm_Adot": float(np.linalg.norm(Adot))}
    k, resid = fitted_k(jet)
    if jet.charge_constant and jet.g != 0.0 and resid <= PRECONDITION_TOL * max(1.0, abs(k)):
        m1, m2, closed = dotA_closed(jet, y, k)
        land.update(k=k, m1=m1, m2=m2, Adot_closed=closed)
    out["landsberg"] = land
    return out


def cmd_eval(args) -> int:
    if args.field is not None:
        field = _resolve_field(args.field)
        if args.x is None:
            raise _UsageError("--x is required with --field")
        x = np.asarray(args.x, dtype=float)
        if x.shape != (field.dim,):
            raise _UsageError(f"--x has {x.size} entries, field has N = {field.dim}")
        jet = jet_at(field, x)
        source = {"field": field.name or args.field, "x": x}
    else:
        jet = load_jet(args.jet)
        source = {"jet": str(args.jet)}
    y = np.asarray(args.y, dtype=float)
    if y.shape != (jet.dim,):
        raise _UsageError(f"--y has {y.size} entries, jet has N = {jet.dim}")
    if args.save_jet:
        save_jet(jet, args.save_jet)
    doc = {"version": __version__, "source": source, **evaluate_point(jet, y)}
    _emit(doc, args.out)
    return EXIT_OK


# theorems -------------------------------------------------------------------------------------


def cmd_theorems(args) -> int:
    probe = landsberg_to_berwald_probe(
        args.dim, args.seeds, args.k_grid, args.g_grid, args.c_grid, n_dirs=args.dirs, jobs=args.jobs
    )
    verdict_counts: dict[str, int] = {}
    for cell in probe["cells"]:
        verdict_counts[cell["berwald_verdict"]] = verdict_counts.get(cell["berwald_verdict"], 0) + 1
    berwald_consistent = all(
        (c["berwald_verdict"] == "NOT_BERWALD") == (c["k"] != 0 and c["g"] != 0) for c in probe["cells"]
    )
    ok = probe["zero_cells_match_k0_or_g0"] and berwald_consistent
    doc = {
        "version": __version__,
        "timestamp": _timestamp(),
        "grid": {
            "dims": args.dim,
            "seeds": args.seeds,
            "k": args.k_grid,
            "g": args.g_grid,
            "c": args.c_grid,
            "dirs": args.dirs,
        },
        "pass": ok,
        "berwald_verdicts": dict(sorted(verdict_counts.items())),
        "berwald_verdict_matches_k0_or_g0": berwald_consistent,
        **probe,
    }
    _emit(doc, args.out)
    print(
        f"{len(probe['cells'])} cells; zero cells == (k=0 or g=0): {probe['zero_cells_match_k0_or_g0']}; "
        f"max rel err closed/numeric {probe['max_rel_err_closed_numeric']:.2e}",
        file=sys.stderr,
    )
    return EXIT_OK if ok else EXIT_FAIL


# geodesic --------------------------------------------------------------------------------------


def cmd_geodesic(args) -> int:
    field = _resolve_field(args.field)
    for name in ("x0", "y0"):
        if len(getattr(args, name)) != field.dim:
            raise _UsageError(f"--{name} needs {field.dim} entries")
    try:
        traj = integrate_geodesic(
            field, args.x0, args.y0, args.dt, args.steps, mode=args.mode, drift_limit=args.drift_limit
        )
    except StepRejected as exc:
        if exc.trajectory is not None and args.out:
            _write_csv(exc.trajectory, args.out)
        raise
    _write_csv(traj, args.out)
    print(
        f"field={field.name or args.field} mode={traj.mode} steps={args.steps} dt={args.dt:g} "
        f"K0={float(traj.K[0])!r} K_drift={traj.K_drift:.3e}"
    )
    return EXIT_OK


def _write_csv(traj, out):
    if out in (None, "-"):
        traj.to_csv(sys.stdout)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            traj.to_csv(fh)


# parser --------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="frspace", description="Finsleroid-regular space toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run identity checks over seeded random jets")
    v.add_argument("--dim", type=_dim, default=3)
    v.add_argument("--samples", type=_positive_int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol-profile", choices=PROFILES, default="default")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--out", help="report JSON path (default: stdout)")
    v.add_argument("--jobs", type=_positive_int, help="worker processes (default: $FRSPACE_JOBS or CPU count)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="evaluate every object at one (x, y)")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--field", help=f"field JSON file or bundled name ({', '.join(bundled_fields())})")
    src.add_argument("--jet", help="point-jet JSON file")
    e.add_argument("--x", type=_vector, help="base point (with --field)")
    e.add_argument("--y", type=_vector, required=True, help="tangent vector")
    e.add_argument("--out")
    e.add_argument("--save-jet", help="also write the evaluated jet to this file")
    e.set_defaults(func=cmd_eval)

    t = sub.add_parser("theorems", help="Landsberg/Berwald grid probe")
    t.add_argument("--dim", type=_dims, default=[2, 3, 4], help="dimensions, e.g. '2,3,4'")
    t.add_argument("--seeds", type=_seeds, default=list(range(5)), help="count, 'lo:hi' or list")
    t.add_argument("--k-grid", type=_vector, default=[0.0, 0.3, -0.7, 1.2])
    t.add_argument("--g-grid", type=_vector, default=[0.0, 0.5, -1.0, 1.6])
    t.add_argument("--c-grid", type=_vector, default=[0.2, 0.5, 0.8, 0.95])
    t.add_argument("--dirs", type=_positive_int, default=4, help="tangent directions per cell")
    t.add_argument("--out")
    t.add_argument("--jobs", type=_positive_int)
    t.set_defaults(func=cmd_theorems)

    g = sub.add_parser("geodesic", help="integrate a geodesic with RK4, write CSV")
    g.add_argument("--field", required=True, help="field JSON file or bundled name")
    g.add_argument("--x0", type=_vector, required=True)
    g.add_argument("--y0", type=_vector, required=True)
    g.add_argument("--dt", type=_positive_float, default=1e-2)
    g.add_argument("--steps", type=_positive_int, default=1000)
    g.add_argument("--mode", choices=("finsler", "riemannian"), default="finsler")
    g.add_argument("--drift-limit", type=_positive_float, default=1e-4)
    g.add_argument("--out", help="CSV path (default: stdout)")
    g.set_defaults(func=cmd_geodesic)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"frspace {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FrspaceError, OSError, ValueError, ArithmeticError) as exc:
        print(f"frspace {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
