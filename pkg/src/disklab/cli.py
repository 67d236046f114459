"""Command-line front end.

Subcommands: classify, orbit, step, straighten, valiron, suite, catalog.
Wherever --map is accepted, "catalog:<name>" expands to the stored DSL.
Exit codes: 0 decided/passed, 1 input error, 2 undecided, 3 suite failure.
Output directory resolution: --out flag, else $HEINS_LAB_OUT, else
./disklab_out.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .maps import MapExpr, ParseError, parse_complex, parse_map
from .dynamics import (
    DEFAULT_SEEDS,
    ClassifyOptions,
    DynamicsError,
    classify,
    orbit,
    step_estimate,
)
from .straightening import straightening_limit
from .valiron import (
    NotParabolicError,
    NotPositiveStepError,
    arg_dichotomy_check,
    ratio_sequence,
    slope_propagation_check,
    slope_sequence,
)
from .catalog import CATALOG, resolve_map_text
from .reports import (
    ORBIT_CSV_HEADER,
    SCHEMA_VERSION,
    cpair,
    default_out_dir,
    dumps,
    orbit_rows,
    write_csv,
    write_json,
)
from .suite import classification_json, run_suite

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNDECIDED = 2
EXIT_SUITE_FAIL = 3


class CliError(Exception):
    pass


def _load_map(text: str) -> MapExpr:
    try:
        return parse_map(resolve_map_text(text))
    except ParseError as exc:
        raise CliError(f"--map: {exc}") from exc
    except KeyError as exc:
        raise CliError(f"--map: {exc.args[0]}") from exc


def _load_points(text: str, what: str) -> list[complex]:
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(parse_complex(part))
        except ParseError as exc:
            raise CliError(f"{what}: bad complex literal {part!r}: {exc}") from exc
    if not out:
        raise CliError(f"{what}: no points given")
    return out


def _stamp(obj: dict) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        **obj,
    }


def _cmd_classify(args) -> int:
    m = _load_map(args.map)
    opts = ClassifyOptions()
    if args.n is not None:
        opts = ClassifyOptions(n_wolff=args.n, n_multiplier=args.n)
    if args.tol is not None:
        opts = ClassifyOptions(
            seeds=opts.seeds, n_wolff=opts.n_wolff, n_multiplier=opts.n_multiplier,
            tol_class=args.tol,
        )
    if args.seeds is not None:
        seeds = tuple(_load_points(args.seeds, "--seeds"))
        opts = ClassifyOptions(
            seeds=seeds, n_wolff=opts.n_wolff, n_multiplier=opts.n_multiplier,
            tol_class=opts.tol_class, step_probes=seeds,
        )
    cls = classify(m, opts)
    out = classification_json(cls)
    out["map"] = args.map
    sys.stdout.write(dumps(_stamp(out)))
    return EXIT_UNDECIDED if cls.kind == "undecided" else EXIT_OK


def _cmd_orbit(args) -> int:
    m = _load_map(args.map)
    start = _load_points(args.start, "--start")[0]
    rec = orbit(m, start, args.n)
    out_dir = default_out_dir(args.out)
    csv_path = out_dir / "orbit.csv"
    write_csv(csv_path, ORBIT_CSV_HEADER, orbit_rows(rec))
    summary = _stamp(
        {
            "map": args.map,
            "start": cpair(rec.start),
            "model_used": rec.model.value,
            "n_requested": rec.n_requested,
            "n_recorded": len(rec.points) - 1,
            "stop_reason": rec.stop_reason,
            "d_first": rec.step_distances[0],
            "d_last": rec.step_distances[-1],
            "csv": csv_path.name,
        }
    )
    write_json(out_dir / "orbit_summary.json", summary)
    sys.stdout.write(dumps(summary))
    return EXIT_OK


def _cmd_step(args) -> int:
    m = _load_map(args.map)
    probes = _load_points(args.points, "--points")
    estimates = [step_estimate(m, p, args.n, args.eps_zero) for p in probes]
    out_dir = default_out_dir(args.out)
    summary = _stamp(
        {
            "map": args.map,
            "n": args.n,
            "eps_zero": args.eps_zero,
            "estimates": [
                {
                    "probe": cpair(s.probe),
                    "s_hat": s.s_hat,
                    "verdict": s.verdict,
                    "d_first": s.d_first,
                    "d_mid": s.d_mid,
                    "n_used": s.n_used,
                }
                for s in estimates
            ],
        }
    )
    write_json(out_dir / "step_summary.json", summary)
    sys.stdout.write(dumps(summary))
    if any(s.verdict == "undecided" for s in estimates):
        return EXIT_UNDECIDED
    return EXIT_OK


def _parse_grid(spec: str | None, base: complex, ref: complex):
    if spec is None or spec == "default":
        return None
    pts = [base, ref]
    try:
        for part in spec.split(","):
            radius_s, count_s = part.split(":")
            radius = float(radius_s)
            count = int(count_s)
            if not (0.0 < radius < 1.0) or count < 1:
                raise ValueError
            import math

            for k in range(count):
                ang = 2.0 * math.pi * k / count
                pts.append(radius * complex(math.cos(ang), math.sin(ang)))
    except ValueError as exc:
        raise CliError(
            f"--grid: expected 'default' or 'r:count[,r:count...]', got {spec!r}"
        ) from exc
    return pts


def _cmd_straighten(args) -> int:
    m = _load_map(args.map)
    base = _load_points(args.base, "--base")[0]
    ref = _load_points(args.ref, "--ref")[0]
    grid = _parse_grid(args.grid, base, ref)
    lim = straightening_limit(m, base, ref, grid, N=args.n, tol=args.tol)
    out_dir = default_out_dir(args.out)
    csv_path = out_dir / "straightening.csv"
    write_csv(
        csv_path,
        ["n", "grid_index", "re", "im", "abs"],
        [
            [lim.n_star, k, repr(v.real), repr(v.imag), repr(abs(v))]
            for k, v in enumerate(lim.values)
        ],
    )
    summary = _stamp(
        {
            "map": args.map,
            "base": cpair(lim.base),
            "ref": cpair(lim.ref),
            "n_star": lim.n_star,
            "converged": lim.converged,
            "sup_change": None if lim.sup_change == float("inf") else lim.sup_change,
            "constant": lim.constant,
            "constancy_sup": lim.constancy_sup,
            "collapsed_any": lim.collapsed_any,
            "csv": csv_path.name,
        }
    )
    write_json(out_dir / "straightening_summary.json", summary)
    sys.stdout.write(dumps(summary))
    return EXIT_OK if lim.converged else EXIT_UNDECIDED


def _cmd_valiron(args) -> int:
    m = _load_map(args.map)
    probes = _load_points(args.points, "--points")
    base = _load_points(args.base, "--base")[0]
    cls = classify(m)
    try:
        ratios = [ratio_sequence(m, p, base, args.n, cls) for p in probes]
        slopes = [slope_sequence(m, p, args.n, cls) for p in probes]
        prop = slope_propagation_check(m, probes, args.n, 1e-2, cls)
        dichotomy = None
        if cls.step_class == "positive":
            dichotomy = arg_dichotomy_check(m, probes, args.n, cls)
    except NotParabolicError as exc:
        raise CliError(f"refused: {exc}") from exc
    except NotPositiveStepError as exc:  # pragma: no cover - guarded above
        raise CliError(f"refused: {exc}") from exc
    out_dir = default_out_dir(args.out)
    csv_files = []
    for k, (rep, srep) in enumerate(zip(ratios, slopes)):
        path = out_dir / f"valiron_probe{k}.csv"
        rows = [
            [
                n,
                repr(q.real),
                repr(q.imag),
                repr(abs(q - 1.0)),
                repr(srep.args[n]) if n < len(srep.args) else "",
            ]
            for n, q in enumerate(rep.halfplane_ratios)
        ]
        write_csv(path, ["n", "q_re", "q_im", "abs_err", "arg"], rows)
        csv_files.append(path.name)
    summary = _stamp(
        {
            "map": args.map,
            "base": cpair(base),
            "n": args.n,
            "ratio": [
                {"probe": cpair(r.probe), "final_error": r.final_error,
                 "monotone_last_decade": r.monotone_last_decade}
                for r in ratios
            ],
            "slope": [
                {"probe": cpair(s.probe), "converged": s.converged,
                 "theta_hat": s.theta_hat, "angle_range": s.angle_range}
                for s in slopes
            ],
            "propagation": prop.kind,
            "arg_dichotomy": dichotomy.kind if dichotomy else None,
            "csv_files": csv_files,
        }
    )
    write_json(out_dir / "valiron_summary.json", summary)
    sys.stdout.write(dumps(summary))
    return EXIT_OK


def _cmd_suite(args) -> int:
    out_dir = default_out_dir(args.out)
    rollup = run_suite(args.catalog, out_dir, jobs=args.jobs, fuzz=args.fuzz)
    status = "PASS" if rollup["passed"] else "FAIL"
    sys.stdout.write(f"suite: {status} ({len(rollup['reports'])} maps)\n")
    for name in rollup["failed_checks"]:
        sys.stderr.write(f"failed check: {name}\n")
    return EXIT_OK if rollup["passed"] else EXIT_SUITE_FAIL


def _cmd_catalog(_args) -> int:
    for e in CATALOG:
        parts = [f"{e.name}: {e.dsl}", f"  class: {e.expected_class}"]
        if e.expected_step:
            parts.append(f"  step: {e.expected_step}")
        if e.expected_lambda is not None:
            parts.append(f"  lambda: {e.expected_lambda}")
        if e.expected_arg_limit is not None:
            parts.append(f"  arg limit: {e.expected_arg_limit:.6f}")
        if e.expected_slope is not None:
            parts.append(f"  slope: {e.expected_slope}")
        parts.append(f"  notes: {e.notes}")
        sys.stdout.write("\n".join(parts) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="disklab",
        description="Numerical laboratory for iterating holomorphic self-maps of the disk.",
    )
    ap.add_argument("--version", action="version", version=f"disklab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Denjoy-Wolff classification of a map")
    p.add_argument("--map", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seeds", default=None, help="semicolon-separated complex literals")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("orbit", help="dump one orbit with diagnostics as CSV")
    p.add_argument("--map", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("step", help="hyperbolic step estimates at probe points")
    p.add_argument("--map", required=True)
    p.add_argument("--points", required=True, help="semicolon-separated complex literals")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--eps-zero", type=float, default=1e-3, dest="eps_zero")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_step)

    p = sub.add_parser("straighten", help="left-straightening limit on a grid")
    p.add_argument("--map", required=True)
    p.add_argument("--base", default="0")
    p.add_argument("--ref", default="0.5")
    p.add_argument("--grid", default=None, help="'default' or 'radius:count[,radius:count...]'")
    p.add_argument("--n", type=int, default=1 << 15)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_straighten)

    p = sub.add_parser("valiron", help="ratio/slope limit checks for a parabolic map")
    p.add_argument("--map", required=True)
    p.add_argument("--points", default="0;0.5;-0.5;0.5i;-0.5i")
    p.add_argument("--base", default="0")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_valiron)

    p = sub.add_parser("suite", help="run the full verification suite")
    p.add_argument("--catalog", default="*", help="glob over catalog names")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--fuzz", type=int, default=100_000)
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("catalog", help="list the built-in map catalog")
    p.set_defaults(func=_cmd_catalog)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ParseError, NotParabolicError, NotPositiveStepError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except DynamicsError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
