"""Experiment orchestration: per-map verification runs and the roll-up.

Each catalog map gets one experiment that exercises every property with a
stated tolerance: classification against ground truth, Schwarz-Pick
monotonicity, the step dichotomy and its closed forms, straightening
constancy and uniqueness, the step/straightening cross-check, the ratio
limit, slope dichotomy and propagation, and the non-tangential consistency
bound.  Library-level checks (metric exactness, parser round-trip and fuzz)
run once per suite.  Every check records a name, a pass flag and a numeric
detail so failures are traceable.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fnmatch import fnmatch
from pathlib import Path

from . import __version__
from .geometry import (
    MobiusAut,
    Point,
    aut_apply,
    aut_compose,
    aut_inverse,
    cayley,
    poincare_disk,
    poincare_halfplane,
)
from .maps import ParseError, format_map, parse_map
from .dynamics import (
    DEFAULT_SEEDS,
    classify,
    nontangential_diagnostic,
    orbit,
    step_estimate,
    two_point_contraction,
)
from .straightening import (
    step_via_straightening,
    straightening_equivalence,
    straightening_limit,
)
from .valiron import arg_dichotomy_check, ratio_sequence, slope_propagation_check, slope_sequence
from .catalog import CATALOG, STEP_CLOSED_FORMS, CatalogEntry
from .randmaps import random_fuzz_input, random_map_expr
from .reports import SCHEMA_VERSION, ORBIT_CSV_HEADER, cpair, orbit_rows, write_csv, write_json

N_ORBIT = 10_000
STEP_PROBES = DEFAULT_SEEDS
STRAIGHTEN_BASES = (0j, 0.3 + 0j)
STRAIGHTEN_REF = 0.5 + 0j


def _check(name: str, passed: bool, detail: str) -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _classification_check(entry: CatalogEntry, cls) -> dict:
    if cls.kind != entry.expected_class:
        return _check("classification", False, f"got {cls.kind}, expected {entry.expected_class}")
    if entry.expected_class == "elliptic":
        err = abs(cls.fixed_point - entry.expected_fixed)
        merr = abs(cls.multiplier_abs - entry.expected_multiplier_abs)
        return _check(
            "classification", err <= 1e-6 and merr <= 1e-3,
            f"fixed point err {err:.2e}, |multiplier| err {merr:.2e}",
        )
    terr = abs(cls.tau - entry.expected_tau)
    if entry.expected_class == "hyperbolic":
        lerr = abs(cls.lam - entry.expected_lambda)
        return _check(
            "classification", terr <= 1e-3 and lerr <= 1e-3,
            f"tau err {terr:.2e}, lambda err {lerr:.2e}",
        )
    ok = terr <= 1e-3 and cls.step_class == entry.expected_step
    return _check(
        "classification", ok,
        f"tau err {terr:.2e}, step class {cls.step_class} (expected {entry.expected_step})",
    )


def run_map_experiment(name: str, out_dir: Path | None = None) -> dict:
    """Run every applicable verification on one catalog map."""
    entry = next(e for e in CATALOG if e.name == name)
    m = entry.expr
    cls = classify(m)
    checks = [_classification_check(entry, cls)]
    csv_files: list[str] = []

    # orbits: monotone steps (orbit() itself asserts the margin)
    orbits = {}
    worst_margin = -math.inf
    for probe in STEP_PROBES:
        rec = orbit(m, probe, N_ORBIT + 1)
        orbits[probe] = rec
        worst_margin = max(
            worst_margin,
            max(
                (b - a for a, b in zip(rec.step_distances, rec.step_distances[1:])),
                default=-math.inf,
            ),
        )
    checks.append(
        _check("schwarz_pick_monotone", worst_margin <= 1e-12,
               f"max d increase {worst_margin:.2e} over {len(STEP_PROBES)} probes")
    )

    # hyperbolic step at every probe
    steps = {probe: step_estimate(m, probe, N_ORBIT) for probe in STEP_PROBES}
    parabolic = entry.expected_class == "parabolic"
    if parabolic:
        verdicts = {s.verdict for s in steps.values()}
        ok = verdicts == {entry.expected_step}
        if entry.expected_step == "zero":
            bound_ok = all(s.s_hat <= 1e-3 for s in steps.values())
            detail = f"verdicts {sorted(verdicts)}, max s_hat {max(s.s_hat for s in steps.values()):.2e}"
        else:
            bound_ok = all(s.s_hat >= 0.1 for s in steps.values())
            detail = f"verdicts {sorted(verdicts)}, min s_hat {min(s.s_hat for s in steps.values()):.3f}"
        checks.append(_check("step_dichotomy", ok and bound_ok, detail))

    if name in STEP_CLOSED_FORMS:
        err = abs(steps[0j].s_hat - STEP_CLOSED_FORMS[name])
        checks.append(_check("step_closed_form", err <= 1e-6, f"|s_hat - atanh(1/sqrt 5)| = {err:.2e}"))
    if name == "parabolic_zero":
        err = abs(steps[0j].s_hat - math.atanh(1.0 / (2.0 * N_ORBIT + 3.0)))
        checks.append(_check("step_closed_form", err <= 1e-9, f"|d_N - atanh(1/(2N+3))| = {err:.2e}"))

    # straightening from two base points
    limits = {}
    for base in STRAIGHTEN_BASES:
        ref = STRAIGHTEN_REF if base != STRAIGHTEN_REF else 0.6 + 0j
        limits[base] = straightening_limit(m, base, ref)
    lim0 = limits[STRAIGHTEN_BASES[0]]
    if parabolic:
        want_constant = entry.expected_step == "zero"
        ok = all(l.converged and l.constant == want_constant for l in limits.values())
        checks.append(
            _check(
                "straightening_constancy", ok,
                f"constant verdicts {[l.constant for l in limits.values()]} "
                f"(expected {want_constant}), sup changes "
                f"{[f'{l.sup_change:.1e}' for l in limits.values()]}",
            )
        )

    # step via straightening against the direct estimate, plus two-point limits
    if lim0.converged:
        worst = 0.0
        decid = 0
        for probe, s in steps.items():
            if s.verdict == "undecided":
                continue
            decid += 1
            worst = max(worst, abs(step_via_straightening(lim0, m, probe) - s.s_hat))
        checks.append(
            _check("step_via_straightening", worst <= 1e-3,
                   f"max |via - direct| = {worst:.2e} over {decid} decidable probes")
        )
        from .straightening import evaluate_limit_at

        grid = lim0.grid
        pairs = [(grid[2 * k], grid[2 * k + 1]) for k in range(2, 12)]
        worst_tp = 0.0
        for a, b in pairs:
            tp = two_point_contraction(m, a, b, N_ORBIT)[-1]
            ha, hb = evaluate_limit_at(lim0, (a, b))
            worst_tp = max(worst_tp, abs(tp - poincare_disk(Point.disk(ha), Point.disk(hb))))
        checks.append(
            _check("two_point_realization", worst_tp <= 1e-3,
                   f"max |lim omega(f^n z, f^n w) - omega(h z, h w)| = {worst_tp:.2e} on 10 pairs")
        )

    # uniqueness up to automorphism (non-constant limits only)
    if all(l.converged and not l.constant for l in limits.values()):
        fit = straightening_equivalence(lim0, limits[STRAIGHTEN_BASES[1]])
        checks.append(
            _check("straightening_uniqueness", fit.ok and fit.residual <= 1e-3,
                   f"{fit.reason}, residual {fit.residual:.2e}")
        )

    valiron_summary = {}
    if parabolic:
        worst_q = 0.0
        mono_ok = True
        for probe in STEP_PROBES:
            rep = ratio_sequence(m, probe, 0j, N_ORBIT, cls)
            worst_q = max(worst_q, rep.final_error)
            mono_ok = mono_ok and rep.monotone_last_decade
        checks.append(
            _check("valiron_ratio", worst_q <= 1e-3 and mono_ok,
                   f"max |Q_N - 1| = {worst_q:.2e}, monotone last decade: {mono_ok}")
        )
        valiron_summary["max_ratio_error"] = worst_q

        slope_reports = [slope_sequence(m, p, N_ORBIT, cls) for p in STEP_PROBES]
        if entry.expected_arg_limit is not None:
            worst_arg = max(abs(r.args[-1] - entry.expected_arg_limit) for r in slope_reports)
            checks.append(
                _check("slope_limit", worst_arg <= 1e-2,
                       f"max |arg F^N - {entry.expected_arg_limit:.4f}| = {worst_arg:.2e}")
            )
            valiron_summary["max_arg_error"] = worst_arg
        prop = slope_propagation_check(m, STEP_PROBES, N_ORBIT, 1e-2, cls)
        checks.append(
            _check("slope_propagation", prop.kind in ("agree", "vacuous"),
                   f"{prop.kind}, max disagreement {prop.max_disagreement:.2e}")
        )
        valiron_summary["propagation"] = prop.kind

        if entry.expected_step == "positive":
            verdict = arg_dichotomy_check(m, STEP_PROBES, N_ORBIT, cls)
            expected_kind = "arg_to_pi" if entry.expected_arg_limit == math.pi else "arg_to_zero"
            worst_slope = max(abs(r.sigmas[-1] - entry.expected_slope) for r in slope_reports)
            checks.append(
                _check("arg_dichotomy", verdict.kind == expected_kind and worst_slope <= 1e-2,
                       f"{verdict.kind} (expected {expected_kind}), max disk slope err {worst_slope:.2e}")
            )
            valiron_summary["arg_dichotomy"] = verdict.kind

        # Val0 consistency: non-tangential orbits of a parabolic map force zero step
        val0_ok = True
        bound_ok = True
        for probe in STEP_PROBES:
            diag = nontangential_diagnostic(orbits[probe])
            if diag.eps_hat_last_decade >= 0.05 and steps[probe].verdict != "zero":
                val0_ok = False
            if diag.bound_violations:
                bound_ok = False
        checks.append(
            _check("val0_consistency", val0_ok and bound_ok,
                   f"nontangential probes force zero: {val0_ok}, displacement bound clean: {bound_ok}")
        )

    if out_dir is not None:
        orbit_csv = f"{name}_orbit.csv"
        write_csv(out_dir / orbit_csv, ORBIT_CSV_HEADER, orbit_rows(orbits[0j]))
        csv_files.append(orbit_csv)
        straighten_csv = f"{name}_straightening.csv"
        write_csv(
            out_dir / straighten_csv,
            ["grid_index", "re", "im", "abs"],
            [
                [k, repr(v.real), repr(v.imag), repr(abs(v))]
                for k, v in enumerate(lim0.values)
            ],
        )
        csv_files.append(straighten_csv)

    report = {
        "schema": SCHEMA_VERSION,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "map": name,
        "dsl": entry.dsl,
        "parameters": {
            "n_orbit": N_ORBIT,
            "probes": [cpair(p) for p in STEP_PROBES],
            "straighten_bases": [cpair(b) for b in STRAIGHTEN_BASES],
        },
        "classification": classification_json(cls),
        "step_estimates": [
            {
                "probe": cpair(s.probe),
                "s_hat": s.s_hat,
                "verdict": s.verdict,
                "n_used": s.n_used,
            }
            for s in steps.values()
        ],
        "straightening": {
            "converged": lim0.converged,
            "n_star": lim0.n_star,
            "constant": lim0.constant,
            "constancy_sup": lim0.constancy_sup,
            "sup_change": None if math.isinf(lim0.sup_change) else lim0.sup_change,
        },
        "valiron": valiron_summary,
        "checks": checks,
        "csv_files": csv_files,
        "passed": all(c["passed"] for c in checks),
    }
    return report


def classification_json(cls) -> dict:
    out = {"class": cls.kind}
    if cls.fixed_point is not None:
        out["fixed"] = cpair(cls.fixed_point)
    if cls.multiplier_abs is not None:
        out["multiplier_abs"] = cls.multiplier_abs
    if cls.tau is not None:
        out["tau"] = cpair(cls.tau)
    if cls.lam is not None:
        out["lambda"] = cls.lam
    if cls.step_class is not None:
        out["step_class"] = cls.step_class
    return out


# ---------------------------------------------------------------------------
# library checks (map-independent)

def _random_disk_point(rng: random.Random, rmax: float = 0.9) -> complex:
    r = rmax * math.sqrt(rng.random())
    ang = rng.uniform(-math.pi, math.pi)
    return r * complex(math.cos(ang), math.sin(ang))


def _random_aut(rng: random.Random) -> MobiusAut:
    return MobiusAut.disk(rng.uniform(-math.pi, math.pi), _random_disk_point(rng))


def library_checks(seed: int = 20260809, cases: int = 1000, fuzz: int = 100_000) -> list[dict]:
    """Map-independent exactness checks: isometries, group laws, metric
    axioms, parser round-trip and fuzz totality."""
    rng = random.Random(seed)
    checks = []

    worst = 0.0
    for _ in range(cases):
        g = _random_aut(rng)
        z1, z2 = Point.disk(_random_disk_point(rng)), Point.disk(_random_disk_point(rng))
        worst = max(
            worst,
            abs(poincare_disk(aut_apply(g, z1), aut_apply(g, z2)) - poincare_disk(z1, z2)),
        )
    checks.append(_check("aut_isometry", worst <= 1e-12, f"max deviation {worst:.2e} over {cases} cases"))

    worst = 0.0
    for _ in range(cases):
        z1, z2 = Point.disk(_random_disk_point(rng, 0.95)), Point.disk(_random_disk_point(rng, 0.95))
        worst = max(
            worst, abs(poincare_halfplane(cayley(z1), cayley(z2)) - poincare_disk(z1, z2))
        )
    checks.append(_check("cayley_isometry", worst <= 1e-12, f"max deviation {worst:.2e} over {cases} cases"))

    worst = 0.0
    for _ in range(cases):
        g = _random_aut(rng)
        p = Point.disk(_random_disk_point(rng))
        gg = aut_compose(g, aut_inverse(g))
        worst = max(worst, abs(aut_apply(gg, p).coordinate - p.coordinate))
    checks.append(_check("group_laws", worst <= 1e-13, f"max |g g^-1 p - p| = {worst:.2e} over {cases} cases"))

    rng2 = random.Random(seed + 1)
    rt_fail = 0
    for _ in range(500):
        tree = random_map_expr(rng2)
        if parse_map(format_map(tree)) != tree:
            rt_fail += 1
    checks.append(_check("parser_roundtrip", rt_fail == 0, f"{rt_fail} failures out of 500 random trees"))

    rng3 = random.Random(seed + 2)
    crashes = 0
    bad_offsets = 0
    for _ in range(fuzz):
        text = random_fuzz_input(rng3)
        try:
            parse_map(text)
        except ParseError as exc:
            if not (0 <= exc.offset <= len(text)):
                bad_offsets += 1
        except Exception:
            crashes += 1
    checks.append(
        _check("parser_fuzz", crashes == 0 and bad_offsets == 0,
               f"{crashes} crashes, {bad_offsets} bad offsets in {fuzz} inputs")
    )
    return checks


# ---------------------------------------------------------------------------
# suite runner

def _worker(args: tuple[str, str | None]) -> dict:
    name, out_dir = args
    return run_map_experiment(name, Path(out_dir) if out_dir else None)


def run_suite(
    pattern: str = "*",
    out_dir: Path | None = None,
    jobs: int = 1,
    fuzz: int = 100_000,
) -> dict:
    """Run experiments for every catalog map matching ``pattern`` plus the
    library checks; returns the roll-up report (also written to out_dir)."""
    selected = [e.name for e in CATALOG if fnmatch(e.name, pattern)]
    if not selected:
        raise ValueError(f"no catalog entries match {pattern!r}")
    args = [(name, str(out_dir) if out_dir else None) for name in selected]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_worker, args))
    else:
        reports = [_worker(a) for a in args]
    lib = library_checks(fuzz=fuzz)
    failed = [
        f"{rep['map']}:{c['name']}" for rep in reports for c in rep["checks"] if not c["passed"]
    ] + [f"library:{c['name']}" for c in lib if not c["passed"]]
    rollup = {
        "schema": SCHEMA_VERSION,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "pattern": pattern,
        "reports": reports,
        "library_checks": lib,
        "failed_checks": failed,
        "passed": not failed,
    }
    if out_dir is not None:
        for rep in reports:
            write_json(Path(out_dir) / f"{rep['map']}_report.json", rep)
        write_json(Path(out_dir) / "suite_report.json", rollup)
    return rollup
