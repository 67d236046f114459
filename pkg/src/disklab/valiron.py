"""Valiron ratio and slope sequences for parabolic dynamics.

All ratio and slope arithmetic happens in half-plane coordinates.  The disk
difference f^n(z) - tau is never formed directly: with tau rotated to 1,

    f^n(z) - 1 = -2i / (F^n(Psi(z)) + i),

so the disk ratio is (F^n(w0) + i)/(F^n(w) + i) and the disk slope is
-i tau conj(W + i)/|W + i| with W = F^n(w) -- boundary cancellation becomes a
benign division by a large number.

The ratio theorem makes Q_n = F^n(w)/F^n(w0) tend to 1 for every parabolic
map; slopes must agree across probes whenever any probe slope converges; and
positive-step parabolic maps send arg F^n to 0 or pi, never anywhere else.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import Model, _finite
from .maps import MapExpr, format_map
from .dynamics import (
    OVERFLOW_GUARD,
    Classification,
    DynamicsError,
    _as_coordinate,
    _bridge_to_disk,
    _compile_fast,
    classify,
    resolve_boundary,
)

ANGLE_RANGE_TOL = 1e-3  # last-decade arg range below this counts as converged


class NotParabolicError(ValueError):
    """The operation requires a parabolic map and got something else."""


class NotPositiveStepError(ValueError):
    """The operation requires a positive-step parabolic map."""


def _parabolic_setup(m: MapExpr, classification: Classification | None):
    cls = classification if classification is not None else classify(m)
    if cls.kind != "parabolic":
        raise NotParabolicError(f"map not parabolic: classified {cls.kind}")
    form = resolve_boundary(m)
    if form is None:  # pragma: no cover - classify above guarantees boundary
        raise NotParabolicError("no boundary Wolff point resolved")
    return cls, form


def _boundary_setup(m: MapExpr, classification: Classification | None):
    cls = classification if classification is not None else classify(m)
    if cls.kind not in ("parabolic", "hyperbolic"):
        raise DynamicsError(f"map has no boundary Wolff point: classified {cls.kind}")
    form = resolve_boundary(m)
    if form is None:  # pragma: no cover
        raise DynamicsError("no boundary Wolff point resolved")
    return cls, form


def _halfplane_orbit(form, z, N: int) -> list[complex]:
    w = form.transport(_as_coordinate(z, Model.DISK))
    f = _compile_fast(form.halfplane_map)
    ws = [w]
    for _ in range(N):
        w = f(w)
        if not _finite(w):
            raise DynamicsError("nonfinite value in half-plane orbit")
        if abs(w) > OVERFLOW_GUARD:
            break
        ws.append(w)
    return ws


@dataclass(frozen=True)
class RatioReport:
    """Q_n = F^n(w)/F^n(w0) and the equivalent disk ratio q_n.

    final_error is |Q_N - 1|; monotone_last_decade states whether |Q_n - 1|
    was non-increasing (1e-12 slack) over the last factor-10 span.
    """

    map_text: str
    probe: complex
    base: complex
    halfplane_ratios: tuple[complex, ...]
    disk_ratios: tuple[complex, ...]
    final_error: float
    monotone_last_decade: bool
    n_used: int


def ratio_sequence(
    m: MapExpr, z, z0, N: int = 10_000, classification: Classification | None = None
) -> RatioReport:
    """Valiron ratio sequence of a parabolic map for probe z against base z0."""
    m_disk = _bridge_to_disk(m)
    _, form = _parabolic_setup(m_disk, classification)
    zc = _as_coordinate(z, Model.DISK)
    z0c = _as_coordinate(z0, Model.DISK)
    probe_orbit = _halfplane_orbit(form, zc, N)
    base_orbit = _halfplane_orbit(form, z0c, N)
    n = min(len(probe_orbit), len(base_orbit))
    qs = tuple(probe_orbit[k] / base_orbit[k] for k in range(n))
    disk_qs = tuple((base_orbit[k] + 1j) / (probe_orbit[k] + 1j) for k in range(n))
    errors = [abs(q - 1.0) for q in qs]
    lo = max(0, (n - 1) // 10)
    monotone = all(b <= a + 1e-12 for a, b in zip(errors[lo:], errors[lo + 1 :]))
    return RatioReport(
        map_text=format_map(m_disk),
        probe=zc,
        base=z0c,
        halfplane_ratios=qs,
        disk_ratios=disk_qs,
        final_error=errors[-1],
        monotone_last_decade=monotone,
        n_used=n - 1,
    )


@dataclass(frozen=True)
class SlopeReport:
    """Unit-modulus slope sequence sigma_n = (f^n(z) - tau)/|f^n(z) - tau| and
    the half-plane arguments arg F^n(w).

    converged requires the last-decade argument range to fall below
    ANGLE_RANGE_TOL; theta_hat is then the argument limit and sigma_hat the
    disk slope limit.  Oscillation is reported as converged=False, never as a
    fabricated limit.
    """

    map_text: str
    probe: complex
    sigmas: tuple[complex, ...]
    args: tuple[float, ...]
    converged: bool
    theta_hat: float | None
    sigma_hat: complex | None
    angle_range: float
    n_used: int


def slope_sequence(
    m: MapExpr, z, N: int = 10_000, classification: Classification | None = None
) -> SlopeReport:
    """Slope diagnostics along one orbit of a boundary-Wolff (parabolic or
    hyperbolic) map."""
    m_disk = _bridge_to_disk(m)
    cls, form = _boundary_setup(m_disk, classification)
    zc = _as_coordinate(z, Model.DISK)
    ws = _halfplane_orbit(form, zc, N)
    tau = cls.tau
    sigmas = []
    args = []
    for w in ws:
        den = w + 1j
        sigmas.append(-1j * tau * den.conjugate() / abs(den))
        args.append(cmath.phase(w))
    n = len(args)
    lo = max(0, (n - 1) // 10)
    tail = args[lo:]
    angle_range = max(tail) - min(tail)
    converged = angle_range < ANGLE_RANGE_TOL
    return SlopeReport(
        map_text=format_map(m_disk),
        probe=zc,
        sigmas=tuple(sigmas),
        args=tuple(args),
        converged=converged,
        theta_hat=args[-1] if converged else None,
        sigma_hat=sigmas[-1] if converged else None,
        angle_range=angle_range,
        n_used=n - 1,
    )


@dataclass(frozen=True)
class SlopeAgreement:
    """Cross-probe slope propagation verdict: agree / violation / vacuous."""

    kind: str
    reports: tuple[SlopeReport, ...]
    max_disagreement: float


def slope_propagation_check(
    m: MapExpr,
    probes: Sequence[complex],
    N: int = 10_000,
    tol: float = 1e-2,
    classification: Classification | None = None,
) -> SlopeAgreement:
    """If any probe slope converges, all converged probes must agree within
    tol; disagreement is an invariant violation, no converged probe at all is
    a vacuous pass."""
    if len(probes) < 1:
        raise ValueError("at least one probe required")
    m_disk = _bridge_to_disk(m)
    cls, _ = _parabolic_setup(m_disk, classification)
    reports = tuple(slope_sequence(m_disk, p, N, cls) for p in probes)
    converged = [r for r in reports if r.converged]
    if len(converged) < 2:
        # nothing to cross-check: a single converged slope passes vacuously
        return SlopeAgreement(kind="vacuous", reports=reports, max_disagreement=math.nan)
    spread = max(
        abs(a.sigma_hat - b.sigma_hat) for a in converged for b in converged
    )
    kind = "agree" if spread <= tol else "violation"
    return SlopeAgreement(kind=kind, reports=reports, max_disagreement=spread)


@dataclass(frozen=True)
class ArgDichotomyVerdict:
    """Aggregate of per-probe argument limits for a positive-step parabolic
    map: arg_to_zero / arg_to_pi / violation / undecided."""

    kind: str
    per_probe: tuple[str, ...]
    reports: tuple[SlopeReport, ...]


def arg_dichotomy_check(
    m: MapExpr,
    probes: Sequence[complex],
    N: int = 10_000,
    classification: Classification | None = None,
) -> ArgDichotomyVerdict:
    """Check that all orbits' arguments settle on the same element of {0, pi}.

    Refuses zero-step maps (the dichotomy hypothesis is positive step).  A
    probe that converges to an interior angle, or probes converging to
    different ends, is a violation; slow convergence yields undecided.
    """
    m_disk = _bridge_to_disk(m)
    cls, _ = _parabolic_setup(m_disk, classification)
    if cls.step_class == "zero":
        raise NotPositiveStepError("map has zero hyperbolic step; dichotomy needs positive step")
    if cls.step_class != "positive":
        raise NotPositiveStepError(f"step class {cls.step_class!r}; dichotomy needs positive step")
    reports = tuple(slope_sequence(m_disk, p, N, cls) for p in probes)
    verdicts = []
    for r in reports:
        tail = r.args[max(0, r.n_used // 10) :]
        # the whole late tail must live next to one end of [0, pi]
        if max(tail) < 1e-2:
            verdicts.append("zero")
        elif min(tail) > math.pi - 1e-2:
            verdicts.append("pi")
        elif r.converged and 0.1 < r.args[-1] < math.pi - 0.1:
            verdicts.append("interior")
        else:
            verdicts.append("undecided")
    kinds = set(verdicts)
    if "interior" in kinds or kinds >= {"zero", "pi"}:
        kind = "violation"
    elif kinds == {"zero"}:
        kind = "arg_to_zero"
    elif kinds == {"pi"}:
        kind = "arg_to_pi"
    else:
        kind = "undecided"
    return ArgDichotomyVerdict(kind=kind, per_probe=tuple(verdicts), reports=reports)
