"""Left straightening of iterate sequences.

Normalized iterates H_n = gamma_n^{-1} o f^n, where gamma_n is the disk
automorphism with gamma_n(0) = f^n(z0), post-composed with the rotation that
makes H_n(w0) a nonnegative real.  Under these two normalizations H_n
converges on compact sets; the limit ``h`` realizes every two-point iterate
distance limit and in particular the hyperbolic step via
s^f(z) = omega(h(z), h(f(z))).

For maps with a boundary Wolff point the Moebius normalization is evaluated
in half-plane coordinates,

    mu_{-a_n}(f^n(z))  =  Psi^{-1}((F^n(w) - Re W_n) / Im W_n),
    W_n = F^n(Psi(z0)),  w = Psi(z),

which agrees with the disk formula up to the rotation alignment but never
subtracts two near-unimodular numbers.  The disk route is used only for maps
with an interior fixed point (or undecided maps, where it fails loudly once
iterates cross |z| > 1 - 1e-8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .geometry import (
    AutFitError,
    MobiusAut,
    Model,
    Point,
    _atanh,
    _cayley_inv,
    _disk_distance,
    _finite,
    aut_apply,
    disk_aut_through_three_points,
)
from .maps import MapExpr, compile_map, evaluate, format_map
from .dynamics import (
    OVERFLOW_GUARD,
    DynamicsError,
    _as_coordinate,
    _bridge_to_disk,
    _compile_fast,
    resolve_boundary,
)

DISK_ROUTE_LIMIT = 1.0 - 1e-8


def default_grid(z0: complex, w0: complex) -> tuple[complex, ...]:
    """25 probe points: z0, w0, and two concentric circles (12 at r=0.3,
    11 at r=0.6) fixing the compact set on which convergence is watched."""
    pts = [complex(z0), complex(w0)]
    for k in range(12):
        ang = 2.0 * math.pi * k / 12.0
        pts.append(0.3 * complex(math.cos(ang), math.sin(ang)))
    for k in range(11):
        ang = 2.0 * math.pi * k / 11.0
        pts.append(0.6 * complex(math.cos(ang), math.sin(ang)))
    return tuple(pts)


class _Stream:
    """Incrementally advances f^n on a grid and emits normalized snapshots."""

    def __init__(self, m_disk: MapExpr, z0: complex, w0: complex, grid):
        if z0 == w0:
            raise DynamicsError("base point and reference point must differ")
        pts = [complex(p) for p in grid]
        if z0 not in pts:
            pts.insert(0, complex(z0))
        if w0 not in pts:
            pts.insert(1, complex(w0))
        for p in pts:
            Point.disk(p)  # validate interiority
        self.i0 = pts.index(complex(z0))
        self.i1 = pts.index(complex(w0))
        self.grid = tuple(pts)
        self.n = 0
        form = resolve_boundary(m_disk)
        if form is not None:
            self.halfplane = True
            self.f = _compile_fast(form.halfplane_map)
            self.state = [form.transport(p) for p in pts]
        else:
            self.halfplane = False
            self.f = compile_map(m_disk)
            self.state = list(pts)

    def advance(self, steps: int) -> bool:
        """Apply f ``steps`` more times; False if the overflow guard tripped."""
        for _ in range(steps):
            nxt = [self.f(w) for w in self.state]
            for w in nxt:
                if not _finite(w):
                    raise DynamicsError(f"nonfinite grid value at n = {self.n + 1}")
            if self.halfplane:
                if any(abs(w) > OVERFLOW_GUARD for w in nxt):
                    return False
            else:
                if any(abs(z) > DISK_ROUTE_LIMIT for z in nxt):
                    raise DynamicsError(
                        "disk iterates crossed 1 - 1e-8: the half-plane route is "
                        "mandatory here, but no boundary Wolff point was resolved"
                    )
            self.state = nxt
            self.n += 1
        return True

    def snapshot(self) -> tuple[tuple[complex, ...], float, bool]:
        """(aligned values, H_n(w0) >= 0, collapsed flag) at the current n."""
        if self.halfplane:
            W0 = self.state[self.i0]
            im0 = W0.imag
            re0 = W0.real
            vals = [
                _cayley_inv(complex((W.real - re0) / im0, W.imag / im0))
                for W in self.state
            ]
        else:
            a = self.state[self.i0]
            ac = a.conjugate()
            vals = [(u - a) / (1.0 - ac * u) for u in self.state]
        ref = vals[self.i1]
        if ref == 0:
            return tuple(vals), 0.0, True
        rotor = ref.conjugate() / abs(ref)
        out = [v * rotor for v in vals]
        out[self.i1] = complex(abs(ref), 0.0)
        return tuple(out), abs(ref), False


@dataclass(frozen=True)
class StraighteningRecord:
    """One normalized iterate H_n on the grid.

    ``sup_change`` and ``monotone_margin`` compare against H_{n-1} (None at
    n = 0); ``collapsed`` marks f^n(w0) = f^n(z0), in which case the values
    are emitted without the rotation alignment.
    """

    map_text: str
    base: complex
    ref: complex
    n: int
    grid: tuple[complex, ...]
    values: tuple[complex, ...]
    ref_value: float
    collapsed: bool
    sup_change: float | None
    monotone_margin: float | None


def straightened_iterate(
    m: MapExpr, z0: complex, w0: complex, n: int, grid=None
) -> StraighteningRecord:
    """Compute H_n = rot(-theta_n) . mu_{-f^n(z0)} . f^n on the grid."""
    if n < 0:
        raise ValueError("iterate index must be nonnegative")
    m_disk = _bridge_to_disk(m)
    z0 = _as_coordinate(z0, Model.DISK)
    w0 = _as_coordinate(w0, Model.DISK)
    stream = _Stream(m_disk, z0, w0, grid if grid is not None else default_grid(z0, w0))
    sup_change = None
    margin = None
    if n == 0:
        vals, ref_val, collapsed = stream.snapshot()
    else:
        if not stream.advance(n - 1):
            raise DynamicsError("overflow guard tripped before the requested index")
        prev, _, _ = stream.snapshot()
        if not stream.advance(1):
            raise DynamicsError("overflow guard tripped at the requested index")
        vals, ref_val, collapsed = stream.snapshot()
        sup_change = max(abs(a - b) for a, b in zip(vals, prev))
        margin = max(abs(a) - abs(b) for a, b in zip(vals, prev))
    return StraighteningRecord(
        map_text=format_map(m_disk),
        base=z0,
        ref=w0,
        n=stream.n,
        grid=stream.grid,
        values=vals,
        ref_value=ref_val,
        collapsed=collapsed,
        sup_change=sup_change,
        monotone_margin=margin,
    )


@dataclass(frozen=True)
class StraighteningLimit:
    """Grid estimate of the straightening limit h.

    Convergence is declared when the grid sup-change between H_n and H_{2n}
    drops below tol (doubling detects slow monotone drift that consecutive
    indices would miss).  ``constant`` holds when sup_grid omega(h(z), h(z0))
    < 10 tol, the constant-limit branch of the step dichotomy.
    """

    expr: MapExpr
    base: complex
    ref: complex
    grid: tuple[complex, ...]
    values: tuple[complex, ...]
    converged: bool
    n_star: int
    sup_change: float
    constant: bool
    constancy_sup: float
    collapsed_any: bool
    monotone_margin: float
    tol: float


def straightening_limit(
    m: MapExpr,
    z0: complex,
    w0: complex,
    grid=None,
    N: int = 1 << 15,
    tol: float = 1e-4,
) -> StraighteningLimit:
    """Run H_n up the doubling schedule n = 1, 2, 4, ... until stable."""
    return _straightening_limit_cached(
        m,
        complex(z0.coordinate if isinstance(z0, Point) else z0),
        complex(w0.coordinate if isinstance(w0, Point) else w0),
        None if grid is None else tuple(complex(p) for p in grid),
        int(N),
        float(tol),
    )


@lru_cache(maxsize=64)
def _straightening_limit_cached(
    m: MapExpr,
    z0: complex,
    w0: complex,
    grid: tuple[complex, ...] | None,
    N: int,
    tol: float,
) -> StraighteningLimit:
    m_disk = _bridge_to_disk(m)
    z0 = _as_coordinate(z0, Model.DISK)
    w0 = _as_coordinate(w0, Model.DISK)
    stream = _Stream(m_disk, z0, w0, grid if grid is not None else default_grid(z0, w0))
    guard_ok = stream.advance(1)
    prev, _, collapsed_any = stream.snapshot()
    converged = False
    sup = math.inf
    margin = -math.inf
    values = prev
    while guard_ok and 2 * stream.n <= N:
        target = 2 * stream.n
        guard_ok = stream.advance(target - stream.n)
        if not guard_ok:
            break
        cur, _, collapsed = stream.snapshot()
        collapsed_any = collapsed_any or collapsed
        sup = max(abs(a - b) for a, b in zip(cur, prev))
        margin = max(margin, max(abs(a) - abs(b) for a, b in zip(cur, prev)))
        values = cur
        if sup < tol:
            converged = True
            break
        prev = cur
    constancy_sup = max(_atanh(min(abs(v), 1.0 - 1e-16)) for v in values)
    return StraighteningLimit(
        expr=m_disk,
        base=z0,
        ref=w0,
        grid=stream.grid,
        values=values,
        converged=converged,
        n_star=stream.n,
        sup_change=sup,
        constant=constancy_sup < 10.0 * tol,
        constancy_sup=constancy_sup,
        collapsed_any=collapsed_any,
        monotone_margin=margin,
        tol=tol,
    )


def evaluate_limit_at(limit: StraighteningLimit, points) -> tuple[complex, ...]:
    """Evaluate the straightening limit at extra probe points by re-running
    the normalized iteration out to the convergence index n_star."""
    if not limit.converged:
        raise DynamicsError("straightening did not converge; no limit to evaluate")
    pts = [limit.base, limit.ref] + [_as_coordinate(p, Model.DISK) for p in points]
    stream = _Stream(limit.expr, limit.base, limit.ref, pts)
    if not stream.advance(limit.n_star):
        raise DynamicsError("overflow guard tripped while re-evaluating the limit")
    vals, _, _ = stream.snapshot()
    return tuple(vals[stream.grid.index(complex(p))] for p in pts[2:])


def step_via_straightening(limit: StraighteningLimit, m: MapExpr, z) -> float:
    """Hyperbolic step through the straightening: omega(h(z), h(f(z)))."""
    m_disk = _bridge_to_disk(m)
    z = _as_coordinate(z, Model.DISK)
    fz = evaluate(m_disk, Point.disk(z)).coordinate
    if fz == z:
        return 0.0
    hz, hfz = evaluate_limit_at(limit, (z, fz))
    return _disk_distance(hz, hfz)


@dataclass(frozen=True)
class EquivalenceFit:
    """Outcome of fitting phi in Aut(D) with h = phi o h' on the grid."""

    ok: bool
    aut: MobiusAut | None
    residual: float
    reason: str


def _spread_triple(vals: tuple[complex, ...]) -> tuple[int, int, int]:
    # greedy max-min selection of three well-separated image points
    n = len(vals)
    best = max(
        ((i, j) for i in range(n) for j in range(i + 1, n)),
        key=lambda ij: abs(vals[ij[0]] - vals[ij[1]]),
    )
    i, j = best
    k = max(
        (t for t in range(n) if t not in (i, j)),
        key=lambda t: min(abs(vals[t] - vals[i]), abs(vals[t] - vals[j])),
    )
    return i, j, k


def straightening_equivalence(
    limit_a: StraighteningLimit,
    limit_b: StraighteningLimit,
    grid=None,
    tol: float = 1e-3,
) -> EquivalenceFit:
    """Fit the automorphism phi with h_a = phi o h_b, verifying on the grid.

    Straightenings of the same map from different base points are unique up
    to left composition by an automorphism, so a successful fit (sup-grid
    hyperbolic residual < tol) witnesses that uniqueness; constant limits
    carry no fit and degenerate image triples are reported as such.
    """
    if not (limit_a.converged and limit_b.converged):
        raise DynamicsError("both straightening limits must have converged")
    if limit_a.constant or limit_b.constant:
        return EquivalenceFit(False, None, math.inf, "constant limit has no automorphism fit")
    pts = tuple(grid) if grid is not None else limit_a.grid
    vals_a = evaluate_limit_at(limit_a, pts)
    vals_b = evaluate_limit_at(limit_b, pts)
    i, j, k = _spread_triple(vals_b)
    sep = min(abs(vals_b[i] - vals_b[j]), abs(vals_b[i] - vals_b[k]), abs(vals_b[j] - vals_b[k]))
    if sep < 1e-6:
        return EquivalenceFit(False, None, math.inf, "image triple degenerate (images collapse)")
    try:
        phi = disk_aut_through_three_points(
            tuple(Point.disk(vals_b[t]) for t in (i, j, k)),
            tuple(Point.disk(vals_a[t]) for t in (i, j, k)),
            tol=max(tol, 1e-9),
        )
    except AutFitError as exc:
        return EquivalenceFit(False, None, exc.residual, f"no automorphism fit: {exc.reason}")
    residual = max(
        _disk_distance(aut_apply(phi, Point.disk(b)).coordinate, a)
        for a, b in zip(vals_a, vals_b)
    )
    if residual < tol:
        return EquivalenceFit(True, phi, residual, "fit")
    return EquivalenceFit(False, phi, residual, "sup-grid residual above tolerance")
