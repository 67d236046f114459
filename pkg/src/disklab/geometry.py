"""Poincare geometry on the unit disk and the upper half-plane.

Two conformal models are supported: the open unit disk and the upper
half-plane, bridged by the Cayley transform z -> i(1+z)/(1-z).  Points carry
their model as a tag and are validated on construction, so cross-model
confusion fails loudly instead of silently producing garbage.

Distances use the arctanh normalization: on the disk

    omega(z1, z2) = arctanh |(z2 - z1) / (1 - conj(z1) z2)|,

so omega(0, z) = arctanh|z|, and on the half-plane

    omega(w1, w2) = arctanh |(w2 - w1) / (w2 - conj(w1))|.

Automorphisms of either model are represented in closed form (rotation +
center-image for the disk, unimodular real 2x2 coefficients for the
half-plane), which keeps inversion and composition drift-free.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum


class Model(Enum):
    DISK = "disk"
    HALFPLANE = "halfplane"


class DomainError(ValueError):
    """A coordinate or parameter lies outside its model's domain."""


class AutFitError(ValueError):
    """No disk automorphism fits the requested point correspondence."""

    def __init__(self, reason: str, residual: float):
        super().__init__(f"{reason} (residual {residual:.3e})")
        self.reason = reason
        self.residual = residual


def _finite(c: complex) -> bool:
    return math.isfinite(c.real) and math.isfinite(c.imag)


@dataclass(frozen=True)
class Point:
    """A complex coordinate tagged with its model, validated on construction."""

    coordinate: complex
    model: Model

    def __post_init__(self):
        c = complex(self.coordinate)
        object.__setattr__(self, "coordinate", c)
        if not _finite(c):
            raise DomainError(f"nonfinite coordinate {c!r}")
        if self.model is Model.DISK:
            if abs(c) >= 1.0:
                raise DomainError(f"|z| = {abs(c)!r} >= 1 is not in the open disk")
        elif self.model is Model.HALFPLANE:
            if c.imag <= 0.0:
                raise DomainError(f"Im w = {c.imag!r} <= 0 is not in the upper half-plane")
        else:
            raise DomainError(f"unknown model {self.model!r}")

    @classmethod
    def disk(cls, c: complex) -> "Point":
        return cls(complex(c), Model.DISK)

    @classmethod
    def halfplane(cls, c: complex) -> "Point":
        return cls(complex(c), Model.HALFPLANE)


def _require_model(p: Point, model: Model) -> None:
    if p.model is not model:
        raise DomainError(f"expected a {model.value} point, got a {p.model.value} point")


def _atanh(t: float) -> float:
    # 0.5*log((1+t)/(1-t)), written with log1p so small steps keep full
    # relative accuracy and t near 1 does not cancel.
    if t < 0.0:
        raise ValueError("arctanh argument must be nonnegative")
    if t >= 1.0:
        return math.inf
    return 0.5 * math.log1p(2.0 * t / (1.0 - t))


def _disk_distance(z1: complex, z2: complex) -> float:
    num = abs(z2 - z1)
    if num == 0.0:
        return 0.0
    den = abs(1.0 - z1.conjugate() * z2)
    return _atanh(num / den)


def _halfplane_distance(w1: complex, w2: complex) -> float:
    num = abs(w2 - w1)
    if num == 0.0:
        return 0.0
    den = abs(w2 - w1.conjugate())
    return _atanh(num / den)


def poincare_disk(z1: Point, z2: Point) -> float:
    """Poincare distance between two disk points (arctanh normalization)."""
    _require_model(z1, Model.DISK)
    _require_model(z2, Model.DISK)
    return _disk_distance(z1.coordinate, z2.coordinate)


def poincare_halfplane(w1: Point, w2: Point) -> float:
    """Poincare distance between two upper half-plane points."""
    _require_model(w1, Model.HALFPLANE)
    _require_model(w2, Model.HALFPLANE)
    return _halfplane_distance(w1.coordinate, w2.coordinate)


def _cayley(z: complex) -> complex:
    return 1j * (1.0 + z) / (1.0 - z)


def _cayley_inv(w: complex) -> complex:
    return (w - 1j) / (w + 1j)


def cayley(z: Point) -> Point:
    """Map a disk point to the upper half-plane via z -> i(1+z)/(1-z)."""
    _require_model(z, Model.DISK)
    return Point(_cayley(z.coordinate), Model.HALFPLANE)


def cayley_inverse(w: Point) -> Point:
    """Map a half-plane point back to the disk via w -> (w-i)/(w+i)."""
    _require_model(w, Model.HALFPLANE)
    return Point(_cayley_inv(w.coordinate), Model.DISK)


@dataclass(frozen=True)
class MobiusAut:
    """An automorphism of one model.

    Disk form: z -> e^{i theta} (z + a) / (1 + conj(a) z) with |a| < 1.
    Half-plane form: w -> (alpha w + beta) / (gamma w + delta) with real
    coefficients normalized to alpha*delta - beta*gamma = 1.
    """

    model: Model
    theta: float | None = None
    a: complex | None = None
    coeffs: tuple[float, float, float, float] | None = None

    @classmethod
    def disk(cls, theta: float, a: complex) -> "MobiusAut":
        theta = float(theta)
        a = complex(a)
        if not (math.isfinite(theta) and _finite(a)):
            raise DomainError("nonfinite disk automorphism parameters")
        if abs(a) >= 1.0:
            raise DomainError(f"|a| = {abs(a)!r} >= 1: center image must be interior")
        return cls(Model.DISK, theta=theta, a=a)

    @classmethod
    def halfplane(cls, alpha: float, beta: float, gamma: float, delta: float) -> "MobiusAut":
        vals = (float(alpha), float(beta), float(gamma), float(delta))
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("nonfinite half-plane automorphism coefficients")
        det = vals[0] * vals[3] - vals[1] * vals[2]
        if det <= 0.0:
            raise DomainError(f"determinant {det!r} <= 0 does not preserve the half-plane")
        s = 1.0 / math.sqrt(det)
        return cls(Model.HALFPLANE, coeffs=tuple(v * s for v in vals))

    @classmethod
    def identity(cls, model: Model) -> "MobiusAut":
        if model is Model.DISK:
            return cls.disk(0.0, 0j)
        return cls.halfplane(1.0, 0.0, 0.0, 1.0)

    def __call__(self, p: Point) -> Point:
        return aut_apply(self, p)


def aut_apply(g: MobiusAut, p: Point) -> Point:
    """Apply an automorphism to a point of the same model."""
    if g.model is not p.model:
        raise DomainError(f"model mismatch: {g.model.value} automorphism on {p.model.value} point")
    if g.model is Model.DISK:
        z = p.coordinate
        w = cmath.exp(1j * g.theta) * (z + g.a) / (1.0 + g.a.conjugate() * z)
        return Point(w, Model.DISK)
    alpha, beta, gamma, delta = g.coeffs
    w = p.coordinate
    return Point((alpha * w + beta) / (gamma * w + delta), Model.HALFPLANE)


def aut_inverse(g: MobiusAut) -> MobiusAut:
    """Inverse automorphism, in the same closed form."""
    if g.model is Model.DISK:
        # (theta, a) -> (-theta, -a e^{i theta}); check: matrix inverse in SU(1,1).
        return MobiusAut.disk(-g.theta, -g.a * cmath.exp(1j * g.theta))
    alpha, beta, gamma, delta = g.coeffs
    return MobiusAut.halfplane(delta, -beta, -gamma, alpha)


def _su11(g: MobiusAut) -> tuple[complex, complex]:
    # Disk automorphism as (A, B) acting z -> (A z + B)/(conj(B) z + conj(A)),
    # with |A|^2 - |B|^2 = 1.
    s = 1.0 / math.sqrt(1.0 - abs(g.a) ** 2)
    phase = cmath.exp(0.5j * g.theta)
    return phase * s, phase * g.a * s


def _from_su11(A: complex, B: complex) -> MobiusAut:
    det = abs(A) ** 2 - abs(B) ** 2
    if det <= 0.0:
        raise DomainError("degenerate SU(1,1) matrix")
    s = 1.0 / math.sqrt(det)
    A *= s
    B *= s
    return MobiusAut.disk(2.0 * cmath.phase(A), B / A)


def aut_compose(g: MobiusAut, h: MobiusAut) -> MobiusAut:
    """Composition g o h (h applies first)."""
    if g.model is not h.model:
        raise DomainError("cannot compose automorphisms of different models")
    if g.model is Model.DISK:
        A1, B1 = _su11(g)
        A2, B2 = _su11(h)
        return _from_su11(A1 * A2 + B1 * B2.conjugate(), A1 * B2 + B1 * A2.conjugate())
    a1, b1, c1, d1 = g.coeffs
    a2, b2, c2, d2 = h.coeffs
    # factory renormalizes the determinant to 1
    return MobiusAut.halfplane(
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )


def aut_sending_center_to(target: Point) -> MobiusAut:
    """The canonical automorphism sending the model's center to ``target``.

    Disk: z -> (z + a)/(1 + conj(a) z) with a = target (theta = 0), so 0 -> a.
    Half-plane: w -> alpha w + beta with alpha = Im(target), beta = Re(target),
    so i -> target.
    """
    if target.model is Model.DISK:
        return MobiusAut.disk(0.0, target.coordinate)
    t = target.coordinate
    return MobiusAut.halfplane(t.imag, t.real, 0.0, 1.0)


def disk_aut_through_three_points(
    src: tuple[Point, Point, Point],
    dst: tuple[Point, Point, Point],
    tol: float = 1e-9,
) -> MobiusAut:
    """Fit the disk automorphism mapping src_k -> dst_k, if one exists.

    Raises DomainError on repeated points and AutFitError (carrying the
    residual) when no disk automorphism realizes the correspondence: either
    the first pair's hyperbolic separations disagree, or the third point
    misses its target.
    """
    for triple in (src, dst):
        for p in triple:
            _require_model(p, Model.DISK)
        cs = [p.coordinate for p in triple]
        if cs[0] == cs[1] or cs[0] == cs[2] or cs[1] == cs[2]:
            raise DomainError("repeated points in triple")

    mu1 = aut_inverse(aut_sending_center_to(src[0]))   # src[0] -> 0
    nu = aut_inverse(aut_sending_center_to(dst[0]))    # dst[0] -> 0
    s2 = aut_apply(mu1, src[1]).coordinate
    d2 = aut_apply(nu, dst[1]).coordinate
    gap = abs(abs(s2) - abs(d2))
    if gap > tol:
        raise AutFitError("pairwise hyperbolic distances disagree", gap)

    theta = cmath.phase(d2) - cmath.phase(s2)
    g = aut_compose(
        aut_sending_center_to(dst[0]),
        aut_compose(MobiusAut.disk(theta, 0j), mu1),
    )
    res2 = abs(aut_apply(g, src[1]).coordinate - dst[1].coordinate)
    res3 = abs(aut_apply(g, src[2]).coordinate - dst[2].coordinate)
    residual = max(res2, res3)
    if residual > tol:
        raise AutFitError("third point misses its image under the fitted map", residual)
    return g
