"""Built-in map catalog with closed-form ground truth.

Every entry is a disk self-map written in the DSL, together with the expected
classification data derived by hand; the notes record the derivation.  The
catalog is the oracle set for the verification suite: each expected value has
a closed form, so finite-N estimates can be held to tight tolerances.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .maps import MapExpr, parse_map


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dsl: str
    expected_class: str                     # elliptic | hyperbolic | parabolic
    expected_step: str | None = None        # zero | positive (boundary maps)
    expected_fixed: complex | None = None   # elliptic
    expected_multiplier_abs: float | None = None
    expected_tau: complex | None = None     # boundary maps
    expected_lambda: float | None = None    # hyperbolic
    expected_arg_limit: float | None = None  # lim arg F^n in [0, pi]
    expected_slope: complex | None = None   # disk slope lim (f^n - tau)/|f^n - tau|
    notes: str = ""

    @property
    def expr(self) -> MapExpr:
        return _parsed(self.dsl)


@lru_cache(maxsize=None)
def _parsed(dsl: str) -> MapExpr:
    return parse_map(dsl)


_SQRT5_STEP = math.atanh(1.0 / math.sqrt(5.0))

CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry(
        name="elliptic_rot",
        dsl="rot(2.0)",
        expected_class="elliptic",
        expected_fixed=0j,
        expected_multiplier_abs=1.0,
        notes="Rigid rotation by 2 radians about the origin; the orbit of 0 is "
        "fixed, every other orbit stays on its circle, s(z) = omega(z, e^{2i}z).",
    ),
    CatalogEntry(
        name="square",
        dsl="blaschke(0;(0+0i,2))",
        expected_class="elliptic",
        expected_fixed=0j,
        expected_multiplier_abs=0.0,
        notes="z -> z^2: superattracting fixed point at 0, f^n(z) = z^(2^n), "
        "all orbits collapse, zero step everywhere.",
    ),
    CatalogEntry(
        name="hyperbolic_2",
        dsl="invcayley . hscale(2) . cayley",
        expected_class="hyperbolic",
        expected_step="positive",
        expected_tau=1.0 + 0j,
        expected_lambda=0.5,
        notes="Half-plane form w -> 2w: F'(inf) = 2, disk multiplier 1/2; an "
        "automorphism, so d_n is constant (atanh(1/3) = ln(2)/2 from w = i).",
    ),
    CatalogEntry(
        name="hyperbolic_nonaut",
        dsl="invcayley . hnudge(0+0i) . hscale(2) . cayley",
        expected_class="hyperbolic",
        expected_step="positive",
        expected_tau=1.0 + 0j,
        expected_lambda=0.5,
        notes="w -> 2w - 1/(2w+i): not an automorphism, F(w)/w -> 2 so the "
        "multiplier is still 1/2; the perturbation decays like 4^{-n}.",
    ),
    CatalogEntry(
        name="parabolic_aut_pos",
        dsl="invcayley . hshift(1+0i) . cayley",
        expected_class="parabolic",
        expected_step="positive",
        expected_tau=1.0 + 0j,
        expected_arg_limit=0.0,
        expected_slope=-1j,
        notes="Real translation w -> w+1: automorphism, hence constant step "
        "atanh(1/sqrt(5)) from w = i (|1/(1+2i)| = 1/sqrt(5)); orbits escape "
        "tangentially with arg F^n -> 0, disk slope -i tau.",
    ),
    CatalogEntry(
        name="parabolic_pos_nonaut",
        dsl="invcayley . hnudge(1+0i) . cayley",
        expected_class="parabolic",
        expected_step="positive",
        expected_tau=1.0 + 0j,
        expected_arg_limit=0.0,
        expected_slope=-1j,
        notes="w -> w + 1 - 1/(w+i): Im w_n increases to a finite limit L, so "
        "d_n -> atanh(1/|1+2iL|) > 0 while Re w_n ~ n; arg F^n -> 0.",
    ),
    CatalogEntry(
        name="parabolic_zero",
        dsl="invcayley . hshift(0+1i) . cayley",
        expected_class="parabolic",
        expected_step="zero",
        expected_tau=1.0 + 0j,
        expected_arg_limit=math.pi / 2.0,
        expected_slope=-1.0 + 0j,
        notes="Vertical translation w -> w+i: from w = i the orbit is (n+1)i "
        "and d_n = atanh(1/(2n+3)) -> 0; the approach is radial (arg = pi/2, "
        "disk slope -1), a non-tangential zero-step orbit.",
    ),
    CatalogEntry(
        name="parabolic_zero_slanted",
        dsl="invcayley . hshift(1+1i) . cayley",
        expected_class="parabolic",
        expected_step="zero",
        expected_tau=1.0 + 0j,
        expected_arg_limit=math.pi / 4.0,
        expected_slope=-1j * cmath.exp(-1j * math.pi / 4.0),
        notes="Slanted translation w -> w + 1 + i: Im w_n ~ n so the step "
        "atanh(sqrt(2)/|..|) -> 0, yet every orbit has the definite slope "
        "arg F^n -> pi/4: zero step does not preclude a slope.",
    ),
    CatalogEntry(
        name="parabolic_zero_mirrored",
        dsl="invcayley . hshift(-1+0i) . cayley",
        expected_class="parabolic",
        expected_step="positive",
        expected_tau=1.0 + 0j,
        expected_arg_limit=math.pi,
        expected_slope=1j,
        notes="Mirror image of parabolic_aut_pos: w -> w - 1 is again a real "
        "translation (Im b = 0), so the step is the same positive constant "
        "atanh(1/sqrt(5)) from w = i, but orbits run to the other tangential "
        "ray: arg F^n -> pi and the disk slope is +i tau.",
    ),
)

STEP_CLOSED_FORMS = {
    # probe z = 0 transports to w = i exactly
    "parabolic_aut_pos": _SQRT5_STEP,
    "parabolic_zero_mirrored": _SQRT5_STEP,
}


def names() -> tuple[str, ...]:
    return tuple(e.name for e in CATALOG)


def get(name: str) -> CatalogEntry:
    for entry in CATALOG:
        if entry.name == name:
            return entry
    raise KeyError(f"no catalog entry named {name!r}")


def resolve_map_text(text: str) -> str:
    """Expand "catalog:<name>" references; other text passes through."""
    if text.startswith("catalog:"):
        return get(text[len("catalog:") :]).dsl
    return text
