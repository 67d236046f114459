"""Random well-typed map expressions for property checks and fuzzing."""

from __future__ import annotations

import math
import random

from .geometry import Model
from .maps import (
    Blaschke,
    Cayley,
    Compose,
    DiskAut,
    HNudge,
    HScale,
    HShift,
    InvCayley,
    Iterate,
    MapExpr,
    Rot,
)


def _disk_point(rng: random.Random, rmax: float = 0.9) -> complex:
    r = rmax * math.sqrt(rng.random())
    ang = rng.uniform(-math.pi, math.pi)
    return r * complex(math.cos(ang), math.sin(ang))


def _disk_primitive(rng: random.Random) -> MapExpr:
    pick = rng.randrange(3)
    if pick == 0:
        return Rot(rng.uniform(-4.0, 4.0))
    if pick == 1:
        return DiskAut(rng.uniform(-4.0, 4.0), _disk_point(rng))
    factors = tuple(
        (_disk_point(rng, 0.8), rng.randint(1, 2)) for _ in range(rng.randint(1, 3))
    )
    return Blaschke(rng.uniform(-4.0, 4.0), factors)


def _halfplane_primitive(rng: random.Random) -> MapExpr:
    pick = rng.randrange(3)
    if pick == 0:
        b = complex(rng.uniform(-2.0, 2.0), rng.uniform(0.0, 2.0))
        if b == 0:
            b = 1.0 + 0j
        return HShift(b)
    if pick == 1:
        return HScale(math.exp(rng.uniform(-1.5, 1.5)))
    return HNudge(complex(rng.uniform(-2.0, 2.0), rng.uniform(0.0, 2.0)))


def random_map_expr(
    rng: random.Random,
    dom: Model | None = None,
    cod: Model | None = None,
    depth: int = 4,
) -> MapExpr:
    """A random well-typed tree with the requested signature."""
    if dom is None:
        dom = rng.choice((Model.DISK, Model.HALFPLANE))
    if cod is None:
        cod = rng.choice((Model.DISK, Model.HALFPLANE))
    if depth <= 0:
        if dom is cod:
            return _disk_primitive(rng) if dom is Model.DISK else _halfplane_primitive(rng)
        if dom is Model.DISK:
            return Cayley()
        return InvCayley()
    roll = rng.random()
    if dom is cod and roll < 0.25:
        prim = _disk_primitive(rng) if dom is Model.DISK else _halfplane_primitive(rng)
        return prim
    if dom is cod and roll < 0.45:
        return Iterate(random_map_expr(rng, dom, dom, depth - 1), rng.randint(1, 4))
    mid = rng.choice((Model.DISK, Model.HALFPLANE))
    outer = random_map_expr(rng, mid, cod, depth - 1)
    inner = random_map_expr(rng, dom, mid, depth - 1)
    return Compose(outer, inner)


def random_fuzz_input(rng: random.Random) -> str:
    """Raw parser fuzz material: random bytes, token soup, or mutated valid
    expressions."""
    roll = rng.random()
    if roll < 0.4:
        n = rng.randint(0, 40)
        return "".join(chr(rng.randint(1, 255)) for _ in range(n))
    if roll < 0.7:
        tokens = [
            "cayley", "invcayley", "rot", "hshift", "hscale", "hnudge",
            "diskaut", "blaschke", "(", ")", ".", "^", ",", ";", "i",
            "1", "0.5", "-", "+", "2i", "1+1i", " ", "e", "x",
        ]
        return "".join(rng.choice(tokens) for _ in range(rng.randint(0, 15)))
    from .maps import format_map

    text = format_map(random_map_expr(rng, depth=2))
    if not text or rng.random() < 0.3:
        return text
    pos = rng.randrange(len(text))
    ch = chr(rng.randint(32, 126))
    mode = rng.randrange(3)
    if mode == 0:
        return text[:pos] + ch + text[pos:]
    if mode == 1:
        return text[:pos] + text[pos + 1 :]
    return text[:pos] + ch + text[pos + 1 :]
