"""A small typed expression language for holomorphic self-maps.

Grammar (EBNF)::

    map   = term { "." term }          # "f . g" means f o g, g applies first
    term  = atom [ "^" nat ]           # nat >= 1, n-fold iteration
    atom  = prim | "(" map ")"

Primitives (model signatures in parentheses)::

    cayley                     Disk -> HalfPlane   z -> i(1+z)/(1-z)
    invcayley                  HalfPlane -> Disk   w -> (w-i)/(w+i)
    rot(theta)                 Disk -> Disk        z -> e^{i theta} z
    diskaut(theta, a)          Disk -> Disk        z -> e^{i theta}(z+a)/(1+conj(a)z), |a|<1
    hshift(b)                  HalfPlane endo      w -> w + b, Im b >= 0, b != 0
    hscale(a)                  HalfPlane endo      w -> a w, real a > 0
    hnudge(c)                  HalfPlane endo      w -> w + c - 1/(w+i), Im c >= 0
    blaschke(theta; (a,m),..)  Disk -> Disk        e^{i theta} prod ((z-a_k)/(1-conj(a_k)z))^{m_k}

Complex literals are written as ``1.5``, ``2i``, ``1+0.5i`` or ``-0.3-1i``;
there is no arithmetic inside literals.  Every parameter constraint above
analytically guarantees that the primitive maps its domain into itself, so a
well-typed tree is a genuine self-map and needs no runtime proof.

Parsing is total: any input either yields a well-typed tree or raises exactly
one :class:`ParseError` whose offset lies within the input.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Callable

from .geometry import Model, Point, _cayley, _cayley_inv, _finite


class MapConstraintError(ValueError):
    """A primitive parameter violates its constraint."""

    def __init__(self, constraint: str, message: str):
        super().__init__(f"{message} [constraint: {constraint}]")
        self.constraint = constraint


class MapTypeError(TypeError):
    """Model tags do not line up in a composition or iterate."""

    def __init__(self, message: str, outer: Model | None = None, inner: Model | None = None):
        super().__init__(message)
        self.outer = outer
        self.inner = inner


class ParseError(ValueError):
    """Parse failure with a byte offset, message and expected-token summary."""

    def __init__(self, offset: int, message: str, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.message = message
        self.expected = expected
        hint = f"; expected {', '.join(expected)}" if expected else ""
        super().__init__(f"at offset {offset}: {message}{hint}")


class EvalError(ArithmeticError):
    """A nonfinite value appeared during evaluation; carries the node path."""

    def __init__(self, message: str, path: tuple[str, ...]):
        super().__init__(f"{message} at {'/'.join(path) or '<root>'}")
        self.path = path


def _check_finite_param(name: str, value: complex | float) -> None:
    c = complex(value)
    if not _finite(c):
        raise MapConstraintError(f"{name} finite", f"{name} = {value!r} is not finite")


@dataclass(frozen=True)
class Cayley:
    pass


@dataclass(frozen=True)
class InvCayley:
    pass


@dataclass(frozen=True)
class Rot:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        _check_finite_param("theta", self.theta)


@dataclass(frozen=True)
class DiskAut:
    theta: float
    a: complex

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "a", complex(self.a))
        _check_finite_param("theta", self.theta)
        _check_finite_param("a", self.a)
        if abs(self.a) >= 1.0:
            raise MapConstraintError("|a| < 1", f"diskaut center image |a| = {abs(self.a)!r} >= 1")


@dataclass(frozen=True)
class HShift:
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "b", complex(self.b))
        _check_finite_param("b", self.b)
        if self.b == 0:
            raise MapConstraintError("b != 0", "hshift with b = 0 is the identity; disallowed")
        if self.b.imag < 0.0:
            raise MapConstraintError("Im b >= 0", f"hshift needs Im b >= 0, got {self.b.imag!r}")


@dataclass(frozen=True)
class HScale:
    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        _check_finite_param("a", self.a)
        if self.a <= 0.0:
            raise MapConstraintError("a > 0", f"hscale needs a > 0, got {self.a!r}")


@dataclass(frozen=True)
class HNudge:
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        _check_finite_param("c", self.c)
        if self.c.imag < 0.0:
            raise MapConstraintError("Im c >= 0", f"hnudge needs Im c >= 0, got {self.c.imag!r}")


@dataclass(frozen=True)
class Blaschke:
    theta: float
    factors: tuple[tuple[complex, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(
            self, "factors", tuple((complex(a), int(m)) for a, m in self.factors)
        )
        _check_finite_param("theta", self.theta)
        if not self.factors:
            raise MapConstraintError("factors nonempty", "blaschke needs at least one factor")
        for a, m in self.factors:
            _check_finite_param("zero", a)
            if abs(a) >= 1.0:
                raise MapConstraintError("|a_k| < 1", f"blaschke zero |a| = {abs(a)!r} >= 1")
            if m < 1:
                raise MapConstraintError("m_k >= 1", f"blaschke multiplicity {m} < 1")


@dataclass(frozen=True)
class Compose:
    outer: "MapExpr"
    inner: "MapExpr"

    def __post_init__(self):
        cod, dom = codomain(self.inner), domain(self.outer)
        if cod is not dom:
            raise MapTypeError(
                f"composition mismatch: inner map produces {cod.value}, outer expects {dom.value}",
                outer=dom,
                inner=cod,
            )


@dataclass(frozen=True)
class Iterate:
    base: "MapExpr"
    n: int

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        if domain(self.base) is not codomain(self.base):
            raise MapTypeError(
                "only endo-maps can be iterated",
                outer=domain(self.base),
                inner=codomain(self.base),
            )
        if self.n < 1:
            raise MapConstraintError("n >= 1", f"iteration power {self.n} < 1")


MapExpr = (
    Cayley | InvCayley | Rot | DiskAut | HShift | HScale | HNudge | Blaschke | Compose | Iterate
)

_SIGNATURES: dict[type, tuple[Model, Model]] = {
    Cayley: (Model.DISK, Model.HALFPLANE),
    InvCayley: (Model.HALFPLANE, Model.DISK),
    Rot: (Model.DISK, Model.DISK),
    DiskAut: (Model.DISK, Model.DISK),
    Blaschke: (Model.DISK, Model.DISK),
    HShift: (Model.HALFPLANE, Model.HALFPLANE),
    HScale: (Model.HALFPLANE, Model.HALFPLANE),
    HNudge: (Model.HALFPLANE, Model.HALFPLANE),
}


def domain(m: MapExpr) -> Model:
    if isinstance(m, Compose):
        return domain(m.inner)
    if isinstance(m, Iterate):
        return domain(m.base)
    return _SIGNATURES[type(m)][0]


def codomain(m: MapExpr) -> Model:
    if isinstance(m, Compose):
        return codomain(m.outer)
    if isinstance(m, Iterate):
        return codomain(m.base)
    return _SIGNATURES[type(m)][1]


def is_endo(m: MapExpr) -> bool:
    return domain(m) is codomain(m)


# ---------------------------------------------------------------------------
# evaluation


def _blaschke_val(node: Blaschke, z: complex) -> complex:
    out = cmath.exp(1j * node.theta)
    for a, mult in node.factors:
        out *= ((z - a) / (1.0 - a.conjugate() * z)) ** mult
    return out


def _eval_node(m: MapExpr, z: complex, path: tuple[str, ...]) -> complex:
    if isinstance(m, Cayley):
        out = _cayley(z)
    elif isinstance(m, InvCayley):
        out = _cayley_inv(z)
    elif isinstance(m, Rot):
        out = cmath.exp(1j * m.theta) * z
    elif isinstance(m, DiskAut):
        out = cmath.exp(1j * m.theta) * (z + m.a) / (1.0 + m.a.conjugate() * z)
    elif isinstance(m, HShift):
        out = z + m.b
    elif isinstance(m, HScale):
        out = m.a * z
    elif isinstance(m, HNudge):
        out = z + m.c - 1.0 / (z + 1j)
    elif isinstance(m, Blaschke):
        out = _blaschke_val(m, z)
    elif isinstance(m, Compose):
        out = _eval_node(m.outer, _eval_node(m.inner, z, path + ("inner",)), path + ("outer",))
    elif isinstance(m, Iterate):
        out = z
        for _ in range(m.n):
            out = _eval_node(m.base, out, path + ("base",))
        return out
    else:  # pragma: no cover
        raise TypeError(f"unknown node {m!r}")
    if not _finite(out):
        raise EvalError(f"nonfinite value {out!r}", path)
    return out


def evaluate(m: MapExpr, p: Point) -> Point:
    """Evaluate a well-typed map at a point of its domain model."""
    if p.model is not domain(m):
        raise MapTypeError(
            f"point is in the {p.model.value} model, map expects {domain(m).value}"
        )
    return Point(_eval_node(m, p.coordinate, ()), codomain(m))


def _eval_d(m: MapExpr, z: complex) -> tuple[complex, complex]:
    """Value and complex derivative together (forward chain rule)."""
    if isinstance(m, Cayley):
        return _cayley(z), 2j / (1.0 - z) ** 2
    if isinstance(m, InvCayley):
        return _cayley_inv(z), 2j / (z + 1j) ** 2
    if isinstance(m, Rot):
        r = cmath.exp(1j * m.theta)
        return r * z, r
    if isinstance(m, DiskAut):
        r = cmath.exp(1j * m.theta)
        den = 1.0 + m.a.conjugate() * z
        return r * (z + m.a) / den, r * (1.0 - abs(m.a) ** 2) / den**2
    if isinstance(m, HShift):
        return z + m.b, 1.0 + 0j
    if isinstance(m, HScale):
        return m.a * z, complex(m.a)
    if isinstance(m, HNudge):
        return z + m.c - 1.0 / (z + 1j), 1.0 + 1.0 / (z + 1j) ** 2
    if isinstance(m, Blaschke):
        vals = []
        ders = []
        for a, _mult in m.factors:
            den = 1.0 - a.conjugate() * z
            vals.append((z - a) / den)
            ders.append((1.0 - abs(a) ** 2) / den**2)
        rot = cmath.exp(1j * m.theta)
        value = rot
        for (_, mult), v in zip(m.factors, vals):
            value *= v**mult
        deriv = 0j
        for j, ((_, mult), vj, dj) in enumerate(zip(m.factors, vals, ders)):
            term = rot * mult * dj * vj ** (mult - 1)
            for k, ((_, mk), vk) in enumerate(zip(m.factors, vals)):
                if k != j:
                    term *= vk**mk
            deriv += term
        return value, deriv
    if isinstance(m, Compose):
        gv, gd = _eval_d(m.inner, z)
        fv, fd = _eval_d(m.outer, gv)
        return fv, fd * gd
    if isinstance(m, Iterate):
        v, d = z, 1.0 + 0j
        for _ in range(m.n):
            v, step = _eval_d(m.base, v)
            d *= step
        return v, d
    raise TypeError(f"unknown node {m!r}")  # pragma: no cover


def derivative(m: MapExpr, p: Point) -> complex:
    """Complex derivative of the composite at an interior point."""
    if p.model is not domain(m):
        raise MapTypeError(
            f"point is in the {p.model.value} model, map expects {domain(m).value}"
        )
    value, deriv = _eval_d(m, p.coordinate)
    if not (_finite(value) and _finite(deriv)):
        raise EvalError(f"nonfinite derivative data ({value!r}, {deriv!r})", ())
    return deriv


def iterate_eval(m: MapExpr, p: Point, n: int) -> Point:
    """n-fold application of an endo-map; n = 0 returns the point unchanged.

    Raises EvalError if a half-plane coordinate exceeds 1e300 (overflow guard).
    """
    if not is_endo(m):
        raise MapTypeError("iterate requires an endo-map")
    if p.model is not domain(m):
        raise MapTypeError(
            f"point is in the {p.model.value} model, map expects {domain(m).value}"
        )
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    guard = domain(m) is Model.HALFPLANE
    z = p.coordinate
    f = compile_map(m)
    for k in range(n):
        z = f(z)
        if not _finite(z):
            raise EvalError(f"nonfinite value after {k + 1} steps", ())
        if guard and abs(z) > 1e300:
            raise EvalError(f"half-plane overflow guard tripped after {k + 1} steps", ())
    return Point(z, codomain(m))


def compile_map(m: MapExpr) -> Callable[[complex], complex]:
    """Compile a map to a bare complex -> complex closure for hot loops.

    No domain validation or finiteness checking happens inside; callers own
    their guards.
    """
    if isinstance(m, Cayley):
        return _cayley
    if isinstance(m, InvCayley):
        return _cayley_inv
    if isinstance(m, Rot):
        r = cmath.exp(1j * m.theta)
        return lambda z: r * z
    if isinstance(m, DiskAut):
        r = cmath.exp(1j * m.theta)
        a = m.a
        ac = a.conjugate()
        return lambda z: r * (z + a) / (1.0 + ac * z)
    if isinstance(m, HShift):
        b = m.b
        return lambda z: z + b
    if isinstance(m, HScale):
        a = complex(m.a)
        return lambda z: a * z
    if isinstance(m, HNudge):
        c = m.c
        return lambda z: z + c - 1.0 / (z + 1j)
    if isinstance(m, Blaschke):
        node = m
        return lambda z: _blaschke_val(node, z)
    if isinstance(m, Compose):
        f = compile_map(m.outer)
        g = compile_map(m.inner)
        return lambda z: f(g(z))
    if isinstance(m, Iterate):
        base = compile_map(m.base)
        n = m.n

        def run(z: complex) -> complex:
            for _ in range(n):
                z = base(z)
            return z

        return run
    raise TypeError(f"unknown node {m!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# printing

def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _fmt_complex(c: complex) -> str:
    re_part = _fmt_real(c.real)
    im = c.imag
    sign = "-" if im < 0 else "+"
    return f"{re_part}{sign}{_fmt_real(abs(im))}i"


def _fmt_term(m: MapExpr) -> str:
    # term position: compositions need parens, everything else stands alone
    if isinstance(m, Compose):
        return f"({format_map(m)})"
    return format_map(m)


def format_map(m: MapExpr) -> str:
    """Canonical text form; parse_map(format_map(m)) is structurally m."""
    if isinstance(m, Cayley):
        return "cayley"
    if isinstance(m, InvCayley):
        return "invcayley"
    if isinstance(m, Rot):
        return f"rot({_fmt_real(m.theta)})"
    if isinstance(m, DiskAut):
        return f"diskaut({_fmt_real(m.theta)},{_fmt_complex(m.a)})"
    if isinstance(m, HShift):
        return f"hshift({_fmt_complex(m.b)})"
    if isinstance(m, HScale):
        return f"hscale({_fmt_real(m.a)})"
    if isinstance(m, HNudge):
        return f"hnudge({_fmt_complex(m.c)})"
    if isinstance(m, Blaschke):
        facs = ",".join(f"({_fmt_complex(a)},{mult})" for a, mult in m.factors)
        return f"blaschke({_fmt_real(m.theta)};{facs})"
    if isinstance(m, Compose):
        # flatten the left spine: Compose(Compose(a,b),c) prints "a . b . c"
        parts: list[MapExpr] = []
        node: MapExpr = m
        while isinstance(node, Compose):
            parts.append(node.inner)
            node = node.outer
        parts.append(node)
        parts.reverse()
        return " . ".join(_fmt_term(p) for p in parts)
    if isinstance(m, Iterate):
        base = m.base
        if isinstance(base, (Compose, Iterate)):
            return f"({format_map(base)})^{m.n}"
        return f"{format_map(base)}^{m.n}"
    raise TypeError(f"unknown node {m!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# parsing

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"(?P<s1>[+-])?(?P<n1>{_NUM})(?P<i1>i)?(?:(?P<s2>[+-])(?P<n2>{_NUM})(?P<i2>i))?"
)
_REAL_RE = re.compile(rf"[+-]?{_NUM}")
_NAT_RE = re.compile(r"\d+")
_NAME_RE = re.compile(r"[a-zA-Z_][a-zA-Z_0-9]*")

_NO_ARG = {"cayley": Cayley, "invcayley": InvCayley}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, expected: tuple[str, ...] = (), offset: int | None = None):
        raise ParseError(min(self.pos if offset is None else offset, len(self.text)), message, expected)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.peek() != ch:
            self.error(f"expected '{ch}'", expected=(repr(ch),))
        self.pos += 1

    def real(self) -> float:
        self.skip_ws()
        m = _REAL_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a real number", expected=("number",))
        if self.pos + len(m.group(0)) < len(self.text) and self.text[m.end()] == "i":
            self.error("expected a real number, found a complex literal", expected=("real number",))
        self.pos = m.end()
        return float(m.group(0))

    def complex_lit(self) -> complex:
        self.skip_ws()
        m = _COMPLEX_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a complex literal", expected=("number", "a+bi"))
        if m.group("i1") and m.group("n2"):
            self.error("imaginary part given twice in complex literal")
        first = float(m.group("n1")) * (-1.0 if m.group("s1") == "-" else 1.0)
        if m.group("i1"):
            value = complex(0.0, first)
        elif m.group("n2"):
            second = float(m.group("n2")) * (-1.0 if m.group("s2") == "-" else 1.0)
            value = complex(first, second)
        else:
            value = complex(first, 0.0)
        self.pos = m.end()
        return value

    def nat(self) -> int:
        self.skip_ws()
        m = _NAT_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a natural number", expected=("digits",))
        self.pos = m.end()
        return int(m.group(0))

    def _primitive(self) -> MapExpr:
        self.skip_ws()
        start = self.pos
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            self.error(
                "expected a map primitive or '('",
                expected=("cayley", "invcayley", "rot", "diskaut", "hshift", "hscale", "hnudge", "blaschke", "("),
            )
        name = m.group(0)
        self.pos = m.end()
        try:
            if name in _NO_ARG:
                return _NO_ARG[name]()
            if name == "rot":
                self.expect("(")
                theta = self.real()
                self.expect(")")
                return Rot(theta)
            if name == "hscale":
                self.expect("(")
                a = self.real()
                self.expect(")")
                return HScale(a)
            if name == "hshift":
                self.expect("(")
                b = self.complex_lit()
                self.expect(")")
                return HShift(b)
            if name == "hnudge":
                self.expect("(")
                c = self.complex_lit()
                self.expect(")")
                return HNudge(c)
            if name == "diskaut":
                self.expect("(")
                theta = self.real()
                self.expect(",")
                a = self.complex_lit()
                self.expect(")")
                return DiskAut(theta, a)
            if name == "blaschke":
                self.expect("(")
                theta = self.real()
                self.expect(";")
                factors = [self._blaschke_factor()]
                self.skip_ws()
                while self.peek() == ",":
                    self.pos += 1
                    factors.append(self._blaschke_factor())
                    self.skip_ws()
                self.expect(")")
                return Blaschke(theta, tuple(factors))
        except MapConstraintError as exc:
            raise ParseError(start, f"parameter constraint violated: {exc}") from exc
        self.error(f"unknown map primitive '{name}'", offset=start)

    def _blaschke_factor(self) -> tuple[complex, int]:
        self.expect("(")
        a = self.complex_lit()
        self.expect(",")
        mult = self.nat()
        self.expect(")")
        return a, mult

    def _atom(self) -> MapExpr:
        self.skip_ws()
        if self.peek() == "(":
            self.pos += 1
            inner = self._map()
            self.expect(")")
            return inner
        return self._primitive()

    def _term(self) -> MapExpr:
        start = self.pos
        atom = self._atom()
        self.skip_ws()
        if self.peek() == "^":
            self.pos += 1
            n = self.nat()
            try:
                return Iterate(atom, n)
            except MapTypeError as exc:
                raise ParseError(
                    start,
                    f"type error: cannot iterate a {domain(atom).value} -> {codomain(atom).value} map",
                ) from exc
            except MapConstraintError as exc:
                raise ParseError(start, f"parameter constraint violated: {exc}") from exc
        return atom

    def _map(self) -> MapExpr:
        self.skip_ws()
        expr = self._term()
        while True:
            self.skip_ws()
            if self.peek() != ".":
                return expr
            self.pos += 1
            self.skip_ws()
            rhs_start = self.pos
            rhs = self._term()
            try:
                expr = Compose(expr, rhs)
            except MapTypeError as exc:
                raise ParseError(rhs_start, f"type error: {exc}") from exc


def parse_map(text: str) -> MapExpr:
    """Parse the DSL into a well-typed tree, or raise ParseError."""
    p = _Parser(text)
    expr = p._map()
    p.skip_ws()
    if p.pos != len(text):
        p.error("unexpected trailing input", expected=("'.'", "end of input"))
    return expr


def parse_complex(text: str) -> complex:
    """Parse a standalone complex literal (used for CLI point arguments)."""
    p = _Parser(text)
    value = p.complex_lit()
    p.skip_ws()
    if p.pos != len(text):
        p.error("unexpected trailing input after complex literal")
    return value
