"""Map DSL: parser, printer, evaluator, derivative, iteration."""

import math
import random

import pytest
from hypothesis import given, strategies as st

from disklab.geometry import Model, Point
from disklab.maps import (
    Blaschke,
    Compose,
    EvalError,
    HShift,
    Iterate,
    MapConstraintError,
    MapTypeError,
    ParseError,
    Rot,
    codomain,
    derivative,
    domain,
    evaluate,
    format_map,
    is_endo,
    iterate_eval,
    parse_complex,
    parse_map,
)
from disklab.randmaps import random_fuzz_input, random_map_expr
from disklab.catalog import CATALOG
from conftest import sample_disk


class TestParse:
    def test_hshift(self):
        assert parse_map("hshift(1+0i)") == HShift(1)

    def test_bridge_is_well_typed(self):
        m = parse_map("invcayley . hshift(1) . cayley")
        assert domain(m) is Model.DISK and codomain(m) is Model.DISK

    def test_type_error_offset(self):
        with pytest.raises(ParseError) as err:
            parse_map("cayley . cayley")
        assert err.value.offset == 9

    def test_syntax_error_offset(self):
        with pytest.raises(ParseError) as err:
            parse_map("rot(x)")
        assert err.value.offset == 4

    def test_iterate_type_error(self):
        with pytest.raises(ParseError):
            parse_map("cayley^2")

    def test_iterate_zero_rejected(self):
        with pytest.raises(ParseError):
            parse_map("rot(1)^0")

    def test_param_constraints(self):
        for bad in ("hshift(0+0i)", "hshift(1-1i)", "hscale(-2)", "hscale(0)",
                    "diskaut(0,1+0i)", "blaschke(0;(2+0i,1))", "blaschke(0;(0+0i,0))"):
            with pytest.raises(ParseError):
                parse_map(bad)

    def test_unknown_primitive(self):
        with pytest.raises(ParseError) as err:
            parse_map("spiral(1)")
        assert err.value.offset == 0

    def test_trailing_input(self):
        with pytest.raises(ParseError):
            parse_map("rot(1) rot(2)")

    def test_blaschke(self):
        m = parse_map("blaschke(0.5;(0.1+0.2i,2),(0+0i,1))")
        assert isinstance(m, Blaschke)
        assert m.factors == ((0.1 + 0.2j, 2), (0j, 1))

    def test_parens_and_iterate(self):
        m = parse_map("(invcayley . hshift(1) . cayley)^3")
        assert isinstance(m, Iterate) and m.n == 3

    def test_empty_input(self):
        with pytest.raises(ParseError) as err:
            parse_map("")
        assert err.value.offset == 0

    def test_direct_construction_validates(self):
        with pytest.raises(MapConstraintError):
            HShift(0)
        with pytest.raises(MapTypeError):
            Compose(parse_map("rot(1)"), parse_map("cayley"))


class TestComplexLiterals:
    @pytest.mark.parametrize(
        "text,value",
        [("1.5", 1.5), ("2i", 2j), ("1+0.5i", 1 + 0.5j), ("-0.3-1i", -0.3 - 1j),
         ("0+1i", 1j), ("-1+0i", -1.0), ("1e-3", 1e-3), ("2.5e2i", 250j)],
    )
    def test_forms(self, text, value):
        assert parse_complex(text) == value

    def test_bare_i_rejected(self):
        with pytest.raises(ParseError):
            parse_complex("i")

    def test_arithmetic_rejected(self):
        with pytest.raises(ParseError):
            parse_complex("1+2")


class TestFormat:
    def test_canonical_hshift(self):
        assert format_map(HShift(1)) == "hshift(1+0i)"

    def test_catalog_roundtrip(self):
        for entry in CATALOG:
            m = parse_map(entry.dsl)
            assert parse_map(format_map(m)) == m

    def test_nested_compose_parens(self):
        m = Compose(parse_map("rot(1)"), Compose(parse_map("rot(2)"), parse_map("rot(3)")))
        text = format_map(m)
        assert parse_map(text) == m

    @given(st.integers(0, 10_000))
    def test_random_tree_roundtrip(self, seed):
        tree = random_map_expr(random.Random(seed))
        assert parse_map(format_map(tree)) == tree


class TestEval:
    def test_hshift(self):
        assert evaluate(HShift(1), Point.halfplane(1j)).coordinate == 1 + 1j

    def test_blaschke_identity(self, rng):
        m = parse_map("blaschke(0;(0+0i,1))")
        for _ in range(50):
            z = sample_disk(rng)
            assert evaluate(m, Point.disk(z)).coordinate == pytest.approx(z, abs=1e-15)

    def test_bridge_value(self):
        m = parse_map("invcayley . hshift(1) . cayley")
        assert evaluate(m, Point.disk(0)).coordinate == pytest.approx(0.2 - 0.4j, abs=1e-15)

    def test_wrong_model(self):
        with pytest.raises(MapTypeError):
            evaluate(HShift(1), Point.disk(0))

    def test_type_preservation(self, rng):
        flagged = 0
        for entry in CATALOG:
            m = entry.expr
            for _ in range(1000):
                z = sample_disk(rng, 0.95)
                out = evaluate(m, Point.disk(z)).coordinate
                assert abs(out) < 1.0
                if abs(out) > 1.0 - 1e-15:
                    flagged += 1  # boundary proximity: warn-level, not a failure
        assert flagged == 0


class TestDerivative:
    def test_shift_and_scale(self):
        w = Point.halfplane(0.3 + 0.7j)
        assert derivative(parse_map("hshift(1+1i)"), w) == 1
        assert derivative(parse_map("hscale(2)"), w) == 2

    def test_finite_differences(self, rng):
        h = 1e-6
        checked = 0
        while checked < 200:
            entry = CATALOG[rng.randrange(len(CATALOG))]
            m = entry.expr
            z = sample_disk(rng, 0.5)
            sym = derivative(m, Point.disk(z))
            num = (
                evaluate(m, Point.disk(z + h)).coordinate
                - evaluate(m, Point.disk(z - h)).coordinate
            ) / (2.0 * h)
            assert abs(sym - num) <= 1e-6 * max(1.0, abs(sym))
            checked += 1

    def test_blaschke_at_zero_of_factor(self):
        # derivative of z^2 vanishes at 0; product rule must not divide by B
        m = parse_map("blaschke(0;(0+0i,2))")
        assert derivative(m, Point.disk(0)) == 0
        assert derivative(m, Point.disk(0.25)) == pytest.approx(0.5, abs=1e-14)


class TestIterate:
    def test_translation(self):
        got = iterate_eval(HShift(1), Point.halfplane(1j), 3)
        assert got.coordinate == 3 + 1j

    def test_zero_iterations(self):
        p = Point.halfplane(2 + 1j)
        assert iterate_eval(HShift(1), p, 0).coordinate == p.coordinate

    def test_semigroup_exact(self, rng):
        m = parse_map("hnudge(0.5+0.5i)")
        p = Point.halfplane(0.2 + 1.1j)
        a, b = 7, 5
        once = iterate_eval(m, p, a + b).coordinate
        twice = iterate_eval(m, iterate_eval(m, p, b), a).coordinate
        assert once == twice

    def test_squaring_closed_form(self):
        m = parse_map("blaschke(0;(0+0i,2))")
        got = iterate_eval(m, Point.disk(0.5), 4).coordinate
        assert got == pytest.approx(0.5**16, abs=1e-18)

    def test_overflow_guard(self):
        with pytest.raises(EvalError):
            iterate_eval(parse_map("hscale(2)"), Point.halfplane(1j), 2000)

    def test_non_endo_rejected(self):
        with pytest.raises(MapTypeError):
            iterate_eval(parse_map("cayley"), Point.disk(0), 2)


class TestFuzz:
    def test_parser_totality(self):
        rng = random.Random(1234)
        for _ in range(20_000):
            text = random_fuzz_input(rng)
            try:
                m = parse_map(text)
                assert is_endo(m) or not is_endo(m)  # parsed: any valid tree
            except ParseError as exc:
                assert 0 <= exc.offset <= len(text)
