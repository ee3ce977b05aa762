import string
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pvicurves.catalog import (DATA_DIR, RECORD_ORDER, ParseError, SemanticError, format_expression,
                               load_towers, parse_expression, parse_record, parse_tower, record_to_dict,
                               serialize_record, serialize_tower)
from pvicurves.catalog.grammar import BinOp, EvaluationError, Neg, Num, Pow, Var, evaluate
from pvicurves.curves.models import conic_identity_holds
from pvicurves.pvi import PviSolution, ThetaParams, pvi_residual


def test_catalog_contents(catalog):
    assert tuple(catalog) == RECORD_ORDER
    assert catalog["sol-45"].sibling == "sol-44"
    assert catalog["sol-52"].derived_from == "sol-49"
    assert record_to_dict(catalog["sol-51"])["models"] == ["quartic"]


@pytest.mark.parametrize("rid", RECORD_ORDER)
def test_record_round_trip(catalog, rid):
    rec = catalog[rid]
    text = serialize_record(rec)
    again = parse_record(text)
    assert serialize_record(again) == text
    assert again.solution.y == rec.solution.y and again.solution.t == rec.solution.t
    assert again.theta == rec.theta


def test_tower_round_trip():
    for name, spec in load_towers().items():
        text = serialize_tower(spec)
        assert serialize_tower(parse_tower(text)) == text, name


def test_precedence():
    assert parse_expression("-x^2") == Neg(Pow(Var("x"), 2))
    assert parse_expression("a - b - c") == BinOp("-", BinOp("-", Var("a"), Var("b")), Var("c"))
    assert parse_expression("1/2*s") == BinOp("*", BinOp("/", Num(1), Num(2)), Var("s"))
    assert parse_expression("s^-2") == Pow(Var("s"), -2)
    assert evaluate(parse_expression("2^3 - 1/2"), {}) == Fraction(15, 2)


@pytest.mark.parametrize("text, column", [
    ("1 + ", 5), ("(s + 1", 7), ("s $ 2", 3), ("s^x", 3), ("s^2^3", 4), ("s 2", 3),
])
def test_parse_errors_have_positions(text, column):
    with pytest.raises(ParseError) as info:
        parse_expression(text)
    assert info.value.line == 1 and info.value.column == column


def test_record_errors():
    towers = load_towers()
    base = (DATA_DIR / "records" / "seed-10.rec").read_text()
    with pytest.raises(ParseError) as info:
        parse_record(base.replace("theta: 0 1/5 0 1", "theta: 0 1/5 0"), towers)
    assert info.value.line == 4
    with pytest.raises(ParseError):
        parse_record(base + "colour: blue\n", towers)
    with pytest.raises(SemanticError):
        parse_record(base.replace("curve-10", "curve-11"), towers)
    with pytest.raises(SemanticError):
        parse_record(base.replace("y: 1/2 - (3*s^2 + 6*s - 1)*u/(16*s^2)", "y: 1/2 + q"), towers)
    with pytest.raises(SemanticError):
        parse_record(base.replace("y: 1/2 - (3*s^2 + 6*s - 1)*u/(16*s^2)",
                                  "y: 1/2 + u*(27*s^5 - 315*s^4 - 370*s^3 + 170*s^2 - 25*s + 1)"
                                  "/(256*(5*s - 1)*s^3)"), towers)


def test_deep_tower_rejected():
    text = "tower: deep\nbase: s\nroot a: s\nroot b: s + 1\nroot c: s + 2\nt: s\n"
    with pytest.raises(SemanticError):
        parse_tower(text)


def test_continuation_lines():
    towers = load_towers()
    text = "record: x\ntower: curve-10\ny: 1/2 - (3*s^2 + 6*s\n   - 1)*u/(16*s^2)\ntheta: 0 1/5 0 1\n"
    rec = parse_record(text, towers)
    assert pvi_residual(rec.solution).is_zero


def test_printed_v_relation_fails(catalog):
    """The printed v^2 for the forty-branch curve does not fit the printed y."""
    tower_text = (DATA_DIR / "towers" / "curve-40.tower").read_text()
    printed = tower_text.replace("root v: -2*(j + 1)*(5*j^2 - 2*j + 13)",
                                 "root v: -(j - 1)*(j - 9)*(5*j^2 - 2*j + 13)")
    assert printed != tower_text
    spec = parse_tower(printed)
    rec_text = (DATA_DIR / "records" / "sol-51.rec").read_text()
    rec = parse_record(rec_text, {"curve-40": spec})
    sol = rec.solution
    thetas = [ThetaParams.of(a, a, a, 20 - a, denominator=20) for a in (1, 3, 7, 9)]
    for mask in range(sol.tower.size):
        for th in thetas:
            flipped = PviSolution(sol.tower, sol.y.conjugate(mask), sol.t.conjugate(mask), th)
            assert not pvi_residual(flipped).is_zero
    assert pvi_residual(catalog["sol-51"].solution).is_zero


def test_conic_typo():
    assert conic_identity_holds("j^2 - 18*j + 1")
    assert not conic_identity_holds("j^2 - 18 + 1")


# ------------------------------------------------------------ properties

names = st.sampled_from(["s", "j", "u", "v", "w1", "x_2"])
leaves = st.one_of(st.integers(0, 400).map(Num), names.map(Var))


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(children, st.integers(-4, 6)).map(lambda p: Pow(*p)),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda p: BinOp(*p)),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@given(trees)
def test_expression_round_trip(tree):
    text = format_expression(tree)
    assert parse_expression(text) == tree
    assert format_expression(parse_expression(text)) == text


@given(trees, st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(lambda f: f != 0))
def test_round_trip_preserves_value(tree, x):
    env = {n: x + k for k, n in enumerate(["s", "j", "u", "v", "w1", "x_2"])}
    try:
        a = evaluate(tree, env)
    except (ZeroDivisionError, EvaluationError):
        return
    assert evaluate(parse_expression(format_expression(tree)), env) == a


@given(st.text(alphabet=string.ascii_letters + string.digits + " +-*/^()$.,:#\n", max_size=40))
def test_parser_fuzz(text):
    try:
        parse_expression(text)
    except ParseError as exc:
        assert exc.line >= 1 and exc.column >= 1


@given(st.text(alphabet=string.ascii_letters + string.digits + " :-/+*()^\n#", max_size=120))
def test_record_parser_fuzz(text):
    try:
        parse_record(text, load_towers())
    except (ParseError, SemanticError):
        pass


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=9), min_size=4, max_size=4))
def test_theta_line_round_trip(values):
    towers = load_towers()
    th = " ".join(str(v) for v in values)
    text = f"record: r\ntower: curve-10\ny: 1/2 - (3*s^2 + 6*s - 1)*u/(16*s^2)\ntheta: {th}\n"
    rec = parse_record(text, towers)
    assert rec.theta.as_tuple() == tuple(Fraction(v) for v in values)
    assert parse_record(serialize_record(rec)).theta == rec.theta
