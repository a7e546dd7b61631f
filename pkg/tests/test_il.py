"""Expression language: parsing, typing, evaluation, printing."""

import pytest

from compover.il import (
    Assignment,
    Binary,
    Contract,
    IlSyntaxError,
    IlTypeError,
    IntLit,
    MissingPostState,
    Old,
    OldInPrecondition,
    SemType,
    UnknownVariable,
    Value,
    Var,
    VarContext,
    assignment_key,
    default_assignment,
    domain_size,
    enumerate_values,
    eval_bool,
    eval_expr,
    free_vars,
    parse_expr,
    parse_type,
    pretty_print,
    trivial_contract,
)

U8 = SemType.uint(8)
S8 = SemType.sint(8)


def ctx(**kw) -> VarContext:
    return VarContext.of({n: parse_type(t) for n, t in kw.items()})


def test_parse_type_shapes():
    assert parse_type("bool").kind == "bool"
    assert parse_type("u8") == U8
    assert parse_type("s8") == S8
    assert parse_type("u1").width == 1
    rec = SemType.record({"value": SemType.uint(32), "ok": SemType.bool_()})
    assert rec.kind == "record"
    assert [n for n, _ in rec.fields] == ["value", "ok"]
    with pytest.raises(Exception):
        parse_type("u0")
    with pytest.raises(Exception):
        parse_type("u65")


def test_parse_print_round_trip():
    c = ctx(x="u8", y="u8", p="bool")
    for text in [
        "x == y",
        "(x + y) <u 3",
        "p && (x != 255)",
        "!p || (x >=u y)",
        "(if p then x else y) == 0",
        "x == (old(x) + 1)",
    ]:
        e = parse_expr(text, c)
        again = parse_expr(pretty_print(e), c)
        assert again == e, text


def test_old_rejected_in_pre_position():
    c = ctx(x="u8")
    parse_expr("old(x) == x", c, position="post")
    with pytest.raises(OldInPrecondition):
        parse_expr("old(x) == x", c, position="pre")


def test_unknown_variable_and_trailing_input():
    c = ctx(x="u8")
    with pytest.raises(UnknownVariable):
        parse_expr("y == 1", c)
    with pytest.raises(IlSyntaxError):
        parse_expr("x == 1 x", c)


def test_literal_width_inference():
    c = ctx(x="u8")
    e = parse_expr("x == 200", c)
    lit = e.right
    assert isinstance(lit, IntLit) and lit.type == U8
    # no variable to anchor the width: needs a suffix
    with pytest.raises(IlTypeError):
        parse_expr("1 == 1", c)
    parse_expr("1u4 == 1", c)


def test_comparisons_carry_signedness():
    c = ctx(a="s8", x="u8")
    a = Assignment.of({"a": Value.of_int(-1, S8), "x": Value.of_int(255, U8)})
    assert eval_bool(parse_expr("a <s 0", c), a)
    # same bit pattern, unsigned type: 255 is the largest value, not negative
    assert not eval_bool(parse_expr("x <u 1", c), a)
    with pytest.raises(IlTypeError):
        parse_expr("a <u 0", c)
    with pytest.raises(IlTypeError):
        parse_expr("x <s 1", c)


def test_arithmetic_wraps_at_width():
    c = ctx(x="u8")
    a = Assignment.of({"x": Value.of_int(255, U8)})
    assert eval_expr(parse_expr("x + 1", c, expected=U8), a).as_unsigned == 0
    assert eval_expr(parse_expr("x * 2", c, expected=U8), a).as_unsigned == 254
    s = ctx(y="s8")
    b = Assignment.of({"y": Value.of_int(127, S8)})
    assert eval_expr(parse_expr("y + 1", s, expected=S8), b).as_signed == -128


def test_if_expression_requires_parens_as_operand():
    c = ctx(p="bool", x="u8")
    parse_expr("(if p then x else 0) == 0", c)
    # without parens the else-branch swallows the comparison and types clash
    with pytest.raises(IlTypeError):
        parse_expr("if p then x else 0 == 0", c)


def test_old_reads_pre_state_vars_read_post():
    c = ctx(x="u8")
    pre = Assignment.of({"x": Value.of_int(1, U8)})
    post = Assignment.of({"x": Value.of_int(2, U8)})
    e = parse_expr("x == (old(x) + 1)", c)
    assert eval_bool(e, pre, post)
    assert not eval_bool(e, post, pre)


def test_eval_without_post_state():
    c = ctx(x="u8")
    pre = Assignment.of({"x": Value.of_int(1, U8)})
    assert eval_bool(parse_expr("x == 1", c, position="pre"), pre)
    with pytest.raises(MissingPostState):
        eval_bool(parse_expr("old(x) == 1", c), pre)


def test_record_select_and_nested_access():
    hdr_t = SemType.record({"len": SemType.uint(4)})
    m_t = SemType.record({"hdr": hdr_t, "ok": SemType.bool_()})
    c = VarContext.of({"m": m_t})
    v = Value.of_record(
        m_t,
        {
            "hdr": Value.of_record(hdr_t, {"len": Value.of_int(9, SemType.uint(4))}),
            "ok": Value.of_bool(True),
        },
    )
    a = Assignment.of({"m": v})
    assert eval_bool(parse_expr("m.hdr.len == 9", c), a)
    assert eval_bool(parse_expr("m.ok", c), a)
    with pytest.raises(IlTypeError):
        parse_expr("m.nope", c)
    # records have no equality operator; compare leaves instead
    with pytest.raises(IlTypeError):
        parse_expr("m == m", c)


def test_enumerate_values_and_domain_size():
    t = SemType.record({"n": SemType.uint(2), "b": SemType.bool_()})
    vals = list(enumerate_values(t))
    assert len(vals) == domain_size(t) == 8
    assert len(set(map(str, vals))) == 8
    assert domain_size(parse_type("bool")) == 2
    assert domain_size(U8) == 256


def test_default_assignment_is_zero_and_false():
    c = ctx(x="u8", p="bool")
    d = default_assignment(c)
    assert d["x"].as_unsigned == 0
    assert not d["p"].as_bool


def test_assignment_update_and_string_form():
    c = ctx(x="u8", p="bool")
    a = default_assignment(c)
    b = a.set("x", Value.of_int(3, U8))
    assert a["x"].as_unsigned == 0 and b["x"].as_unsigned == 3
    assert str(b) == "(p=false, x=3)"
    assert assignment_key(b) != assignment_key(a)
    assert b.conforms(c)


def test_free_vars_splits_old_and_current():
    c = ctx(x="u8", y="u8", p="bool")
    e = parse_expr("p && (x == old(x))", c)
    olds, curs = free_vars(e)
    assert olds == {"x"}
    assert curs == {"x", "p"}


def test_contract_validate():
    c = ctx(x="u8")
    good = Contract(parse_expr("x <u 10", c, position="pre"), parse_expr("old(x) <=u x", c))
    good.validate(c)
    bad = Contract(parse_expr("old(x) <=u x", c), parse_expr("true", c))
    with pytest.raises(OldInPrecondition):
        bad.validate(c)
    t = trivial_contract()
    t.validate(c)
    assert pretty_print(t.pre) == "true"


def test_implies_is_right_associative_and_lowest_precedence():
    c = ctx(p="bool", q="bool", r="bool")
    e = parse_expr("p -> q -> r", c)
    assert e == parse_expr("p -> (q -> r)", c)
    a = Assignment.of(
        {"p": Value.of_bool(True), "q": Value.of_bool(False), "r": Value.of_bool(False)}
    )
    assert eval_bool(e, a)


def test_operator_precedence_or_binds_looser_than_and():
    c = ctx(p="bool", q="bool", r="bool")
    assert parse_expr("p || q && r", c) == parse_expr("p || (q && r)", c)


def test_expr_ast_is_hashable_and_comparable():
    e1 = Binary("add", Var("x"), IntLit(1, U8))
    e2 = Binary("add", Var("x"), IntLit(1, U8))
    assert e1 == e2 and hash(e1) == hash(e2)
    assert e1 != Binary("add", Var("x"), IntLit(2, U8))
    assert Old("x") != Var("x")
