"""Solver session against the bundled SMT server."""

import pytest

from compover.smt.session import SolverError, SolverSession, parse_value


@pytest.fixture()
def session():
    s = SolverSession()
    yield s
    s.close()


def test_sat_and_model(session):
    session.send("(declare-const x (_ BitVec 8))")
    session.send("(declare-const p Bool)")
    session.send("(assert (= x #x2a))")
    session.send("(assert p)")
    assert session.check_sat() == "sat"
    x, p = session.get_value(["x", "p"])
    assert parse_value(x) == ("bv", 8, 0x2A)
    assert parse_value(p) == ("bool", True)


def test_unsat(session):
    session.send("(declare-const x (_ BitVec 4))")
    session.send("(assert (bvult x #x0))")
    assert session.check_sat() == "unsat"


def test_push_pop_scopes(session):
    session.send("(declare-const x (_ BitVec 4))")
    session.send("(assert (bvugt x #x3))")
    assert session.check_sat() == "sat"
    session.push()
    session.send("(assert (bvult x #x2))")
    assert session.check_sat() == "unsat"
    session.pop()
    assert session.check_sat() == "sat"


def test_arithmetic_wraps(session):
    session.send("(declare-const x (_ BitVec 8))")
    session.send("(assert (= x (bvadd #xff #x01)))")
    assert session.check_sat() == "sat"
    (x,) = session.get_value(["x"])
    assert parse_value(x) == ("bv", 8, 0)


def test_signed_comparison(session):
    # 0x80 is -128 signed: smaller than everything under bvslt
    session.send("(declare-const x (_ BitVec 8))")
    session.send("(assert (bvslt x #x80))")
    assert session.check_sat() == "unsat"


def test_ite_and_implication(session):
    session.send("(declare-const p Bool)")
    session.send("(declare-const x (_ BitVec 4))")
    session.send("(assert (=> p (= x #x7)))")
    session.send("(assert p)")
    assert session.check_sat() == "sat"
    x, = session.get_value(["(ite p x #x0)"])
    assert parse_value(x) == ("bv", 4, 7)


def test_bad_command_raises(session):
    with pytest.raises(SolverError):
        session.send("(this-is-not-a-command)")
        session.check_sat()


def test_parse_value_forms():
    assert parse_value("#b101") == ("bv", 3, 5)
    assert parse_value("#x0f") == ("bv", 8, 15)
    assert parse_value("false") == ("bool", False)
    assert parse_value("(_ bv10 6)") == ("bv", 6, 10)
    with pytest.raises(SolverError):
        parse_value("wat")
