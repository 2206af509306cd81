import pytest
from hypothesis import given, settings, strategies as st

from sessionbridge import errors as E
from sessionbridge.cli.parser import calculus_of, parse, parse_config, parse_expr, parse_type
from sessionbridge.gen import lfst_corpus, subst_corpus, vgr_corpus
from sessionbridge.lfst import pretty as LP
from sessionbridge.lfst import semantics as LS
from sessionbridge.lfst import syntax as L
from sessionbridge.names import var
from sessionbridge.vgr import pretty as VP
from sessionbridge.vgr import semantics as VS
from sessionbridge.vgr import syntax as V

from conftest import PROGRAMS

SERVER_SRC = """fun server u =
  let x = receive u in
  let y = receive u in
  send x + y on u
"""


def test_unit():
    assert parse_expr("()", "vgr") == V.UNIT
    assert parse_expr("()", "lfst") == L.UNIT


def test_server_source_functional_reading():
    (name, lam), = parse(SERVER_SRC, "lfst").defs
    u, x, y = var("u"), var("x"), var("y")
    assert name == var("server")
    assert lam == L.Lam(u, None, L.Let(x, L.Receive(L.Var(u)), L.Let(
        y, L.Receive(L.Var(u)), L.Send(L.Add(L.Var(x), L.Var(y)), L.Var(u)))))


def test_server_source_imperative_reading():
    (_, lam), = parse(SERVER_SRC, "vgr").defs
    assert isinstance(lam, V.Lam) and lam.sig is None and lam.ptype is None
    # the sum is let-bound before it is sent
    body = lam.body.body.body
    assert isinstance(body, V.Let) and isinstance(body.bound, V.Add)
    assert isinstance(body.body, V.Send) and body.body.value == V.Var(body.name)


def test_record_concat():
    e = parse_expr("{u: cu'} * sigma", "lfst")
    assert e == L.Concat(L.RecordLit(((var("u"), L.Var(var("cu'"))),)), L.Var(var("sigma")))
    assert parse_expr("sigma * {u = cu'}", "lfst") == L.Concat(
        L.Var(var("sigma")), L.RecordLit(((var("u"), L.Var(var("cu'"))),)))


def test_record_split_forms():
    s = L.Var(var("sigma"))
    assert parse_expr("sigma / u", "lfst") == L.Split(s, var("u"))
    assert parse_expr("sigma.u", "lfst") == L.Split(s, var("u"))
    assert parse_expr("sigma / {u, v}", "lfst") == L.SplitMany(s, (var("u"), var("v")))


def test_session_types():
    t = parse_type("?Int.!Int.End", "vgr")
    assert t == V.In(V.INT_T, V.Out(V.INT_T, V.END))
    assert VP.show_type(t) == "?Int.!Int.End"


def test_error_positions():
    with pytest.raises(E.ParseError) as info:
        parse("def f =\n  let x = in x", "vgr")
    assert (info.value.line, info.value.col) == (2, 11)


def test_duplicate_record_field():
    with pytest.raises(E.ParseError):
        parse_expr("{a = 1, a = 2}", "lfst")


def test_calculus_by_extension():
    assert calculus_of("a.vgr") == "vgr"
    assert calculus_of("a.lfst") == "lfst"
    assert calculus_of("a.lfsteff") == "lfst-eff"


@pytest.mark.parametrize("path", sorted(PROGRAMS.iterdir()), ids=lambda p: p.name)
def test_shipped_programs_round_trip(path):
    calc = calculus_of(path)
    prog = parse(path.read_text(), calc)
    show = VP.show_program if calc == "vgr" else LP.show_program
    assert parse(show(prog), calc) == prog


def _threads(sem, c):
    return sem.flatten(c)


def test_vgr_corpus_round_trip():
    for c in vgr_corpus(3, 60):
        assert _threads(VS, parse_config(VP.show(c), "vgr")) == _threads(VS, c)


def test_lfst_corpus_round_trip():
    for c in lfst_corpus(3, 60):
        assert _threads(LS, parse_config(LP.show(c), "lfst")) == _threads(LS, c)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_expression_round_trip(seed):
    (e, v, _), = subst_corpus(seed, 1)
    for t in (e, v):
        assert parse_expr(LP.show(t), "lfst") == t
