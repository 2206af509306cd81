import pytest
from hypothesis import given, settings, strategies as st

from sessionbridge import errors as E
from sessionbridge.cli.parser import parse_config, parse_expr, parse_type
from sessionbridge.env import Env
from sessionbridge.forward import translate_closed
from sessionbridge.gen import lfst_corpus, vgr_corpus
from sessionbridge.lfst import pretty as LP
from sessionbridge.lfst import semantics as LS
from sessionbridge.lfst import syntax as L
from sessionbridge.lfst import typing as LT
from sessionbridge.names import Act, FreshSupply, Silent, var
from sessionbridge.trace import FirstEnabled, Seeded

from conftest import load


def ty(src):
    return parse_type(src, "lfst")


def e(src):
    return parse_expr(src, "lfst")


def test_unr_basics():
    assert L.unr(L.UNIT_T)
    assert not L.unr(ty("!Int.End"))
    assert L.unr(L.Record(Env()))


SESSIONS = st.sampled_from(["End", "!Int.End", "?Int.End", "!Int.?Int.End"])
PLAIN = st.sampled_from(["Unit", "Int", "Int -> Int"])


@given(st.lists(st.one_of(SESSIONS, PLAIN), max_size=4))
def test_unr_lifts_pointwise(fields):
    row = Env(tuple((var(f"f{i}"), ty(t)) for i, t in enumerate(fields)))
    assert L.unr(L.Record(row)) == all(L.unr(t) for t in row.values())


def test_unit_checks():
    assert LT.check_expr(Env(), L.UNIT) == (L.UNIT_T, Env())


def test_aliasing_violates_linearity():
    s = ty("!Int.!Int.End")
    gamma = Env(((var("sendSend"), L.FunU(s, L.FunL(s, L.UNIT_T))), (var("w"), s)))
    with pytest.raises(E.LinearViolation):
        LT.check_expr(gamma, e("sendSend w w"))


def test_value_consumes_its_linear_variables():
    s = ty("!Int.End")
    gamma = Env(((var("c"), s), (var("d"), s), (var("n"), L.INT_T)))
    t, left = LT.check_expr(gamma, e("(c, n)"))
    assert t == L.LinPair(s, L.INT_T)
    assert left == Env(((var("d"), s), (var("n"), L.INT_T)))


@given(st.permutations(["a", "b", "c"]), st.integers(1, 2))
def test_concat_commutes_and_associates_on_types(order, cut):
    fields = {"a": "Int", "b": "!Int.End", "c": "Unit"}
    recs = [f"{{{k} = x{k}}}" for k in order]
    gamma = Env(tuple((var(f"x{k}"), ty(v)) for k, v in fields.items()))
    left = f"({' * '.join(recs[:cut])}) * ({' * '.join(recs[cut:])})"
    t1, _ = LT.check_expr(gamma, e(left))
    t2, _ = LT.check_expr(gamma, e(" * ".join(recs)))
    assert t1 == t2 == L.Record(Env(tuple((var(k), ty(v)) for k, v in fields.items())))


def test_concat_clash():
    with pytest.raises(E.RowClash):
        LT.check_expr(Env(), e("{a = 1} * {a = 2}"))


def test_split_missing_field():
    with pytest.raises(E.FieldMissing):
        LT.check_expr(Env(), e("{a = 1} / b"))


def _step(src):
    (label, t, _), = LS.step_expr(e(src))
    return label, t


def test_split_step():
    assert _step("{a = 1, b = 2} / a") == (Silent(), e("(1, {b = 2})"))


def test_concat_step():
    assert _step("{a = 1} * {b = 2}") == (Silent(), e("{a = 1, b = 2}"))


def test_split_then_concat_recovers_record():
    r = e("{a = 1, b = 2}")
    _, pair = _step("{a = 1, b = 2} / a")
    left, rest = pair.left, pair.right
    _, back = LS.step_expr(L.Concat(L.RecordLit(((var("a"), left),)), rest))[0][:2]
    assert LS.term_key(back) == LS.term_key(r)


def test_fork_step():
    (label, c2, _), = LS.step_config(parse_config("<let _ = fork (1 + 1) in ()>", "lfst"))
    assert label is Act.FORK
    assert sorted(map(LP.show, LS.flatten(c2)[1])) == ["1 + 1", "let _ = () in ()"]


def test_rendezvous_runs():
    tr = LS.run(LS.close_program(load("rendezvous.lfst")))
    assert tr.terminal == "value"
    assert [l for l in tr.labels() if l != "Silent"] == ["Send"]
    assert sorted(map(LP.show, LS.flatten(tr.final)[1])) == ["()", "4"]


def test_synchronous_send_returns_channel():
    c = parse_config("(nu g : !Int.End, ?Int.End) (<send 1 on g^+> || <receive g^->)", "lfst")
    (label, c2, _), = LS.step_config(c)
    assert label is Act.SEND
    assert sorted(map(LP.show, LS.flatten(c2)[1])) == ["(1, g^-)", "g^+"]


LCORPUS = lfst_corpus(12, 30)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(LCORPUS), st.integers(0, 2**16))
def test_subject_reduction(c, seed):
    cfg, sup = c, FreshSupply(0)
    sup = FreshSupply(max((n.uid for n in L.all_names(c)), default=0))
    for _ in range(15):
        options = LS.step_config(cfg, sup)
        if not options:
            break
        for _, c2, _ in options:
            LT.check_config(Env(), c2)
        _, cfg, sup = options[seed % len(options)]


def test_corpus_typechecks_and_terminates():
    for c in LCORPUS:
        LT.check_config(Env(), c)
        assert LS.run(c, FirstEnabled(), 2000).terminal == "value"


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_translated_programs_never_clash_at_runtime(seed):
    for c in vgr_corpus(20 + seed, 10):
        tr = LS.run(translate_closed(c), Seeded(seed), 3000)
        assert tr.terminal == "value"
