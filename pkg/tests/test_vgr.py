import pytest
from hypothesis import given, settings, strategies as st

from sessionbridge import errors as E
from sessionbridge.cli.parser import parse, parse_config, parse_expr, parse_type
from sessionbridge.env import Env
from sessionbridge.gen import vgr_corpus
from sessionbridge.names import (
    Act, ChanEnd, FreshSupply, Kind, Name, Polarity, RequestOn, Silent, var,
)
from sessionbridge.trace import FirstEnabled, Seeded
from sessionbridge.vgr import pretty as VP
from sessionbridge.vgr import semantics as VS
from sessionbridge.vgr import syntax as V
from sessionbridge.vgr import typing as VT

from conftest import load

ALPHA = var("u")


def ty(src):
    return parse_type(src, "vgr")


def chan(name, pol):
    return ChanEnd(Name(Kind.CHANNEL, name, 1), pol)


# ---------------------------------------------------------------- typing


def test_unit_value():
    assert VT.check_value(Env(), V.UNIT) == V.UNIT_T


def test_server_type():
    (_, t), = VT.check_program(load("server.vgr"))[0]
    sig_in = Env(((ALPHA, ty("?Int.?Int.!Int.End")),))
    assert t == V.FunT(sig_in, V.Chan(ALPHA), V.UNIT_T, Env(((ALPHA, V.END),)))
    assert VP.show_type(t) == "{u: ?Int.?Int.!Int.End}; Chan u -> Unit; {u: End}"


def test_variable_lookup():
    b = var("b")
    assert VT.check_value(Env(((var("x"), V.Chan(b)),)), V.Var(var("x"))) == V.Chan(b)


def test_receive_advances_session():
    gamma = Env(((var("u"), V.Chan(ALPHA)),))
    sigma = Env(((ALPHA, ty("?Int.End")),))
    left, t, out = VT.check_expr(gamma, sigma, parse_expr("receive u", "vgr"))
    assert (left, t, out) == (Env(), V.INT_T, Env(((ALPHA, V.END),)))


def test_distinct_identities_reject_aliasing():
    with pytest.raises(E.IdentityMismatch):
        VT.check_program(load("sendsend_ww.vgr"))


def test_shared_identity_accepts_aliasing():
    prog = load("sendsend_alias.vgr")
    (_, t), = VT.check_program(prog)[0]
    w = var("w")
    gamma = Env(((var("sendSend"), t), (w, V.Chan(w))))
    sigma = Env(((w, ty("!Int.!Int.End")),))
    left, res, out = VT.check_expr(gamma, sigma, parse_expr("sendSend w w", "vgr"))
    assert res == V.UNIT_T and left == Env() and out == Env(((w, V.END),))


def test_second_accept_call_is_ill_formed():
    with pytest.raises(E.IllFormedSigma):
        VT.check_program(load("acceptadd.vgr"))


def test_single_accept_call_is_fine():
    prog = load("acceptadd.vgr")
    c = parse_config("<let a = acceptAdd () in let x = receive a in let y = receive a in "
                     "let _ = send x + y on a in close a>", "vgr")
    VT.check_program(type(prog)(prog.vals, prog.defs, c))


def test_missing_annotations_reported():
    with pytest.raises(E.AnnotationMissing):
        VT.check_program(parse("fun server u = let x = receive u in x", "vgr"))


def test_value_thread_config():
    assert VT.check_config(Env(), Env(), V.Thread(V.UNIT)) == Env()


def test_pipeline_config_uses_everything():
    prog = load("pipeline.vgr")
    assert VT.check_config(Env(), Env(), VS.close_program(prog)) == Env()


def test_parallel_composition_splits_sigma():
    g, h = chan("g", Polarity.PLUS), chan("h", Polarity.MINUS)
    sigma = Env(((g, V.END), (h, V.END)))
    both = V.Par(V.Thread(V.Close(V.ChanLit(g))), V.Thread(V.Close(V.ChanLit(h))))
    assert VT.check_config(Env(), sigma, both) == Env()
    one = V.Thread(V.Close(V.ChanLit(g)))
    assert VT.check_config(Env(), sigma, one) == Env(((h, V.END),))


def test_two_channels_closed_by_two_threads():
    c = parse_config("(nu g : End, End) (nu h : End, End) "
                     "(<let _ = close g^+ in close h^+> || <let _ = close g^- in close h^->)", "vgr")
    assert VT.check_config(Env(), Env(), c) == Env()


# ---------------------------------------------------------------- reduction


def _only(results):
    (label, term, _), = results
    return label, term


def test_beta():
    e = parse_expr("(lam ({}; x: Unit). x) ()", "vgr")
    assert _only(VS.step_expr(e)) == (Silent(), V.UNIT)


def test_let_value():
    assert _only(VS.step_expr(parse_expr("let x = () in x", "vgr"))) == (Silent(), V.UNIT)


def test_request_mints_channel():
    e = parse_expr("let c = request n in c", "vgr")
    label, t = _only(VS.step_expr(e, FreshSupply(6)))
    assert isinstance(label, RequestOn) and label.chan.uid == 7
    assert t == V.Let(var("c"), V.ChanLit(ChanEnd(label.chan, Polarity.PLUS)), V.Var(var("c")))


def test_fork_step():
    c = parse_config("<fork (1 + 1); ()>", "vgr")
    (label, c2, _), = VS.step_config(c)
    assert label is Act.FORK
    assert sorted(map(VP.show, VS.flatten(c2)[1])) == ["()", "1 + 1"]


def test_fork_under_let_is_not_stuck():
    c = parse_config("<let x = fork (1 + 1); () in x>", "vgr")
    assert [l for l, _, _ in VS.step_config(c)] == [Act.FORK]


def test_new_step():
    c = parse_config("<let p = new !Int.End in ()>", "vgr")
    (label, c2, _), = VS.step_config(c)
    assert label is Act.NEW
    (b,), _ = VS.flatten(c2)
    assert isinstance(b, V.NuAP) and b.session == ty("!Int.End")


def test_send_receive_step():
    c = parse_config("(nu g : !Int.End, ?Int.End) "
                     "(<let _ = send 1 on g^+ in ()> || <let x = receive g^- in x>)", "vgr")
    (label, c2, _), = VS.step_config(c)
    assert label is Act.SEND
    _, threads = VS.flatten(c2)
    assert sorted(map(VP.show, threads)) == ["let _ = () in ()", "let x = 1 in x"]


def test_run_value():
    tr = VS.run(V.Thread(V.UNIT))
    assert tr.steps == [] and tr.terminal == "value"


def test_run_pipeline():
    tr = VS.run(VS.close_program(load("pipeline.vgr")))
    assert [l for l in tr.labels() if l != "Silent"] == ["Accept", "Send", "Send", "Send"]
    assert tr.terminal == "value"
    assert sorted(map(VP.show, VS.flatten(tr.final)[1])) == ["()", "3"]


def test_run_zero_budget():
    tr = VS.run(VS.close_program(load("pipeline.vgr")), max_steps=0)
    assert tr.steps == [] and tr.terminal == "budget"


def test_seeded_runs_repeat():
    c = VS.close_program(load("pipeline.vgr"))
    assert VS.run(c, Seeded(4)).to_json() == VS.run(c, Seeded(4)).to_json()


# ---------------------------------------------------------------- bounded invariants

CORPUS = vgr_corpus(11, 40)


def _derivs(d):
    yield d
    for p in d.prem:
        if isinstance(p, (VT.Deriv, VT.CDeriv)):
            yield from _derivs(p)


@pytest.mark.parametrize("i", range(0, 40, 4))
def test_leftover_monotonicity(i):
    for d in _derivs(VT.derive_config(Env(), Env(), CORPUS[i])):
        assert set(d.left.keys()) <= set(d.sigma.keys())
        if isinstance(d, VT.Deriv):
            assert not set(d.out.keys()) & set(d.left.keys())


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CORPUS), st.integers(0, 2**16))
def test_subject_reduction(c, seed):
    tr = VS.run(c, Seeded(seed), max_steps=12)
    cfg = c
    sup = FreshSupply(VT._start(c))
    for _ in range(12):
        options = VS.step_config(cfg, sup)
        if not options:
            break
        for _, c2, _ in options:
            VT.check_config(Env(), Env(), c2)
        _, cfg, sup = options[seed % len(options)]
    assert tr.terminal in ("value", "budget")


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CORPUS))
def test_decomposition_replugs(c):
    for t in VS.flatten(c)[1]:
        frames, redex = V.decompose(t)
        assert V.plug(frames, redex) == t


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(CORPUS))
def test_canonicalization(c):
    canon = VS.canonical(c)
    assert VS.canonical(canon) == canon
    keys = sorted(str(l) + VS.config_key_of(c2) for l, c2, _ in VS.step_config(c))
    keys2 = sorted(str(l) + VS.config_key_of(c2) for l, c2, _ in VS.step_config(canon))
    assert keys == keys2


def test_corpus_runs_to_values():
    for c in CORPUS:
        assert VS.run(c, FirstEnabled(), 2000).terminal == "value"
