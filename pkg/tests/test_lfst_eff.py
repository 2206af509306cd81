import pytest

from sessionbridge import errors as E
from sessionbridge import lfst_eff as F
from sessionbridge.anf import to_anf
from sessionbridge.cli.parser import parse_expr
from sessionbridge.env import Env
from sessionbridge.gen import eff_corpus
from sessionbridge.lfst import syntax as L
from sessionbridge.lfst import typing as LT
from sessionbridge.names import var
from sessionbridge.vgr import syntax as V
from sessionbridge.vgr import typing as VT

from conftest import load

CORPUS = eff_corpus(2, 120)

FRAMES = [
    Env(),
    Env(((var("q"), V.END),)),
    Env(((var("q"), V.END), (var("r"), V.Out(V.INT_T, V.END)))),
]


def test_tagged_channels_are_linear():
    c = var("c")
    assert not F.unr(F.Tagged(c, L.Out(L.INT_T, L.END)))
    assert F.unr(L.INT_T)


def test_client_program_checks():
    types, effects = F.check_program(load("client.lfsteff"))
    shown = {str(n): F.show_type(t) for n, t in types}
    assert shown["push"].startswith("(a @ !Int.?Int.End)")
    assert "a @ ?Int.End" in shown["push"]
    assert effects == []


def test_send_on_wrong_state():
    a = var("a")
    gamma = Env(((a, F.Tagged(a, L.In(L.INT_T, L.END))),))
    with pytest.raises(E.SessionMismatch):
        F.check_eff(gamma, parse_expr("send 1 on a", "lfst"))


def test_send_records_effect():
    a = var("a")
    gamma = Env(((a, F.Tagged(a, L.Out(L.INT_T, L.END))),))
    t, si, so, _ = F.check_eff(gamma, parse_expr("send 1 on a", "lfst"))
    assert t == F.Tagged(a, L.END)
    assert si == F.sigma([(a, L.Out(L.INT_T, L.END))])
    assert so == F.sigma([(a, L.END)])


def test_erasure_is_conservative():
    for gamma, e in CORPUS:
        t, _, _, _ = F.check_eff(gamma, e)
        t2, _ = LT.check_expr(F.erase(gamma), F.erase(e))
        assert t2 == F.erase(t)


def test_anf_keeps_effects():
    for gamma, e in CORPUS:
        r1 = F.check_eff(gamma, e)[:3]
        r2 = F.check_eff(gamma, to_anf(e))[:3]
        assert F.same_up_to_renaming(r1, r2, F.user_tags(gamma, e))


@pytest.mark.parametrize("frame", FRAMES, ids=["empty", "one", "two"])
def test_typed_back_translation_is_typable(frame):
    for gamma, e in CORPUS:
        a = to_anf(e)
        t, si, so, _ = F.check_eff(gamma, a)
        img = F.back_typed(gamma, a)
        sigma = Env(tuple(frame.items()) + tuple(F.back_env(si).items()))
        assert VT.check_expr(F.back_env(gamma), sigma, img) == (frame, F.back_type(t), F.back_env(so))


def test_typed_back_needs_anf():
    a = var("a")
    gamma = Env(((a, F.Tagged(a, L.Out(L.INT_T, L.END))),))
    with pytest.raises(E.NotInANF):
        F.back_typed(gamma, parse_expr("send (1 + 1) on a", "lfst"))
