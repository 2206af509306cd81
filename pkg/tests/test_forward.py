import pytest
from hypothesis import given, settings, strategies as st

from sessionbridge import errors as E
from sessionbridge.cli.parser import parse_type
from sessionbridge.env import Env
from sessionbridge.forward import (innermost_state_lambda, same_code, translate_closed,
                                   translate_program, translate_type)
from sessionbridge.gen import vgr_corpus
from sessionbridge.lfst import semantics as LS
from sessionbridge.lfst import typing as LT
from sessionbridge.vgr import semantics as VS
from sessionbridge.trace import Seeded
from sessionbridge.vgr import typing as VT

from conftest import load


@pytest.mark.parametrize("src, want", [
    ("Unit", "Unit"),
    ("Int", "Int"),
    ("Chan u", "Unit"),
    ("!Int.?Int.End", "!Int.?Int.End"),
    ("[?Int.End]", "[?Int.End]"),
    ("{u: !Int.End}; Chan u -> Unit; {u: End}",
     "Unit -> {u: !Int.End} -> (Unit * {u: End})"),
])
def test_translate_type(src, want):
    assert translate_type(parse_type(src, "vgr")) == parse_type(want, "lfst")


def _def(prog, name):
    return next(v for n, v in prog.defs if str(n) == name)


@pytest.mark.parametrize("stem", ["sendsend", "sendsend_alias"])
def test_translation_matches_hand_written_image(stem):
    got = _def(translate_program(load(stem + ".vgr")), "sendSend")
    want = _def(load(stem + ".expected.lfst"), "sendSend")
    assert same_code(innermost_state_lambda(got), innermost_state_lambda(want))


def test_hand_written_comparison_is_not_vacuous():
    got = _def(translate_program(load("sendsend.vgr")), "sendSend")
    alias = _def(load("sendsend_alias.expected.lfst"), "sendSend")
    assert not same_code(innermost_state_lambda(got), innermost_state_lambda(alias))


@pytest.mark.parametrize("stem", ["server", "sendsend", "sendsend_alias", "pipeline"])
def test_shipped_programs_translate_to_typable_code(stem):
    LT.check_program(translate_program(load(stem + ".vgr")))


def test_ill_typed_source_has_no_image():
    with pytest.raises(E.CheckError):
        translate_program(load("sendsend_ww.vgr"))


CORPUS = vgr_corpus(1, 60)


def test_preservation_on_corpus():
    for c in CORPUS:
        LT.check_config(Env(), translate_closed(c))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(CORPUS), st.integers(0, 2**16), st.integers(1, 12))
def test_preservation_along_runs(c, seed, k):
    """Every state reachable in the source still translates to typable code."""
    tr = VS.run(c, Seeded(seed), k)
    VT.check_config(Env(), Env(), tr.final)
    LT.check_config(Env(), translate_closed(tr.final))


@pytest.mark.parametrize("seed", [0, 5])
def test_image_computes_same_values(seed):
    for c in vgr_corpus(40 + seed, 10):
        src = VS.run(c)
        dst = LS.run(translate_closed(c), max_steps=5000)
        assert src.terminal == dst.terminal == "value"
        assert len(VS.flatten(src.final)[1]) == len(LS.flatten(dst.final)[1])
