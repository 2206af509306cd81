import random

import pytest
from hypothesis import given, settings, strategies as st

from sessionbridge import errors as E
from sessionbridge.anf import is_anf, to_anf, to_anf_config
from sessionbridge.cli.parser import parse_expr
from sessionbridge.env import Env
from sessionbridge.gen import lfst_corpus, lfst_value, subst_corpus
from sessionbridge.lfst import semantics as LS
from sessionbridge.lfst import syntax as L
from sessionbridge.lfst import typing as LT
from sessionbridge.names import Supply
from sessionbridge.sim import check_backwards, expr_step_matches


def e(src):
    return parse_expr(src, "lfst")


def same(a, b):
    return LS.term_key(a) == LS.term_key(b)


def test_values_keep_their_shape():
    assert to_anf(e("(1, ())")) == e("(1, ())")


def test_nested_application_is_named():
    got = to_anf(e("f (g 1)"))
    assert isinstance(got, L.Let) and got.bound == e("g 1")
    assert isinstance(got.body, L.App) and got.body.arg == L.Var(got.name)


def test_fork_returns_unit_through_let():
    got = to_anf(e("fork (1 + 2)"))
    assert got == L.Let(L.WILD, L.Fork(e("1 + 2")), L.UNIT)


def test_records_are_rejected():
    with pytest.raises(E.RecordNotSupported):
        to_anf(e("{a = 1} / a"))


@settings(max_examples=100)
@given(st.integers(0, 2**32), st.integers(0, 3))
def test_value_preservation(seed, depth):
    v = lfst_value(random.Random(seed), depth, Supply(0))
    w = to_anf(v)
    assert L.is_value(w)
    assert is_anf(w)


TRIPLES = subst_corpus(3, 500)


def test_substitution_commutes():
    for body, v, x in TRIPLES:
        assert same(to_anf(L.subst(body, x, v)), L.subst(to_anf(body), x, to_anf(v)))


def test_images_are_in_normal_form():
    for body, _, _ in TRIPLES:
        assert is_anf(to_anf(body))


CORPUS = lfst_corpus(7, 30, 4)


def test_typing_is_preserved():
    for c in CORPUS:
        LT.check_config(Env(), to_anf_config(c))


def test_expression_steps_match_within_four():
    for c in CORPUS:
        for t in LS.flatten(c)[1]:
            assert expr_step_matches(t, "anf", bound=4)


@pytest.mark.parametrize("i", range(0, 30, 3))
def test_configuration_simulation(i):
    rep = check_backwards(CORPUS[i], "anf", depth=4, max_steps=40)
    assert rep.ok, rep.failures
    assert rep.longest <= 4
