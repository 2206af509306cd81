import pytest
from hypothesis import given, strategies as st

from sessionbridge import errors as E
from sessionbridge.canon import digest
from sessionbridge.env import Env
from sessionbridge.lfst import semantics as LS
from sessionbridge.names import var
from sessionbridge.vgr import semantics as VS

from conftest import load


def test_duplicate_key_is_ill_formed():
    with pytest.raises(E.IllFormedSigma):
        Env(((var("a"), 1), (var("a"), 2)))


def test_union_and_difference():
    a, b = var("a"), var("b")
    e = Env(((a, 1),)).union(Env(((b, 2),)))
    assert set(e.keys()) == {a, b}
    assert e.without({a}) == Env(((b, 2),))
    assert e.restrict({a}) == Env(((a, 1),))
    with pytest.raises(E.IllFormedSigma):
        e.union(Env(((a, 3),)))


@given(st.permutations(range(5)))
def test_env_equality_ignores_order(perm):
    items = [(var(f"k{i}"), i) for i in range(5)]
    assert Env(tuple(items[i] for i in perm)) == Env(tuple(items))


def test_digest_is_short_and_stable():
    assert digest("x") == digest("x")
    assert len(digest("x")) == 16


def test_vgr_key_invariant_under_congruence():
    prog = load("pipeline.vgr")
    c = VS.close_program(prog)
    binders, threads = VS.flatten(c)
    swapped = VS.build(binders, list(reversed(threads)))
    assert VS.config_key_of(c) == VS.config_key_of(swapped)
    assert VS.config_key_of(VS.canonical(c)) == VS.config_key_of(c)


def test_vgr_key_invariant_under_renaming():
    c = VS.close_program(load("pipeline.vgr"))
    n = VS.flatten(c)[0][0]
    renamed = VS.rename_config(c, n.name, var("zz", 99))
    assert VS.config_key_of(renamed) == VS.config_key_of(c)


def test_lfst_key_invariant_under_congruence():
    c = LS.close_program(load("rendezvous.lfst"))
    binders, threads = LS.flatten(c)
    assert LS.config_key_of(LS.build(binders, threads[::-1])) == LS.config_key_of(c)


def test_distinct_configs_have_distinct_keys():
    c = LS.close_program(load("rendezvous.lfst"))
    (_, c2, _), *_ = LS.step_config(c)
    assert LS.config_key_of(c) != LS.config_key_of(c2)
