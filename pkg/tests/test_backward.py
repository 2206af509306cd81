import pytest

from sessionbridge import errors as E
from sessionbridge.anf import to_anf, to_anf_config
from sessionbridge.backward import back_config, back_expr, back_type
from sessionbridge.cli.parser import parse_expr, parse_type
from sessionbridge.gen import lfst_corpus
from sessionbridge.lfst import semantics as LS
from sessionbridge.sim import check_backwards, expr_step_matches
from sessionbridge.vgr import pretty as VP
from sessionbridge.vgr import semantics as VS


def e(src):
    return parse_expr(src, "lfst")


@pytest.mark.parametrize("src, want", [
    ("Unit", "Unit"),
    ("!Int.?Unit.End", "!Int.?Unit.End"),
    ("Int -> Int", "{}; Int -> Int; {}"),
])
def test_back_type(src, want):
    assert back_type(parse_type(src, "lfst")) == parse_type(want, "vgr")


def test_send_mentions_channel_twice():
    got = VP.show(back_expr(e("send 1 on c")))
    assert got.startswith("let z") and got.endswith("= send 1 on c in c")


def test_receive_returns_pair():
    got = VP.show(back_expr(e("receive c")))
    assert got.startswith("let x") and got.endswith("= receive c in (x#1, c)")


def test_lambda_gets_placeholder():
    assert VP.show(back_expr(e("lam x. x"))) == "lam ({}; x: Unit). x"


def test_non_anf_rejected():
    with pytest.raises(E.NotInANF):
        back_expr(e("f (g 1)"))


def test_fix_not_supported():
    with pytest.raises(E.NotSupported):
        back_expr(e("fix (lam f. f)"))


def test_records_not_supported():
    with pytest.raises(E.RecordNotSupported):
        back_expr(e("{a = 1}"))


CORPUS = lfst_corpus(8, 30, 4)


def test_expression_steps_take_exactly_one_step():
    for c in CORPUS:
        for t in LS.flatten(to_anf_config(c))[1]:
            assert expr_step_matches(t, "back")


def test_full_pipeline_expression_steps():
    for c in CORPUS:
        for t in LS.flatten(c)[1]:
            assert expr_step_matches(t, "full", bound=4)


@pytest.mark.parametrize("i", range(0, 30, 3))
def test_process_steps_within_four(i):
    rep = check_backwards(to_anf_config(CORPUS[i]), "back", depth=4, max_steps=40)
    assert rep.ok, rep.failures
    assert rep.longest <= 4
    for lab in ("Send", "Receive"):
        assert rep.by_label.get(lab, 3) <= 3


@pytest.mark.parametrize("i", range(1, 30, 3))
def test_full_pipeline_simulates(i):
    rep = check_backwards(CORPUS[i], "full", depth=4, max_steps=40)
    assert rep.ok, rep.failures


def test_image_runs_to_a_value():
    for c in CORPUS:
        assert VS.run(back_config(to_anf_config(c)), max_steps=3000).terminal == "value"
