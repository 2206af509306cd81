import json

import pytest

from sessionbridge.cli.parser import parse_config
from sessionbridge.forward import translate_closed
from sessionbridge.gen import lfst_corpus, vgr_corpus
from sessionbridge.names import Act
from sessionbridge.sim import (LFST, Report, check_backwards, check_simulation, common_reduct,
                               digest_config, reaches, strip_common)
from sessionbridge.lfst import semantics as LS


def cfg(src):
    return parse_config(src, "lfst")


def test_strip_drops_shared_inert_threads():
    a = cfg("<1 + 2> || <5>")
    b = cfg("<3> || <5>")
    a2, b2 = strip_common(LFST, a, b)
    assert LS.flatten(a2)[1] == [cfg("<1 + 2>").term]
    assert LS.flatten(b2)[1] == [cfg("<3>").term]


def test_strip_keeps_threads_sharing_a_channel():
    src = "(nu g : !Int.End, ?Int.End) (<send 1 on g^+> || <receive g^->)"
    a = cfg(src)
    b = cfg("(nu g : !Int.End, ?Int.End) (<send (0 + 1) on g^+> || <receive g^->)")
    _, b2 = strip_common(LFST, b, a)
    assert len(LS.flatten(b2)[1]) == 2


def test_common_reduct_silent():
    w = common_reduct(cfg("<1 + 2>"), cfg("<3>"), Act.SILENT)
    assert w is not None and w.path_a == ["Silent"] and w.path_b == []


def test_common_reduct_misses_wrong_label():
    assert common_reduct(cfg("<1 + 2>"), cfg("<3>"), Act.SEND) is None


def test_reaches_exact_target():
    w = reaches(cfg("<(1 + 1) + 1>"), cfg("<3>"), Act.SILENT, 4, LFST)
    assert w is not None and len(w.path_a) == 2
    assert reaches(cfg("<(1 + 1) + 1>"), cfg("<4>"), Act.SILENT, 4, LFST) is None


def test_report_json_is_sorted():
    r = Report("p", "fwd", 3, [], 2, {"Silent": 1, "Fork": 2})
    assert json.loads(r.to_json())["by_label"] == {"Fork": 2, "Silent": 1}
    assert list(r.to_dict()["by_label"]) == ["Fork", "Silent"]


def test_digest_is_alpha_invariant():
    a = cfg("(nu g : !Int.End, ?Int.End) (<send 1 on g^+> || <receive g^->)")
    b = cfg("(nu h : !Int.End, ?Int.End) (<receive h^-> || <send 1 on h^+>)")
    assert digest_config(a) == digest_config(b)


FWD = vgr_corpus(30, 5)


@pytest.mark.parametrize("i", range(len(FWD)))
def test_forward_walk(i):
    rep = check_simulation(FWD[i], depth=12, max_steps=15)
    assert rep.ok, rep.failures
    assert rep.steps_checked > 0


def test_seeded_reports_are_reproducible():
    c = lfst_corpus(31, 1)[0]
    r1 = check_backwards(c, "full", 4, seed=9, max_steps=20).to_json()
    r2 = check_backwards(c, "full", 4, seed=9, max_steps=20).to_json()
    assert r1 == r2


def test_failure_is_reported():
    # a translation that drops the reduct cannot be matched
    from sessionbridge import sim
    rep = sim._check(Report("x", "t"), LFST, LFST, cfg("<1 + 2>"), lambda c: cfg("<0>"),
                     lambda a, b, l: reaches(a, b, l, 4, LFST) if a != b else None, None, 5)
    assert not rep.ok and rep.failures[0]["label"] == "Silent"
