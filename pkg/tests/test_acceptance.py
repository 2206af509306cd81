"""Acceptance criteria 1-8.  Each test records a one-line verdict that is
printed in the terminal summary.  Set SESSIONBRIDGE_FULL=1 to walk 40 steps
from every forward-simulation corpus program instead of a sample."""
import json
import os
import subprocess
import sys
import time

import pytest

from sessionbridge import errors as E
from sessionbridge import lfst_eff as F
from sessionbridge.anf import is_anf, to_anf, to_anf_config
from sessionbridge.env import Env
from sessionbridge.forward import (innermost_state_lambda, same_code, translate_closed,
                                   translate_program, translate_type)
from sessionbridge.gen import eff_corpus, lfst_corpus, lfst_value, subst_corpus, vgr_corpus
from sessionbridge.lfst import semantics as LS
from sessionbridge.lfst import syntax as L
from sessionbridge.lfst import typing as LT
from sessionbridge.names import Supply, var
from sessionbridge.trace import Seeded
from sessionbridge.sim import check_backwards, check_simulation, expr_step_matches
from sessionbridge.vgr import pretty as VP
from sessionbridge.vgr import semantics as VS
from sessionbridge.vgr import syntax as V
from sessionbridge.vgr import typing as VT

from conftest import PROGRAMS, SESSION_START, load, record

FULL = os.environ.get("SESSIONBRIDGE_FULL") == "1"
VGR_CORPUS = vgr_corpus(1, 200)
LFST_CORPUS = lfst_corpus(4, 30, 4)


def _raises(exc, fn):
    try:
        fn()
    except exc:
        return True
    return False


def test_criterion_1_typing_goldens():
    t0 = time.perf_counter()
    types, _ = VT.check_program(load("server.vgr"))
    server = VP.show_type(dict((str(n), t) for n, t in types)["server"])
    checks = {
        "server": server == "{u: ?Int.?Int.!Int.End}; Chan u -> Unit; {u: End}",
        "aliased call rejected": _raises(E.IdentityMismatch, lambda: VT.check_program(load("sendsend_ww.vgr"))),
        "aliasing typing accepted": bool(VT.check_program(load("sendsend_alias.vgr"))),
        "acceptAdd twice rejected": _raises(E.IllFormedSigma, lambda: VT.check_program(load("acceptadd.vgr"))),
    }
    dt = time.perf_counter() - t0
    ok = all(checks.values()) and dt < 1
    record(1, ok, f"({dt:.2f}s) " + ", ".join(k for k, v in checks.items() if not v))
    assert ok, checks


def test_criterion_2_translation_goldens():
    t0 = time.perf_counter()
    results = []
    for stem in ("sendsend", "sendsend_alias"):
        got = dict((str(n), v) for n, v in translate_program(load(stem + ".vgr")).defs)["sendSend"]
        want = dict((str(n), v) for n, v in load(stem + ".expected.lfst").defs)["sendSend"]
        results.append(same_code(innermost_state_lambda(got), innermost_state_lambda(want)))
    dt = time.perf_counter() - t0
    ok = all(results) and dt < 1
    record(2, ok, f"({dt:.2f}s)")
    assert ok


def test_criterion_3_preservation():
    t0 = time.perf_counter()
    bad = 0
    for c in VGR_CORPUS:
        try:
            LT.check_config(Env(), translate_closed(c))
        except E.CheckError:
            bad += 1
    for stem in ("server", "sendsend", "sendsend_alias", "pipeline"):
        prog = load(stem + ".vgr")
        vt, _ = VT.check_program(prog)
        lt, _ = LT.check_program(translate_program(prog))
        bad += sum(translate_type(a) != b for (_, a), (_, b) in zip(vt, lt))
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30 and len(VGR_CORPUS) >= 200
    record(3, ok, f"({len(VGR_CORPUS)} programs, {bad} failures, {dt:.1f}s)")
    assert ok


def test_criterion_4_forward_simulation():
    checked, failures = 0, []
    for c in VGR_CORPUS:
        # every step enabled in every corpus configuration
        rep = check_simulation(c, depth=12, max_steps=0)
        checked += rep.steps_checked
        failures += rep.failures
    walked = VGR_CORPUS if FULL else VGR_CORPUS[::40]
    for c in walked:
        rep = check_simulation(c, depth=12, max_steps=40)
        checked += rep.steps_checked
        failures += rep.failures
    ok = not failures
    record(4, ok, f"({checked} steps, {len(failures)} failures, {len(walked)} walks)")
    assert ok, failures[:3]


def test_criterion_5_anf():
    import random
    values_ok = all(L.is_value(to_anf(v)) and is_anf(to_anf(v))
                    for v in (lfst_value(random.Random(s), 3, Supply(0)) for s in range(200)))
    triples = subst_corpus(3, 500)
    subst_ok = all(LS.term_key(to_anf(L.subst(e, x, v))) == LS.term_key(L.subst(to_anf(e), x, to_anf(v)))
                   for e, v, x in triples)
    expr_ok = all(expr_step_matches(t, "anf", bound=4)
                  for c in LFST_CORPUS for t in LS.flatten(c)[1])
    reps = [check_backwards(c, "anf", depth=4, max_steps=40) for c in LFST_CORPUS]
    sim_ok = all(r.ok and r.longest <= 4 for r in reps)
    ok = values_ok and subst_ok and expr_ok and sim_ok and len(triples) == 500
    record(5, ok, f"(values {values_ok}, substitution {subst_ok}, simulation {expr_ok and sim_ok})")
    assert ok


def test_criterion_6_backwards():
    expr_ok = all(expr_step_matches(t, "back")
                  for c in LFST_CORPUS for t in LS.flatten(to_anf_config(c))[1])
    back = [check_backwards(to_anf_config(c), "back", depth=4, max_steps=40) for c in LFST_CORPUS]
    send = {r.by_label["Send"] for r in back if "Send" in r.by_label}
    proc_ok = all(r.ok and r.longest <= 4 for r in back) and send == {3}
    full = [check_backwards(c, "full", depth=4, max_steps=40) for c in LFST_CORPUS]
    full_ok = all(r.ok for r in full)
    ok = expr_ok and proc_ok and full_ok
    record(6, ok, f"(expression {expr_ok}, process {proc_ok}, full {full_ok})")
    assert ok


def test_criterion_7_effects():
    cases = eff_corpus(2, 120)
    frames = [Env(), Env(((var("q"), V.END),)),
              Env(((var("q"), V.END), (var("r"), V.Out(V.INT_T, V.END))))]
    erase_ok = anf_ok = back_ok = True
    for gamma, e in cases:
        t, _, _, _ = F.check_eff(gamma, e)
        erase_ok &= LT.check_expr(F.erase(gamma), F.erase(e))[0] == F.erase(t)
        a = to_anf(e)
        r = F.check_eff(gamma, a)
        anf_ok &= F.same_up_to_renaming((t,) + F.check_eff(gamma, e)[1:3], r[:3], F.user_tags(gamma, e))
        img = F.back_typed(gamma, a)
        for fr in frames:
            sigma = Env(tuple(fr.items()) + tuple(F.back_env(r[1]).items()))
            back_ok &= VT.check_expr(F.back_env(gamma), sigma, img) == (fr, F.back_type(r[0]), F.back_env(r[2]))
    ok = erase_ok and anf_ok and back_ok and len(cases) >= 100
    record(7, ok, f"({len(cases)} programs; erasure {erase_ok}, anf {anf_ok}, typed back {back_ok})")
    assert ok


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "sessionbridge.cli.main", *map(str, argv)],
                          capture_output=True, check=False).stdout


@pytest.mark.last
def test_criterion_8_determinism():
    same = True
    for args in (("run", PROGRAMS / "pipeline.vgr", "--seed", "3", "--json"),
                 ("simulate", PROGRAMS / "rendezvous.lfst", "--proposition", "full", "--seed", "5", "--json")):
        a, b = _cli(*args), _cli(*args)
        same &= bool(json.loads(a)) and a == b
    c = VGR_CORPUS[7]
    same &= VS.run(c, Seeded(11)).to_json() == VS.run(c, Seeded(11)).to_json()
    elapsed = time.perf_counter() - SESSION_START
    ok = same and elapsed < 60
    record(8, ok, f"(byte-identical {same}, suite {elapsed:.1f}s)")
    assert ok
