"""Command line entry point.

    sessionbridge check FILE
    sessionbridge run FILE [--seed K] [--max-steps N]
    sessionbridge translate FILE --to {lfst,anf,vgr} [--typed]
    sessionbridge simulate FILE --proposition {fwd,anf,back,full} [--depth N] [--seed K]
    sessionbridge fmt FILE

Exit status: 0 ok, 1 type or property failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .. import errors as E
from .. import lfst_eff as F
from ..anf import to_anf, to_anf_config, to_anf_program
from ..backward import back_config, back_program
from ..env import Env
from ..forward import translate_program
from ..lfst import pretty as LP
from ..lfst import semantics as LS
from ..lfst import typing as LT
from ..sim import check_backwards, check_simulation
from ..trace import FirstEnabled, Seeded
from ..vgr import pretty as VP
from ..vgr import semantics as VS
from ..vgr import syntax as V
from ..vgr import typing as VT
from .parser import calculus_of, parse

OK, FAIL, USAGE = 0, 1, 2
CALCULI = ("vgr", "lfst", "lfst-eff")


class Usage(Exception):
    pass


def _out(args, human, data):
    if args.json:
        print(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False))
    else:
        print(human)


def _load(args):
    calc = args.calculus or calculus_of(args.file)
    try:
        with open(args.file, encoding="utf-8") as fh:
            src = fh.read()
    except OSError as exc:
        raise Usage(f"cannot read {args.file}: {exc.strerror}") from None
    return calc, parse(src, calc)


def _show(calc):
    return VP if calc == "vgr" else LP


# ---------------------------------------------------------------- commands


def cmd_check(args):
    calc, prog = _load(args)
    if calc == "vgr":
        types, left = VT.check_program(prog)
        main = None if prog.main is None else VP.show_env(left)
        show = VP.show_type
    elif calc == "lfst":
        types, left = LT.check_program(prog)
        main = None if prog.main is None else "ok"
        show = LP.show_type
    else:
        types, effects = F.check_program(prog)
        main = None if prog.main is None else "; ".join(F.show_judgment(*e) for e in effects)
        show = F.show_type
    lines = [f"{n} : {show(t)}" for n, t in types]
    if main is not None:
        lines.append(f"main : {main}")
    _out(args, "\n".join(lines) or "ok",
         {"program": args.file, "calculus": calc, "ok": True,
          "types": {str(n): show(t) for n, t in types}, "main": main})
    return OK


def _closed(calc, prog):
    if calc == "vgr":
        VT.check_program(prog)
        return VS.close_program(prog), VS
    if calc == "lfst":
        LT.check_program(prog)
    else:
        F.check_program(prog)
    return LS.close_program(prog), LS


def cmd_run(args):
    calc, prog = _load(args)
    c, sem = _closed(calc, prog)
    if c is None:
        raise Usage("program has no main configuration")
    policy = Seeded(args.seed) if args.seed is not None else FirstEnabled()
    tr = sem.run(c, policy, args.max_steps)
    final = _show(calc).show(tr.final)
    human = [f"{i + 1:>3}  {l:<8} {h}" for i, (l, h) in enumerate(tr.steps)]
    human.append(f"{tr.terminal}: {final}")
    _out(args, "\n".join(human),
         {"program": args.file, "steps": [{"label": l, "hash": h} for l, h in tr.steps],
          "terminal": tr.terminal, "final": final})
    return OK if tr.terminal != "stuck" else FAIL


def _typed_back(prog):
    """Typed backward image of an effect-typed program, definition by
    definition; the main configuration goes through the untyped pass."""
    gamma = Env(tuple(prog.vals))
    vals = tuple((n, F.back_type(t)) for n, t in prog.vals)
    defs = []
    for name, v in prog.defs:
        a = to_anf(v)
        t, _, _, gamma2 = F.check_eff(gamma, a)
        defs.append((name, F.back_typed(gamma, a)))
        gamma = gamma2.set(name, t)
    main = back_config(to_anf_config(prog.main)) if prog.main is not None else None
    return V.Program(vals, tuple(defs), main)


def cmd_translate(args):
    calc, prog = _load(args)
    if args.typed and not (calc == "lfst-eff" and args.to == "vgr"):
        raise Usage("--typed applies to effect-typed input translated --to vgr")
    if calc == "vgr":
        if args.to == "vgr":
            out = prog
        else:
            out = translate_program(prog)
            if args.to == "anf":
                out = to_anf_program(out)
    else:
        if calc == "lfst-eff":
            F.check_program(prog)
            if not args.typed:
                prog = F.erase(prog)
        if args.to == "lfst":
            out = prog
        elif args.to == "anf":
            out = to_anf_program(prog)
        elif args.typed:
            out = _typed_back(prog)
        else:
            out = back_program(to_anf_program(prog))
    text = (VP if isinstance(out, V.Program) else LP).show_program(out)
    _out(args, text, {"program": args.file, "to": args.to, "typed": args.typed, "output": text})
    return OK


def cmd_simulate(args):
    calc, prog = _load(args)
    if (args.proposition == "fwd") != (calc == "vgr"):
        need = "an imperative (.vgr)" if args.proposition == "fwd" else "a functional (.lfst)"
        raise Usage(f"proposition {args.proposition} needs {need} program")
    if calc == "lfst-eff":
        prog = F.erase(prog)
    c, _ = _closed("vgr" if calc == "vgr" else "lfst", prog)
    if c is None:
        raise Usage("program has no main configuration")
    if args.proposition == "fwd":
        depth = args.depth if args.depth is not None else 12
        rep = check_simulation(c, depth, args.seed, args.max_steps, args.file)
    else:
        depth = args.depth if args.depth is not None else 4
        if args.proposition == "back":
            # the backward pass is defined on A-normal forms
            c = to_anf_config(c)
        rep = check_backwards(c, args.proposition, depth, args.seed, args.max_steps, args.file)
    d = rep.to_dict()
    human = [f"{args.proposition}: {rep.steps_checked} steps checked, "
             f"{len(rep.failures)} failures, longest match {rep.longest}"]
    for f in rep.failures:
        human.append(f"  {f['label']} from {f['source']}")
    _out(args, "\n".join(human), d)
    return OK if rep.ok else FAIL


def cmd_fmt(args):
    calc, prog = _load(args)
    text = _show(calc).show_program(prog)
    _out(args, text, {"program": args.file, "output": text})
    return OK


# ---------------------------------------------------------------- plumbing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file")
    common.add_argument("--calculus", choices=CALCULI,
                        help="override the calculus implied by the file extension")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    ap = argparse.ArgumentParser(prog="sessionbridge", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    sub.add_parser("check", parents=[common], help="typecheck a program")
    p = sub.add_parser("run", parents=[common], help="run the main configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-steps", type=int, default=1000)
    p = sub.add_parser("translate", parents=[common], help="translate between calculi")
    p.add_argument("--to", choices=("lfst", "anf", "vgr"), required=True)
    p.add_argument("--typed", action="store_true")
    p = sub.add_parser("simulate", parents=[common], help="check a simulation property")
    p.add_argument("--proposition", choices=("fwd", "anf", "back", "full"), required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-steps", type=int, default=40)
    sub.add_parser("fmt", parents=[common], help="pretty-print a program")
    return ap


COMMANDS = {"check": cmd_check, "run": cmd_run, "translate": cmd_translate,
            "simulate": cmd_simulate, "fmt": cmd_fmt}


def _error(args, code, kind, msg, **extra):
    if getattr(args, "json", False):
        print(json.dumps({"ok": False, "error": {"code": kind, "message": msg, **extra}},
                         sort_keys=True, indent=2, ensure_ascii=False))
    else:
        print(f"error: {msg}", file=sys.stderr if code == USAGE else sys.stdout)
    return code


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    try:
        return COMMANDS[args.cmd](args)
    except E.ParseError as exc:
        return _error(args, USAGE, "ParseError", str(exc), line=exc.line, col=exc.col)
    except Usage as exc:
        return _error(args, USAGE, "Usage", str(exc))
    except E.CheckError as exc:
        return _error(args, FAIL, exc.code, str(exc))
    except E.TranslationError as exc:
        return _error(args, FAIL, exc.code, f"{exc.code}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
