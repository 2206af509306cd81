"""Surface-syntax printer for the functional calculus (inverse of the parser)."""
from ..env import Env
from ..names import ChanEnd, Name
from .syntax import (
    APType, Accept, Add, App, ChanLit, Concat, End, Fix, Fork, FunL, FunU, Hole, In, IntT,
    IntV, Lam, Let, LetPair, LinPair, New, Nu, NuAP, NuChan, Out, Pair, Par, Program,
    Receive, Record, RecordLit, Request, Send, Split, SplitMany, Thread, UnitT, UnitV, Var,
    is_session,
)


def show_session(s, payload=None):
    payload = payload or show_type
    if isinstance(s, End):
        return "End"
    if isinstance(s, (In, Out)):
        mark = "?" if isinstance(s, In) else "!"
        p = s.payload
        if is_session(p):
            ps = "End" if isinstance(p, End) else f"({show_session(p, payload)})"
        else:
            ps = payload(p, True)
        return f"{mark}{ps}.{show_session(s.cont, payload)}"
    return payload(s)


def show_row(row, sep=": "):
    return "{" + ", ".join(f"{k}{sep}{show_type(v)}" for k, v in row.items()) + "}"


def show_type(t, nested=False):
    if t is None:
        return "_"
    if isinstance(t, UnitT):
        return "Unit"
    if isinstance(t, IntT):
        return "Int"
    if isinstance(t, APType):
        return f"[{show_session(t.session)}]"
    if is_session(t):
        s = show_session(t)
        return f"({s})" if nested and not isinstance(t, End) else s
    if isinstance(t, LinPair):
        return f"({show_type(t.left, True)} * {show_type(t.right, True)})"
    if isinstance(t, Record):
        return show_row(t.row)
    if isinstance(t, (FunU, FunL)):
        arrow = "->" if isinstance(t, FunU) else "-o"
        s = f"{show_type(t.arg, True)} {arrow} {show_type(t.res)}"
        return f"({s})" if nested else s
    from .. import lfst_eff
    if isinstance(t, (lfst_eff.Tagged, lfst_eff.EFunU, lfst_eff.EFunL)):
        return lfst_eff.show_type(t, nested)
    raise TypeError(repr(t))


def _label(l):
    return str(l)


_ATOMS = (Var, ChanLit, UnitV, IntV, Pair, RecordLit, Hole)


def atom(e):
    if isinstance(e, _ATOMS):
        return show_term(e)
    return f"({show_term(e)})"


def show_term(e):
    if isinstance(e, Var):
        return str(e.name)
    if isinstance(e, ChanLit):
        return str(e.end)
    if isinstance(e, UnitV):
        return "()"
    if isinstance(e, IntV):
        return str(e.n)
    if isinstance(e, Hole):
        return "[]"
    if isinstance(e, Lam):
        if e.ptype is None:
            return f"lam {e.param}. {show_term(e.body)}"
        return f"lam ({e.param}: {show_type(e.ptype)}). {show_term(e.body)}"
    if isinstance(e, App):
        f = show_term(e.fn) if isinstance(e.fn, App) else atom(e.fn)
        return f"{f} {atom(e.arg)}"
    if isinstance(e, Pair):
        return f"({show_term(e.left)}, {show_term(e.right)})"
    if isinstance(e, LetPair):
        return f"let ({e.left}, {e.right}) = {_bound(e.bound)} in {show_term(e.body)}"
    if isinstance(e, Let):
        return f"let {e.name} = {_bound(e.bound)} in {show_term(e.body)}"
    if isinstance(e, Fork):
        return f"fork {atom(e.body)}"
    if isinstance(e, Send):
        return f"send {atom(e.value)} on {atom(e.chan)}"
    if isinstance(e, Receive):
        return f"receive {atom(e.chan)}"
    if isinstance(e, Accept):
        return f"accept {atom(e.ap)}"
    if isinstance(e, Request):
        return f"request {atom(e.ap)}"
    if isinstance(e, Fix):
        return f"fix {atom(e.fn)}"
    if isinstance(e, New):
        return f"new {show_session(e.session)}"
    if isinstance(e, Add):
        return f"{atom(e.left)} + {atom(e.right)}"
    if isinstance(e, RecordLit):
        return "{" + ", ".join(f"{_label(l)} = {show_term(v)}" for l, v in e.fields) + "}"
    if isinstance(e, Concat):
        return f"{atom(e.left)} * {atom(e.right)}"
    if isinstance(e, Split):
        return f"{atom(e.rec)} / {_label(e.label)}"
    if isinstance(e, SplitMany):
        return f"{atom(e.rec)} / {{{', '.join(map(_label, e.labels))}}}"
    raise TypeError(repr(e))


def _bound(e):
    return atom(e) if isinstance(e, (Let, LetPair, Lam)) else show_term(e)


def show_config(c):
    if isinstance(c, Thread):
        return f"<{show_term(c.term)}>"
    if isinstance(c, Par):
        return f"{show_config(c.left)} || {show_config(c.right)}"
    if isinstance(c, Nu):
        b = c.binder
        body = show_config(c.body)
        if isinstance(c.body, Par):
            body = f"({body})"
        if isinstance(b, NuAP):
            return f"(nu {b.name} : [{show_session(b.session)}]) {body}"
        ann = ""
        if b.plus is not None or b.minus is not None:
            ann = f" : {_opt(b.plus)}, {_opt(b.minus)}"
        return f"(nu {b.name}{ann}) {body}"
    raise TypeError(repr(c))


def _opt(s):
    return "_" if s is None else show_session(s)


def show_program(p):
    lines = [f"val {n} : {show_type(t)}" for n, t in p.vals]
    lines += [f"def {n} = {show_term(v)}" for n, v in p.defs]
    if p.main is not None:
        lines.append(f"main {show_config(p.main)}")
    return "\n".join(lines) + "\n"


def show(x):
    if isinstance(x, Env):
        return show_row(x)
    if isinstance(x, Program):
        return show_program(x)
    if isinstance(x, (Thread, Par, Nu)):
        return show_config(x)
    if isinstance(x, (In, Out, End, APType, UnitT, IntT, FunU, FunL, LinPair, Record)):
        return show_type(x)
    if isinstance(x, (Name, ChanEnd)):
        return str(x)
    return show_term(x)
