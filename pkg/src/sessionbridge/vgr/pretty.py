"""Surface-syntax printer for the imperative calculus (inverse of the parser)."""
from ..env import Env
from ..names import ChanEnd, Name
from .syntax import (
    APType, Accept, Add, App, Chan, ChanLit, Close, End, Fork, FunT, Hole, In, IntT, IntV,
    Lam, Let, LetPair, New, Nu, NuAP, NuChan, Out, PairT, PairV, Par, Program, Rec,
    Receive, Request, Send, Thread, UnitT, UnitV, Var, is_session,
)


def ident(i):
    return str(i)


def show_env(env):
    if env is None:
        return "_"
    return "{" + ", ".join(f"{ident(k)}: {show_session(s)}" for k, s in env.items()) + "}"


def show_session(s):
    if isinstance(s, End):
        return "End"
    if isinstance(s, (In, Out)):
        mark = "?" if isinstance(s, In) else "!"
        p = s.payload
        if is_session(p):
            ps = show_session(p) if isinstance(p, End) else f"({show_session(p)})"
        else:
            ps = show_type(p, nested=True)
        return f"{mark}{ps}.{show_session(s.cont)}"
    return show_type(s)


def show_type(t, nested=False):
    if t is None:
        return "_"
    if isinstance(t, Chan):
        return f"Chan {ident(t.ident)}"
    if isinstance(t, APType):
        return f"[{show_session(t.session)}]"
    if isinstance(t, UnitT):
        return "Unit"
    if isinstance(t, IntT):
        return "Int"
    if isinstance(t, PairT):
        return f"({show_type(t.left)} * {show_type(t.right)})"
    if isinstance(t, FunT):
        s = (f"{show_env(t.sig_in)}; {show_type(t.arg, True)} -> "
             f"{show_type(t.res, True)}; {show_env(t.sig_out)}")
        return f"({s})" if nested else s
    if is_session(t):
        return show_session(t)
    raise TypeError(repr(t))


_COMPOUND = (Let, LetPair, Fork, Lam, Rec)


def atom(t):
    if isinstance(t, (Var, ChanLit, UnitV, IntV, PairV, Hole)):
        return show_term(t)
    return f"({show_term(t)})"


def show_term(t):
    if isinstance(t, Var):
        return str(t.name)
    if isinstance(t, ChanLit):
        return str(t.end)
    if isinstance(t, UnitV):
        return "()"
    if isinstance(t, IntV):
        return str(t.n)
    if isinstance(t, PairV):
        return f"({show_term(t.left)}, {show_term(t.right)})"
    if isinstance(t, Hole):
        return "[]"
    if isinstance(t, Lam):
        return f"lam ({show_env(t.sig)}; {t.param}: {show_type(t.ptype)}). {show_term(t.body)}"
    if isinstance(t, Rec):
        return f"rec ({t.name}: {show_type(t.type)}). {show_term(t.body)}"
    if isinstance(t, App):
        return f"{atom(t.fn)} {atom(t.arg)}"
    if isinstance(t, New):
        return f"new {show_session(t.session)}"
    if isinstance(t, Accept):
        return f"accept {atom(t.ap)}"
    if isinstance(t, Request):
        return f"request {atom(t.ap)}"
    if isinstance(t, Send):
        return f"send {atom(t.value)} on {atom(t.chan)}"
    if isinstance(t, Receive):
        return f"receive {atom(t.chan)}"
    if isinstance(t, Close):
        return f"close {atom(t.chan)}"
    if isinstance(t, Add):
        return f"{atom(t.left)} + {atom(t.right)}"
    if isinstance(t, Let):
        b = atom(t.bound) if isinstance(t.bound, _COMPOUND) else show_term(t.bound)
        return f"let {t.name} = {b} in {show_term(t.body)}"
    if isinstance(t, LetPair):
        return f"let ({t.left}, {t.right}) = {atom(t.value)} in {show_term(t.body)}"
    if isinstance(t, Fork):
        c = atom(t.child) if isinstance(t.child, _COMPOUND) else show_term(t.child)
        return f"fork {c}; {show_term(t.cont)}"
    raise TypeError(repr(t))


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
        return show_env(x)
    if isinstance(x, Program):
        return show_program(x)
    if isinstance(x, (Thread, Par, Nu)):
        return show_config(x)
    if isinstance(x, (Chan, APType, UnitT, IntT, PairT, FunT, In, Out, End)):
        return show_type(x)
    if isinstance(x, (Name, ChanEnd)):
        return str(x)
    return show_term(x)
