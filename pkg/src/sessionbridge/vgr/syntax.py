"""Abstract syntax of the imperative calculus.

Types, session types, terms and configurations are frozen dataclasses.
Channel identities are either `Name`s (static identities, usually the
let-binder that created the channel) or `ChanEnd`s (runtime endpoints).
"""
from __future__ import annotations

from dataclasses import dataclass

from ..env import Env
from ..names import ChanEnd, Name, var

# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Chan:
    ident: object  # Name | ChanEnd


@dataclass(frozen=True)
class APType:
    session: object


@dataclass(frozen=True)
class FunT:
    sig_in: Env
    arg: object
    res: object
    sig_out: Env


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class IntT:
    pass


@dataclass(frozen=True)
class PairT:
    left: object
    right: object


@dataclass(frozen=True)
class In:
    payload: object
    cont: object


@dataclass(frozen=True)
class Out:
    payload: object
    cont: object


@dataclass(frozen=True)
class End:
    pass


UNIT_T = UnitT()
INT_T = IntT()
END = End()


def is_session(x):
    return isinstance(x, (In, Out, End))


def dual(s):
    if isinstance(s, In):
        return Out(s.payload, dual(s.cont))
    if isinstance(s, Out):
        return In(s.payload, dual(s.cont))
    return s


def map_idents(t, f):
    """Rename channel identities inside a type, session or environment."""
    if isinstance(t, Chan):
        return Chan(f(t.ident))
    if isinstance(t, FunT):
        return FunT(map_env(t.sig_in, f), map_idents(t.arg, f), map_idents(t.res, f), map_env(t.sig_out, f))
    if isinstance(t, PairT):
        return PairT(map_idents(t.left, f), map_idents(t.right, f))
    if isinstance(t, APType):
        return APType(map_idents(t.session, f))
    if isinstance(t, In):
        return In(map_idents(t.payload, f), map_idents(t.cont, f))
    if isinstance(t, Out):
        return Out(map_idents(t.payload, f), map_idents(t.cont, f))
    if isinstance(t, Env):
        return map_env(t, f)
    return t


def map_env(env, f):
    if env is None:
        return None
    return Env(tuple((f(k), map_idents(v, f)) for k, v in env.items()))


def type_idents(t, acc=None):
    acc = set() if acc is None else acc
    if isinstance(t, Chan):
        acc.add(t.ident)
    elif isinstance(t, FunT):
        for e in (t.sig_in, t.sig_out):
            for k, v in e.items():
                acc.add(k)
                type_idents(v, acc)
        type_idents(t.arg, acc)
        type_idents(t.res, acc)
    elif isinstance(t, PairT):
        type_idents(t.left, acc)
        type_idents(t.right, acc)
    elif isinstance(t, (APType,)):
        type_idents(t.session, acc)
    elif isinstance(t, (In, Out)):
        type_idents(t.payload, acc)
        type_idents(t.cont, acc)
    return acc


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: Name


@dataclass(frozen=True)
class ChanLit:
    end: ChanEnd


@dataclass(frozen=True)
class Lam:
    sig: object  # Env or None when unannotated
    param: Name
    ptype: object  # type or None
    body: object


@dataclass(frozen=True)
class Rec:
    name: Name
    type: object
    body: object


@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class IntV:
    n: int


@dataclass(frozen=True)
class PairV:
    left: object
    right: object


@dataclass(frozen=True)
class App:
    fn: object
    arg: object


@dataclass(frozen=True)
class New:
    session: object


@dataclass(frozen=True)
class Accept:
    ap: object


@dataclass(frozen=True)
class Request:
    ap: object


@dataclass(frozen=True)
class Send:
    value: object
    chan: object


@dataclass(frozen=True)
class Receive:
    chan: object


@dataclass(frozen=True)
class Close:
    chan: object


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Let:
    name: Name
    bound: object
    body: object


@dataclass(frozen=True)
class LetPair:
    left: Name
    right: Name
    value: object
    body: object


@dataclass(frozen=True)
class Fork:
    child: object
    cont: object


@dataclass(frozen=True)
class Hole:
    pass


UNIT = UnitV()
HOLE = Hole()
WILD = var("_")

VALUES = (Var, ChanLit, Lam, Rec, UnitV, IntV, PairV)


def is_value(t):
    if isinstance(t, PairV):
        return is_value(t.left) and is_value(t.right)
    return isinstance(t, VALUES)


# ---------------------------------------------------------------- configurations


@dataclass(frozen=True)
class Thread:
    term: object


@dataclass(frozen=True)
class Par:
    left: object
    right: object


@dataclass(frozen=True)
class NuAP:
    name: Name
    session: object


@dataclass(frozen=True)
class NuChan:
    """Channel binder.  `plus`/`minus` record the current session of each end
    (None once that end has been closed); they are bookkeeping for typing."""
    name: Name
    plus: object
    minus: object


@dataclass(frozen=True)
class Nu:
    binder: object  # NuAP | NuChan
    body: object


@dataclass(frozen=True)
class Program:
    """Top-level file contents: assumptions, definitions and an optional config."""
    vals: tuple = ()  # (Name, type)
    defs: tuple = ()  # (Name, value)
    main: object = None


# ---------------------------------------------------------------- traversal


_KIDS = {
    Lam: lambda t: (t.body,),
    Rec: lambda t: (t.body,),
    PairV: lambda t: (t.left, t.right),
    Add: lambda t: (t.left, t.right),
    App: lambda t: (t.fn, t.arg),
    Accept: lambda t: (t.ap,),
    Request: lambda t: (t.ap,),
    Send: lambda t: (t.value, t.chan),
    Receive: lambda t: (t.chan,),
    Close: lambda t: (t.chan,),
    Let: lambda t: (t.bound, t.body),
    LetPair: lambda t: (t.value, t.body),
    Fork: lambda t: (t.child, t.cont),
}


def children(t):
    f = _KIDS.get(type(t))
    return f(t) if f else ()


def free_vars(t):
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.param}
    if isinstance(t, Rec):
        return free_vars(t.body) - {t.name}
    if isinstance(t, Let):
        return free_vars(t.bound) | (free_vars(t.body) - {t.name})
    if isinstance(t, LetPair):
        return free_vars(t.value) | (free_vars(t.body) - {t.left, t.right})
    out = set()
    for c in children(t):
        out |= free_vars(c)
    return out


def all_names(t, acc=None):
    """Every Name occurring anywhere (binders, types, channels)."""
    acc = set() if acc is None else acc
    if isinstance(t, Thread):
        return all_names(t.term, acc)
    if isinstance(t, Par):
        all_names(t.left, acc)
        return all_names(t.right, acc)
    if isinstance(t, Nu):
        b = t.binder
        acc.add(b.name)
        if isinstance(b, NuAP):
            _type_names(b.session, acc)
        return all_names(t.body, acc)
    acc |= names_of(t)
    return acc


def _type_names(ty, acc):
    if ty is not None:
        for i in type_idents(ty):
            acc.add(i.name if isinstance(i, ChanEnd) else i)


def names_of(t):
    """all_names of a term, cached on the (immutable) node."""
    got = t.__dict__.get("_names")
    if got is not None:
        return got
    acc = set()
    if isinstance(t, Var):
        acc.add(t.name)
    elif isinstance(t, ChanLit):
        acc.add(t.end.name)
    elif isinstance(t, Lam):
        acc.add(t.param)
        if t.sig is not None:
            for k, v in t.sig.items():
                acc.add(k.name if isinstance(k, ChanEnd) else k)
                _type_names(v, acc)
        _type_names(t.ptype, acc)
    elif isinstance(t, Rec):
        acc.add(t.name)
        _type_names(t.type, acc)
    elif isinstance(t, Let):
        acc.add(t.name)
    elif isinstance(t, LetPair):
        acc.update((t.left, t.right))
    for c in children(t):
        acc |= names_of(c)
    got = frozenset(acc)
    object.__setattr__(t, "_names", got)
    return got


def _rename_avoiding(name, avoid):
    uid = max([n.uid for n in avoid if n.text == name.text] + [name.uid]) + 1
    return Name(name.kind, name.text, uid)


def subst(t, x, v):
    """t[v/x], capture-avoiding for term variables.

    When v is a channel endpoint, static occurrences of identity x in types
    are rewritten to the endpoint everywhere in t: an identity named after a
    variable denotes the channel that variable will be bound to."""
    tmap = {x: v.end} if isinstance(v, ChanLit) else {}
    fv = free_vars(v)
    return _subst(t, {x: v}, tmap, fv, v)


def rewrite_idents(t, tmap):
    """Type-level identity rewriting only."""
    return _subst(t, {}, tmap, set(), None)


def _ty(ty, tmap):
    if ty is None or not tmap:
        return ty
    return map_idents(ty, lambda i: tmap.get(i, i))


def _subst(t, sub, tmap, fv, v):
    if not sub and not tmap:
        return t
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if isinstance(t, (ChanLit, UnitV, IntV, Hole)):
        return t
    if isinstance(t, Lam):
        sig = _ty(t.sig, tmap)
        ptype = _ty(t.ptype, tmap)
        p, body = t.param, t.body
        inner = {k: w for k, w in sub.items() if k != p}
        if inner and p in fv:
            p2 = _rename_avoiding(p, all_names(body) | fv)
            body = _subst(body, {p: Var(p2)}, {}, {p2}, None)
            p = p2
        return Lam(sig, p, ptype, _subst(body, inner, tmap, fv, v))
    if isinstance(t, Rec):
        inner = {k: w for k, w in sub.items() if k != t.name}
        name, body = t.name, t.body
        if inner and name in fv:
            n2 = _rename_avoiding(name, all_names(body) | fv)
            body = _subst(body, {name: Var(n2)}, {}, {n2}, None)
            name = n2
        return Rec(name, _ty(t.type, tmap), _subst(body, inner, tmap, fv, v))
    if isinstance(t, Let):
        bound = _subst(t.bound, sub, tmap, fv, v)
        name, body = t.name, t.body
        inner = {k: w for k, w in sub.items() if k != name}
        if inner and name in fv:
            n2 = _rename_avoiding(name, all_names(body) | fv)
            body = _subst(body, {name: Var(n2)}, {name: n2}, {n2}, None)
            name = n2
        return Let(name, bound, _subst(body, inner, tmap, fv, v))
    if isinstance(t, LetPair):
        value = _subst(t.value, sub, tmap, fv, v)
        l, r, body = t.left, t.right, t.body
        inner = {k: w for k, w in sub.items() if k not in (l, r)}
        if inner and l in fv:
            l2 = _rename_avoiding(l, all_names(body) | fv)
            body = _subst(body, {l: Var(l2)}, {l: l2}, {l2}, None)
            l = l2
        if inner and r in fv:
            r2 = _rename_avoiding(r, all_names(body) | fv)
            body = _subst(body, {r: Var(r2)}, {r: r2}, {r2}, None)
            r = r2
        return LetPair(l, r, value, _subst(body, inner, tmap, fv, v))
    if isinstance(t, New):
        return New(_ty(t.session, tmap))
    if isinstance(t, PairV):
        return PairV(_subst(t.left, sub, tmap, fv, v), _subst(t.right, sub, tmap, fv, v))
    if isinstance(t, Add):
        return Add(_subst(t.left, sub, tmap, fv, v), _subst(t.right, sub, tmap, fv, v))
    if isinstance(t, App):
        return App(_subst(t.fn, sub, tmap, fv, v), _subst(t.arg, sub, tmap, fv, v))
    if isinstance(t, Accept):
        return Accept(_subst(t.ap, sub, tmap, fv, v))
    if isinstance(t, Request):
        return Request(_subst(t.ap, sub, tmap, fv, v))
    if isinstance(t, Send):
        return Send(_subst(t.value, sub, tmap, fv, v), _subst(t.chan, sub, tmap, fv, v))
    if isinstance(t, Receive):
        return Receive(_subst(t.chan, sub, tmap, fv, v))
    if isinstance(t, Close):
        return Close(_subst(t.chan, sub, tmap, fv, v))
    if isinstance(t, Fork):
        return Fork(_subst(t.child, sub, tmap, fv, v), _subst(t.cont, sub, tmap, fv, v))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------- evaluation contexts


def decompose(t):
    """Split a term into (frames, redex) with E ::= [] | let x = E in t.

    `frames` lists the enclosing lets outermost first as (name, body)."""
    frames = []
    while isinstance(t, Let) and not is_value(t.bound):
        frames.append((t.name, t.body))
        t = t.bound
    return frames, t


def plug(frames, t):
    for name, body in reversed(frames):
        t = Let(name, t, body)
    return t


def context_term(frames):
    return plug(frames, HOLE)


def fill_hole(t, v):
    """Replace the unique evaluation-position hole of a context term."""
    if isinstance(t, Hole):
        return v
    if isinstance(t, Let):
        return Let(t.name, fill_hole(t.bound, v), t.body)
    raise ValueError("not an evaluation context")
