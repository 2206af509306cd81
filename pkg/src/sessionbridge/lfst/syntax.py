"""Abstract syntax of the linear functional calculus with records."""
from __future__ import annotations

from dataclasses import dataclass

from ..env import Env
from ..names import ChanEnd, Name, var

# ---------------------------------------------------------------- types


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


@dataclass(frozen=True)
class APType:
    session: object


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class IntT:
    pass


@dataclass(frozen=True)
class FunU:
    arg: object
    res: object


@dataclass(frozen=True)
class FunL:
    arg: object
    res: object


@dataclass(frozen=True)
class LinPair:
    left: object
    right: object


@dataclass(frozen=True)
class Record:
    row: Env


END = End()
UNIT_T = UnitT()
INT_T = IntT()


def is_session(t):
    return isinstance(t, (In, Out, End))


def dual(s):
    if isinstance(s, In):
        return Out(s.payload, dual(s.cont))
    if isinstance(s, Out):
        return In(s.payload, dual(s.cont))
    return s


def unr(t):
    if isinstance(t, (End, APType, UnitT, IntT, FunU)):
        return True
    if isinstance(t, LinPair):
        return unr(t.left) and unr(t.right)
    if isinstance(t, Record):
        return all(unr(v) for v in t.row.values())
    return False


def subtype(a, b):
    """a may be used where b is expected (unrestricted functions are also linear)."""
    if a == b:
        return True
    if isinstance(a, (FunU, FunL)) and isinstance(b, FunL):
        return subtype(b.arg, a.arg) and subtype(a.res, b.res)
    if isinstance(a, FunU) and isinstance(b, FunU):
        return subtype(b.arg, a.arg) and subtype(a.res, b.res)
    if isinstance(a, LinPair) and isinstance(b, LinPair):
        return subtype(a.left, b.left) and subtype(a.right, b.right)
    if isinstance(a, Record) and isinstance(b, Record):
        return set(a.row) == set(b.row) and all(subtype(a.row[k], b.row[k]) for k in a.row)
    return False


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: Name


@dataclass(frozen=True)
class ChanLit:
    end: ChanEnd


@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class IntV:
    n: int


@dataclass(frozen=True)
class Lam:
    param: Name
    ptype: object  # None when unannotated
    body: object


@dataclass(frozen=True)
class App:
    fn: object
    arg: object


@dataclass(frozen=True)
class Pair:
    left: object
    right: object


@dataclass(frozen=True)
class LetPair:
    left: Name
    right: Name
    bound: object
    body: object


@dataclass(frozen=True)
class Let:
    name: Name
    bound: object
    body: object


@dataclass(frozen=True)
class Fork:
    body: object


@dataclass(frozen=True)
class Send:
    value: object
    chan: object


@dataclass(frozen=True)
class Receive:
    chan: object


@dataclass(frozen=True)
class Accept:
    ap: object


@dataclass(frozen=True)
class Request:
    ap: object


@dataclass(frozen=True)
class New:
    session: object


@dataclass(frozen=True)
class Fix:
    fn: object


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class RecordLit:
    fields: tuple  # ((label, expr), ...)


@dataclass(frozen=True)
class Concat:
    left: object
    right: object


@dataclass(frozen=True)
class Split:
    rec: object
    label: object


@dataclass(frozen=True)
class SplitMany:
    rec: object
    labels: tuple


@dataclass(frozen=True)
class Hole:
    pass


UNIT = UnitV()
HOLE = Hole()
WILD = var("_")
EMPTY_REC = RecordLit(())


def is_value(e):
    if isinstance(e, (Var, ChanLit, UnitV, IntV, Lam)):
        return True
    if isinstance(e, Pair):
        return is_value(e.left) and is_value(e.right)
    if isinstance(e, RecordLit):
        return all(is_value(v) for _, v in e.fields)
    if isinstance(e, Fix):
        return is_value(e.fn)
    return False


def has_records(e):
    if isinstance(e, (RecordLit, Concat, Split, SplitMany)):
        return True
    return any(has_records(c) for c in children(e))


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
    """Binds both endpoints name^+ and name^-; sessions are typing bookkeeping."""
    name: Name
    plus: object
    minus: object


@dataclass(frozen=True)
class Nu:
    binder: object
    body: object


@dataclass(frozen=True)
class Program:
    vals: tuple = ()
    defs: tuple = ()
    main: object = None


# ---------------------------------------------------------------- traversal


_KIDS = {
    Lam: lambda e: (e.body,),
    App: lambda e: (e.fn, e.arg),
    Pair: lambda e: (e.left, e.right),
    Add: lambda e: (e.left, e.right),
    Concat: lambda e: (e.left, e.right),
    LetPair: lambda e: (e.bound, e.body),
    Let: lambda e: (e.bound, e.body),
    Fork: lambda e: (e.body,),
    Send: lambda e: (e.value, e.chan),
    Receive: lambda e: (e.chan,),
    Accept: lambda e: (e.ap,),
    Request: lambda e: (e.ap,),
    Fix: lambda e: (e.fn,),
    RecordLit: lambda e: tuple(v for _, v in e.fields),
    Split: lambda e: (e.rec,),
    SplitMany: lambda e: (e.rec,),
}


def children(e):
    f = _KIDS.get(type(e))
    return f(e) if f else ()


def rebuild(e, kids):
    """Same node with new children (inverse of `children`)."""
    k = list(kids)
    if isinstance(e, Lam):
        return Lam(e.param, e.ptype, k[0])
    if isinstance(e, App):
        return App(k[0], k[1])
    if isinstance(e, (Pair, Add, Concat)):
        return type(e)(k[0], k[1])
    if isinstance(e, LetPair):
        return LetPair(e.left, e.right, k[0], k[1])
    if isinstance(e, Let):
        return Let(e.name, k[0], k[1])
    if isinstance(e, (Fork, Receive, Accept, Request, Fix)):
        return type(e)(k[0])
    if isinstance(e, Send):
        return Send(k[0], k[1])
    if isinstance(e, RecordLit):
        return RecordLit(tuple((l, v) for (l, _), v in zip(e.fields, k)))
    if isinstance(e, Split):
        return Split(k[0], e.label)
    if isinstance(e, SplitMany):
        return SplitMany(k[0], e.labels)
    return e


def binders_of(e):
    if isinstance(e, Lam):
        return {e.param}
    if isinstance(e, Let):
        return {e.name}
    if isinstance(e, LetPair):
        return {e.left, e.right}
    return set()


def free_vars(e):
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.param}
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.name})
    if isinstance(e, LetPair):
        return free_vars(e.bound) | (free_vars(e.body) - {e.left, e.right})
    out = set()
    for c in children(e):
        out |= free_vars(c)
    return out


def all_names(e, acc=None):
    acc = set() if acc is None else acc
    if isinstance(e, Thread):
        return all_names(e.term, acc)
    if isinstance(e, Par):
        all_names(e.left, acc)
        return all_names(e.right, acc)
    if isinstance(e, Nu):
        acc.add(e.binder.name)
        return all_names(e.body, acc)
    acc |= names_of(e)
    return acc


def _lab(l):
    return l.name if isinstance(l, ChanEnd) else l


def names_of(e):
    """all_names of a term, cached on the (immutable) node."""
    got = e.__dict__.get("_names")
    if got is not None:
        return got
    acc = set()
    if isinstance(e, Var):
        acc.add(e.name)
    elif isinstance(e, ChanLit):
        acc.add(e.end.name)
    elif isinstance(e, RecordLit):
        acc.update(_lab(l) for l, _ in e.fields)
    elif isinstance(e, Split):
        acc.add(_lab(e.label))
    elif isinstance(e, SplitMany):
        acc.update(_lab(l) for l in e.labels)
    acc |= binders_of(e)
    for c in children(e):
        acc |= names_of(c)
    got = frozenset(acc)
    object.__setattr__(e, "_names", got)
    return got


def _fresh_like(name, avoid):
    uid = max([n.uid for n in avoid if n.text == name.text] + [name.uid]) + 1
    return Name(name.kind, name.text, uid)


def subst(e, x, v):
    """e[v/x], capture-avoiding."""
    return _subst(e, x, v, free_vars(v))


def _subst(e, x, v, fv):
    if isinstance(e, Var):
        return v if e.name == x else e
    if isinstance(e, Lam):
        if e.param == x:
            return e
        p, body = e.param, e.body
        if p in fv:
            p2 = _fresh_like(p, all_names(body) | fv | {x})
            body = _subst(body, p, Var(p2), {p2})
            p = p2
        return Lam(p, e.ptype, _subst(body, x, v, fv))
    if isinstance(e, Let):
        bound = _subst(e.bound, x, v, fv)
        if e.name == x:
            return Let(e.name, bound, e.body)
        n, body = e.name, e.body
        if n in fv:
            n2 = _fresh_like(n, all_names(body) | fv | {x})
            body = _subst(body, n, Var(n2), {n2})
            n = n2
        return Let(n, bound, _subst(body, x, v, fv))
    if isinstance(e, LetPair):
        bound = _subst(e.bound, x, v, fv)
        if x in (e.left, e.right):
            return LetPair(e.left, e.right, bound, e.body)
        l, r, body = e.left, e.right, e.body
        if l in fv:
            l2 = _fresh_like(l, all_names(body) | fv | {x, r})
            body = _subst(body, l, Var(l2), {l2})
            l = l2
        if r in fv:
            r2 = _fresh_like(r, all_names(body) | fv | {x, l})
            body = _subst(body, r, Var(r2), {r2})
            r = r2
        return LetPair(l, r, bound, _subst(body, x, v, fv))
    kids = children(e)
    if not kids:
        return e
    return rebuild(e, [_subst(k, x, v, fv) for k in kids])


def fill_hole(e, v):
    if isinstance(e, Hole):
        return v
    kids = children(e)
    return rebuild(e, [fill_hole(k, v) for k in kids])


def size(e):
    return 1 + sum(size(c) for c in children(e))
