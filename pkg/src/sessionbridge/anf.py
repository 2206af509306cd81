"""A-normal form for record-free functional programs.

Intermediate lets are introduced only in front of non-values, so values keep
their shape and a reduction of the source is matched by a short burst of
reductions of the image.  An evaluation context is translated by the same
function: its hole counts as a non-value.
"""
from __future__ import annotations

from . import errors as E
from .names import Supply
from .lfst import syntax as L


class _Anf:
    def __init__(self, start):
        self.supply = Supply(start)

    def non_value(self, e):
        return isinstance(e, L.Hole) or not L.is_value(e)

    def bind(self, hint, e, k):
        """let x = [[e]] in k(x)"""
        x = self.supply(hint)
        return L.Let(x, self.go(e), k(L.Var(x)))

    def go(self, e):
        if isinstance(e, (L.Var, L.ChanLit, L.UnitV, L.IntV, L.Hole, L.New)):
            return e
        if isinstance(e, (L.RecordLit, L.Concat, L.Split, L.SplitMany)):
            raise E.RecordNotSupported(f"record operation {type(e).__name__}")
        if isinstance(e, L.Lam):
            return L.Lam(e.param, e.ptype, self.go(e.body))
        if isinstance(e, L.Fix):
            if self.non_value(e.fn):
                return self.bind("x", e.fn, lambda x: L.Fix(x))
            return L.Fix(self.go(e.fn))
        if isinstance(e, L.Fork):
            return L.Let(L.WILD, L.Fork(self.go(e.body)), L.UNIT)
        if isinstance(e, L.Let):
            return L.Let(e.name, self.go(e.bound), self.go(e.body))
        if isinstance(e, L.LetPair):
            if self.non_value(e.bound):
                return self.bind("z", e.bound, lambda z: L.LetPair(e.left, e.right, z, self.go(e.body)))
            return L.LetPair(e.left, e.right, self.go(e.bound), self.go(e.body))
        if isinstance(e, (L.Receive, L.Accept, L.Request)):
            (arg,) = L.children(e)
            if self.non_value(arg):
                return self.bind("y", arg, lambda y: L.rebuild(e, [y]))
            return L.rebuild(e, [self.go(arg)])
        if isinstance(e, (L.App, L.Pair, L.Send, L.Add)):
            a, b = L.children(e)
            if self.non_value(a):
                return self.bind("x", a, lambda x: self.go(L.rebuild(e, [x, b])))
            if self.non_value(b):
                return self.bind("y", b, lambda y: L.rebuild(e, [self.go(a), y]))
            return L.rebuild(e, [self.go(a), self.go(b)])
        raise TypeError(repr(e))


def _start(*things):
    names = set()
    for t in things:
        if isinstance(t, (L.Thread, L.Par, L.Nu)):
            for term in _threads(t):
                L.all_names(term, names)
        else:
            L.all_names(t, names)
    return max((n.uid for n in names), default=0)


def _threads(c):
    if isinstance(c, L.Thread):
        return [c.term]
    if isinstance(c, L.Par):
        return _threads(c.left) + _threads(c.right)
    return _threads(c.body)


def to_anf(e, supply=None):
    """A-normal form of a record-free expression."""
    return _Anf(_start(e) if supply is None else supply).go(e)


def to_anf_context(ctx, supply=None):
    """A-normal form of an evaluation context (a term with one hole)."""
    return to_anf(ctx, supply)


def _config(tr, c):
    if isinstance(c, L.Thread):
        return L.Thread(tr.go(c.term))
    if isinstance(c, L.Par):
        return L.Par(_config(tr, c.left), _config(tr, c.right))
    return L.Nu(c.binder, _config(tr, c.body))


def to_anf_config(c, supply=None):
    return _config(_Anf(_start(c) if supply is None else supply), c)


def to_anf_program(prog):
    parts = [v for _, v in prog.defs] + ([prog.main] if prog.main is not None else [])
    tr = _Anf(_start(*parts))
    defs = tuple((n, tr.go(v)) for n, v in prog.defs)
    main = _config(tr, prog.main) if prog.main is not None else None
    return L.Program(prog.vals, defs, main)


def is_anf(e):
    """Every operand of an elimination form is a value; only let binds
    computations."""
    if isinstance(e, L.Hole):
        return True
    if isinstance(e, (L.RecordLit, L.Concat, L.Split, L.SplitMany)):
        return False
    if isinstance(e, L.Let):
        return is_anf(e.bound) and is_anf(e.body)
    if isinstance(e, L.LetPair):
        return L.is_value(e.bound) and is_anf(e.bound) and is_anf(e.body)
    if isinstance(e, L.Lam):
        return is_anf(e.body)
    if isinstance(e, L.Fork):
        return is_anf(e.body)
    if isinstance(e, L.Fix):
        return L.is_value(e.fn) and is_anf(e.fn)
    kids = L.children(e)
    return all(L.is_value(k) and is_anf(k) for k in kids)
