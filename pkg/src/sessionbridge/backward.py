"""From functional A-normal form back to the imperative calculus.

Send and receive return the channel in the functional world, so their
images mention the channel twice.  Lambdas carry no channel information in
the untyped source; their images get the placeholder annotation
`lam (∅; x: Unit)` unless a typed pass supplies the real one.
"""
from __future__ import annotations

from . import errors as E
from .env import Env
from .names import Supply
from .lfst import syntax as L
from .vgr import syntax as V
from .anf import _start


def back_type(t):
    """Structural image of a plain functional type.  Function types have no
    channel environments to offer and map to `∅; T -> U; ∅`."""
    if isinstance(t, L.UnitT):
        return V.UNIT_T
    if isinstance(t, L.IntT):
        return V.INT_T
    if isinstance(t, L.End):
        return V.END
    if isinstance(t, L.In):
        return V.In(back_type(t.payload), back_type(t.cont))
    if isinstance(t, L.Out):
        return V.Out(back_type(t.payload), back_type(t.cont))
    if isinstance(t, L.APType):
        return V.APType(back_type(t.session))
    if isinstance(t, L.LinPair):
        return V.PairT(back_type(t.left), back_type(t.right))
    if isinstance(t, (L.FunU, L.FunL)):
        return V.FunT(Env(), back_type(t.arg), back_type(t.res), Env())
    if isinstance(t, L.Record):
        raise E.RecordNotSupported("record type")
    raise TypeError(repr(t))


def _opt(s):
    return None if s is None else back_type(s)


class _Back:
    def __init__(self, start, lam_annot=None, recv_binder=None):
        self.supply = Supply(start)
        self.lam_annot = lam_annot
        self.recv_binder = recv_binder

    def value(self, v):
        if not (L.is_value(v) or isinstance(v, L.Hole)):
            raise E.NotInANF(f"operand is not a value: {type(v).__name__}")
        return self.go(v)

    def go(self, e):
        if isinstance(e, L.Var):
            return V.Var(e.name)
        if isinstance(e, L.ChanLit):
            return V.ChanLit(e.end)
        if isinstance(e, L.UnitV):
            return V.UNIT
        if isinstance(e, L.IntV):
            return V.IntV(e.n)
        if isinstance(e, L.Hole):
            return V.HOLE
        if isinstance(e, (L.RecordLit, L.Concat, L.Split, L.SplitMany)):
            raise E.RecordNotSupported(f"record operation {type(e).__name__}")
        if isinstance(e, L.Fix):
            raise E.NotSupported("fix has no image in the imperative calculus")
        if isinstance(e, L.Lam):
            sig, ptype = self.lam_annot(e) if self.lam_annot else (Env(), V.UNIT_T)
            return V.Lam(sig, e.param, ptype, self.go(e.body))
        if isinstance(e, L.Pair):
            return V.PairV(self.value(e.left), self.value(e.right))
        if isinstance(e, L.App):
            return V.App(self.value(e.fn), self.value(e.arg))
        if isinstance(e, L.Add):
            return V.Add(self.value(e.left), self.value(e.right))
        if isinstance(e, L.Send):
            w = self.value(e.chan)
            return V.Let(self.supply("z"), V.Send(self.value(e.value), w), w)
        if isinstance(e, L.Receive):
            w = self.value(e.chan)
            x = self.recv_binder(e) if self.recv_binder else None
            x = x or self.supply("x")
            return V.Let(x, V.Receive(w), V.PairV(V.Var(x), w))
        if isinstance(e, L.Accept):
            return V.Accept(self.value(e.ap))
        if isinstance(e, L.Request):
            return V.Request(self.value(e.ap))
        if isinstance(e, L.New):
            return V.New(back_type(e.session))
        if isinstance(e, L.Fork):
            return V.Fork(self.go(e.body), V.UNIT)
        if isinstance(e, L.Let):
            return V.Let(e.name, self.go(e.bound), self.go(e.body))
        if isinstance(e, L.LetPair):
            return V.LetPair(e.left, e.right, self.value(e.bound), self.go(e.body))
        raise TypeError(repr(e))

    def config(self, c):
        if isinstance(c, L.Thread):
            return V.Thread(self.go(c.term))
        if isinstance(c, L.Par):
            return V.Par(self.config(c.left), self.config(c.right))
        b = c.binder
        if isinstance(b, L.NuAP):
            nb = V.NuAP(b.name, back_type(b.session))
        else:
            # the two functional endpoints are the two polarities of one channel
            nb = V.NuChan(b.name, _opt(b.plus), _opt(b.minus))
        return V.Nu(nb, self.config(c.body))


def back_expr(e, lam_annot=None, recv_binder=None, start=None):
    """Image of an expression in A-normal form."""
    return _Back(_start(e) if start is None else start, lam_annot, recv_binder).go(e)


def back_config(c, start=None):
    return _Back(_start(c) if start is None else start).config(c)


def back_program(prog):
    parts = [v for _, v in prog.defs] + ([prog.main] if prog.main is not None else [])
    tr = _Back(_start(*parts))
    vals = tuple((n, back_type(t)) for n, t in prog.vals)
    defs = tuple((n, tr.go(v)) for n, v in prog.defs)
    main = tr.config(prog.main) if prog.main is not None else None
    return V.Program(vals, defs, main)
