"""Algorithmic typing for the imperative calculus.

The expression judgment takes Γ and an incoming channel environment Σ and
returns a triple (leftover, type, out): `leftover` is the part of Σ the
expression never touched, `out` the channels it used (in their final state)
or created.  Every check records a `Deriv` node so that the forward
translation can be driven by the derivation rather than the bare term.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .. import errors as E
from ..env import EMPTY, Env
from ..names import ChanEnd, Kind, Name, Polarity, Supply
from .syntax import (
    APType, Accept, Add, App, Chan, ChanLit, Close, End, Fork, FunT, In, IntT, IntV,
    Let, LetPair, Lam, New, Nu, NuAP, NuChan, Out, PairT, PairV, Par, Rec, Receive,
    Request, Send, Thread, UnitT, UnitV, Var, WILD, all_names, dual, is_session, rewrite_idents, type_idents,
)


@dataclass(frozen=True)
class Deriv:
    rule: str
    term: object
    sigma: Env
    left: Env
    type: object
    out: Env
    prem: tuple = ()
    ident: object = None  # identity minted by accept/request/receive
    info: dict = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class CDeriv:
    rule: str
    config: object
    sigma: Env
    left: Env
    prem: tuple = ()


def _show(x):
    from .pretty import show
    return show(x)


class Checker:
    def __init__(self, start=0):
        self.supply = Supply(start)

    def fresh_ident(self):
        return self.supply("a", Kind.IDENT)

    # -------------------------------------------------------- values

    def value(self, gamma, v, sigma=EMPTY):
        if isinstance(v, UnitV):
            return Deriv("C-Const", v, sigma, sigma, UnitT(), EMPTY)
        if isinstance(v, IntV):
            return Deriv("C-Const", v, sigma, sigma, IntT(), EMPTY)
        if isinstance(v, ChanLit):
            return Deriv("C-Chan", v, sigma, sigma, Chan(v.end), EMPTY)
        if isinstance(v, Var):
            if v.name not in gamma:
                raise E.UnboundVariable(str(v.name))
            return Deriv("C-Var", v, sigma, sigma, gamma[v.name], EMPTY)
        if isinstance(v, PairV):
            a = self.value(gamma, v.left)
            b = self.value(gamma, v.right)
            for d in (a, b):
                if is_session(d.type):
                    raise E.TypeMismatch("pair component must be data or a channel")
            return Deriv("C-Pair", v, sigma, sigma, PairT(a.type, b.type), EMPTY, (a, b))
        if isinstance(v, Lam):
            if v.sig is None or v.ptype is None:
                raise E.AnnotationMissing(f"lambda {v.param} lacks annotations")
            body = self.expr(gamma.set(v.param, v.ptype), v.sig, v.body)
            out = _union(body.left, body.out)
            t = FunT(v.sig, v.ptype, body.type, out)
            return Deriv("C-Abs", v, sigma, sigma, t, EMPTY, (body,))
        if isinstance(v, Rec):
            if not isinstance(v.type, FunT):
                raise E.AnnotationMismatch("rec must be annotated with a function type")
            inner = self.value(gamma.set(v.name, v.type), v.body)
            if inner.type != v.type:
                raise E.AnnotationMismatch(f"rec body has type {_show(inner.type)}, declared {_show(v.type)}")
            return Deriv("C-Rec", v, sigma, sigma, v.type, EMPTY, (inner,))
        raise E.TypeMismatch(f"not a value: {_show(v)}")

    # -------------------------------------------------------- expressions

    def _chan(self, gamma, v, sigma):
        d = self.value(gamma, v)
        if not isinstance(d.type, Chan):
            raise E.NotAChannelName(f"{_show(v)} has type {_show(d.type)}")
        alpha = d.type.ident
        if alpha not in sigma:
            raise E.ChannelNotInSigma(f"{alpha} is not in {_show(sigma)}")
        return d, alpha, sigma[alpha]

    def _mint(self, binder, sigma):
        if binder is not None and binder != WILD:
            alpha = binder
        else:
            alpha = self.fresh_ident()
        if alpha in sigma:
            raise E.IllFormedSigma(f"identity {alpha} already in Σ")
        return alpha

    def expr(self, gamma, sigma, e, binder=None):
        from .syntax import is_value
        if is_value(e):
            d = self.value(gamma, e, sigma)
            return Deriv("C-Val", e, sigma, sigma, d.type, EMPTY, (d,))

        if isinstance(e, Let):
            d1 = self.expr(gamma, sigma, e.bound, binder=e.name)
            if not d1.left.disjoint(d1.out):
                raise E.IllFormedSigma(
                    f"channels {sorted(map(str, set(d1.left) & set(d1.out)))} would occur twice")
            mid = d1.left.union(d1.out)
            if d1.rule == "C-Val" and isinstance(d1.type, Chan) and d1.type.ident != e.name:
                # the binder names the channel it is bound to, as after substitution
                e = Let(e.name, e.bound, rewrite_idents(e.body, {e.name: d1.type.ident}))
            d2 = self.expr(gamma.set(e.name, d1.type), mid, e.body)
            left = d2.left.restrict(d1.left.keys())
            out = _union(d2.out, d2.left.restrict(d1.out.keys()))
            return Deriv("C-Let", e, sigma, left, d2.type, out, (d1, d2))

        if isinstance(e, LetPair):
            dv = self.value(gamma, e.value)
            if not isinstance(dv.type, PairT):
                raise E.TypeMismatch(f"expected a pair, got {_show(dv.type)}")
            g = gamma.set(e.left, dv.type.left).set(e.right, dv.type.right)
            d = self.expr(g, sigma, e.body)
            return Deriv("C-LetPair", e, sigma, d.left, d.type, d.out, (dv, d))

        if isinstance(e, Fork):
            d1 = self.expr(gamma, sigma, e.child)
            _require_ended(d1.out, "forked thread")
            d2 = self.expr(gamma, d1.left, e.cont)
            return Deriv("C-Fork", e, sigma, d2.left, d2.type, d2.out, (d1, d2))

        if isinstance(e, App):
            df = self.value(gamma, e.fn)
            da = self.value(gamma, e.arg)
            ft = df.type
            if not isinstance(ft, FunT):
                raise E.TypeMismatch(f"applying a non-function of type {_show(ft)}")
            if da.type != ft.arg:
                if isinstance(da.type, Chan) and isinstance(ft.arg, Chan):
                    raise E.IdentityMismatch(
                        f"argument has identity {da.type.ident}, function expects {ft.arg.ident}")
                raise E.TypeMismatch(f"argument type {_show(da.type)} is not {_show(ft.arg)}")
            for k, s in ft.sig_in.items():
                if k not in sigma:
                    raise E.ChannelNotInSigma(f"call needs {k} which is not in {_show(sigma)}")
                if sigma[k] != s:
                    raise E.SessionMismatch(f"call needs {k}: {_show(s)}, have {_show(sigma[k])}")
            left = sigma.without(ft.sig_in.keys())
            if not left.disjoint(ft.sig_out):
                raise E.IllFormedSigma(
                    f"call result {sorted(map(str, set(left) & set(ft.sig_out)))} clashes with Σ")
            return Deriv("C-App", e, sigma, left, ft.res, ft.sig_out, (df, da))

        if isinstance(e, New):
            return Deriv("C-New", e, sigma, sigma, APType(e.session), EMPTY)

        if isinstance(e, (Accept, Request)):
            d = self.value(gamma, e.ap)
            if not isinstance(d.type, APType):
                raise E.TypeMismatch(f"expected an access point, got {_show(d.type)}")
            alpha = self._mint(binder, sigma)
            s = d.type.session if isinstance(e, Accept) else dual(d.type.session)
            rule = "C-Accept" if isinstance(e, Accept) else "C-Request"
            return Deriv(rule, e, sigma, sigma, Chan(alpha), Env(((alpha, s),)), (d,), ident=alpha)

        if isinstance(e, Send):
            dc, alpha, s = self._chan(gamma, e.chan, sigma)
            if not isinstance(s, Out):
                raise E.SessionMismatch(f"send on {alpha} at {_show(s)}")
            if is_session(s.payload):
                dv = self.value(gamma, e.value)
                if not isinstance(dv.type, Chan):
                    raise E.NotAChannelName(f"payload {_show(e.value)} is not a channel")
                beta = dv.type.ident
                if beta == alpha:
                    raise E.IllFormedSigma("a channel cannot be sent over itself")
                if beta not in sigma:
                    raise E.ChannelNotInSigma(f"{beta} is not in {_show(sigma)}")
                if sigma[beta] != s.payload:
                    raise E.SessionMismatch(f"{beta} has {_show(sigma[beta])}, need {_show(s.payload)}")
                left = sigma.without([alpha, beta])
                return Deriv("C-SendS", e, sigma, left, UnitT(), Env(((alpha, s.cont),)), (dv, dc),
                             info={"alpha": alpha, "beta": beta})
            dv = self.value(gamma, e.value)
            if dv.type != s.payload:
                raise E.TypeMismatch(f"sending {_show(dv.type)} where {_show(s.payload)} expected")
            left = sigma.without([alpha])
            return Deriv("C-SendD", e, sigma, left, UnitT(), Env(((alpha, s.cont),)), (dv, dc),
                         info={"alpha": alpha})

        if isinstance(e, Receive):
            dc, alpha, s = self._chan(gamma, e.chan, sigma)
            if not isinstance(s, In):
                raise E.SessionMismatch(f"receive on {alpha} at {_show(s)}")
            left = sigma.without([alpha])
            if is_session(s.payload):
                d = self._mint(binder, left)
                if d == alpha:
                    raise E.IllFormedSigma(f"identity {d} already in Σ")
                out = Env(((alpha, s.cont), (d, s.payload)))
                return Deriv("C-ReceiveS", e, sigma, left, Chan(d), out, (dc,), ident=d,
                             info={"alpha": alpha})
            return Deriv("C-ReceiveD", e, sigma, left, s.payload, Env(((alpha, s.cont),)), (dc,),
                         info={"alpha": alpha})

        if isinstance(e, Close):
            dc, alpha, s = self._chan(gamma, e.chan, sigma)
            if not isinstance(s, End):
                raise E.SessionMismatch(f"close on {alpha} at {_show(s)}")
            return Deriv("C-Close", e, sigma, sigma.without([alpha]), UnitT(), EMPTY, (dc,),
                         info={"alpha": alpha})

        if isinstance(e, Add):
            a = self.value(gamma, e.left)
            b = self.value(gamma, e.right)
            if not (isinstance(a.type, IntT) and isinstance(b.type, IntT)):
                raise E.TypeMismatch("addition needs two Int operands")
            return Deriv("C-Add", e, sigma, sigma, IntT(), EMPTY, (a, b))

        raise E.TypeMismatch(f"cannot type {_show(e)}")

    # -------------------------------------------------------- configurations

    def config(self, gamma, sigma, c):
        if isinstance(c, Thread):
            d = self.expr(gamma, sigma, c.term)
            _require_ended(d.out, "thread")
            return CDeriv("C-Thread", c, sigma, d.left, (d,))
        if isinstance(c, Par):
            d1 = self.config(gamma, sigma, c.left)
            d2 = self.config(gamma, d1.left, c.right)
            return CDeriv("C-Par", c, sigma, d2.left, (d1, d2))
        if isinstance(c, Nu) and isinstance(c.binder, NuAP):
            b = c.binder
            d = self.config(gamma.set(b.name, APType(b.session)), sigma, c.body)
            return CDeriv("C-NewN", c, sigma, d.left, (d,))
        if isinstance(c, Nu) and isinstance(c.binder, NuChan):
            b = c.binder
            plus, minus = ChanEnd(b.name, _PLUS), ChanEnd(b.name, _MINUS)
            if b.plus is not None and b.minus is not None and b.plus != dual(b.minus):
                raise E.UnbalancedChannel(f"{b.name}: {_show(b.plus)} and {_show(b.minus)} are not dual")
            inner = sigma
            for end, s in ((plus, b.plus), (minus, b.minus)):
                if s is not None:
                    inner = inner.extend(end, s)
            d = self.config(gamma, inner, c.body)
            for end in (plus, minus):
                if end in d.left and not isinstance(d.left[end], End):
                    raise E.UnclosedChannel(f"{end} left at {_show(d.left[end])}")
            rule = "C-NewB" if b.plus is not None and b.minus is not None else "C-NewC"
            return CDeriv(rule, c, sigma, d.left.without([plus, minus]), (d,))
        raise E.TypeMismatch(f"not a configuration: {c!r}")


_PLUS, _MINUS = Polarity.PLUS, Polarity.MINUS


def _union(a, b):
    return a.union(b)


def _require_ended(out, what):
    for k, s in out.items():
        if not isinstance(s, End):
            raise E.UnclosedChannel(f"{what} finishes with {k} at {_show(s)}")


def _start(*things):
    names = set()
    for t in things:
        if isinstance(t, Env):
            for k in t:
                names.add(k.name if isinstance(k, ChanEnd) else k)
        elif isinstance(t, (Chan, APType, FunT, PairT, In, Out)):
            for i in type_idents(t):
                names.add(i.name if isinstance(i, ChanEnd) else i)
        elif t is not None:
            all_names(t, names)
    return max((n.uid for n in names if isinstance(n, Name)), default=0)


# ---------------------------------------------------------------- public API


def derive_value(gamma, v):
    return Checker(_start(v, gamma)).value(_gamma(gamma), v)


def derive_expr(gamma, sigma, e):
    return Checker(_start(e, sigma, gamma)).expr(_gamma(gamma), sigma, e)


def derive_config(gamma, sigma, c):
    return Checker(_start(c, sigma, gamma)).config(_gamma(gamma), sigma, c)


def check_value(gamma, v):
    return derive_value(gamma, v).type


def check_expr(gamma, sigma, e):
    d = derive_expr(gamma, sigma, e)
    return d.left, d.type, d.out


def check_config(gamma, sigma, c):
    return derive_config(gamma, sigma, c).left


def _gamma(g):
    if g is None:
        return EMPTY
    return g if isinstance(g, Env) else Env(g)


def derive_program(prog):
    """Type definitions in order, then main under Σ = ∅.

    Returns (def derivations, main derivation or None, Γ)."""
    gamma = Env(tuple(prog.vals))
    start = _start(*(v for _, v in prog.defs), prog.main, *(t for _, t in prog.vals))
    checker = Checker(start)
    derivs = []
    for name, v in prog.defs:
        d = checker.value(gamma, v)
        derivs.append((name, d))
        gamma = gamma.set(name, d.type)
    main = None
    if prog.main is not None:
        main = checker.config(gamma, EMPTY, prog.main)
    return derivs, main, gamma


def check_program(prog):
    derivs, main, _ = derive_program(prog)
    return [(n, d.type) for n, d in derivs], (main.left if main else None)
