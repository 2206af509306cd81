"""Algorithmic linear typing for the functional calculus.

Input/leftover style: each check receives Γ and returns the type together
with Γ after the expression, in which consumed linear bindings are marked
as used.  A binding introduced by a λ or let must be used up (or be
unrestricted) by the end of its scope.
"""
from __future__ import annotations

from .. import errors as E
from ..env import Env
from ..names import ChanEnd, Polarity
from .syntax import (
    APType, Accept, Add, App, ChanLit, Concat, Fix, Fork, FunL, FunU, In, IntT, IntV,
    Lam, Let, LetPair, LinPair, New, Nu, NuAP, NuChan, Out, Pair, Par, Receive, Record,
    RecordLit, Request, Send, Split, SplitMany, Thread, UnitT, UnitV, Var, dual, subtype, unr,
)


class _Used:
    def __repr__(self):
        return "<used>"


USED = _Used()


def _show(x):
    from .pretty import show
    return show(x)


def _lookup(gamma, key):
    if key not in gamma:
        raise E.UnboundVariable(str(key))
    t = gamma[key]
    if t is USED:
        raise E.LinearViolation(f"{key} is used more than once")
    if unr(t):
        return t, gamma
    return t, gamma.set(key, USED)


def _scope(gamma_before, gamma_after, names):
    """Close the scope of `names`: check linear use and restore outer bindings."""
    for x in names:
        t = gamma_after.get(x)
        if t is not None and t is not USED and not unr(t):
            raise E.LinearViolation(f"linear {x} : {_show(t)} is never used")
    out = gamma_after.without(names)
    for x in names:
        if x in gamma_before:
            out = out.set(x, gamma_before[x])
    return out


def check(gamma, e):
    if isinstance(e, Var):
        return _lookup(gamma, e.name)
    if isinstance(e, ChanLit):
        return _lookup(gamma, e.end)
    if isinstance(e, UnitV):
        return UnitT(), gamma
    if isinstance(e, IntV):
        return IntT(), gamma
    if isinstance(e, Lam):
        if e.ptype is None:
            raise E.AnnotationMissing(f"parameter {e.param} is unannotated")
        g1 = gamma.set(e.param, e.ptype)
        t, g2 = check(g1, e.body)
        g3 = _scope(gamma, g2, [e.param])
        captured = [k for k in gamma if k != e.param and gamma[k] is not USED and g3.get(k) is USED]
        return (FunL if captured else FunU)(e.ptype, t), g3
    if isinstance(e, App):
        tf, g1 = check(gamma, e.fn)
        ta, g2 = check(g1, e.arg)
        if not isinstance(tf, (FunU, FunL)):
            raise E.TypeMismatch(f"applying a non-function of type {_show(tf)}")
        if not subtype(ta, tf.arg):
            raise E.TypeMismatch(f"argument {_show(ta)} where {_show(tf.arg)} expected")
        return tf.res, g2
    if isinstance(e, Pair):
        a, g1 = check(gamma, e.left)
        b, g2 = check(g1, e.right)
        return LinPair(a, b), g2
    if isinstance(e, LetPair):
        t, g1 = check(gamma, e.bound)
        if not isinstance(t, LinPair):
            raise E.TypeMismatch(f"pair pattern on {_show(t)}")
        if e.left == e.right:
            raise E.LinearViolation("pair pattern binds the same name twice")
        g2 = g1.set(e.left, t.left).set(e.right, t.right)
        tb, g3 = check(g2, e.body)
        return tb, _scope(g1, g3, [e.left, e.right])
    if isinstance(e, Let):
        t, g1 = check(gamma, e.bound)
        tb, g2 = check(g1.set(e.name, t), e.body)
        return tb, _scope(g1, g2, [e.name])
    if isinstance(e, Fork):
        t, g1 = check(gamma, e.body)
        if not unr(t):
            raise E.UnrViolation(f"forked expression returns linear {_show(t)}")
        return UnitT(), g1
    if isinstance(e, Send):
        tv, g1 = check(gamma, e.value)
        tc, g2 = check(g1, e.chan)
        if not isinstance(tc, Out):
            raise E.SessionMismatch(f"send on {_show(tc)}")
        if not subtype(tv, tc.payload):
            raise E.TypeMismatch(f"sending {_show(tv)} where {_show(tc.payload)} expected")
        return tc.cont, g2
    if isinstance(e, Receive):
        tc, g1 = check(gamma, e.chan)
        if not isinstance(tc, In):
            raise E.SessionMismatch(f"receive on {_show(tc)}")
        return LinPair(tc.payload, tc.cont), g1
    if isinstance(e, (Accept, Request)):
        t, g1 = check(gamma, e.ap)
        if not isinstance(t, APType):
            raise E.TypeMismatch(f"expected an access point, got {_show(t)}")
        return (t.session if isinstance(e, Accept) else dual(t.session)), g1
    if isinstance(e, New):
        return APType(e.session), gamma
    if isinstance(e, Fix):
        t, g1 = check(gamma, e.fn)
        if isinstance(t, FunL):
            raise E.UnrViolation("fix needs an unrestricted function")
        if not isinstance(t, FunU) or t.arg != t.res or not isinstance(t.arg, (FunU, FunL)):
            raise E.TypeMismatch(f"fix on {_show(t)}")
        return t.res, g1
    if isinstance(e, Add):
        a, g1 = check(gamma, e.left)
        b, g2 = check(g1, e.right)
        if not (isinstance(a, IntT) and isinstance(b, IntT)):
            raise E.TypeMismatch("addition needs Int operands")
        return IntT(), g2
    if isinstance(e, RecordLit):
        row, g = [], gamma
        for label, v in e.fields:
            t, g = check(g, v)
            row.append((label, t))
        return Record(Env(row, clash=E.RowClash)), g
    if isinstance(e, Concat):
        a, g1 = check(gamma, e.left)
        b, g2 = check(g1, e.right)
        if not (isinstance(a, Record) and isinstance(b, Record)):
            raise E.TypeMismatch("concatenation of non-records")
        if not a.row.disjoint(b.row):
            raise E.RowClash(f"fields {sorted(map(str, set(a.row) & set(b.row)))} on both sides")
        return Record(a.row.union(b.row)), g2
    if isinstance(e, Split):
        t, g1 = check(gamma, e.rec)
        if not isinstance(t, Record):
            raise E.TypeMismatch(f"field selection on {_show(t)}")
        if e.label not in t.row:
            raise E.FieldMissing(f"no field {e.label} in {_show(t)}")
        return LinPair(t.row[e.label], Record(t.row.without([e.label]))), g1
    if isinstance(e, SplitMany):
        t, g1 = check(gamma, e.rec)
        if not isinstance(t, Record):
            raise E.TypeMismatch(f"field selection on {_show(t)}")
        for l in e.labels:
            if l not in t.row:
                raise E.FieldMissing(f"no field {l} in {_show(t)}")
        return LinPair(Record(t.row.restrict(e.labels)), Record(t.row.without(e.labels))), g1
    raise E.TypeMismatch(f"cannot type {_show(e)}")


def check_expr(gamma, e):
    gamma = gamma if isinstance(gamma, Env) else Env(gamma or ())
    t, g = check(gamma, e)
    return t, Env(tuple((k, v) for k, v in g.items() if v is not USED))


def check_config(gamma, c):
    """Returns the leftover environment (unused bindings)."""
    gamma = gamma if isinstance(gamma, Env) else Env(gamma or ())
    g = _config(gamma, c)
    return Env(tuple((k, v) for k, v in g.items() if v is not USED))


def _config(gamma, c):
    if isinstance(c, Thread):
        t, g = check(gamma, c.term)
        if not unr(t):
            raise E.UnrViolation(f"thread returns linear {_show(t)}")
        return g
    if isinstance(c, Par):
        return _config(_config(gamma, c.left), c.right)
    if isinstance(c, Nu) and isinstance(c.binder, NuAP):
        b = c.binder
        g = _config(gamma.set(b.name, APType(b.session)), c.body)
        return _scope(gamma, g, [b.name])
    if isinstance(c, Nu) and isinstance(c.binder, NuChan):
        b = c.binder
        ends = []
        g = gamma
        for pol, s in ((Polarity.PLUS, b.plus), (Polarity.MINUS, b.minus)):
            if s is not None:
                g = g.extend(ChanEnd(b.name, pol), s)
                ends.append(ChanEnd(b.name, pol))
        if b.plus is not None and b.minus is not None and b.plus != dual(b.minus):
            raise E.UnbalancedChannel(f"{b.name}: ends are not dual")
        g = _config(g, c.body)
        return _scope(gamma, g, ends)
    raise E.TypeMismatch(f"not a configuration: {c!r}")


def closed_ok(leftover):
    """True when no linear binding is left unused."""
    return all(unr(t) for t in leftover.values())


def check_program(prog):
    """Type the definitions in order, then the main configuration."""
    gamma = Env(tuple(prog.vals))
    types = []
    for name, v in prog.defs:
        t, gamma2 = check(gamma, v)
        types.append((name, t))
        gamma = gamma2.set(name, t)
    left = None
    if prog.main is not None:
        left = check_config(gamma, prog.main)
        bad = [k for k, t in left.items() if not unr(t)]
        if bad:
            raise E.LinearViolation(f"unused linear bindings {sorted(map(str, bad))}")
    return types, left

