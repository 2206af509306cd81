"""Identity-tagged session types with a sequential effect system.

A channel value has type `a @ S`: session S on the channel with identity a.
An expression is typed as `t / Si ~> So`; Si lists the channels the
expression needs (with their sessions on entry) and So what it hands back.
Effects are minimal footprints: values have `{} ~> {}`, and a surrounding
frame of untouched channels is left implicit.  Functions carry the latent
effect of their body.

Erasing tags and effects gives ordinary linear types.  Reading the tags as
channel identities and the effects as before/after channel environments
gives types of the imperative calculus, which is what the typed backward
translation uses.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import errors as E
from .env import Env
from .names import Supply
from .lfst import syntax as L
from .lfst.syntax import APType, End, In, IntT, LinPair, Out, UnitT, is_session
from .vgr import syntax as V


@dataclass(frozen=True)
class Tagged:
    tag: object
    session: object


@dataclass(frozen=True)
class EFunU:
    arg: object
    sig_in: Env
    sig_out: Env
    res: object


@dataclass(frozen=True)
class EFunL:
    arg: object
    sig_in: Env
    sig_out: Env
    res: object


NONE = Env((), clash=E.TagClash)


def sigma(items=()):
    return Env(tuple(items), clash=E.TagClash)


def unr(t):
    if isinstance(t, (UnitT, IntT, APType, EFunU, End)):
        return True
    if isinstance(t, Tagged):
        return isinstance(t.session, End)
    if isinstance(t, LinPair):
        return unr(t.left) and unr(t.right)
    return False


def subtype(a, b):
    if a == b:
        return True
    if isinstance(a, (EFunU, EFunL)) and isinstance(b, EFunL):
        return a.sig_in == b.sig_in and a.sig_out == b.sig_out and \
            subtype(b.arg, a.arg) and subtype(a.res, b.res)
    if isinstance(a, LinPair) and isinstance(b, LinPair):
        return subtype(a.left, b.left) and subtype(a.right, b.right)
    return False


# ---------------------------------------------------------------- printing


def show_type(t, nested=False):
    from .lfst.pretty import show_session, show_type as plain
    if isinstance(t, Tagged):
        s = f"{t.tag} @ {show_session(t.session, show_type)}"
        return f"({s})" if nested else s
    if isinstance(t, (EFunU, EFunL)):
        arrow = "->" if isinstance(t, EFunU) else "-o"
        eff = f"{{{show_sigma(t.sig_in, False)} ~> {show_sigma(t.sig_out, False)}}}"
        s = f"{show_type(t.arg, True)} {arrow}{eff} {show_type(t.res)}"
        return f"({s})" if nested else s
    if isinstance(t, LinPair):
        return f"({show_type(t.left, True)} * {show_type(t.right, True)})"
    if isinstance(t, APType):
        return f"[{show_session(t.session, show_type)}]"
    if is_session(t):
        s = show_session(t, show_type)
        return f"({s})" if nested and not isinstance(t, End) else s
    return plain(t, nested)


def show_sigma(s, braces=True):
    from .lfst.pretty import show_session
    body = ", ".join(f"{k}: {show_session(v, show_type)}" for k, v in s.items())
    return "{" + body + "}" if braces else body


def show_judgment(t, si, so):
    return f"{show_type(t)} / {show_sigma(si)} ~> {show_sigma(so)}"


# ---------------------------------------------------------------- checking


class _Used:
    def __repr__(self):
        return "<used>"


USED = _Used()


def _seq(first, second):
    """Sequential composition of two footprints."""
    (i1, o1), (i2, o2) = first, second
    need = []
    for a, s in i2.items():
        if a in o1:
            if o1[a] != s:
                raise E.EffectMismatch(
                    f"{a} is at {show_type(o1[a])} but {show_type(s)} is needed")
        elif a in i1:
            raise E.EffectMismatch(f"{a} is needed after it was given away")
        else:
            need.append((a, s))
    rest = [(a, s) for a, s in o1.items() if a not in i2]
    for a in o2:
        if any(a == b for b, _ in rest) or (a in i1 and a not in o1 and a not in i2):
            raise E.TagClash(f"identity {a} would occur twice")
    return sigma(list(i1.items()) + need), sigma(rest + list(o2.items()))


class Checker:
    def __init__(self, start=0):
        self.supply = Supply(start)
        self.lam_effects = {}  # id(Lam) -> (sig_in, sig_out)
        self.recv_tags = {}  # id(Receive) -> minted identity

    def fresh(self, hint):
        return self.supply(hint)

    def lookup(self, gamma, x):
        if x not in gamma:
            raise E.UnboundVariable(str(x))
        t = gamma[x]
        if t is USED:
            raise E.LinearViolation(f"{x} is used more than once")
        return t, (gamma if unr(t) else gamma.set(x, USED))

    def scope(self, before, after, names):
        for x in names:
            t = after.get(x)
            if t is not None and t is not USED and not unr(t):
                raise E.LinearViolation(f"linear {x} : {show_type(t)} is never used")
        out = after.without(names)
        for x in names:
            if x in before:
                out = out.set(x, before[x])
        return out

    def check(self, gamma, e, binder=None):
        """-> (type, Si, So, Γ after)"""
        if isinstance(e, L.Var):
            t, g = self.lookup(gamma, e.name)
            return t, NONE, NONE, g
        if isinstance(e, L.UnitV):
            return UnitT(), NONE, NONE, gamma
        if isinstance(e, L.IntV):
            return IntT(), NONE, NONE, gamma
        if isinstance(e, L.ChanLit):
            raise E.TypeMismatch("channel literals do not occur in source programs")
        if isinstance(e, (L.RecordLit, L.Concat, L.Split, L.SplitMany)):
            raise E.RecordNotSupported(f"record operation {type(e).__name__}")
        if isinstance(e, L.Fix):
            raise E.NotSupported("recursion is outside the effect calculus")
        if isinstance(e, L.Lam):
            if e.ptype is None:
                raise E.AnnotationMissing(f"parameter {e.param} is unannotated")
            t, si, so, g2 = self.check(gamma.set(e.param, e.ptype), e.body)
            g3 = self.scope(gamma, g2, [e.param])
            captured = [k for k in gamma if k != e.param and gamma[k] is not USED and g3.get(k) is USED]
            self.lam_effects[id(e)] = (si, so)
            ctor = EFunL if captured else EFunU
            return ctor(e.ptype, si, so, t), NONE, NONE, g3
        if isinstance(e, L.App):
            tf, i1, o1, g1 = self.check(gamma, e.fn)
            ta, i2, o2, g2 = self.check(g1, e.arg)
            if not isinstance(tf, (EFunU, EFunL)):
                raise E.TypeMismatch(f"applying a non-function of type {show_type(tf)}")
            if not subtype(ta, tf.arg):
                raise E.TypeMismatch(f"argument {show_type(ta)} where {show_type(tf.arg)} expected")
            eff = _seq(_seq((i1, o1), (i2, o2)), (tf.sig_in, tf.sig_out))
            return tf.res, eff[0], eff[1], g2
        if isinstance(e, L.Pair):
            a, i1, o1, g1 = self.check(gamma, e.left)
            b, i2, o2, g2 = self.check(g1, e.right)
            i, o = _seq((i1, o1), (i2, o2))
            return LinPair(a, b), i, o, g2
        if isinstance(e, L.Add):
            a, i1, o1, g1 = self.check(gamma, e.left)
            b, i2, o2, g2 = self.check(g1, e.right)
            if not (isinstance(a, IntT) and isinstance(b, IntT)):
                raise E.TypeMismatch("addition needs Int operands")
            i, o = _seq((i1, o1), (i2, o2))
            return IntT(), i, o, g2
        if isinstance(e, L.Let):
            t, i1, o1, g1 = self.check(gamma, e.bound, binder=e.name)
            tb, i2, o2, g2 = self.check(g1.set(e.name, t), e.body)
            i, o = _seq((i1, o1), (i2, o2))
            return tb, i, o, self.scope(g1, g2, [e.name])
        if isinstance(e, L.LetPair):
            t, i1, o1, g1 = self.check(gamma, e.bound)
            if not isinstance(t, LinPair):
                raise E.TypeMismatch(f"pair pattern on {show_type(t)}")
            if e.left == e.right:
                raise E.LinearViolation("pair pattern binds the same name twice")
            tb, i2, o2, g2 = self.check(g1.set(e.left, t.left).set(e.right, t.right), e.body)
            i, o = _seq((i1, o1), (i2, o2))
            return tb, i, o, self.scope(g1, g2, [e.left, e.right])
        if isinstance(e, L.Fork):
            t, i, o, g = self.check(gamma, e.body)
            if not unr(t):
                raise E.UnrViolation(f"forked expression returns linear {show_type(t)}")
            _require_ended(o, "forked thread")
            return UnitT(), i, NONE, g
        if isinstance(e, L.Send):
            tv, i1, o1, g1 = self.check(gamma, e.value)
            tc, i2, o2, g2 = self.check(g1, e.chan)
            if not (isinstance(tc, Tagged) and isinstance(tc.session, Out)):
                raise E.SessionMismatch(f"send on {show_type(tc)}")
            a, s = tc.tag, tc.session
            if is_session(s.payload):
                if not (isinstance(tv, Tagged) and tv.session == s.payload):
                    raise E.TypeMismatch(f"sending {show_type(tv)} where a channel at "
                                         f"{show_type(s.payload)} is expected")
                if tv.tag == a:
                    raise E.TagClash(f"channel {a} sent over itself")
                op = (sigma([(a, s), (tv.tag, tv.session)]), sigma([(a, s.cont)]))
            else:
                if not subtype(tv, s.payload):
                    raise E.TypeMismatch(f"sending {show_type(tv)} where "
                                         f"{show_type(s.payload)} is expected")
                op = (sigma([(a, s)]), sigma([(a, s.cont)]))
            i, o = _seq(_seq((i1, o1), (i2, o2)), op)
            return Tagged(a, s.cont), i, o, g2
        if isinstance(e, L.Receive):
            tc, i1, o1, g1 = self.check(gamma, e.chan)
            if not (isinstance(tc, Tagged) and isinstance(tc.session, In)):
                raise E.SessionMismatch(f"receive on {show_type(tc)}")
            a, s = tc.tag, tc.session
            if is_session(s.payload):
                b = self.fresh("b")
                self.recv_tags[id(e)] = b
                got = Tagged(b, s.payload)
                op = (sigma([(a, s)]), sigma([(a, s.cont), (b, s.payload)]))
            else:
                got = s.payload
                op = (sigma([(a, s)]), sigma([(a, s.cont)]))
            i, o = _seq((i1, o1), op)
            return LinPair(got, Tagged(a, s.cont)), i, o, g1
        if isinstance(e, (L.Accept, L.Request)):
            t, i1, o1, g1 = self.check(gamma, e.ap)
            if not isinstance(t, APType):
                raise E.TypeMismatch(f"expected an access point, got {show_type(t)}")
            a = binder if binder is not None and binder != L.WILD else self.fresh("a")
            s = t.session if isinstance(e, L.Accept) else L.dual(t.session)
            i, o = _seq((i1, o1), (NONE, sigma([(a, s)])))
            return Tagged(a, s), i, o, g1
        if isinstance(e, L.New):
            return APType(e.session), NONE, NONE, gamma
        raise E.TypeMismatch(f"cannot type {type(e).__name__}")


def _require_ended(out, what):
    for a, s in out.items():
        if not isinstance(s, End):
            raise E.UnclosedChannel(f"{what} leaves {a} at {show_type(s)}")


def _start(gamma, e):
    names = set()
    L.all_names(e, names)
    names |= {k for k in gamma if hasattr(k, "uid")}
    for t in _types_in(gamma, e):
        names |= tags_of(t)
    return max((n.uid for n in names), default=0)


def _types_in(gamma, e):
    out = [t for t in gamma.values()]
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, L.Lam) and x.ptype is not None:
            out.append(x.ptype)
        stack.extend(L.children(x))
    return out


def tags_of(t, acc=None):
    acc = set() if acc is None else acc
    if isinstance(t, Tagged):
        acc.add(t.tag)
        tags_of(t.session, acc)
    elif isinstance(t, (EFunU, EFunL)):
        for env in (t.sig_in, t.sig_out):
            for k, s in env.items():
                acc.add(k)
                tags_of(s, acc)
        tags_of(t.arg, acc)
        tags_of(t.res, acc)
    elif isinstance(t, (In, Out)):
        tags_of(t.payload, acc)
        tags_of(t.cont, acc)
    elif isinstance(t, LinPair):
        tags_of(t.left, acc)
        tags_of(t.right, acc)
    elif isinstance(t, APType):
        tags_of(t.session, acc)
    return acc


def _env(gamma):
    return gamma if isinstance(gamma, Env) else Env(tuple(gamma or ()))


def check_eff(gamma, e, checker=None):
    """(type, Si, So, Γ leftover) for `e` under Γ."""
    gamma = _env(gamma)
    checker = checker or Checker(_start(gamma, e))
    t, si, so, g = checker.check(gamma, e)
    return t, si, so, Env(tuple((k, v) for k, v in g.items() if v is not USED))


def check_program(prog):
    """Definitions must be values; each main thread must be closed and end
    all the channels it opens."""
    gamma = Env(tuple(prog.vals))
    types = []
    for name, v in prog.defs:
        t, _, _, g = check_eff(gamma, v)
        types.append((name, t))
        gamma = g.set(name, t)
    effects = []
    if prog.main is not None:
        effects = _check_config(gamma, prog.main)
    return types, effects


def _check_config(gamma, c):
    if isinstance(c, L.Thread):
        t, si, so, _ = check_eff(gamma, c.term)
        if not unr(t):
            raise E.UnrViolation(f"thread returns linear {show_type(t)}")
        if len(si):
            raise E.ChannelNotInSigma(f"thread needs {show_sigma(si)}")
        _require_ended(so, "thread")
        return [(t, si, so)]
    if isinstance(c, L.Par):
        return _check_config(gamma, c.left) + _check_config(gamma, c.right)
    if isinstance(c.binder, L.NuAP):
        b = c.binder
        return _check_config(gamma.set(b.name, APType(b.session)), c.body)
    raise E.NotSupported("channel binders are runtime syntax")


# ---------------------------------------------------------------- erasure


def erase(x):
    """Drop tags and latent effects from a type, an environment or a term."""
    if isinstance(x, Env):
        return Env(tuple((k, erase(v)) for k, v in x.items()))
    if isinstance(x, Tagged):
        return erase(x.session)
    if isinstance(x, EFunU):
        return L.FunU(erase(x.arg), erase(x.res))
    if isinstance(x, EFunL):
        return L.FunL(erase(x.arg), erase(x.res))
    if isinstance(x, In):
        return In(erase(x.payload), erase(x.cont))
    if isinstance(x, Out):
        return Out(erase(x.payload), erase(x.cont))
    if isinstance(x, LinPair):
        return LinPair(erase(x.left), erase(x.right))
    if isinstance(x, APType):
        return APType(erase(x.session))
    if isinstance(x, (End, UnitT, IntT)) or x is None:
        return x
    if isinstance(x, L.Program):
        return L.Program(tuple((n, erase(t)) for n, t in x.vals),
                         tuple((n, erase(v)) for n, v in x.defs), erase(x.main))
    if isinstance(x, L.Thread):
        return L.Thread(erase(x.term))
    if isinstance(x, L.Par):
        return L.Par(erase(x.left), erase(x.right))
    if isinstance(x, L.Nu):
        b = x.binder
        nb = (L.NuAP(b.name, erase(b.session)) if isinstance(b, L.NuAP)
              else L.NuChan(b.name, erase(b.plus), erase(b.minus)))
        return L.Nu(nb, erase(x.body))
    if isinstance(x, L.Lam):
        return L.Lam(x.param, erase(x.ptype), erase(x.body))
    if isinstance(x, L.New):
        return L.New(erase(x.session))
    kids = L.children(x)
    return L.rebuild(x, [erase(k) for k in kids]) if kids else x


# ---------------------------------------------------------------- back to the imperative calculus


def back_type(t):
    if isinstance(t, Tagged):
        return V.Chan(t.tag)
    if isinstance(t, (EFunU, EFunL)):
        return V.FunT(back_env(t.sig_in), back_type(t.arg), back_type(t.res), back_env(t.sig_out))
    if isinstance(t, LinPair):
        return V.PairT(back_type(t.left), back_type(t.right))
    if isinstance(t, In):
        return V.In(back_type(t.payload), back_type(t.cont))
    if isinstance(t, Out):
        return V.Out(back_type(t.payload), back_type(t.cont))
    if isinstance(t, End):
        return V.END
    if isinstance(t, APType):
        return V.APType(back_type(t.session))
    if isinstance(t, UnitT):
        return V.UNIT_T
    if isinstance(t, IntT):
        return V.INT_T
    raise TypeError(repr(t))


def back_env(s):
    return Env(tuple((k, back_type(v)) for k, v in s.items()))


def back_typed(gamma, e):
    """Typed backward image of an expression in A-normal form: λs are
    annotated with their latent effects, and a received channel is named
    after the identity the checker gave it."""
    from .anf import is_anf
    from .backward import back_expr
    if not is_anf(e):
        raise E.NotInANF("typed backward translation needs A-normal form")
    gamma = _env(gamma)
    checker = Checker(_start(gamma, e))
    checker.check(gamma, e)

    def lam_annot(node):
        si, so = checker.lam_effects[id(node)]
        return back_env(si), back_type(node.ptype)

    def recv_binder(node):
        return checker.recv_tags.get(id(node))

    return back_expr(e, lam_annot, recv_binder, start=checker.supply.counter)


# ---------------------------------------------------------------- comparison


def same_up_to_renaming(r1, r2, fixed=()):
    """Equality of (type, Si, So) results up to a bijective renaming of the
    tags not in `fixed` (those the checker or a translation invented)."""
    fixed = set(fixed)
    free1, free2 = _loose(r1, fixed), _loose(r2, fixed)
    if len(free1) != len(free2):
        return False
    if len(free1) > 6:
        perms = [free2]
    else:
        perms = itertools.permutations(free2)
    for p in perms:
        m = dict(zip(free1, p))
        if _rename_result(r1, m) == tuple(r2):
            return True
    return False


def _loose(r, fixed):
    tags = set()
    t, si, so = r
    tags_of(t, tags)
    for env in (si, so):
        for k, s in env.items():
            tags.add(k)
            tags_of(s, tags)
    return sorted(tags - fixed, key=lambda n: (n.text, n.uid))


def _rename(t, m):
    if isinstance(t, Tagged):
        return Tagged(m.get(t.tag, t.tag), _rename(t.session, m))
    if isinstance(t, (EFunU, EFunL)):
        return type(t)(_rename(t.arg, m), _rename_env(t.sig_in, m), _rename_env(t.sig_out, m),
                       _rename(t.res, m))
    if isinstance(t, (In, Out)):
        return type(t)(_rename(t.payload, m), _rename(t.cont, m))
    if isinstance(t, LinPair):
        return LinPair(_rename(t.left, m), _rename(t.right, m))
    if isinstance(t, APType):
        return APType(_rename(t.session, m))
    return t


def _rename_env(env, m):
    return sigma([(m.get(k, k), _rename(v, m)) for k, v in env.items()])


def _rename_result(r, m):
    t, si, so = r
    return (_rename(t, m), _rename_env(si, m), _rename_env(so, m))


def user_tags(gamma, e):
    """Tags written in Γ or in annotations of e."""
    acc = set()
    for t in _types_in(_env(gamma), e):
        tags_of(t, acc)
    return acc
