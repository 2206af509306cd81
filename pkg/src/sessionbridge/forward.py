"""Type-directed translation from the imperative calculus to the functional one.

Channel references become unit; the channels themselves live in a linear
state record threaded through every expression.  A translated expression
maps the incoming record to a pair of its result and the outgoing record,
so a function of type Σ1; T1 -> T2; Σ2 becomes a curried function that also
takes and returns the state.

The translation reads typing derivations.  It tracks which fields the
current record holds (`avail`); record split and concatenation ignore extra
fields, so only calls, whose parameter is an exact record type, need to cut
the record down to what the callee expects.
"""
from __future__ import annotations

from . import errors as E
from .env import Env
from .names import ChanEnd, Supply, ident_key
from .lfst import syntax as L
from .vgr import syntax as V
from .vgr.typing import CDeriv, Deriv, _start, derive_config, derive_expr, derive_program, derive_value

# ---------------------------------------------------------------- types


def translate_type(t):
    if isinstance(t, V.Chan):
        return L.UnitT()
    if isinstance(t, V.UnitT):
        return L.UnitT()
    if isinstance(t, V.IntT):
        return L.IntT()
    if isinstance(t, V.APType):
        return L.APType(translate_type(t.session))
    if isinstance(t, V.PairT):
        return L.LinPair(translate_type(t.left), translate_type(t.right))
    if isinstance(t, V.FunT):
        state_in = L.Record(translate_env(t.sig_in))
        out = L.LinPair(translate_type(t.res), L.Record(translate_env(t.sig_out)))
        return L.FunU(translate_type(t.arg), L.FunU(state_in, out))
    if isinstance(t, V.End):
        return L.End()
    if isinstance(t, V.In):
        return L.In(translate_type(t.payload), translate_type(t.cont))
    if isinstance(t, V.Out):
        return L.Out(translate_type(t.payload), translate_type(t.cont))
    raise TypeError(repr(t))


def translate_env(sigma):
    return Env(tuple((k, translate_type(s)) for k, s in sigma.items()), clash=E.RowClash)


def translate_gamma(gamma):
    return Env(tuple((k, translate_type(t)) for k, t in gamma.items()))


# ---------------------------------------------------------------- terms


def _need(d):
    return set(d.sigma) - set(d.left)


def _sorted(ids):
    return sorted(ids, key=ident_key)


class Translator:
    def __init__(self, start=0):
        self.supply = Supply(start)

    def fresh(self, hint):
        return self.supply(hint)

    # values
    def value(self, d):
        if not isinstance(d, Deriv):
            raise E.MissingDerivationNode(repr(d))
        v = d.term
        if d.rule == "C-Val":
            return self.value(d.prem[0])
        if d.rule == "C-Const":
            return L.IntV(v.n) if isinstance(v, V.IntV) else L.UNIT
        if d.rule == "C-Chan":
            return L.UNIT
        if d.rule == "C-Var":
            return L.Var(v.name)
        if d.rule == "C-Pair":
            return L.Pair(self.value(d.prem[0]), self.value(d.prem[1]))
        if d.rule == "C-Abs":
            body = d.prem[0]
            s = self.fresh("sigma")
            inner, _ = self.expr(body, s, set(v.sig))
            state = L.Record(translate_env(v.sig))
            return L.Lam(v.param, translate_type(v.ptype), L.Lam(s, state, inner))
        if d.rule == "C-Rec":
            return L.Fix(L.Lam(v.name, translate_type(v.type), self.value(d.prem[0])))
        raise E.MissingDerivationNode(f"no value image for {d.rule}")

    # expressions: -> (term, fields held afterwards)
    def expr(self, d, s, avail):
        rule = d.rule
        sv = L.Var(s)
        if rule == "C-Val":
            return L.Pair(self.value(d), sv), avail
        if rule == "C-Let":
            d1, d2 = d.prem
            e1, av1 = self.expr(d1, s, avail)
            s2 = self.fresh("sigma")
            e2, av2 = self.expr(d2, s2, av1)
            return L.LetPair(d.term.name, s2, e1, e2), av2
        if rule == "C-LetPair":
            dv, db = d.prem
            body, av = self.expr(db, s, avail)
            return L.LetPair(d.term.left, d.term.right, self.value(dv), body), av
        if rule == "C-Fork":
            d1, d2 = d.prem
            need = _need(d1)
            s1, s2 = self.fresh("sigma"), self.fresh("sigma")
            child, _ = self.expr(d1, s1, need)
            cont, av = self.expr(d2, s2, avail - need)
            split = L.SplitMany(sv, tuple(_sorted(need)))
            return L.LetPair(s1, s2, split, L.Let(L.WILD, L.Fork(child), cont)), av
        if rule == "C-App":
            df, da = d.prem
            ft = df.type
            need = set(ft.sig_in)
            out = set(ft.sig_out)
            call = L.App(L.App(self.value(df), self.value(da)), sv)
            if need == avail:
                return call, out
            # frame: hand the callee exactly its fields, keep the rest aside
            s1, s2, r, s3 = (self.fresh("sigma"), self.fresh("sigma"), self.fresh("r"),
                             self.fresh("sigma"))
            call = L.App(L.App(self.value(df), self.value(da)), L.Var(s1))
            body = L.LetPair(r, s3, call, L.Pair(L.Var(r), L.Concat(L.Var(s3), L.Var(s2))))
            return L.LetPair(s1, s2, L.SplitMany(sv, tuple(_sorted(need))), body), (avail - need) | out
        if rule == "C-New":
            return L.Pair(L.New(translate_type(d.term.session)), sv), avail
        if rule in ("C-Accept", "C-Request"):
            alpha = d.ident
            c = self.fresh("c")
            ap = self.value(d.prem[0])
            op = L.Accept(ap) if rule == "C-Accept" else L.Request(ap)
            state = L.Concat(sv, L.RecordLit(((alpha, L.Var(c)),)))
            return L.Let(c, op, L.Pair(L.UNIT, state)), avail | {alpha}
        if rule == "C-SendD":
            alpha = d.info["alpha"]
            c, c2, s1 = self.fresh("c"), self.fresh("c"), self.fresh("sigma")
            state = L.Concat(L.Var(s1), L.RecordLit(((alpha, L.Var(c2)),)))
            body = L.Let(c2, L.Send(self.value(d.prem[0]), L.Var(c)), L.Pair(L.UNIT, state))
            return L.LetPair(c, s1, L.Split(sv, alpha), body), avail
        if rule == "C-SendS":
            alpha, beta = d.info["alpha"], d.info["beta"]
            c, c2, p = self.fresh("c"), self.fresh("c"), self.fresh("p")
            s1, s2 = self.fresh("sigma"), self.fresh("sigma")
            state = L.Concat(L.Var(s2), L.RecordLit(((alpha, L.Var(c2)),)))
            body = L.Let(c2, L.Send(L.Var(p), L.Var(c)), L.Pair(L.UNIT, state))
            body = L.LetPair(p, s2, L.Split(L.Var(s1), beta), body)
            return L.LetPair(c, s1, L.Split(sv, alpha), body), avail - {beta}
        if rule in ("C-ReceiveD", "C-ReceiveS"):
            alpha = d.info["alpha"]
            c, c2, r, s1 = self.fresh("c"), self.fresh("c"), self.fresh("r"), self.fresh("sigma")
            if rule == "C-ReceiveD":
                state = L.Concat(L.Var(s1), L.RecordLit(((alpha, L.Var(c2)),)))
                res, av = L.Pair(L.Var(r), state), avail
            else:
                got = L.Concat(L.RecordLit(((d.ident, L.Var(r)),)), L.RecordLit(((alpha, L.Var(c2)),)))
                res, av = L.Pair(L.UNIT, L.Concat(L.Var(s1), got)), avail | {d.ident}
            body = L.LetPair(r, c2, L.Receive(L.Var(c)), res)
            return L.LetPair(c, s1, L.Split(sv, alpha), body), av
        if rule == "C-Close":
            alpha = d.info["alpha"]
            c, s1 = self.fresh("c"), self.fresh("sigma")
            return L.LetPair(c, s1, L.Split(sv, alpha), L.Pair(L.UNIT, L.Var(s1))), avail - {alpha}
        if rule == "C-Add":
            a, b = d.prem
            return L.Pair(L.Add(self.value(a), self.value(b)), sv), avail
        raise E.MissingDerivationNode(f"no expression image for {rule}")

    # configurations
    def config(self, cd):
        if not isinstance(cd, CDeriv):
            raise E.MissingDerivationNode(repr(cd))
        c = cd.config
        if cd.rule == "C-Thread":
            d = cd.prem[0]
            need = _need(d)
            s = self.fresh("sigma")
            fields = tuple((g, L.ChanLit(g) if isinstance(g, ChanEnd) else L.Var(g))
                           for g in _sorted(need))
            body, _ = self.expr(d, s, need)
            return L.Thread(L.Let(s, L.RecordLit(fields), body))
        if cd.rule == "C-Par":
            return L.Par(self.config(cd.prem[0]), self.config(cd.prem[1]))
        if cd.rule == "C-NewN":
            b = c.binder
            return L.Nu(L.NuAP(b.name, translate_type(b.session)), self.config(cd.prem[0]))
        if cd.rule in ("C-NewB", "C-NewC"):
            b = c.binder
            ends = [None if s is None else translate_type(s) for s in (b.plus, b.minus)]
            return L.Nu(L.NuChan(b.name, *ends), self.config(cd.prem[0]))
        raise E.MissingDerivationNode(f"no configuration image for {cd.rule}")


def _translator(*things):
    return Translator(_start(*things))


def translate_value(d):
    return _translator(d.term).value(d)


def translate_expr(d, sigma=None, avail=None):
    """Image of an expression derivation applied to the state variable `sigma`."""
    t = _translator(d.term, d.sigma)
    sigma = sigma or t.fresh("sigma")
    avail = _need(d) if avail is None else set(avail)
    term, _ = t.expr(d, sigma, avail)
    return term


def translate_config(cd):
    return _translator(cd.config, cd.sigma).config(cd)


def translate_program(prog):
    derivs, main, gamma = derive_program(prog)
    t = _translator(*(v for _, v in prog.defs), prog.main)
    vals = tuple((n, translate_type(ty)) for n, ty in prog.vals)
    defs = tuple((n, t.value(d)) for n, d in derivs)
    return L.Program(vals, defs, t.config(main) if main is not None else None)


def translate_closed(c, gamma=None, sigma=None):
    """Check a configuration and translate its derivation."""
    return translate_config(derive_config(gamma or Env(), sigma or Env(), c))


__all__ = [
    "translate_type", "translate_env", "translate_gamma", "translate_value", "translate_expr",
    "translate_config", "translate_program", "translate_closed", "derive_value", "derive_expr",
    "flatten_lets", "strip_annotations", "innermost_state_lambda", "same_code",
]


# ---------------------------------------------------------------- normal form for comparisons


def flatten_lets(e, supply=None):
    """Administrative normal form used to compare translations with
    hand-written code: nested lets are re-associated, a pair pattern bound
    to a literal pair becomes two lets, copies `let x = y` are inlined,
    `let _ = ()` disappears and a
    non-value state in a final pair is let-bound first."""
    supply = supply or Supply(max((n.uid for n in L.all_names(e)), default=0))
    prev = None
    while prev != e:
        prev, e = e, _flat(e, supply)
    return e


def _flat(e, supply):
    if isinstance(e, (L.Let, L.LetPair)):
        bound, body = _flat(e.bound, supply), _flat(e.body, supply)
        names = (e.name,) if isinstance(e, L.Let) else (e.left, e.right)
        if isinstance(bound, (L.Let, L.LetPair)):
            inner = (bound.name,) if isinstance(bound, L.Let) else (bound.left, bound.right)
            if not set(inner) & (L.free_vars(body) - set(names)):
                outer = _rebind(e, bound.body, body)
                return _rebind(bound, bound.bound, outer)
        if isinstance(e, L.LetPair) and isinstance(bound, L.Pair) and e.left not in L.free_vars(bound.right):
            return L.Let(e.left, bound.left, L.Let(e.right, bound.right, body))
        if isinstance(e, L.Let) and e.name == L.WILD and bound == L.UNIT:
            return body
        if isinstance(e, L.Let) and isinstance(bound, L.Var):
            return L.subst(body, e.name, bound)
        return _rebind(e, bound, body)
    if isinstance(e, L.Pair) and L.is_value(e.left) and not L.is_value(e.right):
        s = supply("sigma")
        return L.Let(s, _flat(e.right, supply), L.Pair(e.left, L.Var(s)))
    kids = L.children(e)
    return L.rebuild(e, [_flat(k, supply) for k in kids]) if kids else e


def _rebind(node, bound, body):
    if isinstance(node, L.Let):
        return L.Let(node.name, bound, body)
    return L.LetPair(node.left, node.right, bound, body)


def strip_annotations(e):
    if isinstance(e, L.Lam):
        return L.Lam(e.param, None, strip_annotations(e.body))
    kids = L.children(e)
    return L.rebuild(e, [strip_annotations(k) for k in kids]) if kids else e


def innermost_state_lambda(e):
    """The last `lam` of a curried function whose body is not itself a
    function (peeling through a returned (function, state) pair)."""
    while True:
        if isinstance(e, L.Lam) and isinstance(e.body, L.Lam):
            e = e.body
        elif isinstance(e, L.Lam) and isinstance(e.body, L.Pair) and isinstance(e.body.left, L.Lam):
            e = e.body.left
        else:
            return e


def same_code(a, b):
    """α-equivalence after let-flattening and annotation erasure."""
    from .lfst.semantics import term_key
    na = flatten_lets(strip_annotations(a))
    nb = flatten_lets(strip_annotations(b))
    return term_key(na) == term_key(nb)
