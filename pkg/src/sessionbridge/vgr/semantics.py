"""Labeled small-step semantics of the imperative calculus.

Threads reduce under contexts E ::= [] | let x = E in t.  Configurations are
handled in flattened form: a list of ν-binders (floated outward) and a list
of threads.  Channel binders carry the current session of each endpoint so
that reducts remain checkable.
"""
from __future__ import annotations

from ..canon import blank, config_key
from ..names import (
    AcceptOn, Act, ChanEnd, Emit, FreshSupply, Kind, Polarity, Receive as RecvLabel,
    RequestOn, Silent, fresh,
)
from .syntax import (
    APType, Accept, Add, App, Chan, ChanLit, Close, End, Fork, FunT, HOLE, Hole, In, IntT,
    IntV, Lam, Let, LetPair, New, Nu, NuAP, NuChan, Out, PairT, PairV, Par, Rec, Receive,
    Request, Send, Thread, UNIT, UnitT, UnitV, Var, all_names, decompose, dual, is_value,
    plug, subst,
)

# ---------------------------------------------------------------- expressions


def _local(redex):
    """Silent thread-local reduct of a redex, or None."""
    if isinstance(redex, Let) and is_value(redex.bound):
        return subst(redex.body, redex.name, redex.bound)
    if isinstance(redex, LetPair) and isinstance(redex.value, PairV):
        body = subst(redex.body, redex.left, redex.value.left)
        return subst(body, redex.right, redex.value.right)
    if isinstance(redex, App):
        f = redex.fn
        if isinstance(f, Lam) and is_value(redex.arg):
            return subst(f.body, f.param, redex.arg)
        if isinstance(f, Rec) and is_value(redex.arg):
            return App(subst(f.body, f.name, f), redex.arg)
    if isinstance(redex, Add) and isinstance(redex.left, IntV) and isinstance(redex.right, IntV):
        return IntV(redex.left.n + redex.right.n)
    return None


def step_expr(t, supply=FreshSupply()):
    frames, r = decompose(t)
    reduct = _local(r)
    if reduct is not None:
        return [(Silent(), plug(frames, reduct), supply)]
    if isinstance(r, Close) and isinstance(r.chan, ChanLit):
        return [(Silent(), plug(frames, UNIT), supply)]
    if isinstance(r, (Accept, Request)) and isinstance(r.ap, Var):
        g, supply = fresh(supply, Kind.CHANNEL, "g")
        if isinstance(r, Request):
            return [(RequestOn(g), plug(frames, ChanLit(ChanEnd(g, Polarity.PLUS))), supply)]
        return [(AcceptOn(g), plug(frames, ChanLit(ChanEnd(g, Polarity.MINUS))), supply)]
    if isinstance(r, Send) and isinstance(r.chan, ChanLit) and is_value(r.value):
        return [(Emit(r.chan.end, r.value), plug(frames, UNIT), supply)]
    if isinstance(r, Receive) and isinstance(r.chan, ChanLit):
        return [(RecvLabel(r.chan.end), plug(frames, HOLE), supply)]
    return []


# ---------------------------------------------------------------- configurations


def flatten(c):
    """-> (binders, threads); binders are NuAP/NuChan, outermost first."""
    binders, threads = [], []
    _flatten(c, binders, threads)
    return binders, threads


def _flatten(c, binders, threads):
    if isinstance(c, Thread):
        threads.append(c.term)
    elif isinstance(c, Par):
        _flatten(c.left, binders, threads)
        _flatten(c.right, binders, threads)
    elif isinstance(c, Nu):
        b = c.binder
        body = c.body
        if any(x.name == b.name for x in binders):
            taken = {x.name for x in binders} | all_names(body)
            new = type(b.name)(b.name.kind, b.name.text, max(n.uid for n in taken) + 1)
            body = rename_config(body, b.name, new)
            b = NuAP(new, b.session) if isinstance(b, NuAP) else NuChan(new, b.plus, b.minus)
        binders.append(b)
        _flatten(body, binders, threads)
    else:
        raise TypeError(repr(c))


def rename_config(c, old, new):
    def nm(n):
        return new if n == old else n

    def ident(i):
        return ChanEnd(nm(i.name), i.pol) if isinstance(i, ChanEnd) else nm(i)

    from .syntax import map_idents

    def ty(t):
        return None if t is None else map_idents(t, ident)

    def term(t):
        if isinstance(t, Var):
            return Var(nm(t.name))
        if isinstance(t, ChanLit):
            return ChanLit(ident(t.end))
        if isinstance(t, Lam):
            return Lam(ty(t.sig), nm(t.param), ty(t.ptype), term(t.body))
        if isinstance(t, Rec):
            return Rec(nm(t.name), ty(t.type), term(t.body))
        if isinstance(t, Let):
            return Let(nm(t.name), term(t.bound), term(t.body))
        if isinstance(t, LetPair):
            return LetPair(nm(t.left), nm(t.right), term(t.value), term(t.body))
        if isinstance(t, New):
            return New(ty(t.session))
        if isinstance(t, (UnitV, IntV, Hole)):
            return t
        fields = [term(getattr(t, f)) for f in t.__dataclass_fields__]
        return type(t)(*fields)

    def cfg(c):
        if isinstance(c, Thread):
            return Thread(term(c.term))
        if isinstance(c, Par):
            return Par(cfg(c.left), cfg(c.right))
        b = c.binder
        if isinstance(b, NuAP):
            b = NuAP(nm(b.name), ty(b.session))
        else:
            b = NuChan(nm(b.name), ty(b.plus), ty(b.minus))
        return Nu(b, cfg(c.body))

    return cfg(c)


def build(binders, threads):
    if not threads:
        threads = [UNIT]
    body = Thread(threads[-1])
    for t in reversed(threads[:-1]):
        body = Par(Thread(t), body)
    for b in reversed(binders):
        body = Nu(b, body)
    return body


def gc(binders, threads):
    used = set()
    for t in threads:
        all_names(t, used)
    return [b for b in binders if b.name in used]


def canonical(c):
    binders, threads = flatten(c)
    return build(gc(binders, threads), threads)


def _advance(s):
    return s.cont if isinstance(s, (In, Out)) else s


def step_config(c, supply=FreshSupply(), access=None):
    """All enabled process steps as [(Act, config, supply)]."""
    binders, threads = flatten(c)
    binders = gc(binders, threads)
    access = dict(access or {})
    for b in binders:
        if isinstance(b, NuAP):
            access[b.name] = b.session
    results = []
    decs = [decompose(t) for t in threads]

    def emit(label, new_binders, new_threads, s):
        results.append((label, build(gc(new_binders, new_threads), new_threads), s))

    for i, (frames, r) in enumerate(decs):
        reduct = _local(r)
        if reduct is not None:
            ts = list(threads)
            ts[i] = plug(frames, reduct)
            emit(Act.SILENT, binders, ts, supply)
        elif isinstance(r, Close) and isinstance(r.chan, ChanLit):
            end = r.chan.end
            ts = list(threads)
            ts[i] = plug(frames, UNIT)
            bs = [_close_end(b, end) for b in binders]
            emit(Act.SILENT, bs, ts, supply)
        elif isinstance(r, New):
            p, s2 = fresh(supply, Kind.ACCESS, "p")
            ts = list(threads)
            ts[i] = plug(frames, Var(p))
            emit(Act.NEW, binders + [NuAP(p, r.session)], ts, s2)
        elif isinstance(r, Fork):
            ts = list(threads)
            ts[i] = plug(frames, r.cont)
            ts.insert(i + 1, r.child)
            emit(Act.FORK, binders, ts, supply)
        elif isinstance(r, Request) and isinstance(r.ap, Var):
            for j, (frames2, r2) in enumerate(decs):
                if j != i and isinstance(r2, Accept) and r2.ap == r.ap:
                    g, s2 = fresh(supply, Kind.CHANNEL, "g")
                    s = access.get(r.ap.name)
                    b = NuChan(g, dual(s) if s is not None else None, s)
                    ts = list(threads)
                    ts[i] = plug(frames, ChanLit(ChanEnd(g, Polarity.PLUS)))
                    ts[j] = plug(frames2, ChanLit(ChanEnd(g, Polarity.MINUS)))
                    emit(Act.ACCEPT, binders + [b], ts, s2)
        elif isinstance(r, Send) and isinstance(r.chan, ChanLit) and is_value(r.value):
            end = r.chan.end
            for j, (frames2, r2) in enumerate(decs):
                if j != i and isinstance(r2, Receive) and r2.chan == ChanLit(end.dual()):
                    ts = list(threads)
                    ts[i] = plug(frames, UNIT)
                    ts[j] = plug(frames2, r.value)
                    bs = [_advance_binder(b, end) for b in binders]
                    emit(Act.SEND, bs, ts, supply)
    return results


def _close_end(b, end):
    if isinstance(b, NuChan) and b.name == end.name:
        if end.pol is Polarity.PLUS:
            return NuChan(b.name, None, b.minus)
        return NuChan(b.name, b.plus, None)
    return b


def _advance_binder(b, end):
    if isinstance(b, NuChan) and b.name == end.name:
        return NuChan(b.name, _opt_adv(b.plus), _opt_adv(b.minus))
    return b


def _opt_adv(s):
    return None if s is None else _advance(s)


def all_values(c):
    _, threads = flatten(c)
    return all(is_value(t) for t in threads)


def thread_values(c):
    return [t for t in flatten(c)[1]]


# ---------------------------------------------------------------- canonical keys


def _render_ident(i, sc, namer):
    if isinstance(i, ChanEnd):
        return namer(i.name) + i.pol.value
    return sc.get(i) or namer(i)


def render_type(t, sc, namer):
    if t is None:
        return "_"
    if isinstance(t, Chan):
        return "Chan " + _render_ident(t.ident, sc, namer)
    if isinstance(t, APType):
        return "[" + render_type(t.session, sc, namer) + "]"
    if isinstance(t, UnitT):
        return "Unit"
    if isinstance(t, IntT):
        return "Int"
    if isinstance(t, End):
        return "End"
    if isinstance(t, PairT):
        return f"({render_type(t.left, sc, namer)} * {render_type(t.right, sc, namer)})"
    if isinstance(t, In):
        return f"?({render_type(t.payload, sc, namer)}).{render_type(t.cont, sc, namer)}"
    if isinstance(t, Out):
        return f"!({render_type(t.payload, sc, namer)}).{render_type(t.cont, sc, namer)}"
    if isinstance(t, FunT):
        return (f"({render_env(t.sig_in, sc, namer)}; {render_type(t.arg, sc, namer)} -> "
                f"{render_type(t.res, sc, namer)}; {render_env(t.sig_out, sc, namer)})")
    raise TypeError(repr(t))


def render_env(env, sc, namer):
    if env is None:
        return "_"
    items = sorted(env.items(), key=lambda kv: (_render_ident(kv[0], sc, blank), render_type(kv[1], sc, blank)))
    return "{" + ", ".join(f"{_render_ident(k, sc, namer)}: {render_type(v, sc, namer)}" for k, v in items) + "}"


def render_term(t, namer, sc=None, ctr=None):
    sc = {} if sc is None else sc
    ctr = [0] if ctr is None else ctr

    def bind(name, sc):
        ctr[0] += 1
        sc = dict(sc)
        sc[name] = f"b{ctr[0]}"
        return sc

    def go(t, sc):
        if isinstance(t, Var):
            return sc.get(t.name) or namer(t.name)
        if isinstance(t, ChanLit):
            return namer(t.end.name) + t.end.pol.value
        if isinstance(t, UnitV):
            return "()"
        if isinstance(t, IntV):
            return str(t.n)
        if isinstance(t, Hole):
            return "[]"
        if isinstance(t, PairV):
            return f"({go(t.left, sc)}, {go(t.right, sc)})"
        if isinstance(t, Lam):
            head = f"{render_env(t.sig, sc, namer)}; {render_type(t.ptype, sc, namer)}"
            sc2 = bind(t.param, sc)
            return f"(lam {sc2[t.param]} [{head}]. {go(t.body, sc2)})"
        if isinstance(t, Rec):
            ty = render_type(t.type, sc, namer)
            sc2 = bind(t.name, sc)
            return f"(rec {sc2[t.name]} [{ty}]. {go(t.body, sc2)})"
        if isinstance(t, Let):
            b = go(t.bound, sc)
            sc2 = bind(t.name, sc)
            return f"(let {sc2[t.name]} = {b} in {go(t.body, sc2)})"
        if isinstance(t, LetPair):
            v = go(t.value, sc)
            sc2 = bind(t.left, sc)
            sc2 = bind(t.right, sc2)
            return f"(let ({sc2[t.left]}, {sc2[t.right]}) = {v} in {go(t.body, sc2)})"
        if isinstance(t, New):
            return f"(new {render_type(t.session, sc, namer)})"
        name = type(t).__name__.lower()
        return "(" + name + " " + " ".join(go(getattr(t, f), sc) for f in t.__dataclass_fields__) + ")"

    return go(t, sc)


def _describe(b, namer):
    if isinstance(b, NuAP):
        return "[" + render_type(b.session, {}, namer) + "]"
    return ""


def config_key_of(c):
    binders, threads = flatten(c)
    binders = gc(binders, threads)
    return config_key([(b.name, b) for b in binders], threads,
                      lambda t, namer: render_term(t, namer), _describe)


def term_key(t):
    """α-invariant rendering of a term."""
    return render_term(t, str)


def run(c, policy=None, max_steps=1000, supply=None):
    from ..trace import FirstEnabled, run_with
    from .typing import _start
    supply = supply or FreshSupply(_start(c))
    return run_with(c, supply, policy or FirstEnabled(), max_steps, step_config,
                    config_key_of, all_values)


def close_program(prog):
    """The main configuration with definitions substituted in and every
    access point assumed by a `val` bound by a ν."""
    from .syntax import Program
    assert isinstance(prog, Program)
    if prog.main is None:
        return None
    binders, threads = flatten(prog.main)
    for name, v in reversed(prog.defs):
        threads = [subst(t, name, v) for t in threads]
    aps = [NuAP(n, t.session) for n, t in prog.vals if isinstance(t, APType)]
    return build(aps + binders, threads)
