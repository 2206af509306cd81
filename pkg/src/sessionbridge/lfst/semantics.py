"""Synchronous labeled semantics of the functional calculus.

Configurations are flattened to ν-binders plus threads.  `send v γ` steps to
γ and the partner `receive δ` to (v, δ).  Records are compared up to field
permutation by the canonical renderer, which also identifies record labels
that only differ by a consistent per-thread renaming (labels are local to the
thread whose state record carries them).
"""
from __future__ import annotations

from ..canon import blank, config_key
from ..names import (
    AcceptOn, Act, ChanEnd, Emit, FreshSupply, Kind, Polarity, Receive as RecvLabel,
    RequestOn, Silent, fresh,
)
from .syntax import (
    APType, Accept, Add, App, ChanLit, Concat, End, Fix, Fork, FunL, FunU, HOLE, Hole, In,
    IntT, IntV, Lam, Let, LetPair, LinPair, New, Nu, NuAP, NuChan, Out, Pair, Par, Receive,
    Record, RecordLit, Request, Send, Split, SplitMany, Thread, UNIT, UnitT, UnitV, Var,
    all_names, children, dual, is_value, names_of, rebuild, subst,
)

# evaluation positions per node type, in order
_EVAL = {
    App: (0, 1), Pair: (0, 1), LetPair: (0,), Let: (0,), Send: (0, 1), Receive: (0,),
    Accept: (0,), Request: (0,), Fix: (0,), Add: (0, 1), Concat: (0, 1), Split: (0,),
    SplitMany: (0,),
}


def decompose(e):
    """-> (frames, redex); a frame is (node, child index)."""
    frames = []
    while True:
        if isinstance(e, RecordLit):
            positions = range(len(e.fields))
        else:
            positions = _EVAL.get(type(e), ())
        kids = children(e)
        for i in positions:
            if not is_value(kids[i]):
                frames.append((e, i))
                e = kids[i]
                break
        else:
            return frames, e


def plug(frames, e):
    for node, i in reversed(frames):
        kids = list(children(node))
        kids[i] = e
        e = rebuild(node, kids)
    return e


def _local(r):
    if isinstance(r, App):
        f = r.fn
        if isinstance(f, Lam) and is_value(r.arg):
            return subst(f.body, f.param, r.arg)
        if isinstance(f, Fix) and is_value(r.arg):
            return App(App(f.fn, f), r.arg)
    if isinstance(r, LetPair) and isinstance(r.bound, Pair) and is_value(r.bound):
        body = subst(r.body, r.left, r.bound.left)
        return subst(body, r.right, r.bound.right)
    if isinstance(r, Let) and is_value(r.bound):
        return subst(r.body, r.name, r.bound)
    if isinstance(r, Add) and isinstance(r.left, IntV) and isinstance(r.right, IntV):
        return IntV(r.left.n + r.right.n)
    if isinstance(r, Split) and isinstance(r.rec, RecordLit):
        fields = dict(r.rec.fields)
        if r.label in fields:
            rest = tuple((l, v) for l, v in r.rec.fields if l != r.label)
            return Pair(fields[r.label], RecordLit(rest))
    if isinstance(r, SplitMany) and isinstance(r.rec, RecordLit):
        labels = set(r.labels)
        if labels <= {l for l, _ in r.rec.fields}:
            sel = tuple((l, v) for l, v in r.rec.fields if l in labels)
            rest = tuple((l, v) for l, v in r.rec.fields if l not in labels)
            return Pair(RecordLit(sel), RecordLit(rest))
    if isinstance(r, Concat) and isinstance(r.left, RecordLit) and isinstance(r.right, RecordLit):
        a = {l for l, _ in r.left.fields}
        if not a & {l for l, _ in r.right.fields}:
            return RecordLit(r.left.fields + r.right.fields)
    return None


def step_expr(e, supply=FreshSupply()):
    frames, r = decompose(e)
    if is_value(r):
        return []
    reduct = _local(r)
    if reduct is not None:
        return [(Silent(), plug(frames, reduct), supply)]
    if isinstance(r, (Accept, Request)) and isinstance(r.ap, Var):
        g, supply = fresh(supply, Kind.CHANNEL, "g")
        if isinstance(r, Request):
            return [(RequestOn(g), plug(frames, ChanLit(ChanEnd(g, Polarity.PLUS))), supply)]
        return [(AcceptOn(g), plug(frames, ChanLit(ChanEnd(g, Polarity.MINUS))), supply)]
    if isinstance(r, Send) and isinstance(r.chan, ChanLit):
        return [(Emit(r.chan.end, r.value), plug(frames, r.chan), supply)]
    if isinstance(r, Receive) and isinstance(r.chan, ChanLit):
        return [(RecvLabel(r.chan.end), plug(frames, Pair(HOLE, r.chan)), supply)]
    return []


# ---------------------------------------------------------------- configurations


def flatten(c):
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
        b, body = c.binder, c.body
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

    def lab(l):
        return ChanEnd(nm(l.name), l.pol) if isinstance(l, ChanEnd) else nm(l)

    def term(e):
        if isinstance(e, Var):
            return Var(nm(e.name))
        if isinstance(e, ChanLit):
            return ChanLit(lab(e.end))
        if isinstance(e, RecordLit):
            return RecordLit(tuple((lab(l), term(v)) for l, v in e.fields))
        if isinstance(e, Split):
            return Split(term(e.rec), lab(e.label))
        if isinstance(e, SplitMany):
            return SplitMany(term(e.rec), tuple(lab(l) for l in e.labels))
        if isinstance(e, Lam):
            return Lam(nm(e.param), e.ptype, term(e.body))
        if isinstance(e, Let):
            return Let(nm(e.name), term(e.bound), term(e.body))
        if isinstance(e, LetPair):
            return LetPair(nm(e.left), nm(e.right), term(e.bound), term(e.body))
        kids = children(e)
        return rebuild(e, [term(k) for k in kids]) if kids else e

    def cfg(c):
        if isinstance(c, Thread):
            return Thread(term(c.term))
        if isinstance(c, Par):
            return Par(cfg(c.left), cfg(c.right))
        b = c.binder
        b = NuAP(nm(b.name), b.session) if isinstance(b, NuAP) else NuChan(nm(b.name), b.plus, b.minus)
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
        used |= names_of(t)
    return [b for b in binders if b.name in used]


def canonical(c):
    binders, threads = flatten(c)
    return build(gc(binders, threads), threads)


def _adv(s):
    if s is None:
        return None
    return s.cont if isinstance(s, (In, Out)) else s


def step_config(c, supply=FreshSupply(), access=None):
    binders, threads = flatten(c)
    binders = gc(binders, threads)
    access = dict(access or {})
    for b in binders:
        if isinstance(b, NuAP):
            access[b.name] = b.session
    decs = [decompose(t) for t in threads]
    results = []

    def emit(label, bs, ts, s):
        results.append((label, build(gc(bs, ts), ts), s))

    for i, (frames, r) in enumerate(decs):
        if is_value(r):
            continue
        reduct = _local(r)
        if reduct is not None:
            ts = list(threads)
            ts[i] = plug(frames, reduct)
            emit(Act.SILENT, binders, ts, supply)
        elif isinstance(r, Fork):
            ts = list(threads)
            ts[i] = plug(frames, UNIT)
            ts.insert(i + 1, r.body)
            emit(Act.FORK, binders, ts, supply)
        elif isinstance(r, New):
            p, s2 = fresh(supply, Kind.ACCESS, "p")
            ts = list(threads)
            ts[i] = plug(frames, Var(p))
            emit(Act.NEW, binders + [NuAP(p, r.session)], ts, s2)
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
                    ts[i] = plug(frames, r.chan)
                    ts[j] = plug(frames2, Pair(r.value, r2.chan))
                    bs = [NuChan(b.name, _adv(b.plus), _adv(b.minus))
                          if isinstance(b, NuChan) and b.name == end.name else b for b in binders]
                    emit(Act.SEND, bs, ts, supply)
    return results


def all_values(c):
    return all(is_value(t) for t in flatten(c)[1])


# ---------------------------------------------------------------- canonical keys


def label_map(e):
    """Record labels that a thread's state record ties to a channel endpoint."""
    found, clash = {}, set()

    def go(e):
        if isinstance(e, RecordLit):
            for l, v in e.fields:
                if not isinstance(l, ChanEnd) and isinstance(v, ChanLit):
                    if l in found and found[l] != v.end:
                        clash.add(l)
                    found[l] = v.end
        for k in children(e):
            go(k)

    go(e)
    targets = [v for k, v in found.items() if k not in clash]
    return {k: v for k, v in found.items() if k not in clash and targets.count(v) == 1}


def _label(l, lm, sc, namer):
    l = lm.get(l, l)
    if isinstance(l, ChanEnd):
        return namer(l.name) + l.pol.value
    return sc.get(l) or namer(l)


def render_type(t, lm, namer):
    if t is None:
        return "_"
    if isinstance(t, UnitT):
        return "Unit"
    if isinstance(t, IntT):
        return "Int"
    if isinstance(t, End):
        return "End"
    if isinstance(t, APType):
        return "[" + render_type(t.session, lm, namer) + "]"
    if isinstance(t, In):
        return f"?({render_type(t.payload, lm, namer)}).{render_type(t.cont, lm, namer)}"
    if isinstance(t, Out):
        return f"!({render_type(t.payload, lm, namer)}).{render_type(t.cont, lm, namer)}"
    if isinstance(t, FunU):
        return f"({render_type(t.arg, lm, namer)} -> {render_type(t.res, lm, namer)})"
    if isinstance(t, FunL):
        return f"({render_type(t.arg, lm, namer)} -o {render_type(t.res, lm, namer)})"
    if isinstance(t, LinPair):
        return f"({render_type(t.left, lm, namer)} * {render_type(t.right, lm, namer)})"
    if isinstance(t, Record):
        items = sorted(t.row.items(), key=lambda kv: (_label(kv[0], lm, {}, blank), render_type(kv[1], lm, blank)))
        return "{" + ", ".join(f"{_label(k, lm, {}, namer)}: {render_type(v, lm, namer)}" for k, v in items) + "}"
    raise TypeError(repr(t))


def render_term(e, namer, normalize_labels=True):
    lm = label_map(e) if normalize_labels else {}
    ctr = [0]

    def bind(sc, *names):
        sc = dict(sc)
        for n in names:
            ctr[0] += 1
            sc[n] = f"b{ctr[0]}"
        return sc

    def go(e, sc):
        if isinstance(e, Var):
            return sc.get(e.name) or namer(e.name)
        if isinstance(e, ChanLit):
            return namer(e.end.name) + e.end.pol.value
        if isinstance(e, UnitV):
            return "()"
        if isinstance(e, IntV):
            return str(e.n)
        if isinstance(e, Hole):
            return "[]"
        if isinstance(e, Lam):
            ty = render_type(e.ptype, lm, namer)
            sc2 = bind(sc, e.param)
            return f"(lam {sc2[e.param]}:{ty}. {go(e.body, sc2)})"
        if isinstance(e, Let):
            b = go(e.bound, sc)
            sc2 = bind(sc, e.name)
            return f"(let {sc2[e.name]} = {b} in {go(e.body, sc2)})"
        if isinstance(e, LetPair):
            b = go(e.bound, sc)
            sc2 = bind(sc, e.left, e.right)
            return f"(let ({sc2[e.left]}, {sc2[e.right]}) = {b} in {go(e.body, sc2)})"
        if isinstance(e, RecordLit):
            items = sorted(e.fields, key=lambda f: (_label(f[0], lm, {}, blank), _blank_render(f[1], sc)))
            return "{" + ", ".join(f"{_label(l, lm, {}, namer)} = {go(v, sc)}" for l, v in items) + "}"
        if isinstance(e, Split):
            return f"({go(e.rec, sc)} / {_label(e.label, lm, {}, namer)})"
        if isinstance(e, SplitMany):
            labs = [_label(l, lm, {}, namer) for l in sorted(e.labels, key=lambda l: _label(l, lm, {}, blank))]
            return f"({go(e.rec, sc)} / {{{', '.join(labs)}}})"
        if isinstance(e, New):
            return f"(new {render_type(e.session, lm, namer)})"
        name = type(e).__name__.lower()
        return "(" + name + " " + " ".join(go(k, sc) for k in children(e)) + ")"

    def _blank_render(v, sc):
        saved = ctr[0]
        nonlocal namer
        real = namer
        namer = blank
        try:
            return go(v, sc)
        finally:
            namer = real
            ctr[0] = saved

    return go(e, {})


def _describe(b, namer):
    if isinstance(b, NuAP):
        return "[" + render_type(b.session, {}, namer) + "]"
    return ""


def config_key_of(c):
    binders, threads = flatten(c)
    binders = gc(binders, threads)
    return config_key([(b.name, b) for b in binders], threads,
                      lambda t, namer: render_term(t, namer), _describe)


def term_key(e):
    """α-invariant rendering of a closed or open term."""
    return render_term(e, str, normalize_labels=False)


def run(c, policy=None, max_steps=1000, supply=None):
    from ..trace import FirstEnabled, run_with
    supply = supply or FreshSupply(max((n.uid for n in all_names(c)), default=0))
    return run_with(c, supply, policy or FirstEnabled(), max_steps, step_config,
                    config_key_of, all_values)


def close_program(prog):
    """The main configuration with definitions substituted in and every
    access point assumed by a `val` bound by a ν."""
    if prog.main is None:
        return None
    binders, threads = flatten(prog.main)
    for name, v in reversed(prog.defs):
        threads = [subst(t, name, v) for t in threads]
    aps = [NuAP(n, t.session) for n, t in prog.vals if isinstance(t, APType)]
    return build(aps + binders, threads)
