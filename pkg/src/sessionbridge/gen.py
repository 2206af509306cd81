"""Seeded random program generators for the property suites.

Every generator takes a `random.Random` and a size bound and builds terms
directly, well-typed by construction: a thread is a session skeleton (a
list of sends and receives of integers on one channel) padded with pure
noise such as β-redexes, pairs and arithmetic.  Sessions connect at most
three threads in an order that cannot deadlock.

`depth` bounds the length of each session and how deeply noise nests.
"""
from __future__ import annotations

import random

from .env import Env
from .names import Supply
from .lfst import syntax as L
from .vgr import syntax as V
from . import lfst_eff as F

# ---------------------------------------------------------------- sessions


def ops_of(rng, depth):
    n = rng.randint(1, max(1, min(3, depth // 2)))
    return [rng.choice("!?") for _ in range(n)]


def dual_ops(ops):
    return ["?" if o == "!" else "!" for o in ops]


def vgr_session(ops):
    s = V.END
    for o in reversed(ops):
        s = (V.Out if o == "!" else V.In)(V.INT_T, s)
    return s


def lfst_session(ops):
    s = L.END
    for o in reversed(ops):
        s = (L.Out if o == "!" else L.In)(L.INT_T, s)
    return s


# ---------------------------------------------------------------- imperative programs


class _Vgr:
    def __init__(self, rng, depth):
        self.rng = rng
        self.depth = depth
        self.supply = Supply(0)

    def name(self, hint):
        return self.supply(hint)

    def int_value(self, ints):
        if ints and self.rng.random() < 0.5:
            return V.Var(self.rng.choice(ints))
        return V.IntV(self.rng.randint(0, 9))

    def noise_int(self, ints, stmts, depth):
        """Push statements computing an Int; return a value holding it."""
        r = self.rng.random()
        if depth <= 0 or r < 0.3:
            return self.int_value(ints)
        a = self.name("a")
        if r < 0.5:
            x = self.noise_int(ints, stmts, depth - 1)
            stmts.append(("let", a, V.Add(x, self.int_value(ints))))
        elif r < 0.7:
            f, z = self.name("f"), self.name("z")
            lam = V.Lam(Env(), z, V.INT_T, V.Add(V.Var(z), V.IntV(1)))
            stmts.append(("let", f, lam))
            x = self.noise_int(ints, stmts, depth - 1)
            stmts.append(("let", a, V.App(V.Var(f), x)))
        elif r < 0.85:
            p, x, y = self.name("p"), self.name("x"), self.name("y")
            stmts.append(("let", p, V.PairV(self.int_value(ints), self.int_value(ints))))
            stmts.append(("pair", x, y, V.Var(p)))
            stmts.append(("let", a, V.Add(V.Var(x), V.Var(y))))
        else:
            g, f, z = self.name("g"), self.name("f"), self.name("z")
            ft = V.FunT(Env(), V.INT_T, V.INT_T, Env())
            rec = V.Rec(f, ft, V.Lam(Env(), z, V.INT_T, V.Add(V.Var(z), V.IntV(2))))
            stmts.append(("let", g, rec))
            stmts.append(("let", a, V.App(V.Var(g), self.int_value(ints))))
        return V.Var(a)

    def ops_stmts(self, chan, ops, ints, depth):
        stmts = []
        ints = list(ints)
        for o in ops:
            if o == "!":
                v = self.noise_int(ints, stmts, depth)
                stmts.append(("let", V.WILD, V.Send(v, V.Var(chan))))
            else:
                r = self.name("r")
                stmts.append(("let", r, V.Receive(V.Var(chan))))
                ints.append(r)
        return stmts, ints

    def side(self, chan, ops, ints, single):
        """Statements for one endpoint's protocol, possibly moving a chunk
        into a function call (only when `chan` is the only open channel)."""
        if single and len(ops) >= 1 and self.rng.random() < 0.4:
            i = self.rng.randrange(len(ops))
            j = self.rng.randint(i + 1, len(ops))
            pre, pre_ints = self.ops_stmts(chan, ops[:i], ints, self.depth - 2)
            body, _ = self.ops_stmts(chan, ops[i:j], pre_ints, self.depth - 3)
            f = self.name("h")
            sig = Env(((chan, vgr_session(ops[i:])),))
            lam = V.Lam(sig, chan, V.Chan(chan), fold(body, V.UNIT))
            post, post_ints = self.ops_stmts(chan, ops[j:], pre_ints, self.depth - 2)
            return pre + [("let", f, lam), ("let", V.WILD, V.App(V.Var(f), V.Var(chan)))] + post, post_ints
        return self.ops_stmts(chan, ops, ints, self.depth - 2)

    def result(self, ints):
        if ints and self.rng.random() < 0.6:
            return V.Var(self.rng.choice(ints))
        return V.UNIT

    def endpoint_thread(self, ap, accept, ops):
        c = self.name("c")
        open_ = (V.Accept if accept else V.Request)(V.Var(ap))
        stmts = [("let", c, open_)]
        maybe_pure_fork(self, stmts)
        if self.rng.random() < 0.25:
            # hand the rest of the protocol to a child thread
            body, ints = self.side(c, ops, [], True)
            child = fold(body + [("let", V.WILD, V.Close(V.Var(c)))], self.result(ints))
            stmts.append(("fork", child))
            return fold(stmts, V.UNIT)
        body, ints = self.side(c, ops, [], True)
        stmts += body + [("let", V.WILD, V.Close(V.Var(c)))]
        return fold(stmts, self.result(ints))

    def relay_thread(self, ap1, ops1, ap2, ops2, overlap):
        c1, c2 = self.name("c"), self.name("d")
        stmts = [("let", c1, V.Request(V.Var(ap1)))]
        if overlap:
            stmts.append(("let", c2, V.Accept(V.Var(ap2))))
            s1, ints = self.side(c1, ops1, [], False)
            s2, ints = self.side(c2, ops2, ints, False)
            stmts += s1 + s2 + [("let", V.WILD, V.Close(V.Var(c1))), ("let", V.WILD, V.Close(V.Var(c2)))]
        else:
            s1, ints = self.side(c1, ops1, [], True)
            stmts += s1 + [("let", V.WILD, V.Close(V.Var(c1))), ("let", c2, V.Accept(V.Var(ap2)))]
            s2, ints = self.side(c2, ops2, ints, True)
            stmts += s2 + [("let", V.WILD, V.Close(V.Var(c2)))]
        return fold(stmts, self.result(ints))

    def pure_thread(self):
        stmts = []
        v = self.noise_int([], stmts, self.depth - 1)
        return fold(stmts, v)

    def new_thread(self):
        """Creates its own access point and talks to a forked child."""
        ops = ops_of(self.rng, self.depth)
        m = self.name("m")
        child = self.endpoint_thread(m, True, ops)
        parent = self.endpoint_thread(m, False, dual_ops(ops))
        return V.Let(m, V.New(vgr_session(ops)), V.Fork(child, parent))

    def config(self):
        rng = self.rng
        layout = rng.choice(["one", "one", "two", "new"])
        threads, aps = [], []
        if layout in ("one", "two"):
            n1 = self.name("n")
            ops1 = ops_of(rng, self.depth)
            aps.append((n1, vgr_session(ops1)))
            threads.append(self.endpoint_thread(n1, True, ops1))
            if layout == "one":
                threads.append(self.endpoint_thread(n1, False, dual_ops(ops1)))
                if rng.random() < 0.3:
                    threads.append(self.pure_thread())
            else:
                n2 = self.name("n")
                ops2 = ops_of(rng, self.depth)
                aps.append((n2, vgr_session(ops2)))
                threads.append(self.relay_thread(n1, dual_ops(ops1), n2, ops2, rng.random() < 0.5))
                threads.append(self.endpoint_thread(n2, False, dual_ops(ops2)))
        else:
            threads.append(self.new_thread())
            if rng.random() < 0.5:
                threads.append(self.pure_thread())
        rng.shuffle(threads)
        body = V.Thread(threads[-1])
        for t in reversed(threads[:-1]):
            body = V.Par(V.Thread(t), body)
        for n, s in reversed(aps):
            body = V.Nu(V.NuAP(n, s), body)
        return body


def maybe_pure_fork(g, stmts):
    if g.rng.random() < 0.2:
        inner = []
        v = g.noise_int([], inner, 1)
        stmts.append(("fork", fold(inner, v)))


def fold(stmts, result):
    t = result
    for st in reversed(stmts):
        if st[0] == "let":
            t = V.Let(st[1], st[2], t)
        elif st[0] == "pair":
            t = V.LetPair(st[1], st[2], st[3], t)
        else:
            t = V.Fork(st[1], t)
    return t


def vgr_config(rng, depth=6):
    """A closed, well-typed imperative configuration with at most three
    threads and three channels."""
    return _Vgr(rng, depth).config()


def vgr_corpus(seed, n, depth=6):
    rng = random.Random(seed)
    return [vgr_config(rng, depth) for _ in range(n)]


# ---------------------------------------------------------------- functional programs


class _Lfst:
    """Functional threads in direct style, with operands that are often
    non-values so that A-normalisation has work to do."""

    def __init__(self, rng, depth, annotate=False):
        self.rng = rng
        self.depth = depth
        self.supply = Supply(0)
        self.annotate = annotate

    def name(self, hint):
        return self.supply(hint)

    def int_expr(self, ints, depth):
        rng = self.rng
        r = rng.random()
        if depth <= 0 or r < 0.3:
            if ints and rng.random() < 0.5:
                return L.Var(rng.choice(ints))
            return L.IntV(rng.randint(0, 9))
        if r < 0.55:
            return L.Add(self.int_expr(ints, depth - 1), self.int_expr(ints, depth - 1))
        if r < 0.75:
            z = self.name("z")
            lam = L.Lam(z, L.INT_T, L.Add(L.Var(z), L.IntV(1)))
            return L.App(lam, self.int_expr(ints, depth - 1))
        if r < 0.9:
            x, y = self.name("x"), self.name("y")
            pair = L.Pair(self.int_expr(ints, depth - 1), self.int_expr(ints, depth - 1))
            return L.LetPair(x, y, pair, L.Add(L.Var(x), L.Var(y)))
        x = self.name("x")
        return L.Let(x, self.int_expr(ints, depth - 1), L.Add(L.Var(x), L.IntV(3)))

    def chan_step(self, o, c, ints):
        """One protocol step on channel variable c; returns (binder
        statements, new channel name, new ints)."""
        c2 = self.name("c")
        if o == "!":
            v = self.int_expr(ints, self.depth - 2)
            chan = L.Var(c)
            if self.rng.random() < 0.3:
                d = self.name("d")
                chan = L.Let(d, L.Var(c), L.Var(d))
            return [("let", c2, L.Send(v, chan))], c2, ints
        r = self.name("r")
        chan = L.Var(c)
        if self.rng.random() < 0.3:
            d = self.name("d")
            chan = L.Let(d, L.Var(c), L.Var(d))
        return [("pair", r, c2, L.Receive(chan))], c2, ints + [r]

    def side(self, c, ops, ints, session):
        stmts = []
        if self.rng.random() < 0.3 and ops:
            # move a prefix into a function taking and returning the channel
            k = self.rng.randint(1, len(ops))
            p = self.name("k")
            inner, cur, inner_ints = [], p, list(ints)
            for o in ops[:k]:
                st, cur, inner_ints = self.chan_step(o, cur, inner_ints)
                inner += st
            ptype = session if not self.annotate else F.Tagged(self.tag, session)
            f = self.name("f")
            lam = L.Lam(p, ptype, lfold(inner, L.Var(cur)))
            c2 = self.name("c")
            stmts += [("let", f, lam), ("let", c2, L.App(L.Var(f), L.Var(c)))]
            c, ops = c2, ops[k:]
        for o in ops:
            st, c, ints = self.chan_step(o, c, ints)
            stmts += st
        return stmts, c, ints

    def endpoint(self, ap, accept, ops):
        c = self.name("c")
        self.tag = c
        s = lfst_session(ops)
        stmts = [("let", c, (L.Accept if accept else L.Request)(L.Var(ap)))]
        if self.rng.random() < 0.2:
            stmts.append(("let", L.WILD, L.Fork(self.int_expr([], 1))))
        body, c_last, ints = self.side(c, ops, [], s)
        stmts += body
        res = L.Var(self.rng.choice(ints)) if ints and self.rng.random() < 0.6 else L.UNIT
        # the channel is at End and unrestricted; drop it
        return lfold(stmts, res)

    def config(self):
        rng = self.rng
        ops = ops_of(rng, self.depth)
        n = self.name("p")
        threads = [self.endpoint(n, True, ops), self.endpoint(n, False, dual_ops(ops))]
        binders = [L.NuAP(n, lfst_session(ops))]
        if rng.random() < 0.4:
            ops2 = ops_of(rng, self.depth)
            m = self.name("p")
            binders.append(L.NuAP(m, lfst_session(ops2)))
            threads += [self.endpoint(m, True, ops2), self.endpoint(m, False, dual_ops(ops2))]
        elif rng.random() < 0.4:
            threads.append(self.int_expr([], self.depth - 1))
        rng.shuffle(threads)
        body = L.Thread(threads[-1])
        for t in reversed(threads[:-1]):
            body = L.Par(L.Thread(t), body)
        for b in reversed(binders):
            body = L.Nu(b, body)
        return body


def lfold(stmts, result):
    t = result
    for st in reversed(stmts):
        if st[0] == "let":
            t = L.Let(st[1], st[2], t)
        else:
            t = L.LetPair(st[1], st[2], st[3], t)
    return t


def lfst_config(rng, depth=6):
    """A closed, record-free, well-typed functional configuration."""
    return _Lfst(rng, depth).config()


def lfst_corpus(seed, n, depth=6):
    rng = random.Random(seed)
    return [lfst_config(rng, depth) for _ in range(n)]


# ---------------------------------------------------------------- effect-annotated expressions


def eff_case(rng, depth=6):
    """(Γ, e): an annotated functional expression under an environment with
    an access point and, sometimes, an already open channel."""
    g = _Lfst(rng, depth, annotate=True)
    ops = ops_of(rng, depth)
    p = g.name("p")
    s = lfst_session(ops)
    gamma = [(p, L.APType(s))]
    if rng.random() < 0.5:
        # open channel handed in by the context
        ops2 = ops_of(rng, depth)
        c = g.name("c")
        g.tag = c
        s2 = lfst_session(ops2)
        gamma.append((c, F.Tagged(c, s2)))
        stmts, c_last, ints = g.side(c, ops2, [], s2)
        tail = L.Var(c_last)
        if rng.random() < 0.5:
            # also talk on a fresh channel, then return both results
            tail = L.Pair(_eff_endpoint(g, rng, p, ops), L.Var(c_last))
        e = lfold(stmts, tail)
    else:
        e = _eff_endpoint(g, rng, p, ops)
    return Env(tuple(gamma)), e


def _eff_endpoint(g, rng, p, ops):
    # the requesting end follows the dual protocol
    accept = rng.random() < 0.5
    return g.endpoint(p, accept, ops if accept else dual_ops(ops))


def eff_corpus(seed, n, depth=6):
    rng = random.Random(seed)
    return [eff_case(rng, depth) for _ in range(n)]


# ---------------------------------------------------------------- substitution triples


def lfst_value(rng, depth, supply, free=()):
    r = rng.random()
    if depth <= 0 or r < 0.3:
        if free and rng.random() < 0.3:
            return L.Var(rng.choice(free))
        return rng.choice([L.UNIT, L.IntV(rng.randint(0, 9))])
    if r < 0.7:
        z = supply("z")
        return L.Lam(z, L.INT_T, lfst_expr(rng, depth - 1, supply, tuple(free) + (z,)))
    return L.Pair(lfst_value(rng, depth - 1, supply, free), lfst_value(rng, depth - 1, supply, free))


def lfst_expr(rng, depth, supply, free=()):
    """An untyped record-free expression over the variables in `free`."""
    r = rng.random()
    if depth <= 0 or r < 0.2:
        return lfst_value(rng, 0, supply, free)
    sub = lambda: lfst_expr(rng, depth - 1, supply, free)  # noqa: E731
    if r < 0.3:
        return lfst_value(rng, depth, supply, free)
    if r < 0.4:
        return L.App(sub(), sub())
    if r < 0.5:
        return L.Pair(sub(), sub())
    if r < 0.6:
        x = supply("x")
        return L.Let(x, sub(), lfst_expr(rng, depth - 1, supply, tuple(free) + (x,)))
    if r < 0.7:
        x, y = supply("x"), supply("y")
        return L.LetPair(x, y, sub(), lfst_expr(rng, depth - 1, supply, tuple(free) + (x, y)))
    if r < 0.78:
        return L.Send(sub(), sub())
    if r < 0.85:
        return L.Receive(sub())
    if r < 0.9:
        return L.Add(sub(), sub())
    if r < 0.95:
        return L.Fork(sub())
    return rng.choice([L.Accept, L.Request])(sub())


def subst_triple(rng, depth=4):
    """(e, v, x) with x free in e."""
    supply = Supply(0)
    x = supply("x")
    e = lfst_expr(rng, depth, supply, (x,))
    v = lfst_value(rng, depth - 1, supply)
    return e, v, x


def subst_corpus(seed, n, depth=4):
    rng = random.Random(seed)
    return [subst_triple(rng, depth) for _ in range(n)]


__all__ = [
    "vgr_config", "vgr_corpus", "lfst_config", "lfst_corpus", "eff_case", "eff_corpus",
    "subst_triple", "subst_corpus", "lfst_expr", "lfst_value",
]
