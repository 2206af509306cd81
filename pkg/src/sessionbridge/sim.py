"""Bounded checks that a translation simulates the source reduction.

A step C -l-> C' of the source is matched on the translated side by a
search over the image of C.  Along the matching path exactly one step
carries `l` (when `l` is not silent) and every other step is silent.
Forward matches are closed by a common reduct, since the image of C' may
still owe some administrative record shuffles.  The backward translations
are tight enough that the image of C' itself must be reached.
"""
from __future__ import annotations

import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field

from .canon import digest
from .names import Act, FreshSupply
from .lfst import semantics as LS
from .lfst import pretty as LP
from .vgr import semantics as VS
from .vgr import pretty as VP
from .vgr import syntax as VX
from .lfst import syntax as LX
from .vgr.typing import _start as _vgr_start
from .anf import _start as _lfst_start, to_anf, to_anf_config
from .backward import back_config, back_expr
from .forward import translate_closed


@dataclass(frozen=True)
class Side:
    step: object
    key: object
    all_values: object
    start: object
    show: object
    flatten: object
    build: object
    gc: object
    render: object
    names: object


VGR = Side(VS.step_config, VS.config_key_of, VS.all_values, _vgr_start, VP.show,
           VS.flatten, VS.build, VS.gc, lambda t: VS.render_term(t, str), VX.all_names)
LFST = Side(LS.step_config, LS.config_key_of, LS.all_values, _lfst_start, LP.show,
            LS.flatten, LS.build, LS.gc, lambda t: LS.render_term(t, str), LX.names_of)


def strip_common(side, a, b):
    """Drop threads present on both sides with the same free names, when
    those names are bound identically on both sides and used by no other
    thread.  Such threads are inert for matching a step, and leaving them
    in multiplies the search by all their interleavings."""
    ba, ta = side.flatten(a)
    bb, tb = side.flatten(b)
    bind_a = {x.name: x for x in ba}
    bind_b = {x.name: x for x in bb}
    ka = [side.render(t) for t in ta]
    kb = [side.render(t) for t in tb]
    na = [set(side.names(t)) & bind_a.keys() for t in ta]
    nb = [set(side.names(t)) & bind_b.keys() for t in tb]
    pool = Counter(kb)
    drop_a = set()
    for i, k in enumerate(ka):
        if pool[k] > 0 and all(bind_a[n] == bind_b.get(n) for n in na[i]):
            pool[k] -= 1
            drop_a.add(i)
    while True:
        keys = Counter(ka[i] for i in drop_a)
        drop_b = set()
        for j, k in enumerate(kb):
            if keys[k] > 0:
                keys[k] -= 1
                drop_b.add(j)
        kept = set()
        for i in range(len(ta)):
            if i not in drop_a:
                kept |= na[i]
        for j in range(len(tb)):
            if j not in drop_b:
                kept |= nb[j]
        clash = {i for i in drop_a if na[i] & kept}
        if not clash:
            break
        drop_a -= clash
    if not drop_a:
        return a, b
    keep_a = [t for i, t in enumerate(ta) if i not in drop_a]
    keep_b = [t for j, t in enumerate(tb) if j not in drop_b]
    return (side.build(side.gc(ba, keep_a), keep_a),
            side.build(side.gc(bb, keep_b), keep_b))


@dataclass
class Witness:
    key: str
    path_a: list
    path_b: list


def _silent(label):
    return label is Act.SILENT


def _leg(side, c, depth, label, targets=None):
    """Reachable keys from c within depth, each with its shortest label path.
    With label=None only silent steps are taken; otherwise at most one
    `label` step is allowed, and only paths that used it (or, for a silent
    label, took at least one step) are reported.  With `targets`, stop at
    the first reported key among them."""
    out = {}
    k0 = side.key(c)
    seen = {(k0, False)}
    queue = deque([(c, k0, FreshSupply(side.start(c)), False, ())])
    while queue:
        cfg, key, sup, used, path = queue.popleft()
        done = used or (label is not None and _silent(label) and path)
        if label is None or done:
            out.setdefault(key, list(path))
            if targets is not None and key in targets:
                return {key: list(path)}
        if len(path) >= depth:
            continue
        for lab, c2, s2 in side.step(cfg, sup):
            if _silent(lab):
                u2 = used
            elif label is not None and not _silent(label) and lab == label and not used:
                u2 = True
            else:
                continue
            k2 = side.key(c2)
            if (k2, u2) in seen:
                continue
            seen.add((k2, u2))
            queue.append((c2, k2, s2, u2, path + (str(lab),)))
    return {} if targets is not None else out


def _silent_terminal(side, c):
    return not any(_silent(l) for l, _, _ in side.step(c, FreshSupply(side.start(c))))


def common_reduct(a, b, label, depth=12, side=LFST):
    """A configuration reachable from `a` by a path carrying `label` once
    and from `b` by silent steps, or None.  The silent leg must be
    nonempty unless `b` has no silent step at all.  The path from `a` is a
    shortest one."""
    a, b = strip_common(side, a, b)
    allow_empty = _silent_terminal(side, b)
    # a shallow silent leg from b almost always suffices; widen only on a miss
    for d in sorted({min(4, depth), depth}):
        right = _leg(side, b, d, None)
        if not allow_empty:
            right = {k: p for k, p in right.items() if p}
        left = _leg(side, a, depth, label, targets=right)
        if left:
            (k, pa), = left.items()
            return Witness(k, pa, right[k])
    return None


def reaches(a, target, label, depth, side):
    """Path from `a` to exactly `target` carrying `label` once, or None."""
    a, target = strip_common(side, a, target)
    k = side.key(target)
    left = _leg(side, a, depth, label, targets={k})
    return Witness(k, left[k], []) if left else None


# ---------------------------------------------------------------- drivers


@dataclass
class Report:
    program: str
    proposition: str
    steps_checked: int = 0
    failures: list = field(default_factory=list)
    longest: int = 0
    by_label: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {"program": self.program, "proposition": self.proposition,
                "steps_checked": self.steps_checked, "failures": self.failures,
                "longest": self.longest, "by_label": dict(sorted(self.by_label.items()))}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _walk(side, c, seed, max_steps):
    """States visited along one run: first-enabled, or seeded choice."""
    rng = random.Random(seed) if seed is not None else None
    sup = FreshSupply(side.start(c))
    states = [c]
    for _ in range(max_steps):
        options = side.step(c, sup)
        if not options:
            break
        _, c, sup = options[rng.randrange(len(options)) if rng else 0]
        states.append(c)
    return states


def _check(report, src_side, dst_side, c, translate, match, seed, max_steps):
    for state in _walk(src_side, c, seed, max_steps):
        img = translate(state)
        for label, nxt, _ in src_side.step(state, FreshSupply(src_side.start(state))):
            report.steps_checked += 1
            img2 = translate(nxt)
            w = match(img, img2, label)
            if w is None:
                report.failures.append({
                    "label": str(label),
                    "source": src_side.show(state),
                    "trace_a": [dst_side.show(img)],
                    "trace_b": [dst_side.show(img2)],
                })
            else:
                n = len(w.path_a)
                report.longest = max(report.longest, n)
                report.by_label[str(label)] = max(report.by_label.get(str(label), 0), n)
    return report


def check_simulation(c, depth=12, seed=None, max_steps=40, program="<config>"):
    """Forward proposition for a closed well-typed imperative configuration."""
    report = Report(program, "fwd")
    return _check(report, VGR, LFST, c, translate_closed,
                  lambda a, b, l: common_reduct(a, b, l, depth, LFST), seed, max_steps)


_BACK = {
    "anf": (LFST, to_anf_config),
    "back": (VGR, back_config),
    "full": (VGR, lambda c: back_config(to_anf_config(c))),
}


def check_backwards(c, proposition="full", depth=12, seed=None, max_steps=40, program="<config>"):
    """ANF, back and full backward propositions for a functional configuration."""
    dst, translate = _BACK[proposition]
    report = Report(program, proposition)
    return _check(report, LFST, dst, c, translate,
                  lambda a, b, l: reaches(a, b, l, depth, dst), seed, max_steps)


def expr_step_matches(e, proposition="back", bound=1):
    """Every silent reduction of `e` is matched by the translated side.
    For `back`, exactly one imperative step reaches the image of the reduct;
    for `anf`, up to `bound` functional steps; for `full`, up to `bound`
    imperative steps."""
    for label, e2, _ in LS.step_expr(e, FreshSupply(_lfst_start(e))):
        if str(label) != "Silent":
            continue
        if proposition == "anf":
            a, b, step, key = to_anf(e), to_anf(e2), LS.step_expr, LS.term_key
        elif proposition == "back":
            a, b, step, key = back_expr(e), back_expr(e2), VS.step_expr, VS.term_key
        else:
            a, b = back_expr(to_anf(e)), back_expr(to_anf(e2))
            step, key = VS.step_expr, VS.term_key
        if not _expr_reach(a, key(b), step, key, bound, exact=proposition == "back"):
            return False
    return True


def _expr_reach(a, target, step, key, bound, exact):
    frontier = [a]
    for n in range(1, bound + 1):
        nxt = []
        for t in frontier:
            for _, t2, _ in step(t):
                if key(t2) == target:
                    return True
                nxt.append(t2)
        if exact:
            return False
        frontier = nxt
    return False


def digest_config(c, side=LFST):
    return digest(side.key(c))
