"""Canonical keys for configurations, invariant under α-renaming and congruence.

A configuration is given as a list of ν-bound names plus a list of thread
terms.  Each calculus supplies a renderer `render(term, namer)` that prints a
thread with its own bound variables numbered positionally and every ν-bound
name printed through `namer`.  Threads are ordered by their rendering with
all ν-bound names blanked, then ν-bound names are numbered by first
occurrence in that order.
"""
import hashlib
import re


def blank(_name):
    return "?"


_ids = {}
_names = []
_TOKEN = re.compile("\x01(\\d+)\x02")


def _mark(name):
    i = _ids.get(name)
    if i is None:
        i = _ids[name] = len(_names)
        _names.append(name)
    return f"\x01{i}\x02"


def _marked(t, render):
    """Rendering of `t` with every name as a placeholder token, cached on
    the node since terms are immutable."""
    d = getattr(t, "__dict__", None)
    got = d.get("_marked") if d is not None else None
    if got is None:
        got = render(t, _mark)
        if d is not None:
            object.__setattr__(t, "_marked", got)
    return got


def config_key(binders, threads, render, describe):
    """binders: list of (Name, binder); describe(binder, namer) -> str."""
    bound = {n for n, _ in binders}

    def blanked(m):
        n = _names[int(m.group(1))]
        return "?" if n in bound else str(n)

    marked = [_marked(t, render) for t in threads]
    order = sorted(range(len(threads)), key=lambda i: _TOKEN.sub(blanked, marked[i]))
    assigned = {}

    def namer(name):
        if name not in bound:
            return str(name)
        if name not in assigned:
            assigned[name] = f"v{len(assigned)}"
        return assigned[name]

    rendered = [_TOKEN.sub(lambda m: namer(_names[int(m.group(1))]), marked[i]) for i in order]
    bs = []
    for n, b in binders:
        if n in assigned:
            bs.append((assigned[n], describe(b, namer)))
    bs.sort()
    return "nu[" + ",".join(f"{a}{d}" for a, d in bs) + "]" + " || ".join(sorted(rendered))


def digest(key):
    return hashlib.sha1(key.encode()).hexdigest()[:16]
