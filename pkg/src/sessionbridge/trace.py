"""Scheduler policies, traces and the generic run loop shared by both interpreters."""
from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field

from .canon import digest


@dataclass(frozen=True)
class FirstEnabled:
    pass


@dataclass(frozen=True)
class Seeded:
    seed: int


@dataclass(frozen=True)
class ExhaustiveBFS:
    depth: int


@dataclass
class Trace:
    steps: list = field(default_factory=list)  # (label, hash)
    terminal: str = "budget"  # value | stuck | budget
    final: object = None

    def labels(self):
        return [l for l, _ in self.steps]

    def to_json(self):
        return json.dumps({"steps": [{"label": l, "hash": h} for l, h in self.steps],
                           "terminal": self.terminal}, sort_keys=True)


def run_with(config, supply, policy, max_steps, step, key, all_values):
    """Drive `step(config, supply) -> [(label, config, supply)]` under a policy."""
    if isinstance(policy, ExhaustiveBFS):
        return _run_bfs(config, supply, min(policy.depth, max_steps), step, key, all_values)
    rng = random.Random(policy.seed) if isinstance(policy, Seeded) else None
    trace = Trace(final=config)
    for _ in range(max_steps):
        options = step(config, supply)
        if not options:
            trace.terminal = "value" if all_values(config) else "stuck"
            trace.final = config
            return trace
        i = rng.randrange(len(options)) if rng else 0
        label, config, supply = options[i]
        trace.steps.append((str(label), digest(key(config))))
    trace.final = config
    if not step(config, supply):
        trace.terminal = "value" if all_values(config) else "stuck"
    return trace


def _run_bfs(config, supply, depth, step, key, all_values):
    start = (config, supply, ())
    seen = {key(config)}
    queue = deque([start])
    fallback = None
    while queue:
        c, s, path = queue.popleft()
        options = step(c, s)
        if not options:
            t = Trace(list(path), "value" if all_values(c) else "stuck", c)
            if t.terminal == "value":
                return t
            fallback = fallback or t
            continue
        if len(path) >= depth:
            fallback = fallback or Trace(list(path), "budget", c)
            continue
        for label, c2, s2 in options:
            k = key(c2)
            if k in seen:
                continue
            seen.add(k)
            queue.append((c2, s2, path + ((str(label), digest(k)),)))
    return fallback or Trace([], "budget", config)
