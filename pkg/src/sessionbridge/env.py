"""Immutable ordered finite maps with duplicate-free keys.

Used for channel environments, type environments and record rows.  Equality
ignores insertion order.
"""
from __future__ import annotations

from .errors import IllFormedSigma


class Env:
    __slots__ = ("_items", "_index", "_hash")

    def __init__(self, items=(), clash=IllFormedSigma):
        items = tuple(items.items()) if isinstance(items, (dict, Env)) else tuple(items)
        index = {}
        for k, v in items:
            if k in index:
                raise clash(f"duplicate key {k}")
            index[k] = v
        self._items = items
        self._index = index
        self._hash = None

    # mapping protocol
    def __getitem__(self, k):
        return self._index[k]

    def get(self, k, default=None):
        return self._index.get(k, default)

    def __contains__(self, k):
        return k in self._index

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def keys(self):
        return [k for k, _ in self._items]

    def values(self):
        return [v for _, v in self._items]

    def items(self):
        return list(self._items)

    def __eq__(self, other):
        return isinstance(other, Env) and self._index == other._index

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._index.items()))
        return self._hash

    def __repr__(self):
        return "Env(" + ", ".join(f"{k}: {v}" for k, v in self._items) + ")"

    # operations
    def extend(self, k, v, clash=IllFormedSigma):
        if k in self._index:
            raise clash(f"{k} already present")
        return Env(self._items + ((k, v),))

    def set(self, k, v):
        """Replace or add a binding (used for shadowing in Γ)."""
        if k in self._index:
            return Env(tuple((k2, v if k2 == k else v2) for k2, v2 in self._items))
        return Env(self._items + ((k, v),))

    def union(self, other, clash=IllFormedSigma):
        return Env(self._items + tuple(other.items()), clash=clash)

    def without(self, keys):
        keys = set(keys)
        return Env(tuple((k, v) for k, v in self._items if k not in keys))

    def restrict(self, keys):
        keys = set(keys)
        return Env(tuple((k, v) for k, v in self._items if k in keys))

    def map_values(self, f):
        return Env(tuple((k, f(v)) for k, v in self._items))

    def map_keys(self, f):
        return Env(tuple((f(k), v) for k, v in self._items))

    def disjoint(self, other):
        return not (set(self._index) & set(other._index))


EMPTY = Env()
