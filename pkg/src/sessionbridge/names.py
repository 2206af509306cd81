"""Identifiers, polarities, reduction labels and the explicit fresh-name supply.

Every module that invents names threads a `FreshSupply` by hand so that
interpreters stay deterministic and replayable.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Kind(Enum):
    VAR = "var"
    ACCESS = "access"
    CHANNEL = "channel"
    FIELD = "field"
    IDENT = "ident"


@dataclass(frozen=True)
class Name:
    kind: Kind
    text: str
    uid: int = 0

    def __str__(self):
        return self.text if self.uid == 0 else f"{self.text}#{self.uid}"

    def __lt__(self, other):
        return (self.kind.value, self.text, self.uid) < (other.kind.value, other.text, other.uid)


def var(text, uid=0):
    return Name(Kind.VAR, text, uid)


class Polarity(Enum):
    PLUS = "+"
    MINUS = "-"

    def dual(self):
        return Polarity.MINUS if self is Polarity.PLUS else Polarity.PLUS


def dual(p: Polarity) -> Polarity:
    return p.dual()


@dataclass(frozen=True)
class ChanEnd:
    """One endpoint of a runtime channel: the name plus a polarity."""
    name: Name
    pol: Polarity

    def dual(self):
        return ChanEnd(self.name, self.pol.dual())

    def __str__(self):
        return f"{self.name}^{self.pol.value}"


def ident_key(i):
    """Total order on identities (names and channel ends)."""
    if isinstance(i, ChanEnd):
        return (1, i.name.text, i.name.uid, i.pol.value)
    return (0, i.text, i.uid, "")


@dataclass(frozen=True)
class FreshSupply:
    counter: int = 0


def fresh(supply: FreshSupply, kind: Kind, hint: str):
    n = supply.counter + 1
    return Name(kind, hint, n), FreshSupply(n)


class Supply:
    """Mutable wrapper used inside a single pure pass; never shared."""

    def __init__(self, start=0):
        self.counter = start

    def __call__(self, hint, kind=Kind.VAR):
        self.counter += 1
        return Name(kind, hint, self.counter)

    def frozen(self):
        return FreshSupply(self.counter)


# process labels

class Act(Enum):
    ACCEPT = "Accept"
    SEND = "Send"
    NEW = "New"
    FORK = "Fork"
    SILENT = "Silent"

    def __str__(self):
        return self.value


# expression labels

@dataclass(frozen=True)
class Silent:
    def __str__(self):
        return "Silent"


@dataclass(frozen=True)
class AcceptOn:
    chan: Name


@dataclass(frozen=True)
class RequestOn:
    chan: Name


@dataclass(frozen=True)
class Receive:
    end: ChanEnd
    value: object = None


@dataclass(frozen=True)
class Emit:
    end: ChanEnd
    value: object = None


def pair_labels(a, b):
    """Process label produced by two matching expression labels, or None."""
    if isinstance(a, RequestOn) and isinstance(b, AcceptOn) or isinstance(a, AcceptOn) and isinstance(b, RequestOn):
        return Act.ACCEPT if a.chan == b.chan else None
    if isinstance(a, Emit) and isinstance(b, Receive) or isinstance(a, Receive) and isinstance(b, Emit):
        return Act.SEND if a.end == b.end.dual() else None
    return None


def max_uid(names):
    return max((n.uid for n in names), default=0)
