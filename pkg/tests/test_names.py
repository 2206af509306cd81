from hypothesis import given, strategies as st

from sessionbridge.names import (
    AcceptOn, Act, ChanEnd, Emit, FreshSupply, Kind, Name, Polarity, Receive, RequestOn,
    Supply, dual, fresh, pair_labels,
)


def test_first_draw():
    n, s = fresh(FreshSupply(0), Kind.CHANNEL, "g")
    assert n == Name(Kind.CHANNEL, "g", 1)
    assert s.counter == 1


def test_two_draws_differ():
    a, s = fresh(FreshSupply(0), Kind.VAR, "x")
    b, _ = fresh(s, Kind.VAR, "x")
    assert (a.uid, b.uid) == (1, 2)
    assert a != b


def test_draw_increments():
    n, s = fresh(FreshSupply(41), Kind.VAR, "d")
    assert str(n) == "d#42" and s.counter == 42


def test_parsed_names_have_uid_zero():
    assert str(Name(Kind.VAR, "u")) == "u"


def test_dual():
    assert dual(Polarity.PLUS) is Polarity.MINUS
    assert dual(Polarity.MINUS) is Polarity.PLUS
    assert dual(dual(Polarity.PLUS)) is Polarity.PLUS


@given(st.sampled_from(list(Polarity)))
def test_dual_involution(p):
    assert dual(dual(p)) is p


@given(st.lists(st.sampled_from(list(Kind)), max_size=40), st.integers(0, 1000))
def test_draws_pairwise_distinct(kinds, start):
    s = FreshSupply(start)
    seen = []
    for k in kinds:
        n, s2 = fresh(s, k, "h")
        assert s2.counter > s.counter
        seen.append(n)
        s = s2
    assert len(set(seen)) == len(seen)


def test_mutable_supply_matches_frozen():
    sup = Supply(5)
    assert sup("x").uid == 6
    assert sup.frozen() == FreshSupply(6)


def test_label_pairing():
    g = Name(Kind.CHANNEL, "g", 1)
    h = Name(Kind.CHANNEL, "h", 2)
    assert pair_labels(RequestOn(g), AcceptOn(g)) is Act.ACCEPT
    assert pair_labels(RequestOn(g), AcceptOn(h)) is None
    plus, minus = ChanEnd(g, Polarity.PLUS), ChanEnd(g, Polarity.MINUS)
    assert pair_labels(Emit(plus, 1), Receive(minus)) is Act.SEND
    assert pair_labels(Emit(plus, 1), Receive(plus)) is None
