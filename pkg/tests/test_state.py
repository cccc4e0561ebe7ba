import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopdyn.errors import InvalidIndexError, InvalidRankError, InvalidStateError, SpaceTooLargeError
from coopdyn.state import Relation, StateSpace, compare, state_sum, step


levels_st = st.lists(st.integers(2, 4), min_size=1, max_size=4).map(tuple)


def test_compare_examples():
    sp = StateSpace.boolean(2)
    c = compare(sp, (0, 1), (1, 1))
    assert c.relation is Relation.LESS and not c.strictly_less
    assert compare(sp, (1, 0), (0, 1)).relation is Relation.INCOMPARABLE
    c = compare(sp, (0, 0), (1, 1))
    assert c.relation is Relation.LESS and c.strictly_less
    c = compare(sp, (1, 1), (0, 0))
    assert c.relation is Relation.GREATER and c.strictly_greater
    assert compare(sp, (1, 0), (1, 0)).relation is Relation.EQUAL


def test_compare_dimension_mismatch():
    with pytest.raises(InvalidStateError):
        compare(StateSpace.boolean(2), (0, 1, 0), (1, 1))


def test_sum():
    assert state_sum((1, 2, 0)) == 3
    assert state_sum((0, 0, 0)) == 0
    assert state_sum((4,) * 5) == 20


def test_step_examples():
    assert step(StateSpace.boolean(2), (1, 0), 0, "up") == (1, 0)
    assert step(StateSpace.boolean(2), (1, 0), 1, "up") == (1, 1)
    assert step(StateSpace.uniform(2, 3), (0, 2), 1, "down") == (0, 1)
    with pytest.raises(InvalidIndexError):
        step(StateSpace.boolean(2), (1, 0), 2, "up")


def test_rank_examples():
    assert StateSpace.boolean(3).unrank(5) == (1, 0, 1)
    assert StateSpace((2, 3)).rank((1, 0)) == 3
    with pytest.raises(InvalidRankError):
        StateSpace.boolean(2).unrank(4)


def test_space_validation():
    with pytest.raises(InvalidStateError):
        StateSpace((2, 1))
    with pytest.raises(SpaceTooLargeError):
        StateSpace.boolean(32)
    StateSpace.boolean(31)  # exactly 2^31 is allowed
    with pytest.raises(InvalidStateError):
        StateSpace.boolean(2).state((0, 2))


@given(levels_st)
@settings(max_examples=40, deadline=None)
def test_rank_roundtrip_and_enumeration(levels):
    sp = StateSpace(levels)
    states = list(sp.states())
    assert len(states) == sp.size == len(set(states))
    for r, x in enumerate(states):
        assert sp.rank(x) == r and sp.unrank(r) == x
    assert np.array_equal(sp.coords, np.array(states))


def test_partial_order_axioms_exhaustive():
    sp = StateSpace((2, 3, 2))
    S = list(sp.states())
    le = {(x, y): compare(sp, x, y).relation in (Relation.LESS, Relation.EQUAL) for x in S for y in S}
    for x in S:
        assert le[x, x]
    for x, y in itertools.product(S, S):
        if le[x, y] and le[y, x]:
            assert x == y
        if le[x, y] and x != y:
            assert state_sum(x) < state_sum(y)
    for x, y, z in itertools.product(S, S, S):
        if le[x, y] and le[y, z]:
            assert le[x, z]


@given(levels_st, st.data())
@settings(max_examples=50, deadline=None)
def test_steps_are_monotone(levels, data):
    sp = StateSpace(levels)
    x = sp.unrank(data.draw(st.integers(0, sp.size - 1)))
    for i in range(sp.n):
        up, down = step(sp, x, i, "up"), step(sp, x, i, "down")
        assert compare(sp, x, up).relation in (Relation.LESS, Relation.EQUAL)
        assert compare(sp, down, x).relation in (Relation.LESS, Relation.EQUAL)
        assert sp.unrank(int(sp.up_ranks[i, sp.rank(x)])) == up
        assert sp.unrank(int(sp.down_ranks[i, sp.rank(x)])) == down


def test_closures_match_bruteforce():
    sp = StateSpace((3, 2, 3))
    rng = np.random.default_rng(1)
    X = sp.coords
    for _ in range(20):
        mask = rng.random(sp.size) < 0.15
        down = np.array([np.any(np.all(X[mask] >= X[r], axis=1)) for r in range(sp.size)])
        up = np.array([np.any(np.all(X[mask] <= X[r], axis=1)) for r in range(sp.size)])
        assert np.array_equal(sp.down_closure(mask), down)
        assert np.array_equal(sp.up_closure(mask), up)
