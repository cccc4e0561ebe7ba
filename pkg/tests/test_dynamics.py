import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopdyn.antichain import is_unordered
from coopdyn.constructions import all_cooperative_boolean, make_almost_coop_2d, make_g_pi
from coopdyn.dynamics import LazyMap, TotalMap, orbit_decompose, persistent_states
from coopdyn.errors import InvalidRankError, PreconditionError
from coopdyn.irreducibility import Permutation
from coopdyn.state import StateSpace


def naive_cycles(m):
    """Cycles by iterating every state |size| times."""
    found = set()
    for r in range(m.space.size):
        x = r
        for _ in range(m.space.size):
            x = int(m.table[x])
        cyc = [x]
        y = int(m.table[x])
        while y != x:
            cyc.append(y)
            y = int(m.table[y])
        found.add(frozenset(cyc))
    return found


def test_apply_section5_example():
    g = make_almost_coop_2d()
    assert g.apply((0, 0)) == (1, 0)
    assert g.apply((1, 1)) == (0, 1)
    assert g.trajectory((0, 0), 4) == (0, 0)
    assert g.trajectory((0, 0), 0) == (0, 0)
    assert g.orbit((0, 0), 4) == [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]


def test_identity():
    sp = StateSpace.boolean(2)
    m = TotalMap.identity(sp)
    for x in sp.states():
        assert m(x) == x and m.trajectory(x, 7) == x
    d = orbit_decompose(m)
    assert d.cycle_lengths == [1, 1, 1, 1]
    assert not d.steps_to_cycle.any()
    assert persistent_states(d) == set(sp.states())


def test_transposition_cycles():
    m = make_g_pi(StateSpace.boolean(2), Permutation((1, 0)))
    d = orbit_decompose(m)
    got = {frozenset(d.cycle_states(k)) for k in range(len(d.cycles))}
    assert got == {frozenset({(0, 0)}), frozenset({(1, 1)}), frozenset({(0, 1), (1, 0)})}


def test_persistent_boolean_example():
    sp = StateSpace.boolean(2)
    img = {(0, 0): (0, 0), (1, 0): (1, 0), (0, 1): (1, 0), (1, 1): (1, 1)}
    m = TotalMap.from_function(sp, lambda x: img[x])
    d = orbit_decompose(m)
    assert persistent_states(d) == {(0, 0), (1, 0), (1, 1)}
    assert d.steps_to_cycle[sp.rank((0, 1))] == 1


def test_table_validation():
    sp = StateSpace.boolean(1)
    with pytest.raises(InvalidRankError):
        TotalMap(sp, [0, 2])
    with pytest.raises(PreconditionError):
        TotalMap(sp, [0])
    with pytest.raises(PreconditionError):
        TotalMap(sp, [0, 1]).trajectory((0,), -1)


def test_lazy_map_tabulates():
    sp = StateSpace((3, 2))
    fn = lambda x: (min(x[0] + x[1], 2), x[1])
    assert LazyMap(sp, fn).tabulate() == TotalMap.from_function(sp, fn)
    assert LazyMap(sp, fn).trajectory((0, 1), 3) == (2, 1)


@given(st.lists(st.integers(2, 3), min_size=1, max_size=4), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_decomposition_invariants(levels, seed):
    sp = StateSpace(tuple(levels))
    rng = np.random.default_rng(seed)
    m = TotalMap(sp, rng.integers(sp.size, size=sp.size))
    d = orbit_decompose(m)
    assert {frozenset(c) for c in d.cycles} == naive_cycles(m)
    assert sum(d.cycle_lengths) + d.n_transient == sp.size
    for k, c in enumerate(d.cycles):
        assert c[0] == min(c)
        for a, b in zip(c, c[1:] + c[:1]):
            assert m.table[a] == b
        assert all(d.cycle_index[r] == k for r in c)
    assert [c[0] for c in d.cycles] == sorted(c[0] for c in d.cycles)
    for r in range(sp.size):
        x = sp.unrank(r)
        y = m.trajectory(x, int(d.steps_to_cycle[r]))
        assert sp.rank(y) in d.cycles[d.cycle_index[r]]
        assert (d.steps_to_cycle[r] == 0) == (r in d.cycles[d.cycle_index[r]])


def test_long_transient_chain_no_recursion():
    sp = StateSpace((1 << 18,))
    table = np.maximum(np.arange(sp.size) - 1, 0)
    d = orbit_decompose(TotalMap(sp, table))
    assert d.cycle_lengths == [1]
    assert d.steps_to_cycle.max() == sp.size - 1


def test_periodic_orbits_of_cooperative_maps_are_unordered():
    for m in all_cooperative_boolean(3):
        d = orbit_decompose(m)
        for k in range(len(d.cycles)):
            assert is_unordered(m.space, d.cycle_states(k))
