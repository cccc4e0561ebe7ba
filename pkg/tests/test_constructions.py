import numpy as np
import pytest

from coopdyn.antichain import d_exact, middle_layer
from coopdyn.constructions import (
    all_cooperative_boolean,
    make_almost_coop_2d,
    make_almostex,
    make_cycle_on_layer,
    make_g_pi,
    make_germanex,
    make_irlong,
    make_nopsirshortex,
    monotone_boolean_functions,
    random_strongly_cooperative,
)
from coopdyn.dynamics import TotalMap, orbit_decompose
from coopdyn.errors import ConstructionFailureError, InfeasibleError, InvalidPermutationError
from coopdyn.irreducibility import Permutation, classify_irreducibility
from coopdyn.monotonicity import is_almost_cooperative, is_cooperative, is_strongly_cooperative
from coopdyn.state import StateSpace


def test_g_pi_examples():
    g = make_g_pi(StateSpace.boolean(3), Permutation.rotation(3))
    assert g((1, 0, 0)) == (0, 1, 0)
    sp = StateSpace.uniform(2, 3)
    assert make_g_pi(sp, Permutation.identity(2)) == TotalMap.identity(sp)
    with pytest.raises(InvalidPermutationError):
        make_g_pi(StateSpace((3, 2)), Permutation((1, 0)))


def test_cycle_on_layer():
    g = make_cycle_on_layer(3, 2)
    d = orbit_decompose(g)
    D = set(middle_layer(g.space).ranks.tolist())
    long = [c for c in d.cycles if len(c) == 3]
    assert len(long) == 1 and set(long[0]) == D
    assert is_cooperative(g)
    # the bottom and top states are the only other cycles
    assert sorted(len(c) for c in d.cycles) == [1, 1, 3]
    assert max(d.steps_to_cycle) <= 2
    assert 252 in orbit_decompose(make_cycle_on_layer(10, 2)).cycle_lengths
    assert 252 > 1.5**10
    assert orbit_decompose(make_cycle_on_layer(1, 2)).cycle_lengths == [1, 1]


def test_cycle_on_layer_non_boolean():
    g = make_cycle_on_layer(3, 3)
    assert is_cooperative(g)
    assert d_exact(3, 3) in orbit_decompose(g).cycle_lengths


def test_almost_coop_2d_table():
    g = make_almost_coop_2d()
    assert g((0, 0)) == (1, 0) and g((1, 0)) == (1, 1)
    assert g((1, 1)) == (0, 1) and g((0, 1)) == (0, 0)
    assert orbit_decompose(g).cycle_lengths == [4]
    chk = is_almost_cooperative(g)
    assert chk and chk.witness == (1, 0)


@pytest.mark.parametrize("n", [3, 4])
def test_almostex(n):
    g, rep = make_almostex(n, with_report=True)
    assert len(rep.cycle) == d_exact(n, 2)
    X = g.space.coords[list(rep.cycle)]
    assert (X.min(axis=1) >= 1).all() and (X.max(axis=1) <= 2).all()
    irr = classify_irreducibility(g)
    assert irr.strongly_semi_irreducible and not irr.irreducible
    assert is_cooperative(g)
    assert not rep.properties["strongly_cooperative"]


def test_nopsirshortex():
    g, rep = make_nopsirshortex(4, with_report=True)
    assert len(rep.cycle) == 6
    assert (g.space.coords[list(rep.cycle)] % 3 == 1).all()
    assert classify_irreducibility(g).along(rep.cycle).strongly_irreducible_along


@pytest.mark.parametrize("n,length", [(2, 2), (4, 6), (5, 10)])
def test_irlong(n, length):
    g, rep = make_irlong(n, with_report=True)
    assert len(rep.cycle) == length
    assert classify_irreducibility(g).along(rep.cycle).irreducible_along


def test_germanex_infeasible():
    with pytest.raises(InfeasibleError):
        make_germanex(4)


def test_germanex_n12():
    g, rep = make_germanex(12, seed=7)
    assert rep.union_covers_all_arcs and not rep.irreducible_along
    assert rep.weakly_irreducible_along and rep.claims_hold
    assert len(rep.pairs) == 66 and len(rep.cycle) == 924
    ranks = [r for q in rep.pairs.values() for r in q]
    assert len(set(ranks)) == 264
    for (i, j), (a, b, a2, b2) in rep.pairs.items():
        xa, xb = g.space.unrank(a), g.space.unrank(b)
        assert xa[i] == 1 and xa[j] == 0 and xb[i] == 0 and xb[j] == 1
        assert g.table[a] == b2 and g.table[b] == a2
    g2, rep2 = make_germanex(12, seed=7)
    assert g2 == g and rep2.attempts == rep.attempts


def test_germanex_retry_budget():
    with pytest.raises(ConstructionFailureError) as e:
        make_germanex(12, seed=0, max_retries=10)
    assert e.value.attempts == 11


def test_monotone_boolean_function_counts():
    # Dedekind numbers
    assert [len(monotone_boolean_functions(k)) for k in range(1, 5)] == [3, 6, 20, 168]


def test_all_cooperative_boolean_count():
    maps = list(all_cooperative_boolean(2))
    assert len(maps) == 36 and len({m.table.tobytes() for m in maps}) == 36
    assert all(is_cooperative(m) for m in maps)


def test_random_strongly_cooperative():
    rng = np.random.default_rng(1)
    for levels in [(2, 2, 2), (3, 3, 2), (4, 4)]:
        for _ in range(10):
            m = random_strongly_cooperative(StateSpace(levels), rng)
            assert is_strongly_cooperative(m, verify=True, pairs="all")
