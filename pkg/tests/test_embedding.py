import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopdyn.antichain import d_exact, middle_layer
from coopdyn.constructions import make_almost_coop_2d, make_g_pi
from coopdyn.dynamics import LazyMap, TotalMap, orbit_decompose
from coopdyn.embedding import (
    Embedding,
    embed_system,
    embedding_feasible,
    thermometer_lift,
    trivial_extend,
    verify_conjugacy,
)
from coopdyn.errors import FeasibilityError, PreconditionError
from coopdyn.irreducibility import Permutation
from coopdyn.monotonicity import is_cooperative, is_strongly_cooperative
from coopdyn.smale import PartialMap
from coopdyn.state import StateSpace

seeds = st.integers(0, 2**32 - 1)


def test_feasibility_threshold():
    assert not embedding_feasible(2, 2, 3, 2)   # 4 > 3
    assert embedding_feasible(2, 2, 4, 2)       # 4 <= 6
    assert embedding_feasible(3, 2, 5, 2)       # 8 <= 10


def test_almost_coop_2d_does_not_fit_dimension_3():
    with pytest.raises(FeasibilityError):
        embed_system(make_almost_coop_2d(), StateSpace.boolean(3))


def test_almost_coop_2d_embeds_in_dimension_4():
    f = make_almost_coop_2d()
    emb, g = embed_system(f, StateSpace.boolean(4))
    assert is_cooperative(g)
    assert verify_conjugacy(f, g, emb)
    assert 4 in orbit_decompose(g).cycle_lengths
    assert set(emb.image) <= set(middle_layer(StateSpace.boolean(4)))


@given(st.sampled_from([((2, 2), 4, 2), ((3,), 3, 2), ((2, 2, 2), 5, 2), ((3, 3), 4, 3)]), seeds)
@settings(max_examples=40, deadline=None)
def test_random_systems_embed(case, seed):
    src_levels, n, p = case
    src = StateSpace(src_levels)
    rng = np.random.default_rng(seed)
    f = TotalMap(src, rng.integers(src.size, size=src.size))
    emb, g = embed_system(f, StateSpace.uniform(n, p))
    assert is_cooperative(g)
    assert verify_conjugacy(f, g, emb.phi)
    # cycle structure is carried over
    lens_f = sorted(orbit_decompose(f).cycle_lengths)
    lens_g = orbit_decompose(g).cycle_lengths
    for k in set(lens_f):
        assert lens_g.count(k) >= lens_f.count(k)


def test_conjugacy_witness():
    f = make_almost_coop_2d()
    emb, g = embed_system(f, StateSpace.boolean(4))
    wrong = TotalMap.identity(g.space)
    chk = verify_conjugacy(f, wrong, emb)
    assert not chk and chk.witness == (0, 0)


def test_embedding_requires_injective():
    with pytest.raises(PreconditionError):
        Embedding(StateSpace.boolean(1), StateSpace.boolean(2), np.array([1, 1]))


@given(st.integers(2, 4), st.integers(2, 4), seeds)
@settings(max_examples=40, deadline=None)
def test_trivial_extend_on_random_antichain(n, p, seed):
    sp = StateSpace.uniform(n, p)
    rng = np.random.default_rng(seed)
    D = middle_layer(sp).ranks
    dom = rng.choice(D, size=int(rng.integers(1, len(D) + 1)), replace=False)
    img = rng.integers(sp.size, size=len(dom))
    g = trivial_extend(sp, PartialMap.from_ranks(sp, dom, img))
    assert is_cooperative(g)
    assert np.array_equal(g.table[dom], img)


def test_trivial_extend_rejects_ordered_domain():
    sp = StateSpace.boolean(2)
    with pytest.raises(PreconditionError):
        trivial_extend(sp, {(0, 0): (1, 1), (1, 1): (0, 0)})


def test_trivial_extend_empty_domain():
    g = trivial_extend(StateSpace.boolean(3), {})
    assert is_cooperative(g)


def test_thermometer_psi():
    lift = thermometer_lift(TotalMap.identity(StateSpace((3, 2))))
    assert lift.psi((2, 0)) == (1, 1, 0)
    assert lift.psi((1, 1)) == (1, 0, 1)
    assert lift.block_counts((0, 1, 1)) == (1, 1)
    assert lift.retract((0, 1, 1)) == (1, 0, 1)
    assert lift.lifted == StateSpace.boolean(3)


@given(st.sampled_from([(3, 3), (4, 3), (3, 3, 3), (4, 4)]), seeds)
@settings(max_examples=30, deadline=None)
def test_lift_commutes_and_preserves_classes(levels, seed):
    sp = StateSpace(levels)
    rng = np.random.default_rng(seed)
    perm = [i for i in rng.permutation(sp.n)] if len(set(levels)) == 1 else list(range(sp.n))
    g = make_g_pi(sp, Permutation(tuple(int(v) for v in perm)))
    lift = thermometer_lift(g)
    f = lift.map
    for x in sp.states():
        assert f(lift.psi(x)) == lift.psi(g(x))
    assert is_strongly_cooperative(f)
    assert np.array_equal(f.table[lift.psi_ranks], lift.psi_ranks[g.table])
    assert set(orbit_decompose(g).cycle_lengths) <= set(orbit_decompose(f).cycle_lengths)


def test_lift_is_lazy_for_large_N():
    sp = StateSpace((6,) * 5)
    g = make_g_pi(sp, Permutation.rotation(5))
    lift = thermometer_lift(g)
    assert isinstance(lift.map, LazyMap)
    x = (5, 0, 2, 3, 1)
    assert lift.map(lift.psi(x)) == lift.psi(g(x))
    assert d_exact(5, 6) > 0
