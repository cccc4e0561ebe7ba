import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopdyn.dynamics import TotalMap
from coopdyn.errors import InputRangeError, NotApplicableError, PreconditionError
from coopdyn.monotonicity import is_cooperative
from coopdyn.smale import (
    PartialMap,
    approximation_error,
    complete_antichain_cover,
    discretize_map,
    hyperplane_smale,
    modulus_check,
    random_cooperative_partial_map,
    random_partial_on_level,
    sample_on_grid,
    smale_extend,
    smale_extend_naive,
)
from coopdyn.state import StateSpace

seeds = st.integers(0, 2**32 - 1)
spaces = st.sampled_from([(2, 2, 2), (2, 2, 2, 2), (5, 5), (3, 3, 3), (2, 3, 4), (4, 2)])


@given(spaces, seeds)
@settings(max_examples=120, deadline=None)
def test_smale_extension_properties(levels, seed):
    sp = StateSpace(levels)
    rng = np.random.default_rng(seed)
    gamma = random_cooperative_partial_map(sp, rng)
    assert gamma.is_cooperative()
    g = smale_extend(gamma)
    assert is_cooperative(g)
    assert np.array_equal(g.table[gamma.domain_ranks], gamma.image_ranks)
    assert g == smale_extend_naive(gamma)


@given(spaces, seeds)
@settings(max_examples=60, deadline=None)
def test_hyperplane_form_matches(levels, seed):
    sp = StateSpace(levels)
    rng = np.random.default_rng(seed)
    r = int(rng.integers(sp.max_sum + 1))
    gamma = random_partial_on_level(sp, r, rng, into_level=bool(rng.integers(2)))
    assert hyperplane_smale(gamma) == smale_extend(gamma)


def test_antichain_cover_reaches_every_state():
    sp = StateSpace((3, 3, 2))
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = complete_antichain_cover(random_cooperative_partial_map(sp, rng, density=0.05))
        mask = q.domain_mask()
        assert (sp.down_closure(mask) | sp.up_closure(mask)).all()


def test_non_cooperative_partial_map_rejected():
    sp = StateSpace.boolean(2)
    p = PartialMap(sp, {(0, 0): (1, 1), (1, 1): (0, 0)})
    chk = p.is_cooperative()
    assert not chk and chk.witness == ((0, 0), (1, 1))
    with pytest.raises(PreconditionError):
        smale_extend(p)


def test_hyperplane_requires_full_level():
    sp = StateSpace.boolean(3)
    with pytest.raises(PreconditionError):
        hyperplane_smale(PartialMap(sp, {(1, 0, 0): (1, 0, 0)}))


def test_smale_of_total_map_restriction_is_identity_on_cooperative_maps():
    sp = StateSpace.uniform(2, 3)
    g = TotalMap.from_function(sp, lambda x: (min(x[0], x[1]), max(x[0], x[1])))
    p = PartialMap.restrict(g, sp.states())
    assert smale_extend(p) == g


def test_discretize_identity_and_errors():
    sp = StateSpace.uniform(2, 5)
    samples = sample_on_grid(sp, lambda v: v)
    g = discretize_map(sp, samples)
    assert g == TotalMap.identity(sp)
    assert approximation_error(samples, g) == 0
    with pytest.raises(InputRangeError):
        discretize_map(sp, samples + 0.6)


def test_discretize_error_is_half_a_step():
    sp = StateSpace.uniform(2, 9)
    f = lambda v: np.array([v[0] * v[1], (v[0] + v[1]) / 2])
    samples = sample_on_grid(sp, f)
    g = discretize_map(sp, samples)
    assert approximation_error(samples, g) <= 0.5 / 8 + 1e-12
    assert is_cooperative(g)  # f is monotone and rounding preserves order


@given(st.sampled_from([(2, 6), (3, 4), (2, 8)]), seeds)
@settings(max_examples=30, deadline=None)
def test_modulus_evidence(case, seed):
    n, p = case
    sp = StateSpace.uniform(n, p)
    rng = np.random.default_rng(seed)
    r = sp.max_sum // 2
    gamma = random_partial_on_level(sp, r, rng)
    rep = modulus_check(gamma)
    assert rep.evidence_only
    assert rep.lipschitz_ok and rep.ok


def test_modulus_needs_two_points():
    sp = StateSpace.uniform(2, 3)
    with pytest.raises(NotApplicableError):
        modulus_check(PartialMap(sp, {(0, 0): (1, 1)}))
