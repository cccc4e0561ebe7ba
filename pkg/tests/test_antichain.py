import itertools
import math

import numpy as np
import pytest

from coopdyn.antichain import (
    d_bounds_check,
    d_clt,
    d_exact,
    is_unordered,
    level_counts,
    max_antichain_oracle,
    middle_layer,
    ratio_to_exact,
)
from coopdyn.errors import OracleCapError, UnsupportedSpaceError
from coopdyn.state import StateSpace


def brute_width(space):
    """Largest antichain by exhaustive search; only for tiny spaces."""
    S = list(space.states())
    le = lambda a, b: all(u <= v for u, v in zip(a, b))
    for k in range(len(S), 0, -1):
        for sub in itertools.combinations(S, k):
            if all(not le(a, b) and not le(b, a) for a, b in itertools.combinations(sub, 2)):
                return k
    return 0


def test_is_unordered_examples():
    sp = StateSpace.boolean(2)
    assert is_unordered(sp, [(0, 1), (1, 0)])
    chk = is_unordered(sp, [(0, 0), (0, 1)])
    assert not chk and chk.witness == ((0, 0), (0, 1))
    assert is_unordered(StateSpace.uniform(3, 3), middle_layer(StateSpace.uniform(3, 3)))


def test_middle_layer_small():
    D = middle_layer(StateSpace.boolean(3))
    assert D.states == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    assert len(D) == d_exact(3, 2) == 3
    with pytest.raises(UnsupportedSpaceError):
        middle_layer(StateSpace((2, 3)))


def test_d_exact_values():
    assert d_exact(20, 2) == 184756
    assert d_exact(10, 2) == 252
    assert d_exact(3, 3) == 7
    assert d_exact(1, 5) == 1
    for n in range(1, 31):
        assert d_exact(n, 2) == math.comb(n, n // 2)


def test_level_counts_match_enumeration():
    for levels in [(2, 3, 4), (3, 3, 3), (5, 2), (4,)]:
        sp = StateSpace(levels)
        assert level_counts(levels) == np.bincount(sp.sums).tolist()


def test_clt_ratio():
    assert abs(ratio_to_exact(20, 2) - 0.9876) < 5e-4
    assert abs(ratio_to_exact(20, 2) - 1) <= 0.02
    assert abs(ratio_to_exact(12, 3) - 1) <= 0.05
    assert d_clt(20, 2) == pytest.approx(2**20 / math.sqrt(2 * math.pi * 20 * 0.25))


def test_bounds():
    for n in range(2, 13):
        for p in (2, 3, 4):
            assert d_bounds_check(n, p).ok
    rep = d_bounds_check(1, 2)
    assert rep.upper_ok is None and rep.ok
    assert d_bounds_check(10, 2, c=1.5).exponential_ok


@pytest.mark.parametrize("levels", [(2, 2, 2), (3, 3), (2, 3), (4, 2), (2, 2, 2, 2), (3, 2, 2)])
def test_oracle_matches_exhaustive_search(levels):
    sp = StateSpace(levels)
    assert max_antichain_oracle(sp) == brute_width(sp)


def test_oracle_matches_d_exact_sample():
    for n, p in [(10, 2), (6, 3), (5, 4), (4, 5), (3, 12), (2, 45)]:
        assert max_antichain_oracle(StateSpace.uniform(n, p)) == d_exact(n, p)


def test_oracle_nonuniform_width_is_largest_level():
    sp = StateSpace((2, 3, 5))
    assert max_antichain_oracle(sp) == max(level_counts(sp.levels))


def test_oracle_cap():
    with pytest.raises(OracleCapError):
        max_antichain_oracle(StateSpace.boolean(13))
