"""Cooperativity, strong cooperativity and almost-cooperativity of total maps."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._check import Check
from .dynamics import TotalMap
from .errors import ContractInapplicableError, NotApplicableError
from .state import State, StateSpace


def _first(mask: np.ndarray):
    """Index tuple of the first True entry in C order, or None."""
    if not mask.any():
        return None
    return np.unravel_index(int(np.argmax(mask)), mask.shape)


def _step_violations(m: TotalMap) -> tuple[np.ndarray, np.ndarray]:
    """Arrays V[x, i, j] for the two halves of the covering-pair condition.

    up_bad[x, i, j]:   g(x)_j > g(x^{i+})_j
    down_bad[x, i, j]: g(x^{i-})_j > g(x)_j
    """
    G = m.images
    up = m.space.up_ranks
    down = m.space.down_ranks
    up_bad = np.stack([G > G[up[i]] for i in range(m.space.n)], axis=1)
    down_bad = np.stack([G[down[i]] > G for i in range(m.space.n)], axis=1)
    return up_bad, down_bad


def is_cooperative(m: TotalMap) -> Check:
    """x <= y implies g(x) <= g(y), checked on covering pairs x <= x^{i+}.

    The witness is ``(x, i, j)`` with g(x)_j > g(x^{i+})_j, first in rank
    order of x, then i, then j.
    """
    up_bad, _ = _step_violations(m)
    hit = _first(up_bad)
    if hit is None:
        return Check(True)
    x, i, j = (int(v) for v in hit)
    return Check(False, (m.space.unrank(x), i, j))


def is_cooperative_bruteforce(m: TotalMap) -> Check:
    """O(size^2) check of the definition; witness is a pair (x, y)."""
    X = m.space.coords
    G = m.images
    for r in range(m.space.size):
        above = np.all(X >= X[r], axis=1)
        bad = above & ~np.all(G >= G[r], axis=1)
        if bad.any():
            return Check(False, (m.space.unrank(r), m.space.unrank(int(np.argmax(bad)))))
    return Check(True)


def _covering_pairs(space: StateSpace) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = [], []
    ranks = np.arange(space.size)
    for i in range(space.n):
        up = space.up_ranks[i]
        keep = up != ranks
        lo.append(ranks[keep])
        hi.append(up[keep])
    return np.concatenate(lo), np.concatenate(hi)


def _ordered_pairs(space: StateSpace) -> tuple[np.ndarray, np.ndarray]:
    X = space.coords
    le = np.all(X[:, None, :] <= X[None, :, :], axis=2)
    np.fill_diagonal(le, False)
    return np.nonzero(le)


def _pairs(space: StateSpace, pairs: str):
    if pairs == "covering":
        return _covering_pairs(space)
    if pairs == "all":
        return _ordered_pairs(space)
    raise ValueError("pairs must be 'covering' or 'all'")


def sum_preserving(m: TotalMap) -> Check:
    """S(g(x)) = S(x) for every x; witness is the first x that fails."""
    bad = m.space.sums[m.table] != m.space.sums
    if bad.any():
        return Check(False, m.space.unrank(int(np.argmax(bad))))
    return Check(True)


def gap_nondecreasing(m: TotalMap, pairs: str = "covering") -> Check:
    """x < y implies S(y) - S(x) <= S(g(y)) - S(g(x)).

    Only meaningful for cooperative g, where S(g(y) - g(x)) is the
    difference of sums.
    """
    lo, hi = _pairs(m.space, pairs)
    S = m.space.sums
    G = m.images
    gap_after = (G[hi] - G[lo]).sum(axis=1)
    bad = (S[hi] - S[lo]) > gap_after
    if bad.any():
        k = int(np.argmax(bad))
        return Check(False, (m.space.unrank(int(lo[k])), m.space.unrank(int(hi[k]))))
    return Check(True)


def strictly_monotone(m: TotalMap, pairs: str = "covering") -> Check:
    """x < y implies g(x) < g(y)."""
    lo, hi = _pairs(m.space, pairs)
    G = m.images
    ok = np.all(G[lo] <= G[hi], axis=1) & (m.table[lo] != m.table[hi])
    if not ok.all():
        k = int(np.argmin(ok))
        return Check(False, (m.space.unrank(int(lo[k])), m.space.unrank(int(hi[k]))))
    return Check(True)


@dataclass(frozen=True)
class StrongCoopResult:
    ok: bool
    cooperative: Check
    sum_preserving: Optional[Check] = None
    gap_nondecreasing: Optional[Check] = None
    strictly_monotone: Optional[Check] = None

    def __bool__(self):
        return self.ok

    @property
    def agree(self) -> bool:
        if not self.cooperative:
            return True
        vals = [bool(c) for c in (self.sum_preserving, self.gap_nondecreasing,
                                  self.strictly_monotone) if c is not None]
        return len(set(vals)) <= 1


def is_strongly_cooperative(m: TotalMap, verify: bool = False, pairs: str = "covering") -> StrongCoopResult:
    """Cooperative and sum-preserving.

    With ``verify=True`` the two other equivalent conditions are evaluated
    as well (on covering pairs, or on all ordered pairs with
    ``pairs='all'``) and an AssertionError is raised if they disagree.
    """
    coop = is_cooperative(m)
    if not coop:
        return StrongCoopResult(False, coop)
    sp = sum_preserving(m)
    if not verify:
        return StrongCoopResult(bool(sp), coop, sp)
    res = StrongCoopResult(bool(sp), coop, sp, gap_nondecreasing(m, pairs), strictly_monotone(m, pairs))
    if not res.agree:
        raise AssertionError(f"strong-cooperativity conditions disagree on {m!r}: {res}")
    return res


class PairClass(enum.Enum):
    CONFORMING = "conforming"
    REVERSED = "reversed"
    MIXED = "mixed"


def classify_pairs(m: TotalMap) -> np.ndarray:
    """(n, n) array of PairClass for the influence of x_i on g(x)_j."""
    up_bad, down_bad = _step_violations(m)
    G = m.images
    up = m.space.up_ranks
    down = m.space.down_ranks
    n = m.space.n
    # reversed: g(x^{i-})_j >= g(x)_j >= g(x^{i+})_j
    rev_bad = np.stack([(G[down[i]] < G) | (G < G[up[i]]) for i in range(n)], axis=1)
    conforming = ~(up_bad | down_bad).any(axis=0)
    reversed_ = ~rev_bad.any(axis=0)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            if conforming[i, j]:
                out[i, j] = PairClass.CONFORMING
            elif reversed_[i, j]:
                out[i, j] = PairClass.REVERSED
            else:
                out[i, j] = PairClass.MIXED
    return out


def is_almost_cooperative(m: TotalMap) -> Check:
    """Exactly one off-diagonal pair (i*, j*) is order-reversing, the rest conform.

    The witness is ``(i*, j*)`` (0-based) on success.
    """
    cls = classify_pairs(m)
    n = m.space.n
    bad = [(i, j) for i in range(n) for j in range(n) if cls[i, j] is not PairClass.CONFORMING]
    if len(bad) == 1:
        i, j = bad[0]
        if i != j and cls[i, j] is PairClass.REVERSED:
            return Check(True, (i, j))
    return Check(False, bad)


class Verdict(enum.Enum):
    COOPERATIVE = "cooperative"
    ALMOST_COOPERATIVE = "almost_cooperative"
    NEITHER = "neither"


@dataclass(frozen=True)
class CoopReport:
    verdict: Verdict
    witness: Optional[tuple]          # (x, i, j) violating the covering condition
    exception_pair: Optional[tuple]   # (i*, j*) when almost cooperative
    strongly_cooperative: bool
    sc_witness: Optional[tuple]       # (x, y) with x < y but not g(x) < g(y)


def analyze_cooperativity(m: TotalMap) -> CoopReport:
    coop = is_cooperative(m)
    if coop:
        sc = is_strongly_cooperative(m, verify=True)
        witness = None if sc else strictly_monotone(m).witness
        return CoopReport(Verdict.COOPERATIVE, None, None, bool(sc), witness)
    almost = is_almost_cooperative(m)
    verdict = Verdict.ALMOST_COOPERATIVE if almost else Verdict.NEITHER
    return CoopReport(verdict, coop.witness, almost.witness if almost else None, False, None)


def l1_distance(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(abs(a - b) for a, b in zip(x, y))


def perturbation_contract(m: TotalMap, x0: Sequence[int], y0: Sequence[int], t_max: int) -> Check:
    """S(|y(t) - x(t)|) never exceeds S(|y(0) - x(0)|) for 0 <= t <= t_max.

    Witness on failure is the first offending time t.
    """
    if not is_strongly_cooperative(m):
        raise ContractInapplicableError("perturbation contract needs a strongly cooperative map")
    sp = m.space
    rx, ry = sp.rank(x0), sp.rank(y0)
    C = sp.coords
    d0 = int(np.abs(C[rx] - C[ry]).sum())
    for t in range(1, t_max + 1):
        rx, ry = m.table[rx], m.table[ry]
        if int(np.abs(C[rx] - C[ry]).sum()) > d0:
            return Check(False, t)
    return Check(True)


@dataclass(frozen=True)
class EventualSCWitness:
    chain: tuple[State, ...]   # strictly increasing, length max(p_i) + 1
    forced_min_sum: int        # n * p_1, forced on the top of the chain
    max_sum: int               # largest S attainable in the space

    @property
    def contradiction(self) -> bool:
        return self.forced_min_sum > self.max_sum


def eventual_sc_witness(space: StateSpace) -> EventualSCWitness:
    """A chain x^0 < ... < x^{p_1} showing no map is eventually strongly cooperative.

    If x^k(t) << x^{k+1}(t) held for all k at some time t, the top of the
    chain would need S >= n * p_1, more than any state has.
    """
    if space.n < 2:
        raise NotApplicableError("eventual strong cooperativity is only ruled out for n > 1")
    p1 = max(space.levels)
    first = space.levels.index(p1)
    order = [first] + [i for i in range(space.n) if i != first]
    x = list(space.bottom)
    chain = [tuple(x)]
    for i in order:
        while x[i] < space.levels[i] - 1 and len(chain) < p1 + 1:
            x[i] += 1
            chain.append(tuple(x))
    return EventualSCWitness(tuple(chain), space.n * p1, space.max_sum)
