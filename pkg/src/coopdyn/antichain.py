"""Unordered sets, the middle layer D and its size d_{n,p}.

``max_antichain_oracle`` computes the width of a product of chains from
scratch via Dilworth's theorem, so it can be used to check ``d_exact``
without assuming the Sperner property.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ._check import Check
from .errors import OracleCapError, PreconditionError, UnsupportedSpaceError
from .state import State, StateSpace

ORACLE_CAP = 4096


@dataclass(frozen=True)
class Antichain:
    space: StateSpace
    states: tuple[State, ...]  # rank order

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, x):
        return tuple(x) in set(self.states)

    @property
    def ranks(self) -> np.ndarray:
        return self.space.ranks_of(self.states) if self.states else np.zeros(0, np.int64)


def is_unordered(space: StateSpace, states: Iterable[Sequence[int]]) -> Check:
    """True iff no two distinct states are comparable.

    On failure the witness is the first pair ``(a, b)`` with ``a < b`` in
    rank order of ``a`` then ``b``.
    """
    uniq = sorted({space.state(x) for x in states}, key=space.rank)
    if len(uniq) < 2:
        return Check(True)
    arr = np.asarray(uniq, dtype=np.int64)
    for t in range(len(uniq) - 1):
        rest = arr[t + 1:]
        # rank(a) < rank(b) whenever a < b, so only later states can sit above
        above = np.all(rest >= arr[t], axis=1)
        if above.any():
            u = t + 1 + int(np.argmax(above))
            return Check(False, (uniq[t], uniq[u]))
    return Check(True)


def level_counts(levels: Sequence[int]) -> list[int]:
    """Number of states at each height S = 0..N, exact integers."""
    counts = [1]
    for p in levels:
        new = [0] * (len(counts) + p - 1)
        # sliding window of width p over the previous counts
        window = 0
        for t in range(len(new)):
            if t < len(counts):
                window += counts[t]
            if t - p >= 0:
                window -= counts[t - p]
            new[t] = window
        counts = new
    return counts


def middle_height(space: StateSpace) -> int:
    return space.max_sum // 2


def d_exact(n: int, p: int) -> int:
    """|D| for D = {x in {0..p-1}^n : S(x) = floor(n(p-1)/2)}."""
    if n < 1 or p < 2:
        raise PreconditionError("need n >= 1 and p >= 2")
    if n == 1:
        return 1  # a chain has one state per level
    return level_counts((p,) * n)[n * (p - 1) // 2]


def level_set(space: StateSpace, r: int) -> Antichain:
    """All states with S(x) = r, in rank order."""
    ranks = np.flatnonzero(space.sums == r)
    return Antichain(space, tuple(tuple(int(c) for c in space.coords[k]) for k in ranks))


def middle_layer(space: StateSpace) -> Antichain:
    if not space.is_uniform:
        raise UnsupportedSpaceError("the middle layer D is defined for uniform levels only")
    return level_set(space, middle_height(space))


def d_clt(n: int, p: int) -> float:
    """Local-limit estimate p^n / sqrt(2 pi n sigma^2), sigma^2 = (p^2 - 1)/12."""
    sigma2 = (p - 1) * (p + 1) / 12.0
    return math.exp(n * math.log(p)) / math.sqrt(2.0 * math.pi * n * sigma2)


def ratio_to_exact(n: int, p: int) -> float:
    return d_exact(n, p) / d_clt(n, p)


@dataclass(frozen=True)
class BoundsReport:
    n: int
    p: int
    d: int
    lower_ok: bool                   # d_{n,p} >= p^{n-1}/n
    upper_ok: Optional[bool]         # d_{n+1,p} < p^n, None when n < 2
    c: Optional[float] = None
    exponential_ok: Optional[bool] = None  # d_{n,p} >= c^n

    @property
    def ok(self) -> bool:
        # the c^n clause only holds for n large enough, so it is reported, not required
        return self.lower_ok and self.upper_ok is not False


def d_bounds_check(n: int, p: int, c: Optional[float] = None) -> BoundsReport:
    d = d_exact(n, p)
    lower_ok = n * d >= p ** (n - 1)
    upper_ok = d_exact(n + 1, p) < p**n if n >= 2 else None
    exp_ok = None
    if c is not None:
        exp_ok = d >= c**n
    return BoundsReport(n, p, d, lower_ok, upper_ok, c, exp_ok)


def _strict_upsets(space: StateSpace):
    coords = space.coords
    cache: dict[int, list[int]] = {}

    def neighbours(u: int) -> list[int]:
        nb = cache.get(u)
        if nb is None:
            mask = np.all(coords >= coords[u], axis=1)
            mask[u] = False
            nb = np.flatnonzero(mask).tolist()
            cache[u] = nb
        return nb

    return neighbours


def max_matching_size(space: StateSpace) -> int:
    """Maximum matching in the bipartite graph x -> y for x < y (Hopcroft-Karp).

    Edges are generated lazily per left vertex; a greedy matching over
    covering pairs seeds the search.
    """
    V = space.size
    adj = _strict_upsets(space)
    pair_u = [-1] * V
    pair_v = [-1] * V
    up = space.up_ranks
    order = np.argsort(-space.sums, kind="stable").tolist()
    for u in order:
        for i in range(space.n):
            v = int(up[i, u])
            if v != u and pair_v[v] == -1:
                pair_u[u] = v
                pair_v[v] = u
                break

    INF = math.inf
    while True:
        dist = [INF] * V
        queue = deque()
        for u in range(V):
            if pair_u[u] == -1:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj(u):
                w = pair_v[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            break
        ptr = [0] * V
        via = [-1] * V
        for root in range(V):
            if pair_u[root] != -1:
                continue
            stack = [root]
            while stack:
                u = stack[-1]
                nbrs = adj(u)
                pushed = False
                while ptr[u] < len(nbrs):
                    v = nbrs[ptr[u]]
                    ptr[u] += 1
                    w = pair_v[v]
                    if w == -1:
                        via[u] = v
                        for x in stack:
                            y = via[x]
                            pair_u[x] = y
                            pair_v[y] = x
                        stack.clear()
                        pushed = True
                        break
                    if dist[w] == dist[u] + 1:
                        via[u] = v
                        stack.append(w)
                        pushed = True
                        break
                if not pushed:
                    dist[u] = INF
                    stack.pop()
    return sum(1 for v in pair_u if v != -1)


def max_antichain_oracle(space: StateSpace, cap: int = ORACLE_CAP) -> int:
    """Width of the poset via Dilworth: size minus a maximum matching of x < y."""
    if space.size > cap:
        raise OracleCapError(f"space has {space.size} states, oracle cap is {cap}")
    return space.size - max_matching_size(space)
