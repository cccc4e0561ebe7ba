"""Cooperative partial maps and their Smale extensions.

The Smale extension of a cooperative partial map gamma: A -> Pi sends
z to the componentwise infimum of gamma over the elements of A above z,
and states with nothing above them to the supremum of the values already
assigned below them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ._check import Check
from .dynamics import TotalMap
from .errors import (
    InputRangeError,
    NotApplicableError,
    PreconditionError,
)
from .state import State, StateSpace


class PartialMap:
    """gamma: A -> Pi for a subset A of the space."""

    def __init__(self, space: StateSpace, mapping: Mapping[Sequence[int], Sequence[int]]):
        self.space = space
        items = sorted(((space.state(k), space.state(v)) for k, v in mapping.items()),
                       key=lambda kv: space.rank(kv[0]))
        self.mapping: dict[State, State] = dict(items)
        if len(self.mapping) != len(items):
            raise PreconditionError("duplicate domain state")
        self.domain_ranks = np.asarray([space.rank(k) for k, _ in items], dtype=np.int64)
        self.image_ranks = np.asarray([space.rank(v) for _, v in items], dtype=np.int64)

    @classmethod
    def from_ranks(cls, space: StateSpace, domain_ranks, image_ranks) -> "PartialMap":
        return cls(space, {space.unrank(int(a)): space.unrank(int(b))
                           for a, b in zip(domain_ranks, image_ranks)})

    @classmethod
    def restrict(cls, m: TotalMap, domain: Iterable[Sequence[int]]) -> "PartialMap":
        return cls(m.space, {x: m.apply(x) for x in domain})

    @property
    def domain(self) -> list[State]:
        return list(self.mapping)

    def __len__(self):
        return len(self.mapping)

    def __getitem__(self, x):
        return self.mapping[tuple(x)]

    def __eq__(self, other):
        if not isinstance(other, PartialMap):
            return NotImplemented
        return self.space == other.space and self.mapping == other.mapping

    def __repr__(self):
        return f"PartialMap(levels={self.space.levels}, |A|={len(self)})"

    def domain_mask(self) -> np.ndarray:
        mask = np.zeros(self.space.size, dtype=bool)
        mask[self.domain_ranks] = True
        return mask

    def is_cooperative(self) -> Check:
        """x <= y in A implies gamma(x) <= gamma(y); witness is such a pair."""
        if len(self) < 2:
            return Check(True)
        X = self.space.coords[self.domain_ranks]
        G = self.space.coords[self.image_ranks]
        for t in range(len(X)):
            above = np.all(X >= X[t], axis=1)
            bad = above & ~np.all(G >= G[t], axis=1)
            if bad.any():
                u = int(np.argmax(bad))
                return Check(False, (self.domain[t], self.domain[u]))
        return Check(True)


def _cone(space: StateSpace, r: int) -> np.ndarray:
    X = space.coords
    return np.all(X <= X[r], axis=1) | np.all(X >= X[r], axis=1)


def greedy_antichain_extension(space: StateSpace, base: np.ndarray) -> list[int]:
    """Ranks added, in rank order, so every state is comparable to base or an added state.

    Each added state is incomparable to all of ``base`` and to the states
    added before it.
    """
    comparable = space.down_closure(base) | space.up_closure(base)
    added = []
    for r in np.flatnonzero(~comparable).tolist():
        if comparable[r]:
            continue
        added.append(r)
        comparable |= _cone(space, r)
    return added


def complete_antichain_cover(p: PartialMap) -> PartialMap:
    """Extend the domain so every state is comparable to some domain element.

    Added states are fixed points of the extended map.
    """
    if not p.is_cooperative():
        raise PreconditionError("partial map is not cooperative on its domain")
    added = greedy_antichain_extension(p.space, p.domain_mask())
    if not added:
        return p
    mapping = dict(p.mapping)
    for r in added:
        x = p.space.unrank(r)
        mapping[x] = x
    return PartialMap(p.space, mapping)


def smale_extend(p: PartialMap) -> TotalMap:
    """Smale extension via level-by-level dynamic programming.

    inf over U(z) is propagated downward through covering steps, the sup
    over L(z) upward, so each pass is O(size * n).
    """
    if not p.is_cooperative():
        raise PreconditionError("partial map is not cooperative on its domain")
    q = complete_antichain_cover(p)
    sp = q.space
    n = sp.n
    levels = sp.level_array
    sentinel = np.broadcast_to(levels, (sp.size, n))

    gamma = np.array(sentinel)
    gamma[q.domain_ranks] = sp.coords[q.image_ranks]

    # H[z] = inf gamma(U(z)); the sentinel p_i marks an empty U(z)
    H = np.array(gamma)
    for idx in reversed(sp.level_groups):
        for i in range(n):
            H[idx] = np.minimum(H[idx], H[sp.up_ranks[i, idx]])
    in_upper = np.all(H < levels, axis=1)

    # K[z] = sup of g over L(z) = {x in Pi_U : x <= z}
    K = np.where(in_upper[:, None], H, -1)
    for idx in sp.level_groups:
        for i in range(n):
            K[idx] = np.maximum(K[idx], K[sp.down_ranks[i, idx]])
    if (K < 0).any():
        raise AssertionError("L(z) empty for some z after the antichain cover")
    images = np.where(in_upper[:, None], H, K)
    return TotalMap.from_images(sp, images)


def smale_extend_naive(p: PartialMap) -> TotalMap:
    """Direct evaluation of the inf/sup definition; the reference for smale_extend."""
    if not p.is_cooperative():
        raise PreconditionError("partial map is not cooperative on its domain")
    q = complete_antichain_cover(p)
    sp = q.space
    A = [sp.coords[r] for r in q.domain_ranks]
    GA = [sp.coords[r] for r in q.image_ranks]
    g: dict[int, np.ndarray] = {}
    lower = []
    for r in range(sp.size):
        z = sp.coords[r]
        U = [GA[k] for k, a in enumerate(A) if np.all(a >= z)]
        if U:
            g[r] = np.min(U, axis=0)
        else:
            lower.append(r)
    upper = list(g)
    for r in lower:
        z = sp.coords[r]
        L = [g[u] for u in upper if np.all(sp.coords[u] <= z)]
        g[r] = np.max(L, axis=0)
    return TotalMap.from_images(sp, np.array([g[r] for r in range(sp.size)]))


def _level_of_domain(p: PartialMap) -> int:
    if len(p) == 0:
        raise PreconditionError("domain is empty")
    sums = p.space.sums[p.domain_ranks]
    r = int(sums[0])
    full = np.flatnonzero(p.space.sums == r)
    if not (sums == r).all() or len(full) != len(p):
        raise PreconditionError("domain is not a full level set {S(x) = r}")
    return r


def hyperplane_smale(p: PartialMap) -> TotalMap:
    """Smale extension for a domain {S(x) = r}: inf of gamma above, sup of gamma below."""
    _level_of_domain(p)
    sp = p.space
    X = sp.coords
    A = X[p.domain_ranks]
    GA = X[p.image_ranks]
    images = np.empty((sp.size, sp.n), dtype=np.int64)
    for r in range(sp.size):
        above = np.all(A >= X[r], axis=1)
        if above.any():
            images[r] = GA[above].min(axis=0)
        else:
            below = np.all(A <= X[r], axis=1)
            images[r] = GA[below].max(axis=0)
    return TotalMap.from_images(sp, images)


def discretize_map(space: StateSpace, samples) -> TotalMap:
    """Round (p-1) f(k/(p-1)) to the nearest level, ties upward.

    ``samples`` is an (size, n) array: row r holds f at the grid point
    unrank(r)/(p-1), with values in [0, 1]. Levels must be uniform.
    """
    if not space.is_uniform:
        raise PreconditionError("grid discretization needs uniform levels")
    vals = np.asarray(samples, dtype=float)
    if vals.shape != (space.size, space.n):
        raise PreconditionError(f"expected samples of shape {(space.size, space.n)}")
    if not np.isfinite(vals).all() or (vals < 0).any() or (vals > 1).any():
        raise InputRangeError("sampled values must lie in [0, 1]")
    scale = space.levels[0] - 1
    levels = np.floor(vals * scale + 0.5).astype(np.int64)
    return TotalMap.from_images(space, np.clip(levels, 0, scale))


def approximation_error(samples, m: TotalMap) -> float:
    """max over grid points of || m(k)/(p-1) - f(k/(p-1)) ||_inf."""
    vals = np.asarray(samples, dtype=float)
    scale = m.space.levels[0] - 1
    return float(np.abs(m.images / scale - vals).max())


def sample_on_grid(space: StateSpace, f) -> np.ndarray:
    """Evaluate f: [0,1]^n -> [0,1]^n at every grid point, in rank order."""
    scale = space.levels[0] - 1
    pts = space.coords / scale
    return np.array([f(x) for x in pts], dtype=float).reshape(space.size, space.n)


@dataclass(frozen=True)
class ModulusReport:
    """Empirical moduli of gamma on a grid hyperplane and of its Smale extension.

    All distances are sup-norm distances in grid units. ``eps_delta_ok``
    maps delta to whether sup{|g(x) - g(y)| : |x - y| < delta} stays within
    3 * sup{|gamma(a) - gamma(b)| : |a - b| < (2n+1) delta}.
    """

    n: int
    lipschitz_gamma: float
    lipschitz_g: float
    lipschitz_bound: float
    eps_delta_ok: dict
    evidence_only: bool = True

    @property
    def lipschitz_ok(self) -> bool:
        return self.lipschitz_g <= self.lipschitz_bound + 1e-12

    @property
    def ok(self) -> bool:
        return self.lipschitz_ok and all(self.eps_delta_ok.values())


def _sup_dist(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return np.abs(P[:, None, :] - Q[None, :, :]).max(axis=2)


def modulus_check(p: PartialMap, samples: Optional[Sequence[tuple]] = None) -> ModulusReport:
    """Compare the empirical Lipschitz constants of gamma and of its extension g.

    ``samples`` optionally restricts the Pi-side measurement to the given
    state pairs; by default every pair of states is used.
    """
    if len(p) < 2:
        raise NotApplicableError("need at least two domain points")
    _level_of_domain(p)
    sp = p.space
    n = sp.n
    g = hyperplane_smale(p)
    A = sp.coords[p.domain_ranks]
    GA = sp.coords[p.image_ranks]
    dA = _sup_dist(A, A)
    dGA = _sup_dist(GA, GA)
    off = dA > 0
    lip_gamma = float((dGA[off] / dA[off]).max())

    if samples is None:
        X = sp.coords
        dX = _sup_dist(X, X)
        dG = _sup_dist(g.images, g.images)
    else:
        xs = sp.ranks_of([a for a, _ in samples])
        ys = sp.ranks_of([b for _, b in samples])
        dX = np.abs(sp.coords[xs] - sp.coords[ys]).max(axis=1)
        dG = np.abs(g.images[xs] - g.images[ys]).max(axis=1)
    offx = dX > 0
    lip_g = float((dG[offx] / dX[offx]).max()) if offx.any() else 0.0

    eps_delta = {}
    for delta in range(1, max(sp.levels)):
        near_a = dA < (2 * n + 1) * delta
        eps3 = float(dGA[near_a].max())
        near_x = dX < delta
        eps_delta[delta] = float(dG[near_x].max()) <= 3 * eps3
    return ModulusReport(n, lip_gamma, lip_g, (6 * n + 3) * lip_gamma, eps_delta)


def random_cooperative_partial_map(space: StateSpace, rng: np.random.Generator,
                                   density: Optional[float] = None) -> PartialMap:
    """Random domain, images assigned in rank order above the join of earlier images below."""
    if density is None:
        density = rng.uniform(0.05, 0.6)
    mask = rng.random(space.size) < density
    if not mask.any():
        mask[rng.integers(space.size)] = True
    dom = np.flatnonzero(mask)
    X = space.coords
    levels = space.level_array
    images = np.empty((len(dom), space.n), dtype=np.int64)
    for t, r in enumerate(dom):
        below = np.all(X[dom[:t]] <= X[r], axis=1)
        lb = images[:t][below].max(axis=0) if below.any() else np.zeros(space.n, np.int64)
        images[t] = lb + (rng.random(space.n) * (levels - lb)).astype(np.int64)
    return PartialMap.from_ranks(space, dom, space.ranks_of(images))


def random_partial_on_level(space: StateSpace, r: int, rng: np.random.Generator,
                            into_level: bool = False) -> PartialMap:
    """Random gamma on the full level set {S = r} (any such gamma is cooperative)."""
    dom = np.flatnonzero(space.sums == r)
    if into_level:
        img = dom[rng.integers(len(dom), size=len(dom))]
    else:
        img = rng.integers(space.size, size=len(dom))
    return PartialMap.from_ranks(space, dom, img)
