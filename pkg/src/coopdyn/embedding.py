"""Cooperative embeddings of arbitrary finite systems."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from ._check import Check
from .antichain import d_exact, is_unordered, level_set, middle_layer
from .dynamics import TABLE_CAP, LazyMap, TotalMap
from .errors import FeasibilityError, PreconditionError, TheoremViolationError
from .monotonicity import is_cooperative
from .smale import PartialMap, greedy_antichain_extension
from .state import State, StateSpace


@dataclass(frozen=True)
class Embedding:
    """Injective phi: source -> target, stored as target ranks indexed by source rank."""

    source: StateSpace
    target: StateSpace
    phi: np.ndarray

    def __post_init__(self):
        if len(np.unique(self.phi)) != len(self.phi):
            raise PreconditionError("phi is not injective")

    def __call__(self, x) -> State:
        return self.target.unrank(int(self.phi[self.source.rank(x)]))

    @property
    def image(self) -> list[State]:
        return [self.target.unrank(int(r)) for r in self.phi]


def embedding_feasible(m: int, q: int, n: int, p: int) -> bool:
    """Every system on {0..q-1}^m embeds cooperatively in {0..p-1}^n iff q^m <= d_{n,p}."""
    return q**m <= d_exact(n, p)


def trivial_extend(space: StateSpace, gamma: Union[PartialMap, dict]) -> TotalMap:
    """Cooperative g agreeing with gamma on its unordered domain A.

    A is grown greedily (rank order) to a maximal unordered set A^; states
    of A^ outside A are fixed, states below A^ go to the bottom state and
    states above A^ to the top state. An empty A uses the middle level set.
    """
    if not isinstance(gamma, PartialMap):
        gamma = PartialMap(space, gamma)
    if not is_unordered(space, gamma.domain):
        raise PreconditionError("domain of gamma is not unordered")
    if len(gamma):
        base = gamma.domain_mask()
        extra = greedy_antichain_extension(space, base)
    else:
        base = np.zeros(space.size, dtype=bool)
        extra = level_set(space, space.max_sum // 2).ranks.tolist()
    hat = base.copy()
    hat[extra] = True

    below = space.down_closure(hat)
    table = np.where(below, space.rank(space.bottom), space.rank(space.top))
    table[extra] = extra
    table[gamma.domain_ranks] = gamma.image_ranks
    return TotalMap(space, table)


def verify_conjugacy(f: TotalMap, g, phi) -> Check:
    """g(phi(x)) = phi(f(x)) for all x; witness is the first failing source state."""
    if isinstance(phi, Embedding):
        phi = phi.phi
    phi = np.asarray(phi, dtype=np.int64)
    if isinstance(g, TotalMap):
        lhs = g.table[phi]
    else:
        tgt = g.space
        lhs = np.array([tgt.rank(g.apply(tgt.unrank(int(r)))) for r in phi], dtype=np.int64)
    rhs = phi[f.table]
    bad = lhs != rhs
    if bad.any():
        return Check(False, f.space.unrank(int(np.argmax(bad))))
    return Check(True)


def embed_system(f: TotalMap, target: StateSpace) -> tuple[Embedding, TotalMap]:
    """Embed (Sigma, f) into a cooperative system on ``target`` through the middle layer."""
    D = middle_layer(target)
    if f.space.size > len(D):
        raise FeasibilityError(
            f"source has {f.space.size} states but the middle layer of {target.levels} "
            f"has only {len(D)}")
    phi = D.ranks[: f.space.size]
    gamma = PartialMap.from_ranks(target, phi, phi[f.table])
    g = trivial_extend(target, gamma)
    emb = Embedding(f.space, target, phi)
    if not verify_conjugacy(f, g, phi) or not is_cooperative(g):
        raise TheoremViolationError("embedding construction failed its postcondition")
    return emb, g


@dataclass(frozen=True)
class ThermometerLift:
    """Unary lift of a map on prod{0..p_i-1} to {0,1}^N, N = sum(p_i - 1).

    Block i of the lifted coordinates holds p_i - 1 bits; psi sets the first
    x_i of them. ``map`` is a TotalMap when 2^N fits the table cap and a
    LazyMap otherwise.
    """

    base: StateSpace
    lifted: StateSpace
    blocks: tuple[range, ...]
    map: Union[TotalMap, LazyMap]

    def psi(self, x) -> State:
        x = self.base.state(x)
        out = []
        for xi, blk in zip(x, self.blocks):
            out.extend(1 if xi >= ell else 0 for ell in range(1, len(blk) + 1))
        return tuple(out)

    def block_counts(self, y) -> State:
        y = self.lifted.state(y)
        return tuple(sum(y[j] for j in blk) for blk in self.blocks)

    def retract(self, y) -> State:
        """z(y): sort each block so its ones come first."""
        return self.psi(self.block_counts(y))

    @cached_property
    def psi_ranks(self) -> np.ndarray:
        return _psi_matrix(self.base, self.blocks, self.base.coords) @ np.asarray(
            self.lifted.strides, dtype=np.int64)


def _blocks(levels) -> tuple[range, ...]:
    out = []
    start = 0
    for p in levels:
        out.append(range(start, start + p - 1))
        start += p - 1
    return tuple(out)


def _psi_matrix(base: StateSpace, blocks, X: np.ndarray) -> np.ndarray:
    N = base.max_sum
    Y = np.zeros((X.shape[0], N), dtype=np.int64)
    for i, blk in enumerate(blocks):
        for ell, j in enumerate(blk, start=1):
            Y[:, j] = X[:, i] >= ell
    return Y


def thermometer_lift(m: TotalMap) -> ThermometerLift:
    base = m.space
    blocks = _blocks(base.levels)
    lifted = StateSpace.boolean(base.max_sum)
    if lifted.size <= TABLE_CAP:
        Y = lifted.coords
        counts = np.stack([Y[:, list(blk)].sum(axis=1) for blk in blocks], axis=1)
        gx = m.images[base.ranks_of(counts)]
        fmap = TotalMap.from_images(lifted, _psi_matrix(base, blocks, gx))
        return ThermometerLift(base, lifted, blocks, fmap)

    lift = ThermometerLift(base, lifted, blocks, None)  # type: ignore[arg-type]

    def f(y):
        return lift.psi(m.apply(lift.block_counts(y)))

    object.__setattr__(lift, "map", LazyMap(lifted, f))
    return lift
