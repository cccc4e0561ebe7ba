"""Generators for the named systems and for random test families.

Every generator re-verifies the properties its system is meant to have
and raises TheoremViolationError if one fails.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .antichain import d_exact, middle_layer
from .dynamics import TotalMap, orbit_decompose
from .embedding import thermometer_lift, trivial_extend
from .errors import (
    ConstructionFailureError,
    InfeasibleError,
    PreconditionError,
    TheoremViolationError,
)
from .irreducibility import (
    Permutation,
    _batched_strongly_connected,
    arcs_of,
    classify_irreducibility,
    g_pi_table,
    influence_arcs,
    strongly_connected,
)
from .monotonicity import is_cooperative, is_strongly_cooperative
from .smale import PartialMap, smale_extend
from .state import StateSpace


def _require(cond, what: str):
    if not cond:
        raise TheoremViolationError(f"generator postcondition failed: {what}")


def _cycle_of_length(m: TotalMap, length: int, within: Optional[np.ndarray] = None):
    """First cycle of the given length (optionally inside a rank mask), as a rank tuple."""
    for c in orbit_decompose(m).cycles:
        if len(c) == length and (within is None or within[list(c)].all()):
            return c
    return None


def make_g_pi(space: StateSpace, pi) -> TotalMap:
    """Coordinate permutation map (g_pi(x))_{pi(i)} = x_i."""
    if not isinstance(pi, Permutation):
        pi = Permutation(tuple(pi))
    return TotalMap(space, g_pi_table(space, pi))


def make_cycle_on_layer(n: int, p: int) -> TotalMap:
    """Cooperative map cycling the middle layer D in rank order.

    Built with trivial_extend, so states below D go to the bottom state and
    states above it to the top state; both of those are fixed.
    """
    space = StateSpace.uniform(n, p)
    D = middle_layer(space).ranks
    gamma = PartialMap.from_ranks(space, D, np.roll(D, -1))
    g = trivial_extend(space, gamma)
    _require(is_cooperative(g), "cycle_on_layer is cooperative")
    _require(_cycle_of_length(g, len(D)) is not None, "D is a single cycle")
    return g


def make_almost_coop_2d() -> TotalMap:
    """g(x1, x2) = (1 - x2, x1) on {0,1}^2: one 4-cycle, order reversal at <2,1>."""
    space = StateSpace.boolean(2)
    return TotalMap.from_function(space, lambda x: (1 - x[1], x[0]))


@dataclass(frozen=True)
class ExampleReport:
    """Verified properties of a generated example; ``cycle`` is a rank tuple."""

    name: str
    params: dict
    cycle: tuple[int, ...]
    properties: dict = field(default_factory=dict)


def make_almostex(n: int, with_report: bool = False):
    """Cooperative strongly semi-irreducible system on {0..3}^n with a d_{n,2}-cycle in M.

    S = {min x = 0, max x < 3}, M = {1 <= min x <= max x <= 2},
    L = {max x = 3}; pi is i -> i+1 mod n and f is make_cycle_on_layer(n, 2).
    """
    if n < 2:
        raise PreconditionError("need n >= 2")
    space = StateSpace.uniform(n, 4)
    f = make_cycle_on_layer(n, 2)
    pi = np.array([(i + 1) % n for i in range(n)])
    X = space.coords
    lo, hi = X.min(axis=1), X.max(axis=1)
    in_S = (lo == 0) & (hi < 3)
    in_M = (lo >= 1) & (hi <= 2)
    in_L = hi == 3

    Y = np.empty_like(X)
    # S and L: (g(x))_{pi(i)} depends only on x_i
    Y[:, pi] = np.where(X == 0, 0, np.where(X == 3, 3, np.where(in_L[:, None], 2, 1)))
    fm = f.images[f.space.ranks_of(X[in_M] - 1)]
    Y[in_M] = 1 + fm
    assert (in_S | in_M | in_L).all()
    g = TotalMap.from_images(space, Y)

    d = d_exact(n, 2)
    irr = classify_irreducibility(g)
    cyc = _cycle_of_length(g, d, in_M)
    _require(is_cooperative(g), "almostex is cooperative")
    _require(irr.strongly_semi_irreducible, "almostex is strongly semi-irreducible")
    _require(cyc is not None, "almostex has a d_{n,2}-cycle inside M")
    if not with_report:
        return g
    sc = is_strongly_cooperative(g)
    return g, ExampleReport("almostex", {"n": n}, cyc, {
        "cooperative": True,
        "strongly_semi_irreducible": True,
        "irreducible": irr.irreducible,
        "strongly_cooperative": bool(sc),  # reported, not asserted
        "sc_witness": None if sc else sc.sum_preserving.witness,
    })


def make_nopsirshortex(n: int, with_report: bool = False):
    """Cooperative system on {0..5}^n strongly irreducible along a d_{n,2}-cycle.

    h(1 + 3x) = 1 + 3 f(x) on M, h(y^{i+}) = h(y)^{pi(i)+} and
    h(y^{i-}) = h(y)^{pi(i)-}; g is the Smale extension of h.
    """
    if n < 2:
        raise PreconditionError("need n >= 2")
    space = StateSpace.uniform(n, 6)
    f = make_cycle_on_layer(n, 2)
    D = middle_layer(f.space).ranks
    Dx = f.space.coords[D]
    pi = [(i + 1) % n for i in range(n)]
    M = 1 + 3 * Dx
    HM = 1 + 3 * f.images[D]
    dom, img = [M], [HM]
    for i in range(n):
        for delta in (1, -1):
            y = M.copy()
            y[:, i] += delta
            h = HM.copy()
            h[:, pi[i]] += delta
            dom.append(y)
            img.append(h)
    h = PartialMap.from_ranks(space, space.ranks_of(np.concatenate(dom)),
                              space.ranks_of(np.concatenate(img)))
    _require(h.is_cooperative(), "h is cooperative on A")
    g = smale_extend(h)

    Mr = space.ranks_of(M)
    mask = np.zeros(space.size, dtype=bool)
    mask[Mr] = True
    cyc = _cycle_of_length(g, len(D), mask)
    _require(is_cooperative(g), "nopsirshortex is cooperative")
    _require(cyc is not None and set(cyc) == set(Mr.tolist()), "M is a cycle")
    arcs = influence_arcs(g, over=cyc)
    along = strongly_connected(n, arcs_of(arcs.intersection_strict()))
    _require(along, "strongly irreducible along M")
    if not with_report:
        return g
    return g, ExampleReport("nopsirshortex", {"n": n}, cyc, {
        "cooperative": True, "strongly_irreducible_along": True})


def make_irlong(n: int, with_report: bool = False):
    """Cooperative Boolean system irreducible along the d_{n,2}-cycle on D."""
    if n < 2:
        raise PreconditionError("need n >= 2")
    g = make_cycle_on_layer(n, 2)
    D = middle_layer(g.space).ranks
    cyc = _cycle_of_length(g, len(D))
    arcs = influence_arcs(g, over=cyc)
    _require(bool(_batched_strongly_connected(arcs.strict).all()), "irreducible along D")
    if not with_report:
        return g
    return g, ExampleReport("irlong", {"n": n}, cyc, {
        "cooperative": True, "irreducible_along": True})


# -- randomized construction on the Boolean middle layer -------------------

@dataclass(frozen=True)
class GermanexReport:
    """Outcome of make_germanex.

    ``attempts`` counts every draw of (a(s), a'(s)), accepted or rejected.
    ``pairs`` maps s = (i, j) (0-based, i < j) to the ranks of
    (a(s), b(s), a'(s), b'(s)).
    """

    n: int
    seed: int
    attempts: int
    pairs: dict
    cycle: tuple[int, ...]
    union_covers_all_arcs: bool
    weakly_irreducible_along: bool
    irreducible_along: bool
    disconnected_at: tuple   # pairs s whose G_{a(s)} is not strongly connected

    @property
    def claims_hold(self) -> bool:
        return self.union_covers_all_arcs and not self.irreducible_along


def _swap(X: np.ndarray, i: int, j: int) -> np.ndarray:
    Y = X.copy()
    Y[..., [i, j]] = Y[..., [j, i]]
    return Y


def make_germanex(n: int, seed: int = 0, max_retries: int = 1000):
    """Cooperative Boolean system with a d_{n,2}-cycle on D, weakly irreducible along D.

    For each pair s = (i, j), a(s) and a'(s) are drawn uniformly from
    D_s = {x in D : x_i > x_j}, b = swap_ij(a), b' = swap_ij(a'). Pairs are
    drawn in lexicographic order; a draw is rejected and redrawn if the four
    states are not distinct or meet a state used by an earlier pair. The
    prescribed arcs a -> b', b -> a' are closed into one cycle on D and g
    is the Smale extension of that cycle.

    Returns (g, GermanexReport).
    """
    space = StateSpace.boolean(n)
    d = d_exact(n, 2)
    need = 4 * comb(n, 2)
    if n < 3 or need > d:
        raise InfeasibleError(f"4*C({n},2) = {need} states needed, |D| = {d}")
    rng = np.random.default_rng(seed)
    D = middle_layer(space).ranks
    DX = space.coords[D]
    used: set[int] = set()
    pairs = {}
    attempts = 0
    for i, j in itertools.combinations(range(n), 2):
        Ds = DX[(DX[:, i] == 1) & (DX[:, j] == 0)]
        while True:
            attempts += 1
            if attempts > max_retries:
                raise ConstructionFailureError(
                    f"no admissible sample within {max_retries} draws", attempts)
            a, a2 = Ds[rng.integers(len(Ds), size=2)]
            quad = space.ranks_of(np.stack([a, _swap(a, i, j), a2, _swap(a2, i, j)]))
            T = set(quad.tolist())
            if len(T) == 4 and not (T & used):
                break
        used |= T
        pairs[(i, j)] = tuple(int(r) for r in quad)

    # prescribed arcs a -> b', b -> a'; each is a super-node entered at its
    # source and left at its target
    nodes = []
    for a, b, a2, b2 in pairs.values():
        nodes += [(a, b2), (b, a2)]
    touched = {r for q in pairs.values() for r in q}
    nodes += [(r, r) for r in D.tolist() if r not in touched]
    nodes.sort(key=lambda e: min(e))
    gamma = {src: tgt for src, tgt in nodes if src != tgt}
    for k, (_, exit_) in enumerate(nodes):
        gamma[exit_] = nodes[(k + 1) % len(nodes)][0]
    dom = np.array(sorted(gamma), dtype=np.int64)
    p = PartialMap.from_ranks(space, dom, [gamma[r] for r in dom.tolist()])
    g = smale_extend(p)

    cyc = _cycle_of_length(g, d)
    _require(cyc is not None and set(cyc) == set(D.tolist()), "D is a single cycle")
    _require(is_cooperative(g), "germanex is cooperative")
    for a, b, a2, b2 in pairs.values():
        _require(g.table[a] == b2 and g.table[b] == a2, "prescribed values")

    arcs = influence_arcs(g, over=cyc)
    union = arcs.union_weak()
    off = ~np.eye(n, dtype=bool)
    covers = bool(union[off].all())
    each = _batched_strongly_connected(arcs.strict)
    pos = {int(r): k for k, r in enumerate(arcs.ranks)}
    disconnected = tuple(s for s, q in pairs.items() if not each[pos[q[0]]])
    report = GermanexReport(
        n=n, seed=seed, attempts=attempts, pairs=pairs, cycle=cyc,
        union_covers_all_arcs=covers,
        weakly_irreducible_along=strongly_connected(n, arcs_of(union)),
        irreducible_along=bool(each.all()),
        disconnected_at=disconnected,
    )
    return g, report


# -- random families -------------------------------------------------------

def monotone_boolean_functions(k: int) -> list[np.ndarray]:
    """All monotone f: {0,1}^k -> {0,1} as truth tables in rank order."""
    space = StateSpace.boolean(k)
    up = space.up_ranks
    out = []
    for bits in itertools.product((0, 1), repeat=space.size):
        t = np.array(bits, dtype=np.int64)
        if all((t <= t[up[i]]).all() for i in range(k)):
            out.append(t)
    return out


def all_cooperative_boolean(n: int = 3):
    """Yield every cooperative map on {0,1}^n (20^3 = 8000 for n = 3)."""
    space = StateSpace.boolean(n)
    funcs = monotone_boolean_functions(n)
    strides = np.asarray(space.strides, dtype=np.int64)
    for combo in itertools.product(funcs, repeat=n):
        table = np.stack(combo, axis=1) @ strides
        yield TotalMap(space, table)


def random_strongly_cooperative(space: StateSpace, rng: np.random.Generator,
                                depth: Optional[int] = None) -> TotalMap:
    """Random composition of coordinate permutations and comparators.

    A comparator sorts a pair of coordinates with equal levels; permutations
    only move coordinates between equal levels. Both preserve S and order,
    so every composition is strongly cooperative.
    """
    n = space.n
    if depth is None:
        depth = int(rng.integers(1, 2 * n + 2))
    groups: dict[int, list[int]] = {}
    for i, p in enumerate(space.levels):
        groups.setdefault(p, []).append(i)
    X = space.coords.copy()
    for _ in range(depth):
        if rng.random() < 0.5:
            perm = np.arange(n)
            for idx in groups.values():
                perm[idx] = rng.permutation(idx)
            Y = np.empty_like(X)
            Y[:, perm] = X
            X = Y
        else:
            idx = [g for g in groups.values() if len(g) > 1]
            if not idx:
                continue
            grp = idx[int(rng.integers(len(idx)))]
            i, j = rng.choice(grp, size=2, replace=False)
            lo = np.minimum(X[:, i], X[:, j])
            hi = np.maximum(X[:, i], X[:, j])
            X[:, i], X[:, j] = lo, hi
    return TotalMap.from_images(space, X)


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(int(v) for v in rng.permutation(n)))


def lifted_g_pi(levels, pi) -> TotalMap:
    """Thermometer lift of g_pi on prod{0..p_i-1}, a strongly cooperative Boolean map."""
    base = StateSpace(tuple(levels))
    return thermometer_lift(make_g_pi(base, pi)).map
