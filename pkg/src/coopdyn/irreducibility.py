"""Influence digraphs, irreducibility classes and periodic-orbit bounds.

Node labels are 0-based in the API; the edge-list and DOT exports print
them 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .antichain import d_exact
from .dynamics import OrbitDecomposition, TotalMap, orbit_decompose
from .errors import (
    ContractInapplicableError,
    InvalidAttractorError,
    InvalidPermutationError,
    NotIrreducibleError,
    TheoremViolationError,
)
from .monotonicity import is_cooperative, is_strongly_cooperative
from .state import StateSpace


# -- permutations -----------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """A bijection of {0..n-1}; ``images[i]`` is pi(i)."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(v) for v in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise InvalidPermutationError(f"{imgs} is not a permutation")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def rotation(cls, n: int) -> "Permutation":
        """The cycle i -> i+1 mod n."""
        return cls(tuple((i + 1) % n for i in range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(n))
        for c in cycles:
            for a, b in zip(c, list(c[1:]) + [c[0]]):
                img[a] = b
        return cls(tuple(img))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for s in range(self.n):
            if s in seen:
                continue
            c = []
            i = s
            while i not in seen:
                seen.add(i)
                c.append(i)
                i = self.images[i]
            out.append(tuple(c))
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if self.n else 1

    def is_cyclic(self) -> bool:
        return len(self.cycles()) == 1


# -- strong connectivity ----------------------------------------------------

def scc(n: int, arcs: Iterable[tuple[int, int]]) -> list[list[int]]:
    """Strongly connected components (iterative Tarjan), each sorted, ordered by smallest node."""
    succ: list[list[int]] = [[] for _ in range(n)]
    for a, b in arcs:
        succ[a].append(b)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < len(succ[v]):
                work[-1] = (v, k + 1)
                w = succ[v][k]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps


def strongly_connected(n: int, arcs: Iterable[tuple[int, int]]) -> bool:
    return len(scc(n, arcs)) == 1


def arcs_of(matrix: np.ndarray) -> list[tuple[int, int]]:
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(matrix))]


def _batched_strongly_connected(mats: np.ndarray) -> np.ndarray:
    """Strong connectivity of a stack of (k, n, n) adjacency matrices via boolean closure."""
    k, n, _ = mats.shape
    if n == 1:
        return np.ones(k, dtype=bool)
    R = mats.astype(bool) | np.eye(n, dtype=bool)[None]
    steps = 1
    while steps < n:
        R = np.einsum("kij,kjl->kil", R.astype(np.uint8), R.astype(np.uint8)) > 0
        steps *= 2
    return R.all(axis=(1, 2))


# -- arc sets ---------------------------------------------------------------

@dataclass(frozen=True)
class InfluenceArcSets:
    """Per-state arc sets over a subset of states.

    ``weak[k, i, j]`` is <i, j> in A*_x and ``strict[k, i, j]`` is <i, j> in
    A_x for x = unrank(ranks[k]).
    """

    space: StateSpace
    ranks: np.ndarray
    weak: np.ndarray
    strict: np.ndarray

    @property
    def n(self) -> int:
        return self.space.n

    def intersection_strict(self) -> np.ndarray:
        return self.strict.all(axis=0)

    def intersection_weak(self) -> np.ndarray:
        return self.weak.all(axis=0)

    def union_weak(self) -> np.ndarray:
        return self.weak.any(axis=0)

    def each_strict_connected(self) -> np.ndarray:
        return _batched_strongly_connected(self.strict)


def influence_arcs(m: TotalMap, over: Optional[Sequence[int]] = None) -> InfluenceArcSets:
    """A*_x and A_x for every state, or for the states of a cycle ``over`` (ranks).

    <i,j> in A*_x iff g(x)_j < g(x^{i+})_j or g(x^{i-})_j < g(x)_j; A_x
    additionally requires both strict inequalities when 0 < x_i < p_i - 1.
    """
    sp = m.space
    if over is None:
        ranks = np.arange(sp.size)
    else:
        ranks = np.asarray(list(over), dtype=np.int64)
        d = orbit_decompose(m)
        if not any(sorted(c) == sorted(ranks.tolist()) for c in d.cycles):
            raise InvalidAttractorError("states do not form a cycle of the map")
    G = m.images
    X = sp.coords[ranks]
    Gx = G[ranks]
    n = sp.n
    weak = np.zeros((len(ranks), n, n), dtype=bool)
    strict = np.zeros_like(weak)
    for i in range(n):
        gu = G[sp.up_ranks[i, ranks]]
        gd = G[sp.down_ranks[i, ranks]]
        rise_up = Gx < gu
        rise_down = gd < Gx
        weak[:, i, :] = rise_up | rise_down
        interior = (X[:, i] > 0) & (X[:, i] < sp.levels[i] - 1)
        strict[:, i, :] = np.where(interior[:, None], rise_up & rise_down, weak[:, i, :])
    return InfluenceArcSets(sp, ranks, weak, strict)


@dataclass(frozen=True)
class AttractorIrreducibility:
    cycle: tuple[int, ...]
    strongly_irreducible_along: bool
    irreducible_along: bool
    weakly_irreducible_along: bool


@dataclass(frozen=True)
class IrreducibilityReport:
    strongly_irreducible: bool
    strongly_semi_irreducible: bool
    irreducible: bool
    weakly_irreducible: bool
    attractors: tuple[AttractorIrreducibility, ...]
    graphs: dict = field(default_factory=dict, repr=False, compare=False)

    def along(self, cycle_ranks) -> AttractorIrreducibility:
        key = sorted(cycle_ranks)
        for a in self.attractors:
            if sorted(a.cycle) == key:
                return a
        raise InvalidAttractorError("not an attractor of this map")


def _along(arcs: InfluenceArcSets, cycle) -> AttractorIrreducibility:
    pos = {int(r): k for k, r in enumerate(arcs.ranks)}
    sel = [pos[r] for r in cycle]
    strict = arcs.strict[sel]
    weak = arcs.weak[sel]
    n = arcs.n
    return AttractorIrreducibility(
        cycle=tuple(cycle),
        strongly_irreducible_along=strongly_connected(n, arcs_of(strict.all(axis=0))),
        irreducible_along=bool(_batched_strongly_connected(strict).all()),
        weakly_irreducible_along=strongly_connected(n, arcs_of(weak.any(axis=0))),
    )


def classify_irreducibility(m: TotalMap, decomposition: Optional[OrbitDecomposition] = None) -> IrreducibilityReport:
    arcs = influence_arcs(m)
    n = m.space.n
    d = decomposition or orbit_decompose(m)
    inter_strict = arcs.intersection_strict()
    inter_weak = arcs.intersection_weak()
    union_weak = arcs.union_weak()
    return IrreducibilityReport(
        strongly_irreducible=strongly_connected(n, arcs_of(inter_strict)),
        strongly_semi_irreducible=strongly_connected(n, arcs_of(inter_weak)),
        irreducible=bool(arcs.each_strict_connected().all()),
        weakly_irreducible=strongly_connected(n, arcs_of(union_weak)),
        attractors=tuple(_along(arcs, c) for c in d.cycles),
        graphs={"strong": inter_strict, "semi": inter_weak, "weak": union_weak},
    )


def edge_list(matrix: np.ndarray) -> str:
    """``i j`` per line, 1-based."""
    return "".join(f"{i + 1} {j + 1}\n" for i, j in arcs_of(matrix))


def to_dot(matrix: np.ndarray, name: str = "G") -> str:
    n = matrix.shape[0]
    lines = [f"digraph {name} {{"]
    lines += [f"  {i + 1};" for i in range(n)]
    lines += [f"  {i + 1} -> {j + 1};" for i, j in arcs_of(matrix)]
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- permutation maps and extraction ---------------------------------------

def g_pi_table(space: StateSpace, pi: Permutation) -> np.ndarray:
    """Rank table of g_pi, (g_pi(x))_{pi(i)} = x_i; raises if it leaves the space."""
    if pi.n != space.n:
        raise InvalidPermutationError("permutation size does not match the dimension")
    X = space.coords
    Y = np.empty_like(X)
    Y[:, list(pi.images)] = X
    if (Y >= space.level_array).any():
        r = int(np.argmax((Y >= space.level_array).any(axis=1)))
        raise InvalidPermutationError(
            f"g_pi maps {space.unrank(r)} outside the space {space.levels}")
    return space.ranks_of(Y)


def extract_cyclic_pi(m: TotalMap, report: Optional[IrreducibilityReport] = None) -> Permutation:
    """Recover the cyclic pi with g = g_pi from a cooperative irreducible map.

    pi(i) = j iff <i, j> is an arc of A at the bottom state.
    """
    if not is_cooperative(m):
        raise NotIrreducibleError("map is not cooperative")
    report = report or classify_irreducibility(m)
    if not report.irreducible:
        raise NotIrreducibleError("map is not irreducible")
    if not is_strongly_cooperative(m):
        raise TheoremViolationError("cooperative irreducible map is not strongly cooperative")
    bottom = m.space.rank(m.space.bottom)
    A0 = influence_arcs(m).strict[bottom]
    n = m.space.n
    images = []
    for i in range(n):
        js = np.flatnonzero(A0[i])
        if len(js) != 1:
            raise TheoremViolationError(f"node {i} has out-degree {len(js)} at the bottom state")
        images.append(int(js[0]))
    try:
        pi = Permutation(tuple(images))
    except InvalidPermutationError as exc:
        raise TheoremViolationError(str(exc)) from exc
    if not pi.is_cyclic():
        raise TheoremViolationError(f"extracted {pi} is not cyclic")
    try:
        table = g_pi_table(m.space, pi)
    except InvalidPermutationError as exc:
        raise TheoremViolationError(str(exc)) from exc
    if not np.array_equal(table, m.table):
        raise TheoremViolationError("map differs from g_pi")
    return pi


def _boolean_subsystem(levels_n: int, fn) -> TotalMap:
    sp = StateSpace.boolean(levels_n)
    return TotalMap.from_function(sp, fn)


def _pi_on_persistent(m: TotalMap) -> dict[int, int]:
    """Permutation (as a dict on the coordinate labels 0..n-1) per the induction on n."""
    sp = m.space
    n = sp.n
    if n == 1:
        return {0: 0}
    d = orbit_decompose(m)
    persistent = set()
    for c in d.cycles:
        persistent.update(c)
    sigma = {}
    singletons_persistent = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        img = sp.coords[m.table[sp.rank(e)]]
        ones = np.flatnonzero(img)
        if len(ones) != 1:
            raise TheoremViolationError("singleton not mapped to a singleton")
        sigma[i] = int(ones[0])
        if sp.rank(e) in persistent:
            singletons_persistent.append(i)
    I = singletons_persistent
    if not I:
        raise TheoremViolationError("no persistent singleton")
    pi = {i: sigma[i] for i in I}
    if sorted(pi.values()) != sorted(I):
        raise TheoremViolationError("sigma restricted to I is not a permutation of I")
    J = [j for j in range(n) if j not in set(I)]
    if not J:
        return pi

    def f(y):
        x = [0] * n
        for i in I:
            x[i] = 1
        for k, j in enumerate(J):
            x[j] = y[k]
        gx = m.apply(x)
        return tuple(gx[j] for j in J)

    sub = _boolean_subsystem(len(J), f)
    if not is_strongly_cooperative(sub):
        raise TheoremViolationError("reduced system is not strongly cooperative")
    rho = _pi_on_persistent(sub)
    for k, v in rho.items():
        pi[J[k]] = J[v]
    return pi


def extract_pi_boolean_sc(m: TotalMap) -> Permutation:
    """pi with g(x) = g_pi(x) on every persistent state of a strongly cooperative Boolean map."""
    if not m.space.is_boolean:
        raise ContractInapplicableError("extraction is only valid for Boolean systems")
    if not is_strongly_cooperative(m):
        raise ContractInapplicableError("map is not strongly cooperative")
    pimap = _pi_on_persistent(m)
    pi = Permutation(tuple(pimap[i] for i in range(m.space.n)))
    table = g_pi_table(m.space, pi)
    d = orbit_decompose(m)
    for c in d.cycles:
        for r in c:
            if table[r] != m.table[r]:
                raise TheoremViolationError(
                    f"g and g_pi differ at persistent state {m.space.unrank(r)}")
    return pi


# -- Landau function and orbit bounds --------------------------------------

def _primes_upto(k: int) -> list[int]:
    if k < 2:
        return []
    sieve = bytearray([1]) * (k + 1)
    sieve[0:2] = b"\x00\x00"
    for q in range(2, int(k**0.5) + 1):
        if sieve[q]:
            sieve[q * q::q] = bytearray(len(sieve[q * q::q]))
    return [q for q in range(k + 1) if sieve[q]]


def landau_R(k: int) -> int:
    """Maximum order of a permutation of k elements.

    DP over primes: best[b] is the largest product of prime powers of
    distinct primes with total size at most b.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    best = [1] * (k + 1)
    for q in _primes_upto(k):
        new = best[:]
        power = q
        while power <= k:
            for b in range(power, k + 1):
                cand = best[b - power] * power
                if cand > new[b]:
                    new[b] = cand
            power *= q
        best = new
    return best[k]


@dataclass(frozen=True)
class BoundCheck:
    name: str
    cycle: tuple[int, ...]
    length: int
    bound: int
    holds: bool


@dataclass(frozen=True)
class OrbitBoundReport:
    cycle_lengths: tuple[int, ...]
    cooperative: bool
    strongly_cooperative: bool
    irreducible: bool
    checks: tuple[BoundCheck, ...]
    reference: dict  # values reported without being asserted

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)

    @property
    def applied(self) -> set[str]:
        return {c.name for c in self.checks}


def check_orbit_bounds(m: TotalMap) -> OrbitBoundReport:
    """Check every proven cycle-length bound whose hypotheses the map satisfies.

    Hypotheses are recomputed here; nothing is taken from the caller.
    """
    sp = m.space
    n = sp.n
    d = orbit_decompose(m)
    coop = bool(is_cooperative(m))
    sc = bool(is_strongly_cooperative(m)) if coop else False
    irr = classify_irreducibility(m, d)
    N = sp.max_sum
    checks = []

    def add(name, cyc, bound):
        checks.append(BoundCheck(name, cyc, len(cyc), bound, len(cyc) <= bound))

    for cyc, along in zip(d.cycles, irr.attractors):
        if coop and sp.is_uniform:
            add("antichain", cyc, d_exact(n, sp.levels[0]))
        if sc:
            add("strongly-cooperative-R(N)", cyc, landau_R(N))
        if coop and irr.irreducible:
            add("irreducible-n", cyc, n)
        if coop and sp.is_boolean and along.strongly_irreducible_along:
            add("boolean-strongly-irreducible-along-n", cyc, n)
        if sc and sp.is_boolean and along.weakly_irreducible_along:
            add("boolean-sc-weakly-irreducible-along-n", cyc, n)
    return OrbitBoundReport(
        cycle_lengths=tuple(len(c) for c in d.cycles),
        cooperative=coop,
        strongly_cooperative=sc,
        irreducible=irr.irreducible,
        checks=tuple(checks),
        reference={"R(N)": landau_R(N) if N >= 1 else 1, "R(n)": landau_R(n)},
    )
