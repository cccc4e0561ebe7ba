"""Total maps on a state space and their functional-graph structure."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidRankError, PreconditionError
from .state import State, StateSpace

TABLE_CAP = 1 << 24


class TotalMap:
    """A map g: Pi -> Pi stored as a rank table.

    ``table[r]`` is the rank of g(unrank(r)). Instances are treated as
    immutable; the table is marked read-only.
    """

    def __init__(self, space: StateSpace, table):
        table = np.array(table, dtype=np.int64, copy=True).reshape(-1)
        if table.shape[0] != space.size:
            raise PreconditionError(
                f"table has {table.shape[0]} entries, space has {space.size} states")
        if table.size and (table.min() < 0 or table.max() >= space.size):
            raise InvalidRankError("table entries must be ranks in [0, size)")
        table.setflags(write=False)
        self.space = space
        self.table = table

    @classmethod
    def from_function(cls, space: StateSpace, fn: Callable[[State], Sequence[int]]) -> "TotalMap":
        return cls(space, [space.rank(fn(x)) for x in space.states()])

    @classmethod
    def from_images(cls, space: StateSpace, images) -> "TotalMap":
        """Build from an (size, n) array of image coordinates in rank order."""
        images = np.asarray(images, dtype=np.int64)
        if images.shape != (space.size, space.n):
            raise PreconditionError("image array has the wrong shape")
        if (images < 0).any() or (images >= space.level_array).any():
            raise InvalidRankError("image coordinates out of range")
        return cls(space, space.ranks_of(images))

    @classmethod
    def identity(cls, space: StateSpace) -> "TotalMap":
        return cls(space, np.arange(space.size))

    @classmethod
    def constant(cls, space: StateSpace, value: Sequence[int]) -> "TotalMap":
        return cls(space, np.full(space.size, space.rank(value)))

    @cached_property
    def images(self) -> np.ndarray:
        """(size, n) coordinates of g(x) for every x in rank order."""
        return self.space.coords[self.table]

    def apply(self, x: Sequence[int]) -> State:
        return self.space.unrank(self.table[self.space.rank(x)])

    __call__ = apply

    def trajectory(self, x0: Sequence[int], t: int) -> State:
        if t < 0:
            raise PreconditionError("t must be non-negative")
        r = self.space.rank(x0)
        for _ in range(t):
            r = self.table[r]
        return self.space.unrank(r)

    def orbit(self, x0: Sequence[int], t: int) -> list[State]:
        """x(0), ..., x(t)."""
        r = self.space.rank(x0)
        out = [self.space.unrank(r)]
        for _ in range(t):
            r = int(self.table[r])
            out.append(self.space.unrank(r))
        return out

    def __eq__(self, other):
        if not isinstance(other, TotalMap):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.space, self.table.tobytes()))

    def __repr__(self):
        return f"TotalMap(levels={self.space.levels})"


class LazyMap:
    """Function-backed map for spaces too large to tabulate."""

    def __init__(self, space: StateSpace, fn: Callable[[State], State]):
        self.space = space
        self._fn = fn

    def apply(self, x: Sequence[int]) -> State:
        return self.space.state(self._fn(self.space.state(x)))

    __call__ = apply

    def trajectory(self, x0: Sequence[int], t: int) -> State:
        x = self.space.state(x0)
        for _ in range(t):
            x = self.apply(x)
        return x

    def tabulate(self) -> TotalMap:
        if self.space.size > TABLE_CAP:
            raise PreconditionError(f"space has {self.space.size} states, above the table cap")
        return TotalMap.from_function(self.space, self._fn)


@dataclass(frozen=True)
class OrbitDecomposition:
    """Cycles and transients of the functional graph of a TotalMap.

    ``cycles`` hold ranks, each cycle starting at its minimum rank and
    listed in order of application of g; cycles are sorted by that minimum.
    """

    space: StateSpace
    cycles: tuple[tuple[int, ...], ...]
    cycle_index: np.ndarray
    steps_to_cycle: np.ndarray

    def cycle_states(self, k: int) -> list[State]:
        return [self.space.unrank(r) for r in self.cycles[k]]

    @property
    def cycle_lengths(self) -> list[int]:
        return [len(c) for c in self.cycles]

    @property
    def n_transient(self) -> int:
        return int(np.count_nonzero(self.steps_to_cycle))


def orbit_decompose(m: TotalMap) -> OrbitDecomposition:
    size = m.space.size
    table = m.table.tolist()
    color = [0] * size  # 0 unvisited, 1 on current path, 2 resolved
    cyc = [-1] * size
    depth = [0] * size
    raw_cycles: list[list[int]] = []
    for start in range(size):
        if color[start]:
            continue
        path = []
        r = start
        while color[r] == 0:
            color[r] = 1
            path.append(r)
            r = table[r]
        if color[r] == 1:
            # closed a new cycle; it begins at r within the path
            pos = path.index(r)
            members = path[pos:]
            k = len(raw_cycles)
            raw_cycles.append(members)
            for v in members:
                cyc[v] = k
                depth[v] = 0
                color[v] = 2
            tail = path[:pos]
        else:
            tail = path
        for v in reversed(tail):
            nxt = table[v]
            cyc[v] = cyc[nxt]
            depth[v] = depth[nxt] + 1
            color[v] = 2

    # canonical form: rotate to min rank, sort cycles by min rank
    rotated = []
    for members in raw_cycles:
        j = members.index(min(members))
        rotated.append(tuple(members[j:] + members[:j]))
    order = sorted(range(len(rotated)), key=lambda k: rotated[k][0])
    remap = np.empty(len(rotated), dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    cycle_index = remap[np.asarray(cyc, dtype=np.int64)] if size else np.zeros(0, np.int64)
    return OrbitDecomposition(
        space=m.space,
        cycles=tuple(rotated[k] for k in order),
        cycle_index=cycle_index,
        steps_to_cycle=np.asarray(depth, dtype=np.int64),
    )


def persistent_states(d: OrbitDecomposition) -> set[State]:
    """States lying on some cycle of the decomposition."""
    return {d.space.unrank(r) for c in d.cycles for r in c}


def persistent_mask(d: OrbitDecomposition) -> np.ndarray:
    mask = np.zeros(d.space.size, dtype=bool)
    for c in d.cycles:
        mask[list(c)] = True
    return mask
