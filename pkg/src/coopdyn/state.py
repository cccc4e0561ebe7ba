"""Mixed-radix state spaces under the cooperative (componentwise) order.

States are plain tuples of ints. Coordinates are 0-based everywhere in the
Python API; the last coordinate varies fastest in rank order.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InvalidIndexError, InvalidRankError, InvalidStateError, SpaceTooLargeError

State = tuple[int, ...]

MAX_STATES = 2**31


class Relation(enum.Enum):
    EQUAL = "equal"
    LESS = "less"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


class Comparison(NamedTuple):
    relation: Relation
    strictly_less: bool     # x << y: x_i < y_i in every coordinate
    strictly_greater: bool  # y << x


@dataclass(frozen=True)
class StateSpace:
    """The product of chains {0..p_1-1} x ... x {0..p_n-1}."""

    levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(p) for p in self.levels)
        if not levels:
            raise InvalidStateError("a state space needs at least one coordinate")
        if any(p < 2 for p in levels):
            raise InvalidStateError(f"every level must be >= 2, got {levels}")
        if math.prod(levels) > MAX_STATES:
            raise SpaceTooLargeError(f"space {levels} has more than 2^31 states")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def uniform(cls, n: int, p: int) -> "StateSpace":
        return cls((p,) * n)

    @classmethod
    def boolean(cls, n: int) -> "StateSpace":
        return cls((2,) * n)

    @property
    def n(self) -> int:
        return len(self.levels)

    @cached_property
    def size(self) -> int:
        return math.prod(self.levels)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.levels)) == 1

    @property
    def is_boolean(self) -> bool:
        return all(p == 2 for p in self.levels)

    @property
    def max_sum(self) -> int:
        """N = sum of (p_i - 1), the height of the lattice."""
        return sum(p - 1 for p in self.levels)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = []
        acc = 1
        for p in reversed(self.levels):
            out.append(acc)
            acc *= p
        return tuple(reversed(out))

    @property
    def bottom(self) -> State:
        return (0,) * self.n

    @property
    def top(self) -> State:
        return tuple(p - 1 for p in self.levels)

    def state(self, coords: Sequence[int]) -> State:
        """Validate ``coords`` against this space and return it as a tuple."""
        x = tuple(int(c) for c in coords)
        if len(x) != self.n:
            raise InvalidStateError(f"state {x} has dimension {len(x)}, space has {self.n}")
        for c, p in zip(x, self.levels):
            if not 0 <= c < p:
                raise InvalidStateError(f"state {x} out of range for levels {self.levels}")
        return x

    def rank(self, x: Sequence[int]) -> int:
        x = self.state(x)
        return sum(c * s for c, s in zip(x, self.strides))

    def unrank(self, r: int) -> State:
        r = int(r)
        if not 0 <= r < self.size:
            raise InvalidRankError(f"rank {r} not in [0, {self.size})")
        out = []
        for p in reversed(self.levels):
            r, c = divmod(r, p)
            out.append(c)
        return tuple(reversed(out))

    def states(self) -> Iterator[State]:
        """All states in rank order."""
        for r in range(self.size):
            yield self.unrank(r)

    def __contains__(self, x) -> bool:
        try:
            self.state(x)
        except (InvalidStateError, TypeError):
            return False
        return True

    # Table-driven helpers. All arrays are indexed by rank.

    @cached_property
    def coords(self) -> np.ndarray:
        """(size, n) array of coordinates, row r is unrank(r)."""
        idx = np.unravel_index(np.arange(self.size, dtype=np.int64), self.levels)
        arr = np.stack(idx, axis=1).astype(np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def level_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.int64)

    @cached_property
    def sums(self) -> np.ndarray:
        s = self.coords.sum(axis=1)
        s.setflags(write=False)
        return s

    @cached_property
    def up_ranks(self) -> np.ndarray:
        """(n, size): rank of x^{i+} (clamped at the top of coordinate i)."""
        ranks = np.arange(self.size, dtype=np.int64)
        out = np.empty((self.n, self.size), dtype=np.int64)
        for i, (p, s) in enumerate(zip(self.levels, self.strides)):
            out[i] = np.where(self.coords[:, i] < p - 1, ranks + s, ranks)
        out.setflags(write=False)
        return out

    @cached_property
    def down_ranks(self) -> np.ndarray:
        """(n, size): rank of x^{i-} (clamped at 0)."""
        ranks = np.arange(self.size, dtype=np.int64)
        out = np.empty((self.n, self.size), dtype=np.int64)
        for i, s in enumerate(self.strides):
            out[i] = np.where(self.coords[:, i] > 0, ranks - s, ranks)
        out.setflags(write=False)
        return out

    @cached_property
    def level_groups(self) -> tuple[np.ndarray, ...]:
        """Ranks grouped by S(x), from S=0 up to S=N."""
        order = np.argsort(self.sums, kind="stable")
        bounds = np.searchsorted(self.sums[order], np.arange(self.max_sum + 2))
        return tuple(order[bounds[k]:bounds[k + 1]] for k in range(self.max_sum + 1))

    def ranks_of(self, states) -> np.ndarray:
        """Vectorised rank of an (m, n) array of coordinates (unchecked)."""
        arr = np.asarray(states, dtype=np.int64).reshape(-1, self.n)
        return arr @ np.asarray(self.strides, dtype=np.int64)

    def down_closure(self, mask: np.ndarray) -> np.ndarray:
        """Boolean mask of states lying below some state of ``mask``."""
        out = np.array(mask, dtype=bool, copy=True)
        for idx in reversed(self.level_groups):
            for i in range(self.n):
                out[idx] |= out[self.up_ranks[i, idx]]
        return out

    def up_closure(self, mask: np.ndarray) -> np.ndarray:
        out = np.array(mask, dtype=bool, copy=True)
        for idx in self.level_groups:
            for i in range(self.n):
                out[idx] |= out[self.down_ranks[i, idx]]
        return out


def compare(space: StateSpace, x: Sequence[int], y: Sequence[int]) -> Comparison:
    x = space.state(x)
    y = space.state(y)
    le = all(a <= b for a, b in zip(x, y))
    ge = all(a >= b for a, b in zip(x, y))
    lt_all = all(a < b for a, b in zip(x, y))
    gt_all = all(a > b for a, b in zip(x, y))
    if le and ge:
        rel = Relation.EQUAL
    elif le:
        rel = Relation.LESS
    elif ge:
        rel = Relation.GREATER
    else:
        rel = Relation.INCOMPARABLE
    return Comparison(rel, lt_all, gt_all)


def leq(x: Sequence[int], y: Sequence[int]) -> bool:
    """Unchecked componentwise x <= y."""
    return all(a <= b for a, b in zip(x, y))


def comparable(x: Sequence[int], y: Sequence[int]) -> bool:
    return leq(x, y) or leq(y, x)


def state_sum(x: Sequence[int]) -> int:
    """S(x), the sum of the coordinates."""
    return sum(x)


def step(space: StateSpace, x: Sequence[int], i: int, direction: str) -> State:
    """Return x^{i+} (``direction='up'``) or x^{i-} (``'down'``), clamped."""
    x = space.state(x)
    if not 0 <= i < space.n:
        raise InvalidIndexError(f"coordinate {i} not in [0, {space.n})")
    y = list(x)
    if direction == "up":
        y[i] = min(x[i] + 1, space.levels[i] - 1)
    elif direction == "down":
        y[i] = max(x[i] - 1, 0)
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    return tuple(y)
