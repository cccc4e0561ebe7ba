"""Line-oriented text format for total, partial and sampled maps.

    ddsmap 1
    n 2
    levels 2 2
    kind total
    0 0 -> 1 0
    ...

``#`` starts a comment; blank lines are ignored. ``kind sampled`` bodies
hold real values in [0, 1] on the right of ``->``, one line per grid state,
for use with discretize_map.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .dynamics import TotalMap
from .errors import (
    DuplicateStateError,
    IncompleteMapError,
    InvalidStateError,
    MapFileError,
    RangeError,
    SpaceTooLargeError,
)
from .smale import PartialMap
from .state import StateSpace

MAGIC = "ddsmap"
VERSION = 1
KINDS = ("total", "partial", "sampled")


@dataclass(frozen=True)
class SampledMap:
    """Values of f: [0,1]^n -> [0,1]^n at the grid points, rows in rank order."""

    space: StateSpace
    values: np.ndarray


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _ints(tokens, no):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise MapFileError(f"expected integers, got {' '.join(tokens)!r}", no) from None


def parse_map_file(text: str) -> Union[TotalMap, PartialMap, SampledMap]:
    it = _lines(text)
    header = []
    for _ in range(4):
        try:
            header.append(next(it))
        except StopIteration:
            raise MapFileError("truncated header", None) from None
    (n1, l1), (n2, l2), (n3, l3), (n4, l4) = header
    if l1.split() != [MAGIC, str(VERSION)]:
        raise MapFileError(f"expected '{MAGIC} {VERSION}'", n1)
    t = l2.split()
    if len(t) != 2 or t[0] != "n":
        raise MapFileError("expected 'n <int>'", n2)
    n = _ints(t[1:], n2)[0]
    t = l3.split()
    if not t or t[0] != "levels":
        raise MapFileError("expected 'levels p1 ... pn'", n3)
    levels = _ints(t[1:], n3)
    if len(levels) != n:
        raise MapFileError(f"{len(levels)} levels given for n = {n}", n3)
    t = l4.split()
    if len(t) != 2 or t[0] != "kind" or t[1] not in KINDS:
        raise MapFileError("expected 'kind total|partial|sampled'", n4)
    kind = t[1]
    try:
        space = StateSpace(tuple(levels))
    except (InvalidStateError, SpaceTooLargeError) as exc:
        raise MapFileError(str(exc), n3) from None

    seen: dict[int, int] = {}
    images = {}
    for no, line in it:
        if "->" not in line:
            raise MapFileError("expected 'x1 ... xn -> y1 ... yn'", no)
        left, right = line.split("->", 1)
        x = _ints(left.split(), no)
        if len(x) != n:
            raise MapFileError(f"state has {len(x)} coordinates, expected {n}", no)
        if any(not 0 <= v < p for v, p in zip(x, levels)):
            raise RangeError(f"state {tuple(x)} out of range for levels {tuple(levels)}", no)
        if kind == "sampled":
            try:
                y = [float(v) for v in right.split()]
            except ValueError:
                raise MapFileError("expected real values", no) from None
            if len(y) != n:
                raise MapFileError(f"value has {len(y)} coordinates, expected {n}", no)
            if not all(0.0 <= v <= 1.0 for v in y):
                raise RangeError(f"sampled value {tuple(y)} outside [0, 1]", no)
        else:
            y = _ints(right.split(), no)
            if len(y) != n:
                raise MapFileError(f"image has {len(y)} coordinates, expected {n}", no)
            if any(not 0 <= v < p for v, p in zip(y, levels)):
                raise RangeError(f"image {tuple(y)} out of range for levels {tuple(levels)}", no)
        r = space.rank(x)
        if r in seen:
            raise DuplicateStateError(f"state {tuple(x)} already given on line {seen[r]}", no)
        seen[r] = no
        images[r] = y

    if kind == "partial":
        dom = sorted(images)
        return PartialMap.from_ranks(space, dom, [space.rank(images[r]) for r in dom])
    if len(images) != space.size:
        missing = next(r for r in range(space.size) if r not in images)
        raise IncompleteMapError(
            f"{space.size - len(images)} states missing, first {space.unrank(missing)}", None)
    if kind == "sampled":
        return SampledMap(space, np.array([images[r] for r in range(space.size)], dtype=float))
    return TotalMap.from_images(space, [images[r] for r in range(space.size)])


def _fmt(v) -> str:
    return " ".join(str(int(c)) for c in v)


def write_map_file(m: Union[TotalMap, PartialMap, SampledMap]) -> str:
    sp = m.space
    if isinstance(m, TotalMap):
        kind = "total"
        body = [f"{_fmt(x)} -> {_fmt(y)}" for x, y in zip(sp.coords, m.images)]
    elif isinstance(m, PartialMap):
        kind = "partial"
        body = [f"{_fmt(x)} -> {_fmt(y)}" for x, y in m.mapping.items()]
    elif isinstance(m, SampledMap):
        kind = "sampled"
        body = [f"{_fmt(x)} -> {' '.join(repr(float(v)) for v in y)}"
                for x, y in zip(sp.coords, m.values)]
    else:
        raise TypeError(f"cannot serialise {type(m).__name__}")
    head = [f"{MAGIC} {VERSION}", f"n {sp.n}", "levels " + " ".join(map(str, sp.levels)),
            f"kind {kind}"]
    return "\n".join(head + body) + "\n"


def read_map_file(path) -> Union[TotalMap, PartialMap, SampledMap]:
    with open(path, encoding="utf-8") as fh:
        return parse_map_file(fh.read())


def save_map_file(m, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_map_file(m))
