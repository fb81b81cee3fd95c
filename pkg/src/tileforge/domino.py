"""Domino boards, domino sets, Wang tile-sets, and bounded solvability on
rectangles.

A domino set pairs a finite pip alphabet with permitted horizontal and
vertical adjacent-pair relations.  Solvability is only ever decided on
finite rectangles; whole-plane solvability is intentionally not exposed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator


@dataclass(frozen=True)
class DominoSet:
    """Pip alphabet plus permitted horizontal/vertical ordered pip pairs."""

    pips: frozenset[str]
    horiz: frozenset[tuple[str, str]]
    vert: frozenset[tuple[str, str]]

    def __post_init__(self):
        if not self.pips:
            raise ValueError("pip set must be non-empty")
        for rel in (self.horiz, self.vert):
            for a, b in rel:
                if a not in self.pips or b not in self.pips:
                    raise ValueError(f"pair ({a!r}, {b!r}) uses unknown pip")

    @staticmethod
    def of(pips, horiz, vert) -> "DominoSet":
        return DominoSet(frozenset(pips), frozenset(horiz), frozenset(vert))


@dataclass(frozen=True)
class Rect:
    """Integer rectangle [lo, hi] in the product order, inclusive."""

    lo: tuple[int, int]
    hi: tuple[int, int]

    def __post_init__(self):
        if not (self.lo[0] <= self.hi[0] and self.lo[1] <= self.hi[1]):
            raise ValueError(f"rectangle corners out of order: {self.lo} !<= {self.hi}")

    @property
    def width(self) -> int:
        return self.hi[0] - self.lo[0] + 1

    @property
    def height(self) -> int:
        return self.hi[1] - self.lo[1] + 1

    def cells(self) -> Iterator[tuple[int, int]]:
        for s2 in range(self.lo[1], self.hi[1] + 1):
            for s1 in range(self.lo[0], self.hi[0] + 1):
                yield (s1, s2)

    def __contains__(self, cell) -> bool:
        return (self.lo[0] <= cell[0] <= self.hi[0]
                and self.lo[1] <= cell[1] <= self.hi[1])


@dataclass
class DominoFunction:
    """A total pip assignment on a rectangle."""

    rect: Rect
    values: dict[tuple[int, int], str]

    def __post_init__(self):
        missing = [c for c in self.rect.cells() if c not in self.values]
        if missing:
            raise ValueError(f"value map not total on rectangle; missing {missing[:3]}")

    def __eq__(self, other):
        if not isinstance(other, DominoFunction):
            return NotImplemented
        return self.rect == other.rect and all(
            self.values[c] == other.values[c] for c in self.rect.cells())


@dataclass(frozen=True)
class WangTileSet:
    """Side-colored unit squares (west, east, south, north)."""

    h_colors: frozenset[str]
    v_colors: frozenset[str]
    tiles: frozenset[tuple[str, str, str, str]]

    def __post_init__(self):
        for w, e, s, n in self.tiles:
            if w not in self.h_colors or e not in self.h_colors:
                raise ValueError(f"tile side colors {w!r},{e!r} not in horizontal palette")
            if s not in self.v_colors or n not in self.v_colors:
                raise ValueError(f"tile side colors {s!r},{n!r} not in vertical palette")

    @staticmethod
    def of(h_colors, v_colors, tiles) -> "WangTileSet":
        return WangTileSet(frozenset(h_colors), frozenset(v_colors),
                           frozenset(tuple(t) for t in tiles))


def wang_pip(tile: tuple[str, str, str, str]) -> str:
    """Canonical pip label for a Wang tile."""
    return "|".join(tile)


def wang_to_domino(wset: WangTileSet) -> DominoSet:
    """Derive the domino set whose functions are exactly the Wang tilings.

    Pips are the tiles themselves; a horizontal pair is permitted when the
    east color of the first matches the west color of the second, and a
    vertical pair when north matches south.
    """
    if not wset.tiles:
        raise ValueError("Wang tile set must be non-empty")
    tiles = sorted(wset.tiles)
    horiz = {(wang_pip(t), wang_pip(u)) for t in tiles for u in tiles if t[1] == u[0]}
    vert = {(wang_pip(t), wang_pip(u)) for t in tiles for u in tiles if t[3] == u[2]}
    return DominoSet.of({wang_pip(t) for t in tiles}, horiz, vert)


def rectangular_closure_check(d: DominoSet) -> bool:
    """Whether both relations contain the fourth corner of every 'rectangle':
    (a,b), (a,b'), (a',b) present forces (a',b')."""
    for rel in (d.horiz, d.vert):
        by_first: dict[str, set[str]] = {}
        by_second: dict[str, set[str]] = {}
        for a, b in rel:
            by_first.setdefault(a, set()).add(b)
            by_second.setdefault(b, set()).add(a)
        for a, b in rel:
            for b2 in by_first[a]:
                for a2 in by_second[b]:
                    if (a2, b2) not in rel:
                        return False
    return True


@dataclass(frozen=True)
class Violation:
    cell: tuple[int, int]
    direction: str  # "horizontal" or "vertical"
    pair: tuple[str, str]


def verify_domino_function(d: DominoSet, t: DominoFunction) -> list[Violation]:
    """All adjacent-pair violations of t against d, in cell order.

    An empty list means t is a valid domino function for d.  Violations are
    reported exhaustively to support diagnostics.
    """
    out = []
    vals = t.values
    for cell in t.rect.cells():
        if vals[cell] not in d.pips:
            raise ValueError(f"cell {cell} carries unknown pip {vals[cell]!r}")
    for cell in t.rect.cells():
        right = (cell[0] + 1, cell[1])
        up = (cell[0], cell[1] + 1)
        if right in t.rect and (vals[cell], vals[right]) not in d.horiz:
            out.append(Violation(cell, "horizontal", (vals[cell], vals[right])))
        if up in t.rect and (vals[cell], vals[up]) not in d.vert:
            out.append(Violation(cell, "vertical", (vals[cell], vals[up])))
    return out


def translate_domino_function(t: DominoFunction, shift: tuple[int, int]) -> DominoFunction:
    d1, d2 = shift
    rect = Rect((t.rect.lo[0] + d1, t.rect.lo[1] + d2),
                (t.rect.hi[0] + d1, t.rect.hi[1] + d2))
    values = {(c[0] + d1, c[1] + d2): v for c, v in t.values.items()}
    return DominoFunction(rect, values)


@dataclass(frozen=True)
class Solution:
    function: DominoFunction


@dataclass(frozen=True)
class Unsolvable:
    pass


@dataclass(frozen=True)
class BudgetExhausted:
    nodes: int = 0


def _compatible_rows(d: DominoSet, width: int, prev: tuple[str, ...] | None):
    """Yield rows (left-to-right pip tuples) satisfying the horizontal
    relation internally and the vertical relation against prev, in
    lexicographic pip order."""
    pips = sorted(d.pips)

    def extend(row: tuple[str, ...]):
        i = len(row)
        if i == width:
            yield row
            return
        for pip in pips:
            if i > 0 and (row[-1], pip) not in d.horiz:
                continue
            if prev is not None and (prev[i], pip) not in d.vert:
                continue
            yield from extend(row + (pip,))

    yield from extend(())


def solve_rectangle(d: DominoSet, r: Rect, budget: int = 10**6):
    """Decide domino solvability on a rectangle by row-by-row backtracking.

    Rows act as composite transfer states; failures are memoized by
    (rows remaining, previous row content).  The witness, when one exists,
    is the lexicographically least solution scanning rows bottom-up and
    cells left-to-right.  Budget counts row placements; exhausting it
    returns BudgetExhausted rather than raising.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    width, height = r.width, r.height
    dead: set[tuple[int, tuple[str, ...] | None]] = set()
    nodes = 0

    def search(level: int, prev: tuple[str, ...] | None, acc: list[tuple[str, ...]]):
        nonlocal nodes
        if level == height:
            return acc
        key = (height - level, prev)
        if key in dead:
            return None
        for row in _compatible_rows(d, width, prev):
            nodes += 1
            if nodes > budget:
                raise _Exhausted
            got = search(level + 1, row, acc + [row])
            if got is not None:
                return got
        dead.add(key)
        return None

    try:
        rows = search(0, None, [])
    except _Exhausted:
        return BudgetExhausted(nodes)
    if rows is None:
        return Unsolvable()
    values = {}
    for j, row in enumerate(rows):
        for i, pip in enumerate(row):
            values[(r.lo[0] + i, r.lo[1] + j)] = pip
    return Solution(DominoFunction(r, values))


class _Exhausted(Exception):
    pass
