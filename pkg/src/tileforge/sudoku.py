"""Sudoku boards of shape {0..N-1} x Z: non-vertical lines, rule oracles,
finite solution windows, affine board transformations, and per-column
initial-condition checking via exact bipartite matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional


@dataclass(frozen=True)
class Board:
    """The strip {0..width-1} x Z."""

    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("board width must be >= 1")


@dataclass(frozen=True)
class Line:
    """A non-vertical line of a given slope and intercept; columns are not lines."""

    slope: int
    intercept: int


def line_cells(width: int, line: Line) -> list[tuple[int, int]]:
    """Cells (n, slope*n + intercept) for n = 0..width-1, in order."""
    return [(n, line.slope * n + line.intercept) for n in range(width)]


@dataclass
class SudokuRuleOracle:
    """A width-N rule over a finite digit set, held intensionally.

    ``member`` decides whether a full line reading (a length-N tuple of
    digits) is permitted; it must be total and deterministic.  An optional
    ``witnesses`` enumerator can produce canonical members.
    """

    width: int
    digits: frozenset
    member: Callable[[tuple], bool]
    witnesses: Optional[Callable[[], Iterator[tuple]]] = None


@dataclass
class SolutionWindow:
    """A total digit assignment on {0..width-1} x [m_lo, m_hi]."""

    width: int
    m_lo: int
    m_hi: int
    values: dict[tuple[int, int], object]

    def __post_init__(self):
        if self.m_hi < self.m_lo:
            raise ValueError("empty window")
        for n in range(self.width):
            for m in range(self.m_lo, self.m_hi + 1):
                if (n, m) not in self.values:
                    raise ValueError(f"window missing value at ({n}, {m})")

    @property
    def height(self) -> int:
        return self.m_hi - self.m_lo + 1

    @classmethod
    def from_solution(cls, sol: "LazySolution", m_lo: int, m_hi: int) -> "SolutionWindow":
        values = {(n, m): sol.eval(n, m)
                  for n in range(sol.width) for m in range(m_lo, m_hi + 1)}
        return cls(sol.width, m_lo, m_hi, values)

    def column(self, n: int) -> list:
        return [self.values[(n, m)] for m in range(self.m_lo, self.m_hi + 1)]


@dataclass
class LazySolution:
    """A total board assignment given by a pure evaluation rule.

    ``confident``, when present, marks cells whose value is pinned by the
    generating data at working precision; unflagged cells carry convention
    values only.
    """

    width: int
    eval: Callable[[int, int], object]
    confident: Optional[Callable[[int, int], bool]] = None


@dataclass
class InitialCondition:
    """A period-q coupling of column residues with digits.

    ``pairs`` holds (residue, digit) membership; it may be backed by an
    explicit set or by a predicate for large digit sets.
    """

    q: int
    contains: Callable[[int, object], bool]
    pairs: Optional[frozenset] = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("period must be >= 1")

    @classmethod
    def from_pairs(cls, q: int, pairs) -> "InitialCondition":
        frozen = frozenset(pairs)
        return cls(q, lambda r, d: (r % q, d) in frozen, frozen)


@dataclass
class VerifyReport:
    checked_lines: int
    failures: list[Line]

    @property
    def ok(self) -> bool:
        return not self.failures


def window_lines(width: int, m_lo: int, m_hi: int) -> Iterator[Line]:
    """All lines whose cells lie entirely inside the window, sorted by
    (slope, intercept).  Lines that exit the window are skipped, never
    partially checked."""
    if width == 1:
        # every slope parameterizes the same one-cell reading; slope 0 suffices
        for i in range(m_lo, m_hi + 1):
            yield Line(0, i)
        return
    max_slope = (m_hi - m_lo) // (width - 1)
    for j in range(-max_slope, max_slope + 1):
        if j >= 0:
            lo, hi = m_lo, m_hi - j * (width - 1)
        else:
            lo, hi = m_lo - j * (width - 1), m_hi
        for i in range(lo, hi + 1):
            yield Line(j, i)


def verify_window(rule: SudokuRuleOracle, w: SolutionWindow) -> VerifyReport:
    """Check every fully-contained line reading against the rule oracle."""
    if rule.width != w.width:
        raise ValueError(f"rule width {rule.width} != window width {w.width}")
    checked = 0
    failures = []
    for line in window_lines(w.width, w.m_lo, w.m_hi):
        g = tuple(w.values[c] for c in line_cells(w.width, line))
        checked += 1
        if not rule.member(g):
            failures.append(line)
    return VerifyReport(checked, failures)


def apply_affine(s: LazySolution, a: int, b: int, c: int) -> LazySolution:
    """The board transformation (n, m) -> s(n, a*n + b*m + c).

    Includes reflection (0,-1,0), shears (D,1,E), and the row dilation
    (0,p,0) that erases the lowest scale.
    """
    confident = None
    if s.confident is not None:
        inner = s.confident
        confident = lambda n, m: inner(n, a * n + b * m + c)
    return LazySolution(s.width, lambda n, m: s.eval(n, a * n + b * m + c), confident)


@dataclass
class ConsistentWithWitness:
    # per column: residue -> assigned residue, a permutation of Z/q
    permutations: dict[int, dict[int, int]]


@dataclass
class Inconsistent:
    column: int


def _perfect_matching(q: int, allowed: list[set[int]]) -> Optional[list[int]]:
    """Kuhn's augmenting-path matching on the q x q graph; returns the
    assignment per left vertex or None if no perfect matching exists."""
    match_right: list[Optional[int]] = [None] * q

    def augment(u: int, seen: set[int]) -> bool:
        for v in sorted(allowed[u]):
            if v in seen:
                continue
            seen.add(v)
            if match_right[v] is None or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    for u in range(q):
        if not augment(u, set()):
            return None
    out: list[Optional[int]] = [None] * q
    for v, u in enumerate(match_right):
        out[u] = v
    return out  # type: ignore[return-value]


def check_initial_condition(w: SolutionWindow, ic: InitialCondition):
    """Decide, column by column, whether some residue permutation couples the
    window's digits to the condition.

    The existential permutation is decided exactly: residue r may map to
    assignment a only if every window cell at height = r (mod q) pairs with
    a inside the condition, and a perfect matching over these options is
    sought by augmenting paths.  Consistency is relative to the window and
    reported as such.
    """
    q = ic.q
    if w.height < q:
        raise ValueError(f"window height {w.height} < period {q}: "
                         "every residue class must be constrained at least once")
    permutations = {}
    for n in range(w.width):
        digits_by_residue: dict[int, set] = {r: set() for r in range(q)}
        for m in range(w.m_lo, w.m_hi + 1):
            digits_by_residue[m % q].add(w.values[(n, m)])
        allowed = []
        for r in range(q):
            opts = {a for a in range(q)
                    if all(ic.contains(a, d) for d in digits_by_residue[r])}
            allowed.append(opts)
        assignment = _perfect_matching(q, allowed)
        if assignment is None:
            return Inconsistent(n)
        permutations[n] = {r: assignment[r] for r in range(q)}
    return ConsistentWithWitness(permutations)
