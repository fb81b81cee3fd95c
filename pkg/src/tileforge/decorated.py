"""The decorated two-prime Sudoku rule: digits carry a unit residue per
prime plus a pip, and the pip layer simulates a domino function across the
valuation scales of both primes.

``encode`` turns a finite domino function into a closed-form solution;
``extract`` recovers the domino function from any conforming window by
classifying both unit components, aligning the shear they share, and
reading pips off the valuation pattern.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .domino import DominoFunction, DominoSet, Rect, verify_domino_function
from .padic import crt, require_prime, unit_digit, valuation_int
from .padic_sudoku import (
    DigitGrid,
    NoFormError,
    _capped_val_table,
    _digit_table,
    _vector_digits,
    recover_higher,
)
from .sudoku import (
    ConsistentWithWitness,
    InitialCondition,
    LazySolution,
    SolutionWindow,
    SudokuRuleOracle,
    check_initial_condition,
)


class IndeterminateError(Exception):
    """Membership search budget exceeded; no answer is asserted."""


class RecoveryFailedError(Exception):
    """A unit component could not be classified on the window."""


class InconsistentDecorationError(Exception):
    """Cells sharing a valuation pair carry different pips."""


@dataclass(frozen=True)
class DecoratedRule:
    """Width p1^2*p2^2 rule over digits (unit mod p1, unit mod p2, pip)."""

    p1: int
    p2: int
    domino_set: DominoSet
    membership_budget: int = 2_000_000

    def __post_init__(self):
        require_prime(self.p1)
        require_prime(self.p2)
        if self.p1 == self.p2:
            raise ValueError("the two primes must be distinct")

    @property
    def N(self) -> int:
        return self.p1 ** 2 * self.p2 ** 2

    @property
    def q(self) -> int:
        return self.p1 * self.p2

    def digits(self) -> frozenset:
        return frozenset(
            (b1, b2, w)
            for b1 in range(1, self.p1)
            for b2 in range(1, self.p2)
            for w in self.domino_set.pips)

    def oracle(self) -> SudokuRuleOracle:
        return SudokuRuleOracle(
            width=self.N,
            digits=self.digits(),
            member=lambda g: membership(self, g),
        )


def build_rule(p1: int, p2: int, d: DominoSet, membership_budget: int = 2_000_000) -> DecoratedRule:
    return DecoratedRule(p1, p2, d, membership_budget)


# ---------------------------------------------------------------------------
# membership


def _component_candidates(p: int, g, budget_counter) -> list[tuple[int, int]]:
    """Affine forms (a, b) mod p^2 fitting one unit component.

    The valuation cap for the digit clause is 1 when a is a unit and 0
    otherwise; consistency is checked at every position where the form's
    valuation stays within the cap.
    """
    p2 = p * p
    digit = _digit_table(p, p2)
    cap = _capped_val_table(p, p2, 2)
    N = len(g)
    gv = np.asarray(g)
    idx = np.arange(N) % p2
    out = []
    for a in range(p2):
        t = 1 if a % p != 0 else 0
        for b in range(p2):
            if a % p == 0 and b % p == 0:
                continue
            budget_counter[0] += 1
            v = (a * idx + b) % p2
            if np.all((cap[v] > t) | (digit[v] == gv)):
                out.append((a, b))
    return out


def _decoration_fits(rule: DecoratedRule, a: int, b: int, w_line) -> bool:
    """Whether some domino function on the appropriate rectangle reproduces
    the pip layer at every position with in-range valuation pair."""
    p1, p2 = rule.p1, rule.p2
    q2 = (p1 * p2) ** 2
    p1s, p2s = p1 * p1, p2 * p2
    t1 = 1 if a % p1 != 0 else 0
    t2 = 1 if a % p2 != 0 else 0
    dictated: dict[tuple[int, int], str] = {}
    for n, pip in enumerate(w_line):
        v = (a * n + b) % q2
        s1 = 2 if v % p1s == 0 else valuation_int(p1, v % p1s)
        s2 = 2 if v % p2s == 0 else valuation_int(p2, v % p2s)
        if s1 <= t1 and s2 <= t2:
            old = dictated.get((s1, s2))
            if old is not None and old != pip:
                return False
            dictated[(s1, s2)] = pip
    rect = Rect((0, 0), (t1, t2))
    free = [c for c in rect.cells() if c not in dictated]
    pips = sorted(rule.domino_set.pips)
    for combo in itertools.product(pips, repeat=len(free)):
        values = dict(dictated)
        values.update(zip(free, combo))
        t = DominoFunction(rect, values)
        if not verify_domino_function(rule.domino_set, t):
            return True
    return False


def membership(rule: DecoratedRule, g) -> bool:
    """Whether the triple-valued line reading is permitted.

    Searches affine forms (a, b) with residues mod (p1*p2)^2 that are
    non-degenerate mod both primes, factoring the search through per-prime
    candidate fits and joining by the Chinese remainder theorem; for each
    joint candidate, a suitable domino function on the t-rectangle must
    exist.  Exceeding the search budget raises IndeterminateError rather
    than answering.
    """
    N = len(g)
    if N != rule.N:
        raise ValueError(f"line has {N} digits, expected {rule.N}")
    g1, g2, wline = zip(*g)
    for d1 in g1:
        if not 1 <= d1 <= rule.p1 - 1:
            raise ValueError(f"first component {d1} is not a unit mod {rule.p1}")
    for d2 in g2:
        if not 1 <= d2 <= rule.p2 - 1:
            raise ValueError(f"second component {d2} is not a unit mod {rule.p2}")
    for pip in wline:
        if pip not in rule.domino_set.pips:
            raise ValueError(f"unknown pip {pip!r}")

    budget = [0]
    cands1 = _component_candidates(rule.p1, g1, budget)
    cands2 = _component_candidates(rule.p2, g2, budget)
    q1, q2 = rule.p1 ** 2, rule.p2 ** 2
    for (a1, b1), (a2, b2) in itertools.product(cands1, cands2):
        budget[0] += 1
        if budget[0] > rule.membership_budget:
            raise IndeterminateError(
                f"membership search exceeded budget {rule.membership_budget}")
        a = crt([(q1, a1), (q2, a2)])
        b = crt([(q1, b1), (q2, b2)])
        if _decoration_fits(rule, a, b, wline):
            return True
    return False


# ---------------------------------------------------------------------------
# encoding


@dataclass(frozen=True)
class DecoratedSolutionSpec:
    """Closed-form solution data: a verified domino function, a pip for the
    doubly-infinite valuation cell, a shear (D, E) and a unit c coprime to
    both primes."""

    domino_fn: DominoFunction
    infinity_pip: str
    c: int = 1
    D: int = 0
    E: int = 0

    def __post_init__(self):
        if self.domino_fn.rect.lo != (0, 0):
            raise ValueError("domino function must live on [(0,0), r]")


def _check_spec(spec: DecoratedSolutionSpec, rule: DecoratedRule):
    if verify_domino_function(rule.domino_set, spec.domino_fn):
        raise ValueError("spec domino function violates the domino set")
    if spec.infinity_pip not in rule.domino_set.pips:
        raise ValueError(f"unknown infinity pip {spec.infinity_pip!r}")
    if math.gcd(spec.c, rule.p1 * rule.p2) != 1:
        raise ValueError(f"unit {spec.c} shares a factor with {rule.p1 * rule.p2}")


def encode(spec: DecoratedSolutionSpec, rule: DecoratedRule) -> LazySolution:
    """The solution (n, m) -> (digit mod p1, digit mod p2, pip) evaluated on
    m' = c*(m - D*n - E); the pip is the domino function at the valuation
    pair of m'.

    Valuation pairs beyond the domino function's rectangle raise an error
    naming the rectangle that would be required.
    """
    _check_spec(spec, rule)
    p1, p2 = rule.p1, rule.p2
    rect = spec.domino_fn.rect

    def ev(n, m):
        mp = spec.c * (m - spec.D * n - spec.E)
        if mp == 0:
            return (1, 1, spec.infinity_pip)
        s = (valuation_int(p1, mp), valuation_int(p2, mp))
        if s not in rect:
            raise ValueError(
                f"valuation pair {s} outside domino rectangle; "
                f"need at least [(0,0), {s}]")
        return (unit_digit(p1, mp), unit_digit(p2, mp), spec.domino_fn.values[s])

    return LazySolution(rule.N, ev)


def _vector_valuations(p: int, V: np.ndarray, cap: int) -> np.ndarray:
    """Elementwise valuation capped at ``cap``; zero entries get the cap."""
    out = np.zeros(V.shape, dtype=np.int64)
    W = V.copy()
    for _ in range(cap):
        div = (W % p == 0)
        out[div] += 1
        W[div] //= p
    out[V == 0] = cap
    return out


@dataclass
class DecoratedGrids:
    """Dense component windows: unit digits per prime and pip identifiers."""

    g1: DigitGrid
    g2: DigitGrid
    pip_ids: np.ndarray
    pip_names: list[str]
    m_lo: int

    @property
    def width(self):
        return self.g1.width

    @property
    def m_hi(self):
        return self.g1.m_hi

    def pip_at(self, n: int, m: int) -> str:
        return self.pip_names[self.pip_ids[m - self.m_lo, n]]


def encode_grids(spec: DecoratedSolutionSpec, rule: DecoratedRule,
                 m_lo: int, m_hi: int) -> DecoratedGrids:
    """Vectorized ``encode`` over a full window."""
    _check_spec(spec, rule)
    p1, p2 = rule.p1, rule.p2
    N = rule.N
    rect = spec.domino_fn.rect
    r1, r2 = rect.hi
    ns = np.arange(N, dtype=np.int64)
    ms = np.arange(m_lo, m_hi + 1, dtype=np.int64)
    mp = spec.c * (ms[:, None] - spec.D * ns[None, :] - spec.E)
    d1 = _vector_digits(p1, mp)
    d2 = _vector_digits(p2, mp)
    s1 = _vector_valuations(p1, mp, r1 + 1)
    s2 = _vector_valuations(p2, mp, r2 + 1)
    if np.any((mp != 0) & ((s1 > r1) | (s2 > r2))):
        bad = np.argwhere((mp != 0) & ((s1 > r1) | (s2 > r2)))[0]
        v = int(mp[bad[0], bad[1]])
        raise ValueError(
            f"valuation pair {(valuation_int(p1, v), valuation_int(p2, v))} "
            f"outside domino rectangle [(0,0), {rect.hi}]")
    pip_names = sorted(rule.domino_set.pips)
    pip_index = {pip: i for i, pip in enumerate(pip_names)}
    lookup = np.zeros(((r1 + 2), (r2 + 2)), dtype=np.int64)
    for (a, b), pip in spec.domino_fn.values.items():
        lookup[a, b] = pip_index[pip]
    lookup[r1 + 1, r2 + 1] = pip_index[spec.infinity_pip]
    # zero cells show capped valuations (r1+1, r2+1), hitting the infinity slot
    ids = lookup[s1, s2]
    return DecoratedGrids(DigitGrid(d1, m_lo), DigitGrid(d2, m_lo),
                          ids, pip_names, m_lo)


def window_to_grids(w: SolutionWindow) -> DecoratedGrids:
    h, width = w.height, w.width
    d1 = np.empty((h, width), dtype=np.int64)
    d2 = np.empty((h, width), dtype=np.int64)
    names = sorted({v[2] for v in w.values.values()})
    index = {pip: i for i, pip in enumerate(names)}
    ids = np.empty((h, width), dtype=np.int64)
    for (n, m), (b1, b2, pip) in w.values.items():
        d1[m - w.m_lo, n] = b1
        d2[m - w.m_lo, n] = b2
        ids[m - w.m_lo, n] = index[pip]
    return DecoratedGrids(DigitGrid(d1, w.m_lo), DigitGrid(d2, w.m_lo),
                          ids, names, w.m_lo)


# ---------------------------------------------------------------------------
# extraction


def required_height(rule: DecoratedRule, r: tuple[int, int]) -> int:
    """Default window height for extraction at levels r = (r1, r2)."""
    return 4 * (rule.p1 * rule.p2) ** (max(r) + 1)


def extract(w, rule: DecoratedRule, r: tuple[int, int]) -> DominoFunction:
    """Recover the domino function on [(0,0), r] from a conforming window.

    Classifies each unit component through the brute-force recovery oracle
    at its level, joins the per-prime shear data by the Chinese remainder
    theorem, then reads the pip at each valuation pair from witness cells;
    disagreeing witnesses raise InconsistentDecorationError.  The returned
    function is re-verified against the domino set.
    """
    grids = w if isinstance(w, DecoratedGrids) else window_to_grids(w)
    r1, r2 = r
    p1, p2 = rule.p1, rule.p2
    try:
        f1 = recover_higher(grids.g1, p1, r1)
        f2 = recover_higher(grids.g2, p2, r2)
    except NoFormError as e:
        raise RecoveryFailedError(str(e)) from e
    _, D1, E1 = f1.normalized()
    _, D2, E2 = f2.normalized()
    P1, P2 = p1 ** (r1 + 1), p2 ** (r2 + 1)
    D = crt([(P1, D1), (P2, D2)])
    E = crt([(P1, E1), (P2, E2)])

    m_lo, m_hi = grids.m_lo, grids.m_hi
    width = grids.g1.width
    values: dict[tuple[int, int], str] = {}
    sample_cols = sorted(set(range(0, width, max(1, width // 6))))[:7]
    units = [u for u in range(1, 2 * p1 * p2) if u % p1 != 0 and u % p2 != 0][:4]
    for s1 in range(r1 + 1):
        for s2 in range(r2 + 1):
            step = p1 ** s1 * p2 ** s2
            modulus = step * p1 * p2  # pins both valuations exactly
            found = []
            for n in sample_cols:
                for u in units:
                    for sign in (1, -1):
                        t = (D * n + E + sign * step * u) % modulus
                        m = m_lo + (t - m_lo) % modulus
                        if m <= m_hi:
                            found.append((n, m))
                            # also the last occurrence, so corruption anywhere
                            # in the window disagrees with some witness
                            found.append((n, m + (m_hi - m) // modulus * modulus))
            if not found:
                raise RecoveryFailedError(
                    f"window too short: no witness cell for valuation pair "
                    f"({s1}, {s2}); height {modulus} needed")
            pips = {grids.pip_at(n, m) for n, m in found}
            if len(pips) > 1:
                raise InconsistentDecorationError(
                    f"valuation pair ({s1}, {s2}) shows pips {sorted(pips)}")
            values[(s1, s2)] = pips.pop()
    fn = DominoFunction(Rect((0, 0), (r1, r2)), values)
    bad = verify_domino_function(rule.domino_set, fn)
    if bad:
        raise InconsistentDecorationError(
            f"extracted pips violate the domino set: {bad[0]}")
    return fn


# ---------------------------------------------------------------------------
# the initial condition


@dataclass(frozen=True)
class InitialConditionC:
    """Quadruplets (a, b1, b2, pip) where either a shares a factor with
    p1*p2, or both unit components agree with a mod their prime."""

    p1: int
    p2: int
    pips: frozenset[str]

    @property
    def q(self) -> int:
        return self.p1 * self.p2

    def contains(self, a: int, digit) -> bool:
        b1, b2, pip = digit
        if pip not in self.pips:
            return False
        a = a % self.q
        if math.gcd(a, self.q) > 1:
            return True
        return (b1 - a) % self.p1 == 0 and (b2 - a) % self.p2 == 0

    def cardinality(self) -> int:
        phi = (self.p1 - 1) * (self.p2 - 1)
        non_coprime = self.q - phi
        units = (self.p1 - 1) * (self.p2 - 1)
        return (non_coprime * units + phi) * len(self.pips)

    def enumerate(self):
        for a in range(self.q):
            for b1 in range(1, self.p1):
                for b2 in range(1, self.p2):
                    for pip in sorted(self.pips):
                        if self.contains(a, (b1, b2, pip)):
                            yield (a, b1, b2, pip)

    def as_initial_condition(self) -> InitialCondition:
        return InitialCondition(self.q, self.contains)


def build_initial_condition(p1: int, p2: int, pips) -> InitialConditionC:
    require_prime(p1)
    require_prime(p2)
    if p1 == p2:
        raise ValueError("the two primes must be distinct")
    return InitialConditionC(p1, p2, frozenset(pips))


# ---------------------------------------------------------------------------
# the equivalence harness


@dataclass
class HarnessReport:
    ic_consistent: bool
    nonconstant_columns: tuple[bool, bool]
    agree: bool


def nonconstant_columns(w: SolutionWindow, component: int) -> bool:
    """Whether every column of the given unit component varies within the window."""
    for n in range(w.width):
        vals = {w.values[(n, m)][component] for m in range(w.m_lo, w.m_hi + 1)}
        if len(vals) == 1:
            return False
    return True


def equivalence_harness(rule: DecoratedRule, ic: InitialConditionC,
                        w: SolutionWindow) -> HarnessReport:
    """Compare the initial-condition check against the non-constant-columns
    property of both unit components, window-relative."""
    got = check_initial_condition(w, ic.as_initial_condition())
    consistent = isinstance(got, ConsistentWithWitness)
    ncc = (nonconstant_columns(w, 0), nonconstant_columns(w, 1))
    return HarnessReport(consistent, ncc, consistent == (ncc[0] and ncc[1]))
