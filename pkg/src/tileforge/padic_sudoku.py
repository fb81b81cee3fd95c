"""The prime-power Sudoku rule of width N (a multiple of p^2) with digits in
the units mod p, plus three ways to connect digit data to affine forms:

* ``generate``: closed-form solutions from truncated coefficients;
* ``recover_square`` / ``extend_structure`` / ``constructive_recover``:
  the constructive structure-recovery path (good square, row-by-row
  extension, then shear/dilate induction to higher precision);
* ``recover_higher``: an independent brute-force oracle over all candidate
  coefficient triples at a given precision.

The constructive path and the oracle must agree wherever both succeed;
tests treat disagreement as failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .padic import require_prime, unit_digit, valuation_int
from .sudoku import LazySolution, SolutionWindow, SudokuRuleOracle


class NoGoodSquareError(Exception):
    """No 4x4 square clear of every fitted line's bad set exists in the window."""


class InconsistentSquareError(Exception):
    """Square propagation met a cell that contradicts the fitted form."""


class ContradictionError(Exception):
    def __init__(self, cell):
        super().__init__(f"cell {cell} fails both goodness conditions")
        self.cell = cell


class NoFormError(Exception):
    """No coefficient triple at the requested precision fits the window."""


class AmbiguousFormError(Exception):
    """Multiple non-equivalent triples fit; reported, not resolved."""

    def __init__(self, forms):
        super().__init__(f"{len(forms)} non-equivalent forms fit the window")
        self.forms = forms


# ---------------------------------------------------------------------------
# residue tables


@lru_cache(maxsize=None)
def _digit_table(p: int, modulus: int) -> np.ndarray:
    """unit digit of each residue class representative in [0, modulus)."""
    tab = np.ones(modulus, dtype=np.int64)
    for x in range(1, modulus):
        tab[x] = unit_digit(p, x)
    return tab


@lru_cache(maxsize=None)
def _capped_val_table(p: int, modulus: int, cap: int) -> np.ndarray:
    """min(valuation, cap) per residue in [0, modulus); 0 maps to cap."""
    tab = np.empty(modulus, dtype=np.int64)
    tab[0] = cap
    for x in range(1, modulus):
        tab[x] = min(valuation_int(p, x), cap)
    return tab


# ---------------------------------------------------------------------------
# the rule


@lru_cache(maxsize=None)
def _membership_tables(p: int):
    """FP[a, b, n], MASK[a, b, n] and NONDEG[a, b] over residues mod p^2.

    Residues mod p^2 suffice: whether the valuation of a*n+b is <= 1, and
    its digit when it is, are invariant under shifting a, b or n by p^2.
    """
    p2 = p * p
    ab = np.arange(p2)
    vals = (ab[:, None, None] * ab[None, None, :] + ab[None, :, None]) % p2
    digit = _digit_table(p, p2)
    cap = _capped_val_table(p, p2, 2)
    fp_tab = digit[vals]
    mask = cap[vals] <= 1
    nondeg = (ab[:, None] % p != 0) | (ab[None, :] % p != 0)
    return fp_tab, mask, nondeg


_LARGE_TABLE_LIMIT = 17  # build p^6-entry tables only below this prime


def membership(p: int, N: int, g) -> bool:
    """Whether g is a permitted line reading: some affine form a*n+b, with
    residues mod p^2 and not vanishing identically mod p, reproduces every
    digit of g at positions where the form's valuation is at most 1.
    """
    require_prime(p)
    g = tuple(g)
    if len(g) != N:
        raise ValueError(f"line has {len(g)} digits, expected {N}")
    for d in g:
        if not 1 <= d <= p - 1:
            raise ValueError(f"digit {d} is not a unit mod {p}")
    if p < _LARGE_TABLE_LIMIT:
        fp_tab, mask, nondeg = _membership_tables(p)
        idx = np.arange(N) % (p * p)
        gv = np.asarray(g)
        ok = np.all(~mask[:, :, idx] | (fp_tab[:, :, idx] == gv), axis=2)
        return bool(np.any(ok & nondeg))
    return _membership_large(p, N, g)


def _membership_large(p: int, N: int, g) -> bool:
    # chunked candidate filtering for primes too large for full tables
    p2 = p * p
    digit = _digit_table(p, p2)
    cap = _capped_val_table(p, p2, 2)
    gv = np.asarray(g)
    idx = np.arange(N) % p2
    b_all = np.arange(p2)
    probes = list(range(0, N, max(1, N // 24)))[:24]
    for a in range(p2):
        alive = b_all if a % p != 0 else b_all[b_all % p != 0]
        for n in probes:
            if alive.size == 0:
                break
            v = (a * (n % p2) + alive) % p2
            keep = (cap[v] > 1) | (digit[v] == g[n])
            alive = alive[keep]
        for b in alive:
            v = (a * idx + b) % p2
            if np.all((cap[v] > 1) | (digit[v] == gv)):
                return True
    return False


@dataclass(frozen=True)
class PAdicRule:
    """Width-N rule with digit set the units mod p; N must be a multiple of p^2."""

    p: int
    N: int

    def __post_init__(self):
        require_prime(self.p)
        if self.N <= 0 or self.N % (self.p * self.p) != 0:
            raise ValueError(f"width {self.N} is not a positive multiple of {self.p}^2")

    def oracle(self) -> SudokuRuleOracle:
        return SudokuRuleOracle(
            width=self.N,
            digits=frozenset(range(1, self.p)),
            member=lambda g: membership(self.p, self.N, g),
        )


# ---------------------------------------------------------------------------
# generation


@dataclass(frozen=True)
class PAdicSolutionSpec:
    """Closed-form data: digits are the last nonzero base-p digit of
    A*n + B*m + C, with coefficients carried mod p^precision."""

    p: int
    precision: int
    A: int
    B: int
    C: int

    def __post_init__(self):
        require_prime(self.p)
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        q = self.p ** self.precision
        if self.A % q == 0 and self.B % q == 0 and self.C % q == 0:
            raise ValueError("coefficients vanish at working precision")


def generate(spec: PAdicSolutionSpec, N: int) -> LazySolution:
    """The board assignment (n, m) -> digit of A*n + B*m + C.

    Coefficients are lifted to their canonical integer representatives and
    the digit is taken of the exact integer combination, so conformance
    with the rule holds on every line.  Cells where the combination
    vanishes at working precision carry digits the truncated data does not
    pin down; they are reported as non-confident.
    """
    p, q = spec.p, spec.p ** spec.precision
    A, B, C = spec.A % q, spec.B % q, spec.C % q

    def ev(n, m):
        return unit_digit(p, A * n + B * m + C)

    def confident(n, m):
        return (A * n + B * m + C) % q != 0

    return LazySolution(N, ev, confident)


def _vector_digits(p: int, V: np.ndarray) -> np.ndarray:
    """Elementwise last nonzero base-p digit; 1 at zero entries."""
    W = V.copy()
    active = (W != 0) & (W % p == 0)
    while np.any(active):
        W[active] //= p
        active = (W != 0) & (W % p == 0)
    out = W % p
    out[W == 0] = 1
    return out


def generate_grid(spec: PAdicSolutionSpec, N: int, m_lo: int, m_hi: int) -> np.ndarray:
    """Vectorized window of ``generate``: rows indexed m_lo..m_hi, columns 0..N-1."""
    q = spec.p ** spec.precision
    ns = np.arange(N, dtype=np.int64)
    ms = np.arange(m_lo, m_hi + 1, dtype=np.int64)
    v = (spec.A % q) * ns[None, :] + (spec.B % q) * ms[:, None] + (spec.C % q)
    return _vector_digits(spec.p, v)


# ---------------------------------------------------------------------------
# grids


@dataclass
class DigitGrid:
    """Dense window data: data[m - m_lo, n] holds the digit at (n, m)."""

    data: np.ndarray
    m_lo: int

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def m_hi(self) -> int:
        return self.m_lo + self.data.shape[0] - 1

    @classmethod
    def from_window(cls, w: SolutionWindow) -> "DigitGrid":
        arr = np.empty((w.height, w.width), dtype=np.int64)
        for (n, m), v in w.values.items():
            arr[m - w.m_lo, n] = v
        return cls(arr, w.m_lo)

    def at(self, n: int, m: int) -> int:
        return int(self.data[m - self.m_lo, n])


def _as_grid(w) -> DigitGrid:
    return w if isinstance(w, DigitGrid) else DigitGrid.from_window(w)


# ---------------------------------------------------------------------------
# constructive recovery, level 0: good square + extension


def _fit_line_forms(p: int, positions, values) -> list[tuple[int, int]]:
    """All (a, b) mod p, not both zero, consistent with the data: wherever
    a*n+b is a unit mod p it must equal the observed digit."""
    out = []
    for a in range(p):
        for b in range(p):
            if a == 0 and b == 0:
                continue
            if all((a * n + b) % p == 0 or (a * n + b - v) % p == 0
                   for n, v in zip(positions, values)):
                out.append((a, b))
    return out


def _line_bad_cells(p: int, grid: DigitGrid, slope: int, intercept: int):
    """Cells of a fully-contained line where some consistent fitted form
    vanishes mod p (conservatively, the union over consistent forms); None
    if no form is consistent."""
    N = grid.width
    cells = [(n, slope * n + intercept) for n in range(N)]
    values = [grid.at(n, m) for n, m in cells]
    positions = list(range(N))
    forms = _fit_line_forms(p, positions, values)
    if not forms:
        return None
    bad = set()
    for a, b in forms:
        for n, m in cells:
            if (a * n + b) % p == 0:
                bad.add((n, m))
    return bad


def recover_square(w, p: int):
    """Find a 4x4 square carrying clean affine structure and fit its form.

    Scans rows, diagonals and anti-diagonals fully contained in the window,
    fits each one's residue-level form, and takes the first square (lowest
    m, then lowest n) that avoids every bad set.  The form is then fitted
    from the square's bottom row and diagonal and checked against all
    sixteen cells, following the three-line propagation order.

    Returns ((n0, m0), (A, B, C) mod p).
    """
    require_prime(p)
    if p < 3:
        raise ValueError("square recovery needs p >= 3")
    grid = _as_grid(w)
    N = grid.width
    if N < 8:
        raise ValueError("window too narrow for the extension scan")
    m_lo, m_hi = grid.m_lo, grid.m_hi

    bad_by_line: dict[tuple[int, int], set | None] = {}

    def line_bad(slope, intercept):
        key = (slope, intercept)
        if key not in bad_by_line:
            bad_by_line[key] = _line_bad_cells(p, grid, slope, intercept)
        return bad_by_line[key]

    def diag_contained(slope, intercept):
        ms = [slope * n + intercept for n in (0, N - 1)]
        return min(ms) >= m_lo and max(ms) <= m_hi

    for m0 in range(m_lo, m_hi - 2):
        if m0 + 3 > m_hi:
            break
        for n0 in range(0, N - 3):
            square = [(n0 + i, m0 + j) for j in range(4) for i in range(4)]
            ok = True
            crossing = [(0, m0 + j) for j in range(4)]
            crossing += [(1, (m0 + j) - (n0 + i)) for i in range(4) for j in range(4)]
            crossing += [(-1, (m0 + j) + (n0 + i)) for i in range(4) for j in range(4)]
            seen = set()
            for slope, intercept in crossing:
                if (slope, intercept) in seen:
                    continue
                seen.add((slope, intercept))
                if slope != 0 and not diag_contained(slope, intercept):
                    ok = False  # cannot certify lines exiting the window
                    break
                bad = line_bad(slope, intercept)
                if bad is None or any(c in bad for c in square):
                    ok = False
                    break
            if not ok:
                continue
            return (n0, m0), _fit_square(p, grid, n0, m0)
    raise NoGoodSquareError(
        f"no good square in window m in [{m_lo}, {m_hi}] for p={p}")


def _fit_square(p: int, grid: DigitGrid, n0: int, m0: int) -> tuple[int, int, int]:
    """Fit (A, B, C) mod p on the square's bottom row and diagonal, then
    confirm the remaining cells in the row/antidiagonal propagation order."""
    f = grid.at
    A = (f(n0 + 1, m0) - f(n0, m0)) % p
    diag_slope = (f(n0 + 1, m0 + 1) - f(n0, m0)) % p
    B = (diag_slope - A) % p
    C = (f(n0, m0) - A * n0 - B * m0) % p

    def d(n, m):
        return (f(n, m) - (A * n + B * m + C)) % p

    # seed lines
    for i in range(4):
        if d(n0 + i, m0) != 0 or d(n0 + i, m0 + i) != 0:
            raise InconsistentSquareError(f"seed row/diagonal not affine at offset {i}")
    # propagation order: antidiagonal, row, antidiagonal, remaining rows
    steps = [
        ("antidiagonal", [(n0, m0 + 2)]),
        ("row", [(n0 + 1, m0 + 2), (n0 + 3, m0 + 2)]),
        ("antidiagonal", [(n0, m0 + 3), (n0 + 2, m0 + 1)]),
        ("rows", [(n0, m0 + 1), (n0 + 3, m0 + 1), (n0 + 1, m0 + 3), (n0 + 2, m0 + 3)]),
    ]
    for name, cells in steps:
        for cell in cells:
            if d(*cell) != 0:
                raise InconsistentSquareError(f"{name} propagation fails at {cell}")
    for i in range(4):
        for j in range(4):
            if (A * (n0 + i) + B * (m0 + j) + C) % p == 0:
                raise InconsistentSquareError(
                    f"square cell ({n0 + i}, {m0 + j}) has vanishing form")
    return (A, B, C)


def extend_structure(w, p: int, seed) -> frozenset:
    """Sweep the window row by row from the seed square, upward then downward
    (the downward pass mirrors the reflection symmetry), confirming at each
    cell that either the form vanishes mod p or the digit matches it.

    Returns the cells where the digit relation itself was certified (the
    cells with unit form value); vanishing cells are excluded from the
    certificate.
    """
    grid = _as_grid(w)
    (n0, m0), (A, B, C) = seed
    N = grid.width
    certified = set()

    def check_row(m):
        for n in range(N):
            v = (A * n + B * m + C) % p
            if v == 0:
                continue
            if grid.at(n, m) % p == v:
                certified.add((n, m))
            else:
                raise ContradictionError((n, m))

    top = min(m0 + 3, grid.m_hi)
    for m in range(m0, top + 1):
        check_row(m)
    for m in range(top + 1, grid.m_hi + 1):
        check_row(m)
    for m in range(m0 - 1, grid.m_lo - 1, -1):
        check_row(m)
    return frozenset(certified)


# ---------------------------------------------------------------------------
# higher precision


@dataclass(frozen=True)
class RecoveredForm:
    """A coefficient triple mod p^(level+1) classifying a window."""

    p: int
    level: int
    A: int
    B: int
    C: int
    vertically_nondegenerate: bool

    def __post_init__(self):
        if self.vertically_nondegenerate and self.B % self.p == 0:
            raise ValueError("vertically non-degenerate form needs unit B")

    @property
    def modulus(self) -> int:
        return self.p ** (self.level + 1)

    def normalized(self) -> tuple[int, int, int]:
        """Canonical (c, D, E): unit scale and the shear the form encodes."""
        P = self.modulus
        binv = pow(self.B % P, -1, P)
        c = self.B % self.p
        D = (-self.A * binv) % P
        E = (-self.C * binv) % P
        return (c, D, E)


def fit_all_forms(w, p: int, r: int, unit_b: bool = True) -> list[tuple[int, int, int]]:
    """All triples (A, B, C) mod p^(r+1) (with B a unit when ``unit_b``)
    whose digit law holds at every window cell of valuation <= r.

    A window cell (n, m) constrains a candidate exactly when the residue of
    A*n + B*m + C mod p^(r+1) is nonzero; vanishing residues mean the true
    valuation exceeds r and the cell is a wildcard for that candidate.
    """
    require_prime(p)
    if r < 0:
        raise ValueError("level must be >= 0")
    grid = _as_grid(w)
    P = p ** (r + 1)
    digit = _digit_table(p, P)
    N, H = grid.width, grid.data.shape[0]
    ms = np.arange(grid.m_lo, grid.m_hi + 1)
    ns = np.arange(N)

    a = np.arange(P)
    if unit_b:
        bs = a[a % p != 0]
    else:
        bs = a
    A_all, B_all, C_all = [x.ravel() for x in np.meshgrid(a, bs, a, indexing="ij")]

    # probe filtering: exact per-candidate semantics, then full verification
    rng = np.random.default_rng(12345)
    probe_rows = rng.choice(H, size=min(H, 12), replace=False)
    probe_cols = rng.choice(N, size=min(N, 12), replace=False)
    alive = np.ones(A_all.size, dtype=bool)
    for pr, pc in zip(probe_rows, probe_cols):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        n, m = int(ns[pc]), int(ms[pr])
        v = (A_all[idx] * n + B_all[idx] * m + C_all[idx]) % P
        ok = (v == 0) | (digit[v] == grid.data[pr, pc])
        alive[idx[~ok]] = False

    out = []
    G = grid.data
    for i in np.flatnonzero(alive):
        A, B, C = int(A_all[i]), int(B_all[i]), int(C_all[i])
        v = (A * ns[None, :] + B * ms[:, None] + C) % P
        if np.all((v == 0) | (digit[v] == G)):
            out.append((A, B, C))
    out.sort()
    return out


def recover_higher(w, p: int, r: int) -> RecoveredForm:
    """Brute-force classification oracle at precision r+1.

    Searches every candidate triple with unit B, keeps those fitting all
    window cells of valuation <= r, and returns the least representative.
    Raises NoFormError when nothing fits and AmbiguousFormError when the
    fitting triples disagree after (c, D, E) normalization.
    """
    forms = fit_all_forms(w, p, r, unit_b=True)
    if not forms:
        raise NoFormError(f"no vertically non-degenerate form at level {r}")
    recovered = [RecoveredForm(p, r, A, B, C, True) for A, B, C in forms]
    normals = {f.normalized() for f in recovered}
    if len(normals) > 1:
        raise AmbiguousFormError(sorted(normals))
    return recovered[0]


def constructive_recover(w, p: int, r: int) -> RecoveredForm:
    """Constructive counterpart of ``recover_higher``.

    Level 0 runs the good-square fit plus the extension sweep.  Each higher
    level shears away the previous level's offset, erases the lowest scale
    by keeping every p-th row, recurses, and recombines; the recombined
    form is re-verified against the whole window.
    """
    require_prime(p)
    grid = _as_grid(w)
    if r == 0:
        seed = recover_square(grid, p)
        extend_structure(grid, p, seed)
        (A, B, C) = seed[1]
        if B % p == 0:
            raise NoFormError("window has constant columns at level 0")
        return RecoveredForm(p, 0, A % p, B % p, C % p, True)

    prev = constructive_recover(grid, p, r - 1)
    q = p ** r
    _, D, E = prev.normalized()

    # keep rows pm + Dn + E for every column n: the transformed board
    N = grid.width
    lo = -(-(grid.m_lo - E) // p)  # ceil
    hi = (grid.m_hi - E - D * (N - 1)) // p
    if hi - lo + 1 < 8:
        raise NoGoodSquareError(
            f"window too short to recurse at level {r} (rows {lo}..{hi})")
    rows = np.arange(lo, hi + 1)
    cols = np.arange(N)
    src = p * rows[:, None] + D * cols[None, :] + E - grid.m_lo
    sub = DigitGrid(grid.data[src, cols[None, :]], int(lo))

    inner = constructive_recover(sub, p, r - 1)
    if (inner.B - prev.B) % p != 0:
        raise InconsistentSquareError(
            f"scale-{r} recursion disagrees on the unit coefficient")
    P = p ** (r + 1)
    A_sh, B_sh, C_sh = (p * inner.A) % P, inner.B % P, (p * inner.C) % P
    A = (A_sh - B_sh * D) % P
    B = B_sh
    C = (C_sh - B_sh * E) % P

    # soundness: the recombined form must hold at every cell of valuation <= r
    digit = _digit_table(p, P)
    ns = np.arange(N)
    ms = np.arange(grid.m_lo, grid.m_hi + 1)
    v = (A * ns[None, :] + B * ms[:, None] + C) % P
    bad = (v != 0) & (digit[v] != grid.data)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise ContradictionError((int(ns[j]), int(ms[i])))
    return RecoveredForm(p, r, A, B, C, True)
