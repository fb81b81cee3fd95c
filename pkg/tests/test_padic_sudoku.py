import numpy as np
import pytest

from tileforge.padic import unit_digit, valuation_int
from tileforge.padic_sudoku import (
    AmbiguousFormError,
    ContradictionError,
    DigitGrid,
    InconsistentSquareError,
    NoFormError,
    NoGoodSquareError,
    PAdicRule,
    PAdicSolutionSpec,
    RecoveredForm,
    constructive_recover,
    extend_structure,
    fit_all_forms,
    generate,
    generate_grid,
    membership,
    recover_higher,
    recover_square,
)
from tileforge.sudoku import SolutionWindow, apply_affine, verify_window


def brute_membership(p, N, g):
    """Independent oracle: plain double loop over residue pairs mod p^2."""
    p2 = p * p
    for a in range(p2):
        for b in range(p2):
            if a % p == 0 and b % p == 0:
                continue
            ok = True
            for n in range(N):
                v = (a * n + b) % p2
                val = 2 if v == 0 else valuation_int(p, v)
                if val <= 1 and unit_digit(p, v) != g[n]:
                    ok = False
                    break
            if ok:
                return True
    return False


def test_membership_constant_lines():
    for c in (1, 2):
        assert membership(3, 9, (c,) * 9)


def test_membership_shifted_digit_line():
    g = tuple(unit_digit(3, n + 1) for n in range(9))
    assert membership(3, 9, g)
    assert brute_membership(3, 9, g)


def test_membership_rejects_non_affine_pattern():
    g = (1, 1, 2, 1, 1, 2, 2, 2, 1)
    assert not brute_membership(3, 9, g)
    assert not membership(3, 9, g)


def test_membership_agrees_with_brute_force_on_samples():
    rng = np.random.default_rng(7)
    for _ in range(40):
        g = tuple(int(x) for x in rng.integers(1, 3, size=9))
        assert membership(3, 9, g) == brute_membership(3, 9, g)


def test_membership_rejects_zero_digit():
    with pytest.raises(ValueError):
        membership(3, 9, (1, 0, 1, 1, 1, 1, 1, 1, 1))


def test_rule_width_validation():
    PAdicRule(3, 9)
    PAdicRule(3, 18)
    with pytest.raises(ValueError):
        PAdicRule(3, 10)


def closed_form_window(p, N, m_lo, m_hi):
    return SolutionWindow(N, m_lo, m_hi,
                          {(n, m): unit_digit(p, m)
                           for n in range(N) for m in range(m_lo, m_hi + 1)})


def test_generated_digit_slice_passes_rule():
    # width 9: the last-digit-of-m assignment on a tall slice has no failing line
    w = closed_form_window(3, 9, 0, 80)
    report = verify_window(PAdicRule(3, 9).oracle(), w)
    assert report.ok
    assert report.checked_lines > 200


def test_generate_matches_closed_form():
    spec = PAdicSolutionSpec(5, 2, 0, 1, 0)
    sol = generate(spec, 25)
    for m in range(1, 25):
        assert sol.eval(3, m) == unit_digit(5, m)
    assert sol.eval(0, 0) == 1
    assert not sol.confident(0, 0)
    assert not sol.confident(0, 25)  # vanishes at working precision
    assert sol.confident(0, 7)


def test_generate_grid_matches_pointwise():
    spec = PAdicSolutionSpec(3, 2, 2, 4, 1)
    sol = generate(spec, 9)
    grid = generate_grid(spec, 9, -5, 30)
    for n in range(9):
        for m in range(-5, 31):
            assert grid[m + 5, n] == sol.eval(n, m)


def test_generate_rejects_vanishing_coefficients():
    with pytest.raises(ValueError):
        PAdicSolutionSpec(3, 2, 9, 18, 0)


def test_sheared_generated_solution_passes_rule():
    spec = PAdicSolutionSpec(3, 2, 0, 1, 0)
    sheared = apply_affine(generate(spec, 9), 2, 1, 5)
    w = SolutionWindow.from_solution(sheared, 0, 26)
    assert verify_window(PAdicRule(3, 9).oracle(), w).ok


def test_recover_square_identity_solution():
    grid = DigitGrid(generate_grid(PAdicSolutionSpec(5, 2, 0, 1, 0), 25, 0, 74), 0)
    origin, (A, B, C) = recover_square(grid, 5)
    oracle = recover_higher(grid, 5, 0)
    assert (A % 5, B % 5, C % 5) == (oracle.A, oracle.B, oracle.C)
    assert RecoveredForm(5, 0, A, B, C, B % 5 != 0).normalized() == oracle.normalized()


def test_recover_square_sheared_solution():
    base = generate(PAdicSolutionSpec(5, 2, 0, 1, 0), 25)
    sheared = apply_affine(base, 5, 1, 2)  # digits of m + 5n + 2
    w = SolutionWindow.from_solution(sheared, 0, 74)
    _, (A, B, C) = recover_square(w, 5)
    got = RecoveredForm(5, 0, A, B, C, True).normalized()
    assert got == recover_higher(w, 5, 0).normalized()
    # at residue level the encoded shift is m - 3, slope erased
    assert got == (1, 0, 3)


def test_recover_square_slope_shear_has_no_good_square():
    # a zero line of slope 1 meets every 4x4 square when p = 5: the span of
    # n+m over a square covers seven consecutive values, more than p; the
    # square path is only applicable to slope-0 structure at this scale
    base = generate(PAdicSolutionSpec(5, 2, 0, 1, 0), 25)
    sheared = apply_affine(base, 1, 1, 2)
    w = SolutionWindow.from_solution(sheared, 0, 74)
    with pytest.raises(NoGoodSquareError):
        recover_square(w, 5)
    # the brute-force oracle still classifies it
    assert recover_higher(w, 5, 0).normalized() == (1, 4, 3)


def test_recover_square_detects_corruption():
    data = generate_grid(PAdicSolutionSpec(5, 2, 0, 1, 0), 25, 0, 74).copy()
    data[31, 7] = (data[31, 7] % 4) + 1  # flip one digit
    grid = DigitGrid(data, 0)
    with pytest.raises((InconsistentSquareError, NoGoodSquareError, ContradictionError)):
        recover_square(grid, 5)
        extend_structure(grid, 5, recover_square(grid, 5))


def test_extend_structure_certifies_all_unit_cells():
    grid = DigitGrid(generate_grid(PAdicSolutionSpec(5, 2, 0, 1, 0), 25, 0, 74), 0)
    seed = recover_square(grid, 5)
    certified = extend_structure(grid, 5, seed)
    expected = {(n, m) for n in range(25) for m in range(0, 75) if m % 5 != 0}
    assert certified == expected
    assert len(certified) >= (1 - 1 / 5) * 25 * 75


def test_extend_structure_height_four_window():
    grid = DigitGrid(generate_grid(PAdicSolutionSpec(5, 2, 0, 1, 0), 25, 1, 4), 1)
    seed = ((0, 1), (0, 1, 0))
    certified = extend_structure(grid, 5, seed)
    assert all(1 <= m <= 4 for _, m in certified)
    assert certified


def test_recover_higher_identity():
    grid = DigitGrid(generate_grid(PAdicSolutionSpec(5, 2, 0, 1, 0), 25, 0, 149), 0)
    form = recover_higher(grid, 5, 1)
    assert (form.A, form.B, form.C) == (0, 1, 0)
    assert form.normalized() == (1, 0, 0)


def test_recover_higher_after_row_dilation():
    base = generate(PAdicSolutionSpec(5, 2, 0, 1, 0), 25)
    dilated = apply_affine(base, 0, 5, 0)
    w = SolutionWindow.from_solution(dilated, 0, 99)
    form = recover_higher(w, 5, 0)
    assert form.B % 5 == 1  # same unit coefficient as the source solution


def test_recover_higher_constant_columns():
    spec = PAdicSolutionSpec(5, 2, 1, 0, 1)
    grid = DigitGrid(generate_grid(spec, 25, 0, 99), 0)
    with pytest.raises(NoFormError):
        recover_higher(grid, 5, 0)


def test_fit_all_forms_mutually_consistent():
    grid = DigitGrid(generate_grid(PAdicSolutionSpec(3, 2, 1, 4, 2), 9, 0, 53), 0)
    forms = fit_all_forms(grid, 3, 0, unit_b=False)
    assert forms
    for A, B, C in forms:
        for A2, B2, C2 in forms:
            for n in range(9):
                for m in range(0, 54):
                    v1 = (A * n + B * m + C) % 3
                    v2 = (A2 * n + B2 * m + C2) % 3
                    if v1 != 0 and v2 != 0:
                        assert v1 == v2


def test_constructive_matches_oracle_level_one():
    spec = PAdicSolutionSpec(5, 2, 0, 7, 13)
    grid = DigitGrid(generate_grid(spec, 25, -60, 1500), -60)
    got = constructive_recover(grid, 5, 1)
    want = recover_higher(grid, 5, 1)
    assert got.normalized() == want.normalized()
    assert want.normalized() == (2, 0, 16)


def test_constructive_level_zero_equals_square_recovery():
    grid = DigitGrid(generate_grid(PAdicSolutionSpec(5, 2, 0, 1, 0), 25, 0, 74), 0)
    got = constructive_recover(grid, 5, 0)
    assert got.normalized() == recover_higher(grid, 5, 0).normalized()
