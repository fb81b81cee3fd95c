"""Window rendering: matplotlib figures plus a delimited cell map.

Every render writes two files side by side: the figure (SVG or PNG, with
deterministic bytes) and a tab-separated grid holding each cell's digit and
valuation tier, which is the artifact golden tests compare cell-for-cell.

Color scheme: a digit picks the hue; the valuation picks the tier
(saturation/darkness), with the infinite-valuation cell gray.  Decorated
windows superpose the two unit-component colors and overlay the pip glyph.
"""

from __future__ import annotations

import colorsys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .decorated import DecoratedRule, DecoratedSolutionSpec, encode  # noqa: E402
from .padic import unit_digit, valuation_int  # noqa: E402
from .padic_sudoku import PAdicSolutionSpec  # noqa: E402

plt.rcParams["svg.hashsalt"] = "tileforge"


def _digit_color(digit: int, n_digits: int, tier, max_tier: int):
    """RGB for one cell: hue from the digit, darkness from the tier."""
    if tier is None:  # infinite valuation: gray
        return (0.55, 0.55, 0.55)
    hue = 0.83 * (digit - 1) / max(1, n_digits - 1)
    sat = 0.25 + 0.75 * min(tier, max_tier) / max(1, max_tier)
    val = 1.0 - 0.35 * min(tier, max_tier) / max(1, max_tier)
    return colorsys.hsv_to_rgb(hue, sat, val)


def padic_cells(spec: PAdicSolutionSpec, N: int, m_lo: int, m_hi: int):
    """Rows (top row = m_hi) of (digit, tier) pairs; tier None at zero."""
    rows = []
    for m in range(m_hi, m_lo - 1, -1):
        row = []
        for n in range(N):
            v = spec.A * n + spec.B * m + spec.C
            row.append((unit_digit(spec.p, v), valuation_int(spec.p, v)))
        rows.append(row)
    return rows


def decorated_cells(spec: DecoratedSolutionSpec, rule: DecoratedRule,
                    m_lo: int, m_hi: int):
    """Rows of ((b1, b2, pip), (t1, t2)) with tiers None at the zero cell."""
    sol = encode(spec, rule)
    rows = []
    for m in range(m_hi, m_lo - 1, -1):
        row = []
        for n in range(rule.N):
            digit = sol.eval(n, m)
            mp = spec.c * (m - spec.D * n - spec.E)
            tiers = (valuation_int(rule.p1, mp), valuation_int(rule.p2, mp))
            row.append((digit, tiers))
        rows.append(row)
    return rows


def _cell_token(value, tier) -> str:
    if isinstance(value, tuple):
        b1, b2, pip = value
        t1, t2 = tier
        t1 = "inf" if t1 is None else t1
        t2 = "inf" if t2 is None else t2
        return f"{b1},{b2},{pip}:{t1},{t2}"
    return f"{value}:{'inf' if tier is None else tier}"


def cells_to_tsv(rows) -> str:
    return "\n".join("\t".join(_cell_token(v, t) for v, t in row)
                     for row in rows) + "\n"


def _save_figure(fig, path: Path) -> None:
    fig.savefig(path, metadata={"Date": None}, dpi=120)
    plt.close(fig)


def render_padic(spec: PAdicSolutionSpec, N: int, m_lo: int, m_hi: int,
                 out_path) -> list:
    """Figure plus TSV for a closed-form single-prime window."""
    rows = padic_cells(spec, N, m_lo, m_hi)
    max_tier = max((t for row in rows for _, t in row if t is not None),
                   default=0)
    img = np.zeros((len(rows), N, 3))
    for i, row in enumerate(rows):
        for n, (digit, tier) in enumerate(row):
            img[i, n] = _digit_color(digit, spec.p - 1, tier, max_tier)
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(max(3, N / 4), max(3, len(rows) / 4)))
    ax.imshow(img, interpolation="nearest",
              extent=(0, N, m_lo, m_hi + 1))
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    ax.set_title(f"digit window, p={spec.p}, width {N}")
    _save_figure(fig, out_path)
    out_path.with_suffix(".tsv").write_text(cells_to_tsv(rows))
    return rows


def render_decorated(spec: DecoratedSolutionSpec, rule: DecoratedRule,
                     m_lo: int, m_hi: int, out_path,
                     n_hi: int | None = None) -> list:
    """Figure plus TSV for a decorated window; pips overlay small grids."""
    rows = decorated_cells(spec, rule, m_lo, m_hi)
    width = rule.N if n_hi is None else min(rule.N, n_hi)
    img = np.zeros((len(rows), width, 3))
    for i, row in enumerate(rows):
        for n in range(width):
            (b1, b2, _), (t1, t2) = row[n]
            c1 = np.array(_digit_color(b1, rule.p1 - 1, t1, 2))
            c2 = np.array(_digit_color(b2, rule.p2 - 1, t2, 2))
            img[i, n] = (c1 + c2) / 2
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(max(4, width / 4), max(4, len(rows) / 4)))
    ax.imshow(img, interpolation="nearest",
              extent=(0, width, m_lo, m_hi + 1))
    if width * len(rows) <= 2500:
        for i, row in enumerate(rows):
            for n in range(width):
                (b1, b2, pip), _ = row[n]
                ax.text(n + 0.5, m_hi + 0.5 - i, str(pip),
                        ha="center", va="center", fontsize=6)
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    ax.set_title(f"decorated window, p1={rule.p1}, p2={rule.p2}")
    _save_figure(fig, out_path)
    out_path.with_suffix(".tsv").write_text(cells_to_tsv(rows))
    return rows


def render_window_values(values_rows, out_path, title="window") -> None:
    """Fallback renderer for raw windows (no tier data): digit hues only."""
    digits = sorted({v for row in values_rows for v in row}, key=repr)
    index = {d: i + 1 for i, d in enumerate(digits)}
    h = len(values_rows)
    w = len(values_rows[0])
    img = np.zeros((h, w, 3))
    for i, row in enumerate(values_rows):
        for j, v in enumerate(row):
            img[i, j] = _digit_color(index[v], len(digits), 0, 1)
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(max(3, w / 4), max(3, h / 4)))
    ax.imshow(img, interpolation="nearest")
    ax.set_title(title)
    _save_figure(fig, out_path)
    tsv = "\n".join("\t".join(str(v) for v in row) for row in values_rows) + "\n"
    out_path.with_suffix(".tsv").write_text(tsv)
