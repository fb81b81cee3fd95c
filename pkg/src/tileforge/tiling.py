"""Tiling-equation systems over Z^2 x H with one shared unknown set.

A functional-equation property compiles into such a system: the graph
equation forces the unknown to be the graph of a function, and each
original equation becomes a tile (a union of shifted fiber sets) that must
cover a target slab exactly once.  Fiber sets constrain only the flat
coordinates of their support components and are full elsewhere, so tiles
never need materializing over the whole fiber.  Witness search runs on
quotient tori; a found witness certifies a strongly periodic tiling, while
absence over the tested periods is evidence only, never a decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .feq import (
    BoundedSolver,
    FullSet,
    FunctionalEquation,
    GroupSpec,
    NoPeriodicWitness,
    Property,
    SatBudgetExhausted,
    SatWitness,
    SetExpr,
    SetTooLargeError,
    eval_equation,
    materialize_cap,
)


class NotAGraphError(Exception):
    def __init__(self, point, count):
        super().__init__(f"base point {point} carries {count} fiber values")
        self.point = point
        self.count = count


@dataclass(frozen=True)
class TilingEquation:
    """A tile given as shifted fiber sets, with a full-base target slab.

    ``terms`` lists (base shift, fiber set); the tile is the disjoint union
    of {-shift} x (set extended by full factors off its support), and the
    target is base x (target extended the same way).
    """

    terms: tuple[tuple[tuple[int, ...], SetExpr], ...]
    target: SetExpr

    @property
    def support(self):
        return self.terms[0][1].support


@dataclass
class TilingSystem:
    base: GroupSpec
    fiber_components: dict[str, GroupSpec]
    equations: list[TilingEquation]

    @property
    def fiber(self) -> GroupSpec:
        torsion = ()
        for g in self.fiber_components.values():
            torsion += tuple(g.torsion)
        return GroupSpec(0, torsion)

    def flat_positions(self, support) -> tuple[int, ...]:
        """Flat fiber coordinates carried by the named components."""
        offsets = {}
        k = 0
        for name, g in self.fiber_components.items():
            offsets[name] = k
            k += len(g.torsion)
        out = ()
        for name in support:
            g = self.fiber_components[name]
            out += tuple(range(offsets[name], offsets[name] + len(g.torsion)))
        return out

    def has_graph_equation(self) -> bool:
        if not self.equations:
            return False
        eq = self.equations[0]
        return (len(eq.terms) == 1
                and eq.terms[0][0] == self.base.zero()
                and isinstance(eq.terms[0][1], FullSet)
                and set(eq.terms[0][1].support) == set(self.fiber_components)
                and isinstance(eq.target, FullSet))

    def tile_points(self, eq: TilingEquation):
        """Materialized tile over the full fiber; small fibers only."""
        fiber = self.fiber
        if fiber.size() > materialize_cap():
            raise SetTooLargeError("fiber too large to materialize tiles")
        pos = self.flat_positions(eq.support)
        out = []
        for shift, expr in eq.terms:
            for h in fiber.elements():
                if expr.member(tuple(h[i] for i in pos)):
                    out.append((tuple(-s for s in shift[:self.base.free_rank])
                                + tuple((-s) % t for s, t in
                                        zip(shift[self.base.free_rank:],
                                            self.base.torsion)), h))
        return sorted(out)


def graph_equation(P: Property) -> TilingEquation:
    support = tuple(P.components)
    sizes = ()
    for g in P.components.values():
        sizes += tuple(g.torsion)
    full = FullSet(support, sizes)
    return TilingEquation(terms=((P.group.zero(), full),), target=full)


def feq_to_tiling(P: Property) -> TilingSystem:
    """Compile a property into tiling equations with a shared unknown.

    Existential components are folded into the fiber.  The graph equation
    comes first; each functional equation contributes the tile built from
    its negated shifts and its translate sets.
    """
    equations = [graph_equation(P)]
    for eq in P.equations:
        terms = tuple((P.group.neg(shift), expr) for shift, expr in eq.terms)
        equations.append(TilingEquation(terms=terms, target=eq.target))
    return TilingSystem(P.group, dict(P.components), equations)


@dataclass
class PeriodicSet:
    """A candidate unknown on a quotient torus: cells are (base point,
    fiber tuple) pairs with base points reduced modulo the periods."""

    periods: tuple[int, ...]
    cells: frozenset

    def sorted_cells(self):
        return sorted(self.cells)


def graph_of(alpha: dict, periods, base: GroupSpec,
             component_order: Optional[list] = None) -> PeriodicSet:
    """The graph {(x, alpha(x))} as a periodic set; alpha maps component
    name -> {point: value tuple}."""
    names = component_order or list(alpha)
    cells = set()
    for x in base.quotient_points(tuple(periods)):
        flat = ()
        for u in names:
            v = alpha[u][x]
            flat += v if isinstance(v, tuple) else (v,)
        cells.add((x, flat))
    return PeriodicSet(tuple(periods), frozenset(cells))


def extract_function(A: PeriodicSet, sys: TilingSystem) -> dict:
    """Invert ``graph_of``: exactly one fiber value per base point required."""
    by_point: dict = {}
    for x, h in A.cells:
        by_point.setdefault(x, []).append(h)
    alpha = {u: {} for u in sys.fiber_components}
    for x in sys.base.quotient_points(A.periods):
        vals = by_point.get(x, [])
        if len(vals) != 1:
            raise NotAGraphError(x, len(vals))
        flat = vals[0]
        k = 0
        for u, g in sys.fiber_components.items():
            w = len(g.torsion)
            alpha[u][x] = tuple(flat[k:k + w])
            k += w
    return alpha


@dataclass
class TilingReport:
    passed: bool
    equation_issues: list


def _as_feq(eq: TilingEquation, base: GroupSpec) -> FunctionalEquation:
    return FunctionalEquation(
        terms=tuple((base.neg(s), expr) for s, expr in eq.terms),
        target=eq.target)


def verify_tiling(A: PeriodicSet, sys: TilingSystem) -> TilingReport:
    """Exact-cover verification on the quotient torus.

    For small quotient-by-fiber spaces every (base, fiber) point's coverage
    is counted directly.  Beyond the materialization cap the unknown must
    pass the graph equation; verification then reduces to the functional
    equations of the compiled property, evaluated per base point.
    """
    periods = A.periods
    if len(periods) != sys.base.free_rank:
        raise ValueError("periods must match the base free rank")
    points = sys.base.quotient_points(periods)
    fiber = sys.fiber
    issues = []
    if fiber.size() * len(points) <= materialize_cap():
        fiber_elems = list(fiber.elements())
        torsion = fiber.torsion
        for i, eq in enumerate(sys.equations):
            pos = sys.flat_positions(eq.support)
            tpos = sys.flat_positions(eq.target.support)
            counts: dict = {}
            for (x, h) in A.cells:
                for shift, expr in eq.terms:
                    y = sys.base.reduce(sys.base.add(x, sys.base.neg(shift)),
                                        periods)
                    for g in fiber_elems:
                        diff = tuple((g[i] - h[i]) % torsion[i] for i in pos)
                        if expr.member(diff):
                            counts[(y, g)] = counts.get((y, g), 0) + 1
            for x in points:
                for g in fiber_elems:
                    want = 1 if eq.target.member(tuple(g[i] for i in tpos)) else 0
                    got = counts.get((x, g), 0)
                    if got != want:
                        issues.append((i, x, g, got, want))
        return TilingReport(not issues, issues)

    alpha = extract_function(A, sys)  # raises NotAGraphError when violated
    start = 1 if sys.has_graph_equation() else 0
    for i, eq in enumerate(sys.equations[start:], start=start):
        feq = _as_feq(eq, sys.base)
        for x in points:
            if not eval_equation(feq, alpha, x, sys.base, periods):
                issues.append((i, x, None, None, None))
    return TilingReport(not issues, issues)


@dataclass
class TileWitness:
    periodic_set: PeriodicSet


@dataclass
class NoPeriodicTiling:
    nodes: int = 0


@dataclass
class TilingBudgetExhausted:
    nodes: int = 0


def solve_tiling_periodic(sys: TilingSystem, periods, budget: int = 10 ** 7,
                          want_all: bool = False):
    """Search for a periodic unknown satisfying every tiling equation.

    Systems led by the graph equation search over per-point fiber values
    through the shared constraint engine (the unknown is a function);
    arbitrary systems with small quotient-by-fiber spaces fall back to
    exact-cover backtracking over candidate points.  Graph-led witnesses
    are lexicographically least in (base point, fiber value) order.
    """
    periods = tuple(periods)
    if budget <= 0:
        return TilingBudgetExhausted(0)
    if sys.has_graph_equation():
        feqs = [_as_feq(eq, sys.base) for eq in sys.equations[1:]]
        solver = BoundedSolver(sys.base, sys.fiber_components, feqs,
                               periods, budget)
        got = solver.solve(want_all=want_all)
        if isinstance(got, SatBudgetExhausted):
            return TilingBudgetExhausted(got.nodes)
        if isinstance(got, NoPeriodicWitness):
            return NoPeriodicTiling(got.nodes)
        order = list(sys.fiber_components)
        if want_all:
            return [TileWitness(graph_of(w.assignment, periods, sys.base, order))
                    for w in got]
        return TileWitness(graph_of(got.assignment, periods, sys.base, order))
    return _solve_exact_cover(sys, periods, budget, want_all)


def _solve_exact_cover(sys: TilingSystem, periods, budget: int, want_all: bool):
    """Backtracking over inclusion of candidate (base, fiber) points,
    propagating the exactly-once counts of all equations at once."""
    points = sys.base.quotient_points(periods)
    fiber = sys.fiber
    if fiber.size() * len(points) > materialize_cap():
        raise SetTooLargeError("quotient-by-fiber space beyond the cap")
    fiber_elems = list(fiber.elements())
    torsion = fiber.torsion
    candidates = [(x, h) for x in points for h in fiber_elems]

    eq_data = []
    for eq in sys.equations:
        pos = sys.flat_positions(eq.support)
        tpos = sys.flat_positions(eq.target.support)
        target = {g for g in fiber_elems
                  if eq.target.member(tuple(g[i] for i in tpos))}
        eq_data.append((eq, pos, target))

    def coverage(cand):
        """Columns covered by including this candidate, or None when it
        covers a non-target point of some equation."""
        x, h = cand
        out = []
        for i, (eq, pos, target) in enumerate(eq_data):
            for shift, expr in eq.terms:
                y = sys.base.reduce(sys.base.add(x, sys.base.neg(shift)), periods)
                for g in fiber_elems:
                    diff = tuple((g[j] - h[j]) % torsion[j] for j in pos)
                    if expr.member(diff):
                        if g not in target:
                            return None
                        out.append((i, y, g))
        return out

    cover_of = {}
    legal = []
    for cand in candidates:
        cov = coverage(cand)
        if cov is not None:
            cover_of[cand] = cov
            legal.append(cand)

    columns = sorted({(i, x, g)
                      for i, (eq, pos, target) in enumerate(eq_data)
                      for x in points for g in target})
    col_index = {c: k for k, c in enumerate(columns)}
    covers = {cand: sorted(col_index[c] for c in cover_of[cand]) for cand in legal}
    by_column = [[] for _ in columns]
    for cand in legal:
        for k in set(covers[cand]):
            by_column[k].append(cand)

    filled = [0] * len(columns)
    chosen = []
    solutions = []
    nodes = 0
    exhausted = False

    def search() -> bool:
        nonlocal nodes, exhausted
        open_cols = [k for k, f in enumerate(filled) if f == 0]
        if not open_cols:
            solutions.append(PeriodicSet(periods, frozenset(chosen)))
            return not want_all
        k = open_cols[0]
        for cand in by_column[k]:
            cols = covers[cand]
            if any(filled[c] for c in cols) or len(set(cols)) != len(cols):
                continue
            nodes += 1
            if nodes > budget:
                exhausted = True
                return True
            for c in cols:
                filled[c] += 1
            chosen.append(cand)
            if search():
                return True
            chosen.pop()
            for c in cols:
                filled[c] -= 1
        return False

    search()
    if exhausted:
        return TilingBudgetExhausted(nodes)
    if not solutions:
        return NoPeriodicTiling(nodes)
    if want_all:
        return [TileWitness(s) for s in solutions]
    return TileWitness(solutions[0])
