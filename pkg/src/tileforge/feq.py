"""Functional equations with subsets over finitely generated abelian groups.

A property couples a base group G with named finite abelian components; its
equations state that shifted component values, translated by finite sets,
tile a target set exactly once.  The library builders express periodicity,
linear relations, sign-valued (boolean) behavior, boolean constraints and
periodized permutations; ``program_sudoku`` assembles them into a property
whose satisfying assignments are exactly the encodings of Sudoku solutions
obeying an initial condition.

Sets are intensional by default and only materialized below a configurable
cap; single-term stabilizer equations are decided algebraically so kernel
sets never need enumeration.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional


class SetTooLargeError(Exception):
    """Materialization would exceed the configured cap."""


class IndeterminateEvaluation(Exception):
    """The equation could not be decided under the materialization cap."""


def materialize_cap() -> int:
    return int(os.environ.get("TILEFORGE_MATERIALIZE_CAP", 2 ** 20))


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class GroupSpec:
    """Z^free_rank x prod(Z/torsion_i); elements are flat int tuples."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0 or any(t < 1 for t in self.torsion):
            raise ValueError("invalid group data")

    @property
    def dim(self) -> int:
        return self.free_rank + len(self.torsion)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.dim

    def add(self, x, y):
        out = [a + b for a, b in zip(x, y)]
        for k, t in enumerate(self.torsion):
            out[self.free_rank + k] %= t
        return tuple(out)

    def neg(self, x):
        out = [-a for a in x]
        for k, t in enumerate(self.torsion):
            out[self.free_rank + k] %= t
        return tuple(out)

    @property
    def finite(self) -> bool:
        return self.free_rank == 0

    def size(self) -> int:
        if not self.finite:
            raise ValueError("infinite group")
        return math.prod(self.torsion)

    def elements(self) -> Iterator[tuple[int, ...]]:
        if not self.finite:
            raise ValueError("infinite group")
        yield from itertools.product(*(range(t) for t in self.torsion))

    def reduce(self, x, periods: tuple[int, ...]):
        if len(periods) != self.free_rank:
            raise ValueError("periods must match the free rank")
        out = [a % p for a, p in zip(x, periods)]
        out += [a % t for a, t in zip(x[self.free_rank:], self.torsion)]
        return tuple(out)

    def quotient_points(self, periods: tuple[int, ...]) -> list[tuple[int, ...]]:
        ranges = [range(p) for p in periods] + [range(t) for t in self.torsion]
        return list(itertools.product(*ranges))


# ---------------------------------------------------------------------------
# set expressions


class SetExpr:
    """A subset of the product of the support components' groups.

    ``support`` names the constrained components; coordinates are the flat
    concatenation of their torsion coordinates, with per-coordinate sizes in
    ``sizes``.
    """

    support: tuple[str, ...]
    sizes: tuple[int, ...]

    def member(self, elem: tuple[int, ...]) -> bool:
        raise NotImplementedError

    def size(self) -> int:
        raise NotImplementedError

    def enumerate(self) -> list[tuple[int, ...]]:
        raise NotImplementedError

    def translate_equals(self, v, other) -> Optional[bool]:
        """Fast path for (v + self) == other; None when undecided here."""
        return None

    def _check(self, elem):
        if len(elem) != len(self.sizes):
            raise ValueError(f"element arity {len(elem)} != {len(self.sizes)}")


@dataclass(frozen=True)
class ExplicitSet(SetExpr):
    support: tuple[str, ...]
    sizes: tuple[int, ...]
    elements: frozenset

    def member(self, elem):
        self._check(elem)
        return tuple(a % s for a, s in zip(elem, self.sizes)) in self.elements

    def size(self):
        return len(self.elements)

    def enumerate(self):
        return sorted(self.elements)


@dataclass(frozen=True)
class FullSet(SetExpr):
    support: tuple[str, ...]
    sizes: tuple[int, ...]

    def member(self, elem):
        self._check(elem)
        return True

    def size(self):
        return math.prod(self.sizes)

    def enumerate(self):
        if self.size() > materialize_cap():
            raise SetTooLargeError(f"full set of size {self.size()}")
        return list(itertools.product(*(range(s) for s in self.sizes)))

    def translate_equals(self, v, other):
        if isinstance(other, FullSet) and other.sizes == self.sizes:
            return True
        return None


@dataclass(frozen=True)
class ComplementSet(SetExpr):
    """Everything except finitely many excluded elements."""

    support: tuple[str, ...]
    sizes: tuple[int, ...]
    excluded: frozenset

    def member(self, elem):
        self._check(elem)
        return tuple(a % s for a, s in zip(elem, self.sizes)) not in self.excluded

    def size(self):
        return math.prod(self.sizes) - len(self.excluded)

    def enumerate(self):
        if math.prod(self.sizes) > materialize_cap():
            raise SetTooLargeError("complement over a set beyond the cap")
        return [e for e in itertools.product(*(range(s) for s in self.sizes))
                if e not in self.excluded]


@dataclass(frozen=True)
class KernelSet(SetExpr):
    """Solutions of sum(coeffs[i] * a_i) = 0 in (Z/L)^U."""

    support: tuple[str, ...]
    modulus: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.support):
            raise ValueError("one coefficient per component")

    @property
    def sizes(self):
        return (self.modulus,) * len(self.coeffs)

    def member(self, elem):
        self._check(elem)
        return sum(c * a for c, a in zip(self.coeffs, elem)) % self.modulus == 0

    def size(self):
        g = math.gcd(self.modulus, *self.coeffs)
        return self.modulus ** (len(self.coeffs) - 1) * g

    def enumerate(self):
        if self.size() > materialize_cap():
            raise SetTooLargeError(f"kernel of size {self.size()}")
        L, U = self.modulus, len(self.coeffs)
        pivot = next((i for i, c in enumerate(self.coeffs)
                      if math.gcd(c, L) == 1), None)
        if pivot is None:
            return [e for e in itertools.product(range(L), repeat=U)
                    if self.member(e)]
        inv = pow(self.coeffs[pivot], -1, L)
        out = []
        rest = [i for i in range(U) if i != pivot]
        for vals in itertools.product(range(L), repeat=U - 1):
            e = [0] * U
            for i, v in zip(rest, vals):
                e[i] = v
            s = sum(self.coeffs[i] * e[i] for i in rest)
            e[pivot] = (-s * inv) % L
            out.append(tuple(e))
        return sorted(out)

    def translate_equals(self, v, other):
        if (isinstance(other, KernelSet) and other.modulus == self.modulus
                and other.coeffs == self.coeffs):
            return sum(c * a for c, a in zip(self.coeffs, v)) % self.modulus == 0
        return None


@dataclass(frozen=True)
class PredicateSet(SetExpr):
    """Membership by decision procedure; never materialized."""

    support: tuple[str, ...]
    sizes: tuple[int, ...]
    predicate: Callable[[tuple[int, ...]], bool]
    known_size: Optional[int] = None
    tag: str = "predicate"

    def member(self, elem):
        self._check(elem)
        return self.predicate(elem)

    def size(self):
        if self.known_size is None:
            raise SetTooLargeError(f"size of intensional set {self.tag!r} unknown")
        return self.known_size

    def enumerate(self):
        raise SetTooLargeError(f"intensional set {self.tag!r} cannot be materialized")


# ---------------------------------------------------------------------------
# equations and properties


@dataclass(frozen=True)
class FunctionalEquation:
    """disjoint-union_j (alpha(x + shift_j) + set_j) = target, for all x."""

    terms: tuple[tuple[tuple[int, ...], SetExpr], ...]
    target: SetExpr

    def __post_init__(self):
        if not self.terms:
            raise ValueError("equation needs at least one term")
        s = self.terms[0][1].support
        for _, e in self.terms:
            if e.support != s:
                raise ValueError("all term sets must share one support")
        if self.target.support != s:
            raise ValueError("target support must match the terms")

    @property
    def support(self) -> tuple[str, ...]:
        return self.terms[0][1].support


@dataclass
class Property:
    """Equations over named components; auxiliary components are marked
    existential, making the property weakly expressible when any exist."""

    group: GroupSpec
    components: dict[str, GroupSpec]
    equations: list[FunctionalEquation]
    existential: frozenset = frozenset()

    def __post_init__(self):
        for eq in self.equations:
            for name in eq.support:
                if name not in self.components:
                    raise ValueError(f"equation references unknown component {name!r}")
        for name in self.existential:
            if name not in self.components:
                raise ValueError(f"existential component {name!r} not declared")

    @property
    def expressible(self) -> bool:
        return not self.existential

    def visible_components(self) -> list[str]:
        return [u for u in self.components if u not in self.existential]


def lift(P: Property, new_components: dict[str, GroupSpec]) -> Property:
    """Add dummy components; the equations do not mention them."""
    for name in new_components:
        if name in P.components:
            raise ValueError(f"component collision: {name!r}")
    comps = dict(P.components)
    comps.update(new_components)
    return Property(P.group, comps, list(P.equations), P.existential)


def conjoin(P: Property, Q: Property) -> Property:
    """Conjunction of two properties over the same base group; shared
    component names must carry identical groups."""
    if P.group != Q.group:
        raise ValueError("conjunction requires the same base group")
    comps = dict(P.components)
    for name, g in Q.components.items():
        if name in comps and comps[name] != g:
            raise ValueError(f"component {name!r} declared with two different groups")
        comps.setdefault(name, g)
    return Property(P.group, comps, list(P.equations) + list(Q.equations),
                    P.existential | Q.existential)


def exists(P: Property, names) -> Property:
    return Property(P.group, dict(P.components), list(P.equations),
                    P.existential | frozenset(names))


# ---------------------------------------------------------------------------
# evaluation


def _flat_value(alpha, support, point):
    out = ()
    for u in support:
        v = alpha[u][point]
        if not isinstance(v, tuple):
            v = (v,)
        out += v
    return out


def _translate(v, e, sizes):
    return tuple((a + b) % s for a, b, s in zip(v, e, sizes))


def eval_term_values(eq: FunctionalEquation, values: list[tuple[int, ...]]) -> bool:
    """Decide the disjoint-union identity given each term's shifted value."""
    sizes = eq.terms[0][1].sizes
    if len(eq.terms) == 1:
        fast = eq.terms[0][1].translate_equals(values[0], eq.target)
        if fast is not None:
            return fast
    total = 0
    counts: Counter = Counter()
    for (_, expr), v in zip(eq.terms, values):
        try:
            elems = expr.enumerate()
        except SetTooLargeError as e:
            raise IndeterminateEvaluation(str(e)) from e
        total += len(elems)
        for e in elems:
            t = _translate(v, e, sizes)
            counts[t] += 1
            if counts[t] > 1:
                return False
    try:
        target_size = eq.target.size()
    except SetTooLargeError as e:
        raise IndeterminateEvaluation(str(e)) from e
    if total != target_size:
        return False
    return all(eq.target.member(t) for t in counts)


def eval_equation(eq: FunctionalEquation, alpha, x, group: GroupSpec,
                  periods: tuple[int, ...], components=None) -> bool:
    """Evaluate one equation at one quotient point.

    ``alpha`` maps component name -> {point: value}; shifts are reduced into
    the quotient before lookup.
    """
    values = []
    for shift, _ in eq.terms:
        y = group.reduce(group.add(x, shift), periods)
        values.append(_flat_value(alpha, eq.support, y))
    return eval_term_values(eq, values)


def satisfies(P: Property, alpha, periods: tuple[int, ...]) -> bool:
    pts = P.group.quotient_points(periods)
    return all(eval_equation(eq, alpha, x, P.group, periods, P.components)
               for eq in P.equations for x in pts)


# ---------------------------------------------------------------------------
# the library


def _cyclic(L: int) -> GroupSpec:
    return GroupSpec(0, (L,))


def express_period(G: GroupSpec, H: GroupSpec, generators,
                   component: str = "alpha") -> Property:
    """Invariance under each generator: the shifted value covers {0} and the
    unshifted value covers everything else."""
    if not H.finite:
        raise ValueError("component groups must be finite")
    sup = (component,)
    sizes = tuple(H.torsion)
    zero = tuple(0 for _ in sizes)
    eqs = []
    for h in generators:
        eqs.append(FunctionalEquation(
            terms=(
                (tuple(h), ExplicitSet(sup, sizes, frozenset([zero]))),
                (G.zero(), ComplementSet(sup, sizes, frozenset([zero]))),
            ),
            target=FullSet(sup, sizes)))
    return Property(G, {component: H}, eqs)


def express_linear(G: GroupSpec, L: int, coeffs,
                   components: Optional[list[str]] = None) -> Property:
    """sum(c_u * alpha_u(x)) = 0 via stabilization of the kernel set."""
    U = len(coeffs)
    if U < 1:
        raise ValueError("need at least one coefficient")
    names = components or [f"alpha{u + 1}" for u in range(U)]
    kernel = KernelSet(tuple(names), L, tuple(c % L for c in coeffs))
    eq = FunctionalEquation(terms=((G.zero(), kernel),), target=kernel)
    return Property(G, {u: _cyclic(L) for u in names}, [eq])


def _require_order_two(G: GroupSpec, e) -> None:
    e = tuple(e)
    if e == G.zero():
        raise ValueError("the flip element must be nonzero")
    if any(e[i] != 0 for i in range(G.free_rank)):
        raise ValueError("the flip element must be torsion")
    if G.add(e, e) != G.zero():
        raise ValueError("the flip element must have order 2")


def express_boolean(G: GroupSpec, e, L: int, component: str = "alpha") -> Property:
    """Values in {-1,+1} with a sign flip under the order-2 shift e."""
    _require_order_two(G, e)
    if L <= 2:
        raise ValueError("need L > 2")
    sup = (component,)
    sizes = (L,)
    zero = ExplicitSet(sup, sizes, frozenset([(0,)]))
    target = ExplicitSet(sup, sizes, frozenset([(1,), (L - 1,)]))
    eq = FunctionalEquation(terms=((tuple(e), zero), (G.zero(), zero)), target=target)
    return Property(G, {component: _cyclic(L)}, [eq])


def _sign_tuples(U: int):
    return itertools.product((1, -1), repeat=U)


def _neg_tuple(t):
    return tuple(-a for a in t)


def express_boolean_constraint(G: GroupSpec, e, U: int, omega, L: int,
                               components: Optional[list[str]] = None,
                               aux_prefix: str = "beta") -> Property:
    """Pointwise membership of a sign-valued tuple in a symmetric set.

    ``omega`` is a symmetric subset of the U-fold sign cube given as a
    collection of +-1 tuples or a predicate on them.  The construction pads
    the tuple to odd length with an existential sign component, splits the
    complement into antipodal pairs, and couples each pair to fresh
    existential components through a linear relation that is solvable
    exactly when the tuple avoids the pair.
    """
    _require_order_two(G, e)
    if L <= 2 * U + 4:
        raise ValueError(f"need L > 2U+4 = {2 * U + 4}")
    if 2 ** U > materialize_cap():
        raise SetTooLargeError("sign cube beyond the materialization cap")
    if callable(omega):
        omega_set = frozenset(t for t in _sign_tuples(U) if omega(t))
    else:
        omega_set = frozenset(tuple(t) for t in omega)
    for t in omega_set:
        if _neg_tuple(t) not in omega_set:
            raise ValueError(f"constraint set is not symmetric at {t}")

    names = components or [f"alpha{u + 1}" for u in range(U)]
    if len(names) != U:
        raise ValueError("one component name per coordinate")

    pad = 1 if U % 2 == 0 else (2 if U < 3 else 0)
    total = U + pad
    pad_names = [f"{aux_prefix}_pad{k}" for k in range(pad)]
    comps = {u: _cyclic(L) for u in names}
    prop = Property(G, comps, [])
    for u in names:
        prop = conjoin(prop, express_boolean(G, e, L, u))
    for u in pad_names:
        prop = conjoin(prop, exists(express_boolean(G, e, L, u), [u]))

    padded_omega = {t + s for t in omega_set for s in _sign_tuples(pad)}
    excluded = [t for t in _sign_tuples(total) if t not in padded_omega]
    seen = set()
    pairs = []
    for t in excluded:
        if t in seen:
            continue
        seen.add(t)
        seen.add(_neg_tuple(t))
        pairs.append(t)

    all_names = names + pad_names
    for k, eps in enumerate(sorted(pairs)):
        beta_names = [f"{aux_prefix}{k}_{j}" for j in range(total - 2)]
        for b in beta_names:
            prop = conjoin(prop, exists(express_boolean(G, e, L, b), [b]))
        coeffs = [c % L for c in eps] + [(-1) % L] * (total - 2)
        linear = express_linear(G, L, coeffs, components=all_names + beta_names)
        prop = conjoin(prop, exists(linear, beta_names))
    return prop


def express_periodized_permutation(q: int, U: int, L: int, iota,
                                   G: Optional[GroupSpec] = None,
                                   step=None, e=None,
                                   components: Optional[list[str]] = None) -> Property:
    """Sign-encoded residue labels, constant up to a global sign and a
    residue permutation: a 2q-point window of shifted values covers the
    label image and its negation exactly.
    """
    if G is None:
        G = GroupSpec(1, (2,))
        step = (1, 0)
        e = (0, 1)
    _require_order_two(G, e)
    if L <= 2 * U + 4:
        raise ValueError(f"need L > 2U+4 = {2 * U + 4}")
    if q > 2 ** (U - 1):
        raise ValueError(f"q = {q} exceeds 2^(U-1)")
    table = {r: tuple(iota[r]) for r in range(q)}
    if len(set(table.values())) != q:
        raise ValueError("the label table must be injective")
    image = set(table.values())
    if image & {_neg_tuple(t) for t in image}:
        raise ValueError("the label image must avoid its own negation")

    names = components or [f"alpha{u + 1}" for u in range(U)]
    comps = {u: _cyclic(L) for u in names}
    prop = Property(G, comps, [])
    for u in names:
        prop = conjoin(prop, express_boolean(G, e, L, u))

    sup = tuple(names)
    sizes = (L,) * U
    zero = ExplicitSet(sup, sizes, frozenset([(0,) * U]))
    target_elems = {tuple(a % L for a in t) for t in image}
    target_elems |= {tuple((-a) % L for a in t) for t in image}
    target = ExplicitSet(sup, sizes, frozenset(target_elems))
    shifts = []
    for i in range(q):
        base = tuple(i * s for s in step)
        shifts.append(base)
        shifts.append(G.add(base, e))
    eq = FunctionalEquation(terms=tuple((s, zero) for s in shifts), target=target)
    cover = Property(G, dict(comps), [eq])
    return conjoin(prop, cover)


# ---------------------------------------------------------------------------
# programming a Sudoku puzzle


def sign_encode(index: int, width: int) -> tuple[int, ...]:
    """A fixed sign-bit-plus-binary label: leading +1, then the index bits."""
    return (1,) + tuple(1 if (index >> k) & 1 else -1 for k in range(width - 1))


@dataclass
class SudokuProgram:
    """The weakly expressible property encoding a rule and initial condition,
    together with the label tables needed to decode witnesses."""

    property: Property
    rule: object
    ic: object
    s0: int
    L: int
    N: int
    q: int
    iota0: dict
    iota1: dict
    digit_list: list

    def component(self, a: int, b: int, n: int) -> str:
        return f"alpha_a{a}_b{b}_n{n}"

    def decode_digit(self, signs: tuple[int, ...]):
        """Invert the digit labeling up to a global sign."""
        for cand in (signs, _neg_tuple(signs)):
            for digit, lab in self.iota1.items():
                if lab == cand:
                    return digit
        raise ValueError(f"sign tuple {signs} decodes to no digit")

    def decode_witness(self, assignment, periods) -> dict:
        """Digits F[(n, point)] for every quotient point, from the sign
        tuples of the digit-layer components at torsion coordinate 0."""
        pts = [p for p in self.property.group.quotient_points(periods) if p[-1] == 0]
        out = {}
        for x in pts:
            for n in range(self.N):
                signs = []
                for b in range(1, self.s0 + 1):
                    v = assignment[self.component(1, b, n)][x]
                    v = v[0] if isinstance(v, tuple) else v
                    signs.append(1 if v == 1 else -1)
                out[(n, x)] = self.decode_digit(tuple(signs))
        return out

    def decoded_lines(self, assignment, periods) -> list[tuple]:
        """The line readings carried by a witness, one per quotient point."""
        digits = self.decode_witness(assignment, periods)
        pts = sorted({x for (_, x) in digits})
        return [tuple(digits[(n, x)] for n in range(self.N)) for x in pts]


def program_sudoku(rule, ic, s0: int, L: int) -> SudokuProgram:
    """Encode a width-N rule plus a period-q initial condition as a weakly
    expressible property over Z^2 x Z/2.

    Components alpha_{a,b,n} carry, per board column n, the sign-encoded
    initial-condition residue (a=0) and digit (a=1).  The emitted equations
    force sign-valued behavior with alternation in the torsion direction,
    per-column periodicity along (-n, 1), pointwise membership of the full
    tuple in the rule/initial-condition set or its negation, and the
    periodized-permutation structure of the residue layer.
    """
    N, q = rule.width, ic.q
    digit_list = sorted(rule.digits, key=repr)
    n_digits = len(digit_list)
    if n_digits > 2 ** (s0 - 1) or q > 2 ** (s0 - 1):
        raise ValueError(f"s0 = {s0} too small for {n_digits} digits / period {q}")
    if L <= 4 * s0 * N + 4:
        raise ValueError(f"need L > {4 * s0 * N + 4}")

    G = GroupSpec(2, (2,))
    e = (0, 0, 1)
    iota1 = {d: sign_encode(i, s0) for i, d in enumerate(digit_list)}
    iota0 = {r: sign_encode(r, s0) for r in range(q)}
    digit_of_label = {lab: d for d, lab in iota1.items()}
    residue_of_label = {lab: r for r, lab in iota0.items()}

    def comp_name(a, b, n):
        return f"alpha_a{a}_b{b}_n{n}"

    names = [comp_name(a, b, n)
             for a in (0, 1) for b in range(1, s0 + 1) for n in range(N)]
    coord = {u: i for i, u in enumerate(names)}

    prop = Property(G, {u: _cyclic(L) for u in names}, [])

    # (1) sign-valued with alternation in the torsion direction
    for u in names:
        prop = conjoin(prop, express_boolean(G, e, L, u))

    # (2) column periodicity: the value at ((i,j),t) depends only on j*n+i
    for n in range(N):
        for a in (0, 1):
            for b in range(1, s0 + 1):
                per = express_period(G, _cyclic(L), [(-n, 1, 0)],
                                     component=comp_name(a, b, n))
                prop = conjoin(prop, per)

    # (3) the full tuple lies in the rule/initial-condition set, up to sign
    def omega_member(signs: tuple[int, ...]) -> bool:
        gs, cs = [], []
        for n in range(N):
            lab1 = tuple(signs[coord[comp_name(1, b, n)]] for b in range(1, s0 + 1))
            lab0 = tuple(signs[coord[comp_name(0, b, n)]] for b in range(1, s0 + 1))
            if lab1 not in digit_of_label or lab0 not in residue_of_label:
                return False
            gs.append(digit_of_label[lab1])
            cs.append(residue_of_label[lab0])
        if not rule.member(tuple(gs)):
            return False
        return all(ic.contains(c, g) for c, g in zip(cs, gs))

    def omega_symmetric(signs):
        return omega_member(signs) or omega_member(_neg_tuple(signs))

    constraint = express_boolean_constraint(
        G, e, len(names), omega_symmetric, L, components=names, aux_prefix="omega")
    prop = conjoin(prop, constraint)

    # (4) the residue layer is a periodized permutation per column
    for n in range(N):
        cols = [comp_name(0, b, n) for b in range(1, s0 + 1)]
        pp = express_periodized_permutation(
            q, s0, L, iota0, G=G, step=(1, 0, 0), e=e, components=cols)
        prop = conjoin(prop, pp)

    return SudokuProgram(prop, rule, ic, s0, L, N, q, iota0, iota1, digit_list)


def sudoku_program_stats(N: int, q: int, s0: int,
                         omega_size: Optional[int] = None) -> dict:
    """Closed-form structural counts for the Sudoku encoding.

    Validated against the actual construction at toy scale; at full scale
    the counts are evaluated symbolically, since the excluded-pair expansion
    is astronomically large.  ``excluded_pairs`` requires the size of the
    rule/initial-condition set and is reported only when it is supplied.
    """
    U = 2 * s0 * N
    total = U if U % 2 == 1 and U >= 3 else (U + 1 if U % 2 == 0 else U + 2)
    out = {
        "visible_components": U,
        "padded_tuple_length": total,
        "betas_per_excluded_pair": total - 2,
        "boolean_equations_visible": U,
        "period_equations": U,
        "permutation_cover_equations": N,
        "permutation_window": 2 * q,
    }
    if omega_size is not None:
        out["excluded_pairs"] = 2 ** (total - 1) - omega_size * 2 ** (total - U) // 2
        out["aux_components"] = (total - U) + out["excluded_pairs"] * (total - 2)
    return out


# ---------------------------------------------------------------------------
# bounded satisfiability


@dataclass
class SatWitness:
    assignment: dict


@dataclass
class NoPeriodicWitness:
    nodes: int = 0


@dataclass
class SatBudgetExhausted:
    nodes: int = 0


class BoundedSolver:
    """Backtracking search for quotient-periodic assignments.

    Cells are (point, component) pairs ordered point-major; equations are
    instantiated at every quotient point, propagate by domain filtering once
    as few as two of their cells remain unassigned, and check exactly when
    fully assigned.  The first witness found is the lexicographically least
    assignment in cell order.
    """

    def __init__(self, group: GroupSpec, components: dict[str, GroupSpec],
                 equations, periods, budget: int = 10 ** 7):
        self.group = group
        self.components = components
        self.comp_names = list(components)
        self.periods = tuple(periods)
        self.budget = budget
        self.points = group.quotient_points(self.periods)
        self.point_index = {p: i for i, p in enumerate(self.points)}
        self.n_comps = len(self.comp_names)
        self.comp_index = {u: i for i, u in enumerate(self.comp_names)}
        self.domains = {u: sorted(components[u].elements()) for u in self.comp_names}

        # instances: (equation, [cells per term (tuples of cell ids)])
        self.instances = []
        self.cell_instances = [[] for _ in range(len(self.points) * self.n_comps)]
        self.unary_cuts: dict[int, set] = {}
        for eq in equations:
            comp_ids = [self.comp_index[u] for u in eq.support]
            unary = self._unary_domain(eq)
            for x in self.points:
                term_cells = []
                involved = set()
                for shift, _ in eq.terms:
                    y = group.reduce(group.add(x, shift), self.periods)
                    yi = self.point_index[y]
                    cells = tuple(yi * self.n_comps + c for c in comp_ids)
                    term_cells.append(cells)
                    involved.update(cells)
                inst = (eq, term_cells, tuple(sorted(involved)))
                idx = len(self.instances)
                self.instances.append(inst)
                for c in involved:
                    self.cell_instances[c].append(idx)
                if unary is not None:
                    for cells in term_cells:
                        cut = self.unary_cuts.setdefault(cells[0], set(unary))
                        cut &= unary

    @staticmethod
    def _unary_domain(eq) -> Optional[set]:
        """Per-cell value cut for single-component equations whose term sets
        are singletons: each shifted value must land in target - e."""
        if len(eq.support) != 1:
            return None
        allowed = None
        try:
            target = eq.target.enumerate()
        except SetTooLargeError:
            return None
        sizes = eq.target.sizes
        for _, expr in eq.terms:
            if expr.size() != 1:
                return None
            (e,) = expr.enumerate()
            vals = {tuple((t - a) % s for t, a, s in zip(tau, e, sizes))
                    for tau in target}
            allowed = vals if allowed is None else (allowed | vals)
        return allowed

    def _cell_order(self):
        return [pi * self.n_comps + ci
                for pi in range(len(self.points)) for ci in range(self.n_comps)]

    def _eval_instance(self, inst, values) -> bool:
        eq, term_cells, _ = inst
        term_values = []
        for cells in term_cells:
            flat = ()
            for c in cells:
                v = values[c]
                flat += v
            term_values.append(flat)
        return eval_term_values(eq, term_values)

    def _instance_ok(self, inst, values) -> Optional[bool]:
        """True/False when decidable now, None when >2 cells are missing.

        With one missing cell the domain is filtered exactly; with two, each
        missing cell keeps only values some partner value supports (arc
        consistency), which is what collapses sign-valued components to
        their two genuine values early.
        """
        eq, term_cells, involved = inst
        missing = [c for c in involved if values[c] is None]
        if not missing:
            return self._eval_instance(inst, values)
        if (len(eq.terms) == 1 and isinstance(eq.terms[0][1], KernelSet)
                and eq.terms[0][1] is eq.target):
            if not self._kernel_feasible(eq.terms[0][1], term_cells[0], values):
                return False
        if len(missing) == 1:
            c = missing[0]
            ok_vals = []
            for v in self.live_domains[c]:
                values[c] = v
                if self._eval_instance(inst, values):
                    ok_vals.append(v)
            values[c] = None
            if not ok_vals:
                return False
            if len(ok_vals) < len(self.live_domains[c]):
                self.live_domains[c] = ok_vals
            return True
        if len(missing) == 2:
            c1, c2 = missing
            keep1, keep2 = [], set()
            for v1 in self.live_domains[c1]:
                values[c1] = v1
                hit = False
                for v2 in self.live_domains[c2]:
                    values[c2] = v2
                    if self._eval_instance(inst, values):
                        hit = True
                        keep2.add(v2)
                values[c2] = None
                if hit:
                    keep1.append(v1)
            values[c1] = None
            if not keep1:
                return False
            if len(keep1) < len(self.live_domains[c1]):
                self.live_domains[c1] = keep1
            if len(keep2) < len(self.live_domains[c2]):
                self.live_domains[c2] = sorted(keep2)
            return True
        return None

    def _kernel_feasible(self, kernel: KernelSet, cells, values) -> bool:
        """Interval bound for a stabilizer constraint: the assigned part plus
        some choice from the missing cells' domains must reach 0 mod L.
        Lifts residues to signed representatives; a relaxation, so pruning
        only happens when the instance is certainly unsatisfiable."""
        L = kernel.modulus
        half = L // 2

        def lift(a):
            a %= L
            return a if a <= half else a - L

        acc = 0
        lo = hi = 0
        for coef, cell in zip(kernel.coeffs, cells):
            v = values[cell]
            if v is not None:
                acc += lift(coef * v[0])
            else:
                contribs = [lift(coef * w[0]) for w in self.live_domains[cell]]
                lo += min(contribs)
                hi += max(contribs)
        # need acc + s = 0 (mod L) for some s in [lo, hi]: a multiple of L
        # must fall inside [acc+lo, acc+hi]
        a, b = acc + lo, acc + hi
        return (b // L) * L >= a

    def solve(self, want_all: bool = False):
        n_cells = len(self.points) * self.n_comps
        values: list = [None] * n_cells
        comp_of = [ci for _ in range(len(self.points)) for ci in range(self.n_comps)]
        base_domains = [self.domains[self.comp_names[c]] for c in comp_of]
        self.live_domains = [list(d) for d in base_domains]
        for cell, cut in self.unary_cuts.items():
            self.live_domains[cell] = [v for v in self.live_domains[cell] if v in cut]
            if not self.live_domains[cell]:
                return NoPeriodicWitness(0)
        order = self._cell_order()
        nodes = 0
        witnesses = []
        exhausted = False

        def propagate(changed) -> tuple[bool, list]:
            # returns (consistent, pruned-domain trail)
            trail = []
            queue = list(changed)
            while queue:
                cell = queue.pop()
                for idx in self.cell_instances[cell]:
                    inst = self.instances[idx]
                    before = {c: self.live_domains[c]
                              for c in inst[2] if values[c] is None}
                    got = self._instance_ok(inst, values)
                    if got is False:
                        for c, d in before.items():
                            if self.live_domains[c] is not d:
                                trail.append((c, d))
                        return False, trail
                    for c, d in before.items():
                        if self.live_domains[c] is not d:
                            trail.append((c, d))
                            if len(self.live_domains[c]) == 1:
                                # forced: assign and keep propagating
                                if values[c] is None:
                                    values[c] = self.live_domains[c][0]
                                    trail.append((c, None))
                                    queue.append(c)
            return True, trail

        def undo(trail):
            for c, d in reversed(trail):
                if d is None:
                    values[c] = None
                else:
                    self.live_domains[c] = d

        def next_unassigned(k) -> int:
            while k < n_cells and values[order[k]] is not None:
                k += 1
            return k

        # iterative depth-first search; stack holds (k, candidate iterator,
        # trail of the candidate currently being explored)
        stack = [(next_unassigned(0), None, None)]
        while stack:
            k, it, cur_trail = stack[-1]
            if k == n_cells:
                witnesses.append(list(values))
                if not want_all:
                    break
                stack.pop()
                if stack:
                    pk, pit, ptrail = stack[-1]
                    undo(ptrail)
                    values[order[pk]] = None
                    stack[-1] = (pk, pit, None)
                continue
            cell = order[k]
            if it is None:
                it = iter(list(self.live_domains[cell]))
                stack[-1] = (k, it, None)
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                if stack:
                    pk, pit, ptrail = stack[-1]
                    undo(ptrail)
                    values[order[pk]] = None
                    stack[-1] = (pk, pit, None)
                continue
            nodes += 1
            if nodes > self.budget:
                exhausted = True
                break
            values[cell] = nxt
            ok, trail = propagate([cell])
            if ok:
                stack[-1] = (k, it, trail)
                stack.append((next_unassigned(k + 1), None, None))
            else:
                undo(trail)
                values[cell] = None
        if exhausted:
            return SatBudgetExhausted(nodes)
        if not witnesses:
            return NoPeriodicWitness(nodes)
        out = []
        for w in witnesses:
            assignment = {u: {} for u in self.comp_names}
            for pi, p in enumerate(self.points):
                for ci, u in enumerate(self.comp_names):
                    assignment[u][p] = w[pi * self.n_comps + ci]
            out.append(assignment)
        if want_all:
            return [SatWitness(a) for a in out]
        return SatWitness(out[0])


def check_satisfiable_bounded(P: Property, periods, budget: int = 10 ** 7):
    """Search for a quotient-periodic satisfying assignment.

    A witness is genuine for the quotient; absence only rules out
    assignments periodic at these periods, never satisfiability over the
    full group.
    """
    if budget <= 0:
        return SatBudgetExhausted(0)
    solver = BoundedSolver(P.group, P.components, P.equations, periods, budget)
    return solver.solve()
