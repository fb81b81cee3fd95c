"""Exact arithmetic for prime valuations, last nonzero digits, residues,
the Chinese remainder theorem, and one/two-variable affine forms.

Everything here is pure integer arithmetic; values are immutable and all
functions are safe to call from anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering


class NotPrimeError(ValueError):
    """Raised when a modulus that must be prime is not."""


def is_prime(p: int) -> bool:
    """Trial-division primality check; adequate for the desk-scale primes used here."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def require_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")


@total_ordering
@dataclass(frozen=True)
class Valuation:
    """Multiplicity of a prime in an integer; ``value=None`` encodes +infinity.

    The infinite value arises only from input 0.  Finite values are >= 0.
    A sum type (rather than a sentinel integer) keeps infinity propagation
    explicit in the additivity checks.
    """

    value: int | None

    def __post_init__(self):
        if self.value is not None and self.value < 0:
            raise ValueError("finite valuations are non-negative")

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __add__(self, other: "Valuation") -> "Valuation":
        if self.is_infinite or other.is_infinite:
            return INFINITY
        return Valuation(self.value + other.value)

    def __lt__(self, other: "Valuation") -> bool:
        if self.is_infinite:
            return False
        if other.is_infinite:
            return True
        return self.value < other.value

    def __repr__(self):
        return "Valuation(inf)" if self.is_infinite else f"Valuation({self.value})"


INFINITY = Valuation(None)


@dataclass(frozen=True)
class UnitResidue:
    """An invertible residue 1 <= r <= p-1 modulo a prime p."""

    p: int
    r: int

    def __post_init__(self):
        if not 1 <= self.r <= self.p - 1:
            raise ValueError(f"residue {self.r} is not a unit mod {self.p}")


def valuation_int(p: int, n: int) -> int | None:
    """Bare-integer valuation: multiplicity of p in n, or None for n=0."""
    if n == 0:
        return None
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def unit_digit(p: int, n: int) -> int:
    """Bare-integer last nonzero digit of n in base p; 1 for n=0 by convention."""
    if n == 0:
        return 1
    while n % p == 0:
        n //= p
    return n % p


def nu(p: int, n: int) -> Valuation:
    """Multiplicity of the prime p in n; infinite exactly when n=0."""
    require_prime(p)
    return Valuation(valuation_int(p, n))


def fp(p: int, n: int) -> UnitResidue:
    """Last nonzero digit of n in base p, as a unit residue; fp(p, 0) = 1."""
    require_prime(p)
    return UnitResidue(p, unit_digit(p, n))


@dataclass(frozen=True)
class AffineForm1:
    """The one-variable form n -> a*n + b."""

    a: int
    b: int

    def __call__(self, n: int) -> int:
        return self.a * n + self.b


@dataclass(frozen=True)
class AffineForm2:
    """The two-variable form (n, m) -> A*n + B*m + C."""

    A: int
    B: int
    C: int

    def __call__(self, n: int, m: int) -> int:
        return self.A * n + self.B * m + self.C


def is_nondegenerate1(p: int, form: AffineForm1) -> bool:
    """True unless both coefficients vanish mod p."""
    require_prime(p)
    return form.a % p != 0 or form.b % p != 0


def is_nondegenerate2(p: int, form: AffineForm2) -> bool:
    require_prime(p)
    return form.A % p != 0 or form.B % p != 0 or form.C % p != 0


def is_vertically_nondegenerate(p: int, form: AffineForm2) -> bool:
    """True iff the coefficient of the second variable is a unit mod p."""
    require_prime(p)
    return form.B % p != 0


def forms_identical_mod_p(p, f, g) -> bool:
    """Coefficientwise congruence mod p, for two forms of matching arity."""
    require_prime(p)
    if isinstance(f, AffineForm1) and isinstance(g, AffineForm1):
        return (f.a - g.a) % p == 0 and (f.b - g.b) % p == 0
    if isinstance(f, AffineForm2) and isinstance(g, AffineForm2):
        return (f.A - g.A) % p == 0 and (f.B - g.B) % p == 0 and (f.C - g.C) % p == 0
    raise TypeError("mismatched affine form arities")


def crt(pairs: list[tuple[int, int]]) -> int:
    """Least non-negative solution of simultaneous congruences.

    Args:
        pairs: list of (modulus, residue); moduli must be pairwise coprime.

    Raises:
        ValueError: if the list is empty or the moduli share a factor.
    """
    if not pairs:
        raise ValueError("need at least one congruence")
    modulus, result = 1, 0
    for q, r in pairs:
        if q < 1:
            raise ValueError(f"modulus {q} < 1")
        g = math.gcd(modulus, q)
        if g != 1:
            raise ValueError(f"moduli are not pairwise coprime (shared factor {g})")
        # combine: x = result (mod modulus), x = r (mod q)
        inv = pow(modulus % q, -1, q) if q > 1 else 0
        t = ((r - result) * inv) % q
        result = result + modulus * t
        modulus *= q
    return result % modulus
