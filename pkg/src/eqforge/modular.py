"""Number theory behind the admissible parameters ``a``.

An odd integer ``a`` is admissible when every prime factor is congruent
to 1 mod 4; exactly then -1 has a square root modulo ``a``.  The odd root
``rho`` fixes how the generator ``C`` acts on the second 4-block.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod

from .errors import DomainError

__all__ = [
    "Factorization",
    "RhoWitness",
    "CongruenceItem",
    "factorize",
    "is_prime",
    "is_in_A",
    "sqrt_minus_one_prime",
    "sqrt_minus_one_wilson",
    "hensel_lift",
    "crt_combine",
    "rho_for",
    "congruence_suite",
    "admissible_up_to",
]


@dataclass(frozen=True)
class Factorization:
    base: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise DomainError("primes must be strictly increasing")
        if any(e < 1 for _, e in self.factors):
            raise DomainError("exponents must be >= 1")
        if prod(p**e for p, e in self.factors) != self.base:
            raise DomainError("factors do not multiply to base")

    def __iter__(self):
        return iter(self.factors)


@dataclass(frozen=True)
class RhoWitness:
    a: int
    rho: int

    def __post_init__(self):
        if self.rho % 2 == 0:
            raise DomainError(f"rho={self.rho} is even")
        if (self.rho * self.rho + 1) % self.a != 0:
            raise DomainError(f"rho={self.rho} does not square to -1 mod {self.a}")


def factorize(n: int) -> Factorization:
    """Trial-division factorization; fine for inputs below ~10**10."""
    if n < 2:
        raise DomainError(f"cannot factorize {n} < 2")
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, tuple(factors))


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n).factors == ((n, 1),)


def is_in_A(n: int) -> bool:
    """True iff every prime factor of ``n`` is 1 mod 4."""
    if n < 2:
        raise DomainError(f"membership undefined for {n} < 2")
    return all(p % 4 == 1 for p, _ in factorize(n))


def admissible_up_to(limit: int) -> list[int]:
    return [n for n in range(2, limit + 1) if is_in_A(n)]


def sqrt_minus_one_prime(p: int) -> int:
    """Smallest x in (0, p) with x**2 = -1 mod p, by direct scan."""
    if not is_prime(p) or p % 4 != 1:
        raise DomainError(f"{p} is not a prime congruent to 1 mod 4")
    for x in range(1, p):
        if (x * x + 1) % p == 0:
            return x
    raise AssertionError("unreachable for p = 1 mod 4")


def sqrt_minus_one_wilson(p: int) -> int:
    """Root of -1 mod p via ((p-1)/2)! (Wilson's theorem); reduced to (0, p)."""
    if not is_prime(p) or p % 4 != 1:
        raise DomainError(f"{p} is not a prime congruent to 1 mod 4")
    x = 1
    for k in range(2, (p - 1) // 2 + 1):
        x = x * k % p
    return x


def hensel_lift(root: int, p: int, s: int) -> int:
    """Lift a root of X**2 + 1 modulo ``p`` to one modulo ``p**s``.

    Newton step x <- x - f(x)/f'(x) at each power; the result is congruent
    to ``root`` mod ``p``.
    """
    if p % 2 == 0:
        raise DomainError("p must be odd")
    if s < 1:
        raise DomainError("exponent s must be >= 1")
    if (root * root + 1) % p != 0:
        raise DomainError(f"{root} is not a square root of -1 mod {p}")
    if (2 * root) % p == 0:
        raise DomainError("root is not simple; cannot lift")
    x = root % p
    modulus = p
    for _ in range(1, s):
        modulus *= p
        inv = pow(2 * x, -1, modulus)
        x = (x - (x * x + 1) * inv) % modulus
        assert (x * x + 1) % modulus == 0
    return x


def crt_combine(residues, moduli) -> int:
    residues = list(residues)
    moduli = list(moduli)
    if len(residues) != len(moduli) or not moduli:
        raise DomainError("residues and moduli must be non-empty and equally long")
    for i, m in enumerate(moduli):
        if m < 1:
            raise DomainError(f"modulus {m} must be positive")
        for n in moduli[i + 1:]:
            if gcd(m, n) != 1:
                raise DomainError(f"moduli {m} and {n} are not coprime")
    total = prod(moduli)
    x = 0
    for r, m in zip(residues, moduli):
        rest = total // m
        x += r * rest * pow(rest, -1, m)
    return x % total


def rho_for(a: int) -> RhoWitness:
    """Smallest odd rho in (0, 2a) with rho**2 = -1 mod a.

    The residue mod ``a`` is built from prime roots, Hensel lifts and CRT;
    of ``x`` and ``x + a`` exactly one is odd, and the same holds for the
    other root ``a - x``.  The smaller odd candidate wins.
    """
    if a < 2 or not is_in_A(a):
        raise DomainError(f"a={a} is not in the admissible set (a ∉ 𝔸)")
    fac = factorize(a)
    residues = [hensel_lift(sqrt_minus_one_prime(p), p, e) for p, e in fac]
    moduli = [p**e for p, e in fac]
    x = crt_combine(residues, moduli)
    # Every root mod a arises as a sign pattern over the prime-power roots.
    roots = set()
    for mask in range(1 << len(moduli)):
        signed = [r if not (mask >> i) & 1 else m - r
                  for i, (r, m) in enumerate(zip(residues, moduli))]
        roots.add(crt_combine(signed, moduli))
    assert x in roots
    odd = [r if r % 2 else r + a for r in roots]
    return RhoWitness(a, min(odd))


@dataclass(frozen=True)
class CongruenceItem:
    item: int
    label: str
    value: int          # expression reduced mod 2a
    is_zero: bool
    expected_zero: bool

    @property
    def holds(self) -> bool:
        return self.is_zero == self.expected_zero

    @property
    def outcome(self) -> str:
        return "equality holds" if self.is_zero else "≠ 0 mod 2a"


# (label, multiplier, offset): expression = multiplier*rho + offset
_CONGRUENCES = (
    ("rho-1", 1, -1),
    ("2(rho-1)", 2, -2),
    ("rho+1", 1, 1),
    ("2(rho+1)", 2, 2),
    ("2rho", 2, 0),
    ("4rho", 4, 0),
    ("rho-3", 1, -3),
    ("3rho-1", 3, -1),
    ("rho+3", 1, 3),
    ("3rho+1", 3, 1),
)


def congruence_suite(a: int, rho: int) -> list[CongruenceItem]:
    """Evaluate the ten congruence claims used in the cubic Molien count.

    Items 7 and 10 vanish mod 2a exactly for (a, rho) = (5, 3); the other
    eight never vanish for a valid witness.
    """
    RhoWitness(a, rho)
    special = (a, rho % (2 * a)) == (5, 3)
    out = []
    for idx, (label, mul, off) in enumerate(_CONGRUENCES, start=1):
        value = (mul * rho + off) % (2 * a)
        expected = special and idx in (7, 10)
        out.append(CongruenceItem(idx, label, value, value == 0, expected))
    return out
