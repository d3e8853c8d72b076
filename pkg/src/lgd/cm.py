"""Imaginary quadratic orders and the minimal degree d(p).

d(p) is the least h(O) * bound over the two sharp families: orders with p
inert (bound (p^2 - 1)/u) and orders with p ramified (bound (p - 1)/2), in
both cases with p not dividing the conductor.  By default the ramified family
is represented only by the field of discriminant -p or -4p; ``all_ramified``
scans every fundamental discriminant divisible by p, which gives smaller
values for some p (17 and 23 among the first few).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .modarith import Residue, unit_inverse

__all__ = [
    "BadDiscriminant",
    "BadU",
    "NoWitness",
    "SplitCase",
    "QuadOrder",
    "DegreeWitness",
    "is_odd_prime",
    "is_fundamental",
    "kronecker_symbol",
    "splitting_case",
    "delta_of_order",
    "class_number",
    "reduced_forms",
    "sharp_bound",
    "min_degree",
    "degree_table",
    "gonality_threshold",
    "default_scan_bound",
]


class BadDiscriminant(ValueError):
    pass


class BadU(ValueError):
    pass


class NoWitness(LookupError):
    pass


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % q for q in range(3, math.isqrt(p) + 1, 2))


def _check_odd_prime(p: int) -> None:
    from .matgroup import EvenPrime

    if p == 2:
        raise EvenPrime("p must be odd")
    if not is_odd_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def _squarefree(n: int) -> bool:
    n = abs(n)
    q = 2
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 1
    return True


def is_fundamental(D: int) -> bool:
    """Whether D is a fundamental discriminant (D != 1)."""
    if D == 1 or D == 0:
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        q = D // 4
        return q % 4 in (2, 3) and _squarefree(q)
    return False


class SplitCase(str, Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"
    DIVIDES_CONDUCTOR = "divides_conductor"


@dataclass(frozen=True)
class QuadOrder:
    fundamental_discriminant: int
    conductor: int = 1

    def __post_init__(self) -> None:
        D, f = self.fundamental_discriminant, self.conductor
        if D >= 0 or not is_fundamental(D):
            raise BadDiscriminant(f"{D} is not a negative fundamental discriminant")
        if f < 1:
            raise BadDiscriminant("conductor must be positive")

    @property
    def discriminant(self) -> int:
        return self.conductor**2 * self.fundamental_discriminant


def kronecker_symbol(D: int, p: int) -> int:
    """(D | p) for an odd prime p, via Euler's criterion."""
    _check_odd_prime(p)
    if D % p == 0:
        return 0
    return 1 if pow(D, (p - 1) // 2, p) == 1 else -1


def splitting_case(order: QuadOrder, p: int) -> SplitCase:
    if order.conductor % p == 0:
        return SplitCase.DIVIDES_CONDUCTOR
    k = kronecker_symbol(order.fundamental_discriminant, p)
    return {1: SplitCase.SPLIT, -1: SplitCase.INERT, 0: SplitCase.RAMIFIED}[k]


def delta_of_order(order: QuadOrder, p: int, n: int) -> Residue:
    """delta = disc_K f^2 / 4 in Z/p^n."""
    _check_odd_prime(p)
    m = p**n
    return Residue(order.fundamental_discriminant * order.conductor**2, m) * unit_inverse(Residue(4, m))


def reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """Reduced primitive positive definite forms (a, b, c) of discriminant disc."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise BadDiscriminant(f"{disc} is not a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
        a += 1
    return out


@lru_cache(maxsize=None)
def class_number(disc: int) -> int:
    """h(disc), the number of reduced primitive forms.

    >>> class_number(-20), class_number(-68)
    (2, 4)
    """
    return len(reduced_forms(disc))


def sharp_bound(case: SplitCase, p: int, u: int = 2) -> int | None:
    """Degree of the sharpness construction, or None where there is none."""
    if u not in (2, 3):
        raise BadU(f"u must be 2 or 3, got {u}")
    case = SplitCase(case)
    if case is SplitCase.INERT:
        if (p * p - 1) % u:
            raise BadU(f"u = {u} does not divide p^2 - 1")
        return (p * p - 1) // u
    if case is SplitCase.RAMIFIED:
        return (p - 1) // 2
    return None


@dataclass(frozen=True)
class DegreeWitness:
    p: int
    disc: int
    f: int
    case: SplitCase
    u: int
    h: int
    bound: int
    d: int

    def to_dict(self) -> dict:
        out = asdict(self)
        out["case"] = self.case.value
        return out


def default_scan_bound(p: int) -> int:
    return max(4 * p + 4, 2000)


def _units_u(disc: int, f: int) -> int:
    return 3 if (disc, f) == (-3, 1) else 2


def _candidate(p: int, disc: int, f: int) -> DegreeWitness | None:
    order = QuadOrder(disc, f)
    case = splitting_case(order, p)
    u = _units_u(disc, f)
    bound = sharp_bound(case, p, u)
    if bound is None:
        return None
    h = class_number(order.discriminant)
    return DegreeWitness(p, disc, f, case, u, h, bound, h * bound)


def min_degree(p: int, scan_bound: int | None = None, all_ramified: bool = False) -> DegreeWitness:
    """Least degree over the inert and ramified sharpness families."""
    _check_odd_prime(p)
    scan_bound = default_scan_bound(p) if scan_bound is None else scan_bound
    candidates = []
    for disc in (-p, -4 * p):
        if is_fundamental(disc):
            candidates.append(_candidate(p, disc, 1))
    for k in range(3, scan_bound + 1):
        disc = -k
        if not is_fundamental(disc):
            continue
        chi = kronecker_symbol(disc, p)
        if chi == -1 or (chi == 0 and all_ramified):
            candidates.append(_candidate(p, disc, 1))
    candidates = [c for c in candidates if c is not None]
    if not candidates:
        raise NoWitness(f"no candidate order for p = {p} within |disc| <= {scan_bound}")
    return min(candidates, key=lambda w: (w.d, abs(w.disc), w.f))


def degree_table(p_max: int, scan_bound: int | None = None, all_ramified: bool = False) -> list[DegreeWitness]:
    if p_max < 3:
        raise ValueError("p_max must be >= 3")
    return [min_degree(p, scan_bound, all_ramified) for p in range(3, p_max + 1) if is_odd_prime(p)]


def gonality_threshold(p: int) -> tuple[Fraction, bool]:
    """7(p^3 - p)/1600 and whether it reaches p - 1."""
    value = Fraction(7 * (p**3 - p), 1600)
    return value, value >= p - 1
