"""Exact arithmetic and linear algebra over the residue rings Z/p^n.

Submodules of (Z/p^n)^c are kept in Howell normal form.  Because Z/p^n is a
local ring every nonzero element is a unit times a power of p, so the Howell
form reduces to an echelon form with pivots p^v, entries above a pivot reduced
into [0, p^v), and, for every pivot row, its annihilator multiple p^(n-v) * row
folded back into the rows below.  That last step is what makes membership
testing decisive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "NonUnit",
    "DimensionMismatch",
    "NotContained",
    "BadModulus",
    "Residue",
    "Vector2",
    "RowSpan",
    "Solution",
    "prime_power",
    "valuation",
    "unit_inverse",
    "howell_form",
    "kernel",
    "solve_linear",
    "quotient_invariants",
    "quotient_basis",
]

MAX_MODULUS = 2**31


class NonUnit(ArithmeticError):
    """Raised when inverting a residue divisible by p."""


class DimensionMismatch(ValueError):
    pass


class NotContained(ValueError):
    """Raised when a claimed submodule is not contained in the supermodule."""


class BadModulus(ValueError):
    pass


@lru_cache(maxsize=None)
def prime_power(m: int) -> tuple[int, int]:
    """Return (p, n) with m == p**n for an odd prime p, else raise BadModulus."""
    if m < 3 or m > MAX_MODULUS or m % 2 == 0:
        raise BadModulus(f"modulus {m} is not an odd prime power in [3, 2^31]")
    p = 3
    while p * p <= m and m % p:
        p += 2
    if m % p:
        p = m
    n, r = 0, m
    while r % p == 0:
        r //= p
        n += 1
    if r != 1:
        raise BadModulus(f"modulus {m} is not a prime power")
    return p, n


def valuation(x: int, p: int, cap: int) -> int:
    """p-adic valuation of x, capped at ``cap`` (used for x == 0 mod p^cap)."""
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


@dataclass(frozen=True, order=True)
class Residue:
    """An element of Z/m stored as its least nonnegative representative."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        prime_power(self.modulus)
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other: Residue | int) -> int:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise DimensionMismatch("residues with different moduli")
            return other.value
        return int(other)

    def __add__(self, other: Residue | int) -> Residue:
        return Residue((self.value + self._coerce(other)) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other: Residue | int) -> Residue:
        return Residue((self.value - self._coerce(other)) % self.modulus, self.modulus)

    def __rsub__(self, other: int) -> Residue:
        return Residue((int(other) - self.value) % self.modulus, self.modulus)

    def __mul__(self, other: Residue | int) -> Residue:
        return Residue((self.value * self._coerce(other)) % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> Residue:
        return Residue(-self.value % self.modulus, self.modulus)

    def __int__(self) -> int:
        return self.value

    @property
    def prime(self) -> int:
        return prime_power(self.modulus)[0]

    def is_unit(self) -> bool:
        return self.value % self.prime != 0

    def inverse(self) -> Residue:
        return unit_inverse(self)

    def __repr__(self) -> str:
        return f"{self.value} mod {self.modulus}"


class Vector2(NamedTuple):
    """An element of V_n = Z/p^n x Z/p^n."""

    x: int
    y: int
    modulus: int

    @classmethod
    def of(cls, x: int, y: int, modulus: int) -> Vector2:
        return cls(x % modulus, y % modulus, modulus)

    def __add__(self, other: Vector2) -> Vector2:  # type: ignore[override]
        return Vector2.of(self.x + other.x, self.y + other.y, self.modulus)

    def scale(self, k: int) -> Vector2:
        return Vector2.of(k * self.x, k * self.y, self.modulus)

    def coords(self) -> tuple[int, int]:
        return (self.x, self.y)

    def residues(self) -> tuple[Residue, Residue]:
        return Residue(self.x, self.modulus), Residue(self.y, self.modulus)


def unit_inverse(a: Residue | int, modulus: int | None = None) -> Residue:
    """Inverse of a unit of Z/p^n.

    >>> unit_inverse(Residue(4, 25))
    19 mod 25
    """
    if not isinstance(a, Residue):
        if modulus is None:
            raise TypeError("modulus required for a plain integer")
        a = Residue(a, modulus)
    p, _ = prime_power(a.modulus)
    if a.value % p == 0:
        raise NonUnit(f"{a!r} is not a unit")
    return Residue(pow(a.value, -1, a.modulus), a.modulus)


def howell_form(rows: Iterable[Sequence[int]], modulus: int, ncols: int) -> tuple[tuple[int, ...], ...]:
    """Canonical Howell basis of the row span of ``rows`` over Z/modulus."""
    p, n = prime_power(modulus)
    m = modulus
    work = []
    for r in rows:
        if len(r) != ncols:
            raise DimensionMismatch(f"row of length {len(r)}, expected {ncols}")
        row = [x % m for x in r]
        if any(row):
            work.append(row)

    basis: list[list[int]] = []
    pivots: list[tuple[int, int]] = []  # (column, p^v)
    for j in range(ncols):
        best = None
        for i, row in enumerate(work):
            if row[j]:
                v = valuation(row[j], p, n)
                if best is None or v < best[0]:
                    best = (v, i)
        if best is None:
            continue
        v, i = best
        piv = work.pop(i)
        u = pow(piv[j] // p**v, -1, m)
        piv = [(u * x) % m for x in piv]
        pv = p**v
        for row in work:
            if row[j]:
                q = row[j] // pv
                for k in range(j, ncols):
                    row[k] = (row[k] - q * piv[k]) % m
        extra = [(x * p ** (n - v)) % m for x in piv]
        if any(extra):
            work.append(extra)
        work = [row for row in work if any(row)]
        basis.append(piv)
        pivots.append((j, pv))

    # reduce entries above each pivot into [0, p^v)
    for i, (j, pv) in enumerate(pivots):
        piv = basis[i]
        for k in range(i):
            row = basis[k]
            q = row[j] // pv
            if q:
                for c in range(j, ncols):
                    row[c] = (row[c] - q * piv[c]) % m
    return tuple(tuple(r) for r in basis)


def _pivot(row: Sequence[int]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    return -1


@dataclass(frozen=True)
class RowSpan:
    """A submodule of (Z/m)^ncols, stored by its Howell basis.

    Two spans are equal exactly when their ``rows`` are equal.
    """

    modulus: int
    ncols: int
    rows: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def span(cls, rows: Iterable[Sequence[int]], modulus: int, ncols: int) -> RowSpan:
        return cls(modulus, ncols, howell_form(rows, modulus, ncols))

    @classmethod
    def zero(cls, modulus: int, ncols: int) -> RowSpan:
        return cls(modulus, ncols, ())

    @classmethod
    def full(cls, modulus: int, ncols: int) -> RowSpan:
        eye = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
        return cls.span(eye, modulus, ncols)

    @property
    def prime(self) -> int:
        return prime_power(self.modulus)[0]

    def pivots(self) -> list[tuple[int, int]]:
        return [(j, row[j]) for row in self.rows for j in [_pivot(row)]]

    def reduce(self, vec: Sequence[int]) -> tuple[list[int], list[int]]:
        """Reduce ``vec`` by the basis; return (remainder, coefficients)."""
        if len(vec) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(vec)}, expected {self.ncols}")
        m = self.modulus
        v = [x % m for x in vec]
        coeffs = []
        for row in self.rows:
            j = _pivot(row)
            q = v[j] // row[j]
            coeffs.append(q)
            if q:
                for k in range(j, self.ncols):
                    v[k] = (v[k] - q * row[k]) % m
        return v, coeffs

    def contains(self, vec: Sequence[int]) -> bool:
        rem, _ = self.reduce(vec)
        return not any(rem)

    def coordinates(self, vec: Sequence[int]) -> list[int]:
        """Coefficients expressing ``vec`` in the Howell basis."""
        rem, coeffs = self.reduce(vec)
        if any(rem):
            raise NotContained(f"{list(vec)} is not in the span")
        return coeffs

    def __contains__(self, vec: Sequence[int]) -> bool:
        return self.contains(vec)

    def issubset(self, other: RowSpan) -> bool:
        return all(other.contains(r) for r in self.rows)

    def __le__(self, other: RowSpan) -> bool:
        return self.issubset(other)

    def __add__(self, other: RowSpan) -> RowSpan:
        if (self.modulus, self.ncols) != (other.modulus, other.ncols):
            raise DimensionMismatch("spans over different ambient modules")
        return RowSpan.span(self.rows + other.rows, self.modulus, self.ncols)

    def scaled(self, k: int) -> RowSpan:
        return RowSpan.span([[k * x for x in r] for r in self.rows], self.modulus, self.ncols)

    def size(self) -> int:
        """Number of elements of the submodule."""
        out = 1
        for row in self.rows:
            out *= self.modulus // row[_pivot(row)]
        return out

    def __len__(self) -> int:
        return len(self.rows)

    def is_zero(self) -> bool:
        return not self.rows


class Solution(NamedTuple):
    particular: tuple[int, ...]
    kernel: RowSpan


def _as_int_matrix(A: Sequence[Sequence[Residue | int]], modulus: int | None) -> tuple[list[list[int]], int]:
    entries = [x for row in A for x in row]
    mods = {x.modulus for x in entries if isinstance(x, Residue)}
    if modulus is not None:
        mods.add(modulus)
    if len(mods) != 1:
        raise DimensionMismatch("entries must share exactly one modulus")
    (m,) = mods
    return [[int(x) % m for x in row] for row in A], m


def kernel(A: Sequence[Sequence[Residue | int]], modulus: int | None = None, ncols: int | None = None) -> RowSpan:
    """All x with A x = 0 over Z/modulus."""
    rows, m = _as_int_matrix(A, modulus)
    c = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    if any(len(r) != c for r in rows):
        raise DimensionMismatch("ragged matrix")
    r = len(rows)
    aug = [[rows[i][j] for i in range(r)] + [int(k == j) for k in range(c)] for j in range(c)]
    H = howell_form(aug, m, r + c)
    ker = [row[r:] for row in H if not any(row[:r])]
    return RowSpan(m, c, howell_form(ker, m, c))


def solve_linear(
    A: Sequence[Sequence[Residue | int]],
    b: Sequence[Residue | int],
    modulus: int | None = None,
) -> Solution | None:
    """Solve A x = b over Z/p^n.

    Returns one particular solution together with the full kernel, or None when
    the system has no solution.
    """
    rows, m = _as_int_matrix([*A, list(b)], modulus)
    *rows, rhs = rows
    r = len(rows)
    if r != len(rhs):
        raise DimensionMismatch(f"{r} equations but right-hand side of length {len(rhs)}")
    c = len(rows[0]) if rows else 0
    if any(len(row) != c for row in rows):
        raise DimensionMismatch("ragged matrix")
    aug = [[rows[i][j] for i in range(r)] + [int(k == j) for k in range(c)] for j in range(c)]
    H = howell_form(aug, m, r + c)
    v = list(rhs) + [0] * c
    for row in H:
        j = _pivot(row)
        if j >= r:
            break
        if v[j] % row[j]:
            return None
        q = v[j] // row[j]
        for k in range(j, r + c):
            v[k] = (v[k] - q * row[k]) % m
    if any(v[:r]):
        return None
    x = tuple((-t) % m for t in v[r:])
    ker = [row[r:] for row in H if not any(row[:r])]
    return Solution(x, RowSpan(m, c, howell_form(ker, m, c)))


def _relations(sup: RowSpan, sub: RowSpan) -> list[list[int]]:
    """Relations presenting sup/sub on the Howell generators of ``sup``."""
    if (sup.modulus, sup.ncols) != (sub.modulus, sub.ncols):
        raise DimensionMismatch("spans over different ambient modules")
    p, n = prime_power(sup.modulus)
    m = sup.modulus
    r = len(sup.rows)
    rels = []
    for i, row in enumerate(sup.rows):
        ann = m // row[_pivot(row)]
        coords = sup.coordinates([ann * x for x in row])
        rel = [-q % m for q in coords]
        rel[i] = (rel[i] + ann) % m
        rels.append(rel)
    for row in sub.rows:
        if not sup.contains(row):
            raise NotContained(f"generator {row} of the submodule is not in the supermodule")
        rels.append(sup.coordinates(row))
    return [rel for rel in rels if any(rel)] if r else []


def quotient_basis(sup: RowSpan, sub: RowSpan) -> list[tuple[int, tuple[int, ...]]]:
    """Decompose sup/sub into cyclic factors.

    Returns (order, representative) pairs, orders descending, one per
    nontrivial cyclic factor; representatives are vectors of ``sup``.
    """
    p, n = prime_power(sup.modulus)
    m = sup.modulus
    r = len(sup.rows)
    R = _relations(sup, sub)
    # basis[i] holds the current i-th generator in coordinates on sup.rows
    basis = [[int(i == j) for j in range(r)] for i in range(r)]
    pos = 0
    diag: list[int] = []
    while pos < r:
        best = None
        for i in range(pos, len(R)):
            for j in range(pos, r):
                if R[i][j]:
                    v = valuation(R[i][j], p, n)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        R[pos], R[i] = R[i], R[pos]
        if j != pos:
            for row in R:
                row[pos], row[j] = row[j], row[pos]
            basis[pos], basis[j] = basis[j], basis[pos]
        u = R[pos][pos] // p**v
        uinv = pow(u, -1, m)
        # scaling column pos by uinv rescales its generator by u
        for row in R:
            row[pos] = (row[pos] * uinv) % m
        basis[pos] = [(u * x) % m for x in basis[pos]]
        pv = p**v
        for i2 in range(len(R)):
            if i2 != pos and R[i2][pos]:
                q = R[i2][pos] // pv
                R[i2] = [(a - q * b) % m for a, b in zip(R[i2], R[pos])]
        for k in range(pos + 1, r):
            if R[pos][k]:
                c = -(R[pos][k] // pv)
                # column k += c * column pos; generator pos -= c * generator k
                for row in R:
                    row[k] = (row[k] + c * row[pos]) % m
                basis[pos] = [(a - c * b) % m for a, b in zip(basis[pos], basis[k])]
        diag.append(pv)
        pos += 1
    orders = diag + [m] * (r - len(diag))
    out = []
    for order, coeffs in zip(orders, basis):
        if order == 1:
            continue
        vec = [0] * sup.ncols
        for q, row in zip(coeffs, sup.rows):
            if q:
                for k in range(sup.ncols):
                    vec[k] = (vec[k] + q * row[k]) % m
        out.append((order, tuple(vec)))
    out.sort(key=lambda t: -t[0])
    return out


def quotient_invariants(sup: RowSpan, sub: RowSpan) -> list[int]:
    """Elementary divisors of sup/sub, largest first.

    >>> full = RowSpan.full(9, 2)
    >>> quotient_invariants(full, RowSpan.span([[3, 0]], 9, 2))
    [9, 3]
    """
    return [order for order, _ in quotient_basis(sup, sub)]
