"""Finite subgroups of GL_2(Z/p^n), with the Cartan groups as the main case.

A group is stored as its full sorted element tuple plus a generating list.
Matrices are ``Mat2`` tuples ``(a, b, c, d, m)`` for [[a, b], [c, d]] mod m,
so lexicographic tuple order is the canonical matrix order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple, Sequence

from .modarith import Residue, prime_power

__all__ = [
    "EvenPrime",
    "NonInvertibleGenerator",
    "BadLevel",
    "NotSubgroupOfN",
    "NotInImage",
    "BudgetExceeded",
    "NontrivialIntersection",
    "Mat2",
    "MatGroup",
    "CartanParams",
    "closure",
    "cartan_subgroup",
    "cartan_normalizer",
    "reduce_group",
    "reduction_kernel",
    "is_full_subgroup",
    "full_preimage",
    "cyclic_generators",
    "enumerate_subgroups",
    "twist_admissible",
    "standard_generators",
    "gl2_order",
    "all_subgroups_max_gens",
]


class EvenPrime(ValueError):
    pass


class NonInvertibleGenerator(ValueError):
    pass


class BadLevel(ValueError):
    pass


class NotSubgroupOfN(ValueError):
    pass


class NotInImage(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class NontrivialIntersection(ValueError):
    pass


class Mat2(NamedTuple):
    a: int
    b: int
    c: int
    d: int
    m: int

    @classmethod
    def of(cls, a: int, b: int, c: int, d: int, m: int) -> Mat2:
        return cls(a % m, b % m, c % m, d % m, m)

    @classmethod
    def identity(cls, m: int) -> Mat2:
        return cls(1, 0, 0, 1, m)

    @classmethod
    def diag(cls, x: int, y: int, m: int) -> Mat2:
        return cls.of(x, 0, 0, y, m)

    def __matmul__(self, o: Mat2) -> Mat2:  # type: ignore[override]
        a, b, c, d, m = self
        e, f, g, h, _ = o
        return Mat2((a * e + b * g) % m, (a * f + b * h) % m, (c * e + d * g) % m, (c * f + d * h) % m, m)

    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.m

    def is_invertible(self) -> bool:
        return self.det() % prime_power(self.m)[0] != 0

    def inverse(self) -> Mat2:
        a, b, c, d, m = self
        t = pow(self.det(), -1, m)
        return Mat2.of(d * t, -b * t, -c * t, a * t, m)

    def __pow__(self, k: int) -> Mat2:  # type: ignore[override]
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Mat2.identity(self.m), self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def act(self, v: Sequence[int]) -> tuple[int, int]:
        x, y = v[0], v[1]
        return ((self.a * x + self.b * y) % self.m, (self.c * x + self.d * y) % self.m)

    def minus_identity(self) -> list[list[int]]:
        m = self.m
        return [[(self.a - 1) % m, self.b], [self.c, (self.d - 1) % m]]

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def residues(self) -> tuple[Residue, Residue, Residue, Residue]:
        return tuple(Residue(x, self.m) for x in self.entries())  # type: ignore[return-value]

    def reduce(self, k: int) -> Mat2:
        """Entrywise reduction to the modulus p^k."""
        p, _ = prime_power(self.m)
        return Mat2.of(self.a, self.b, self.c, self.d, p**k)

    def is_identity(self) -> bool:
        return self.a == 1 and self.b == 0 and self.c == 0 and self.d == 1

    def order(self) -> int:
        k, x = 1, self
        while not x.is_identity():
            x = x @ self
            k += 1
        return k

    def __str__(self) -> str:
        return f"{self.a};{self.b};{self.c};{self.d}"


def gl2_order(m: int) -> int:
    p, n = prime_power(m)
    return p ** (4 * (n - 1)) * (p**2 - 1) * (p**2 - p)


@dataclass(frozen=True, eq=False)
class MatGroup:
    modulus: int
    elements: tuple[Mat2, ...]
    generators: tuple[Mat2, ...] = ()

    @cached_property
    def _set(self) -> frozenset[Mat2]:
        return frozenset(self.elements)

    @cached_property
    def _hash(self) -> int:
        return hash((self.modulus, self.elements))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatGroup):
            return NotImplemented
        return self.modulus == other.modulus and self.elements == other.elements

    def __contains__(self, g: Mat2) -> bool:
        return g in self._set

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def level(self) -> int:
        return prime_power(self.modulus)[1]

    @property
    def prime(self) -> int:
        return prime_power(self.modulus)[0]

    @property
    def element_set(self) -> frozenset[Mat2]:
        return self._set

    def identity(self) -> Mat2:
        return Mat2.identity(self.modulus)

    def issubset(self, other: MatGroup) -> bool:
        return self.modulus == other.modulus and self._set <= other._set

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(g @ h == h @ g for g in gens for h in gens)

    def is_normal_in(self, other: MatGroup) -> bool:
        for x in other.generators:
            xi = x.inverse()
            if any(x @ g @ xi not in self for g in self.generators):
                return False
        return True

    def intersection(self, other: MatGroup) -> MatGroup:
        return MatGroup.from_elements([g for g in self.elements if g in other], self.modulus)

    def filter(self, pred) -> MatGroup:
        """Subgroup of elements satisfying ``pred`` (caller guarantees closure)."""
        return MatGroup.from_elements([g for g in self.elements if pred(g)], self.modulus)

    @classmethod
    def from_elements(cls, elements: Iterable[Mat2], modulus: int) -> MatGroup:
        """Wrap a closed element set, choosing a small generating set greedily."""
        elts = tuple(sorted(set(elements)))
        if not elts:
            raise ValueError("empty element set")
        target = len(elts)
        gens: list[Mat2] = []
        current: set[Mat2] = {Mat2.identity(modulus)}
        # prefer high-order elements so the generating set stays short
        for g in sorted(elts, key=lambda x: (-x.order(), x)):
            if len(current) == target:
                break
            if g not in current:
                gens.append(g)
                current = _close(gens, modulus, seed=current)
        if len(current) != target:
            raise ValueError("element set is not closed under multiplication")
        return cls(modulus, elts, tuple(gens))

    def describe(self) -> str:
        return f"order {self.order} <" + ", ".join(str(g) for g in self.generators) + ">"


def _close(gens: Sequence[Mat2], m: int, seed: Iterable[Mat2] | None = None) -> set[Mat2]:
    out = set(seed) if seed is not None else {Mat2.identity(m)}
    frontier = list(out)
    gens = [g for g in gens if not g.is_identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = s @ x
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return out


def closure(gens: Sequence[Mat2], m: int) -> MatGroup:
    """Smallest subgroup of GL_2(Z/m) containing ``gens``."""
    gens = [Mat2.of(*g[:4], m) for g in gens]
    for g in gens:
        if not g.is_invertible():
            raise NonInvertibleGenerator(f"{g} is not invertible mod {m}")
    elts = _close(gens, m)
    if gl2_order(m) % len(elts):
        raise AssertionError("closure order does not divide |GL_2|")
    return MatGroup(m, tuple(sorted(elts)), tuple(gens))


@dataclass(frozen=True)
class CartanParams:
    p: int
    n: int
    delta: int = field(default=0)

    def __post_init__(self) -> None:
        if self.p == 2:
            raise EvenPrime("p must be odd")
        if self.p < 3 or prime_power(self.p) != (self.p, 1):
            raise ValueError(f"{self.p} is not an odd prime")
        if self.n < 1:
            raise BadLevel("level must be >= 1")
        d = self.delta.value if isinstance(self.delta, Residue) else self.delta
        object.__setattr__(self, "delta", d % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p**self.n

    def at_level(self, n: int) -> CartanParams:
        return CartanParams(self.p, n, self.delta)

    def delta_class(self) -> str:
        d = self.delta % self.p
        if d == 0:
            return "ramified"
        return "split" if pow(d, (self.p - 1) // 2, self.p) == 1 else "inert"


@lru_cache(maxsize=64)
def cartan_subgroup(params: CartanParams) -> MatGroup:
    """C_{delta,m}: all [[a, b], [delta b, a]] with a^2 - delta b^2 a unit."""
    p, m, delta = params.p, params.modulus, params.delta
    elts = [
        Mat2(a, b, (delta * b) % m, a, m)
        for a in range(m)
        for b in range(m)
        if (a * a - delta * b * b) % p
    ]
    return MatGroup.from_elements(elts, m)


@lru_cache(maxsize=64)
def cartan_normalizer(params: CartanParams) -> MatGroup:
    """N_{delta,m} = <diag(-1, 1), C_{delta,m}>."""
    C = cartan_subgroup(params)
    m = params.modulus
    s = Mat2.diag(-1, 1, m)
    elts = set(C.elements) | {s @ g for g in C.elements}
    return MatGroup(m, tuple(sorted(elts)), C.generators + (s,))


def standard_generators(params: CartanParams) -> dict[str, Mat2]:
    """The named matrices used by the inert and ramified constructions."""
    p, m, delta = params.p, params.modulus, params.delta
    return {
        "sigma1": Mat2.diag(-1, 1, m),
        "sigma2": Mat2.diag(1, -1, m),
        "h1": Mat2.diag(1 + p, 1 + p, m),
        "h2": Mat2.of(1, p, delta * p, 1, m),
        "g": Mat2.of(1, 1, delta, 1, m),
        "h": Mat2.diag(1 + p, 1 + p, m),
    }


def _check_level(G: MatGroup, k: int) -> None:
    if not 1 <= k <= G.level:
        raise BadLevel(f"level {k} outside 1..{G.level}")


def reduce_group(G: MatGroup, k: int) -> MatGroup:
    """Image of G under reduction mod p^k."""
    _check_level(G, k)
    mk = G.prime**k
    if mk == G.modulus:
        return G
    elts = {g.reduce(k) for g in G.elements}
    gens = tuple(dict.fromkeys(g.reduce(k) for g in G.generators))
    return MatGroup(mk, tuple(sorted(elts)), gens)


def reduction_kernel(G: MatGroup, k: int) -> MatGroup:
    """Elements of G congruent to the identity mod p^k."""
    _check_level(G, k)
    return G.filter(lambda g: g.reduce(k).is_identity())


def _check_in_normalizer(G: MatGroup, params: CartanParams) -> MatGroup:
    N = cartan_normalizer(params)
    if G.modulus != N.modulus or not G.issubset(N):
        raise NotSubgroupOfN(f"group of order {G.order} is not inside N_{{{params.delta},{params.modulus}}}")
    return N


def is_full_subgroup(G: MatGroup, params: CartanParams) -> bool:
    N = _check_in_normalizer(G, params)
    return reduction_kernel(G, 1).elements == reduction_kernel(N, 1).elements


def full_preimage(G1: MatGroup, params: CartanParams) -> MatGroup:
    """The full subgroup of N_{delta,p^n} whose reduction mod p is G1."""
    N = cartan_normalizer(params)
    image = reduce_group(N, 1)
    if G1.modulus != params.p or not G1.issubset(image):
        raise NotInImage("G1 is not contained in the mod-p image of N")
    std = standard_generators(params)
    preferred = {}
    for name in ("sigma1", "sigma2", "g"):
        preferred.setdefault(std[name].reduce(1), std[name])
    lifts = []
    for x in G1.generators:
        if x.is_identity():
            continue
        if x in preferred:
            lifts.append(preferred[x])
        else:
            lifts.append(min(g for g in N.elements if g.reduce(1) == x))
    K = reduction_kernel(N, 1)
    G = closure(lifts + list(K.generators), params.modulus)
    return G


def cyclic_generators(G: MatGroup) -> list[Mat2]:
    """One generator for each cyclic subgroup of G, in canonical order."""
    covered: set[Mat2] = set()
    reps = []
    for g in G.elements:
        if g in covered:
            continue
        reps.append(g)
        powers = [Mat2.identity(G.modulus)]
        x = g
        while not x.is_identity():
            powers.append(x)
            x = x @ g
        k = len(powers)
        for e in range(1, k):
            if math.gcd(e, k) == 1:
                covered.add(powers[e])
        if k == 1:
            covered.add(g)
    return reps


def _extend(H: MatGroup, g: Mat2) -> frozenset[Mat2]:
    gens = list(H.generators) + [g]
    return frozenset(_close(gens, H.modulus, seed=H.elements))


def enumerate_subgroups(G: MatGroup, max_gens: int = 3, budget: int = 200_000) -> list[MatGroup]:
    """All subgroups of G generated by at most ``max_gens`` elements.

    ``budget`` caps the number of candidate closures; exceeding it raises
    BudgetExceeded.  The result is sorted by (order, elements).
    """
    if max_gens < 1:
        raise ValueError("max_gens must be >= 1")
    m = G.modulus
    reps = cyclic_generators(G)
    found: dict[frozenset[Mat2], MatGroup] = {}
    layer = []
    for g in reps:
        grp = closure([g], m) if not g.is_identity() else MatGroup(m, (g,), ())
        key = grp.element_set
        if key not in found:
            found[key] = grp
            layer.append(grp)
    spent = 0
    for _ in range(max_gens - 1):
        nxt = []
        for H in layer:
            for g in reps:
                if g in H:
                    continue
                spent += 1
                if spent > budget:
                    raise BudgetExceeded(f"more than {budget} candidate closures")
                key = _extend(H, g)
                if key in found:
                    continue
                grp = MatGroup(m, tuple(sorted(key)), H.generators + (g,))
                found[key] = grp
                nxt.append(grp)
        if not nxt:
            break
        layer = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.elements))


def all_subgroups_max_gens(G: MatGroup) -> int:
    """A generator count sufficient to reach every subgroup of G."""
    return max(1, math.ceil(math.log2(max(G.order, 2))))


def twist_admissible(A: MatGroup, G: MatGroup) -> bool:
    """Whether G is normal in the group generated by A and G."""
    if A.modulus != G.modulus:
        raise ValueError("groups live in different ambient groups")
    if len(A.element_set & G.element_set) != 1:
        raise NontrivialIntersection("A and G intersect nontrivially")
    AG = closure(list(A.generators) + list(G.generators), G.modulus)
    return G.is_normal_in(AG)
