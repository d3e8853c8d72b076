"""First cohomology of matrix groups with coefficients in V_n = (Z/p^n)^2.

A 1-cocycle is determined by its values on a generating set.  We record those
values as the unknown vector ``u`` (``rank`` residues per generator), push them
through a breadth-first spanning tree of the Cayley graph with

    phi(s x) = phi(s) + s . phi(x),

and collect a linear constraint on ``u`` whenever an element is reached a
second time.  Z^1 is the kernel of the collected constraints, so every span in
this module lives in these generator coordinates; ``Cocycle`` objects carry
the full element-indexed values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .matgroup import (
    CartanParams,
    Mat2,
    MatGroup,
    closure,
    cyclic_generators,
    full_preimage,
    standard_generators,
)
from .modarith import (
    RowSpan,
    howell_form,
    kernel,
    quotient_basis,
    solve_linear,
)

__all__ = [
    "ElementNotInGroup",
    "SquareDelta",
    "NoFixedVector",
    "BadDelta",
    "Module",
    "NATURAL",
    "Cocycle",
    "CocycleSpace",
    "H1Summary",
    "cocycle_data",
    "coboundary_space",
    "cocycle_space",
    "h1",
    "locally_trivial_cocycles",
    "h1_star",
    "restriction_trivial",
    "is_cocycle",
    "inert_witness_cocycle",
    "inert_full_subgroup",
    "ramified_witness_cocycle",
    "ramified_full_subgroup",
    "ramified_cochain_value",
]


class ElementNotInGroup(ValueError):
    pass


class SquareDelta(ValueError):
    pass


class NoFixedVector(ValueError):
    pass


class BadDelta(ValueError):
    pass


@dataclass(frozen=True)
class Module:
    """A G-module structure on (Z/m)^rank.

    ``natural`` is V_n itself; ``axis1`` / ``axis2`` are the coordinate lines
    W_1, W_2, which are submodules only for diagonal groups.
    """

    kind: str = "natural"

    @property
    def rank(self) -> int:
        return 2 if self.kind == "natural" else 1

    def matrix(self, g: Mat2) -> list[list[int]]:
        if self.kind == "natural":
            return [[g.a, g.b], [g.c, g.d]]
        if self.kind == "axis1":
            return [[g.a]]
        if self.kind == "axis2":
            return [[g.d]]
        raise ValueError(f"unknown module kind {self.kind!r}")

    def minus_identity(self, g: Mat2) -> list[list[int]]:
        M = self.matrix(g)
        return [[(x - (i == j)) % g.m for j, x in enumerate(row)] for i, row in enumerate(M)]

    def act(self, g: Mat2, v: Sequence[int]) -> tuple[int, ...]:
        M = self.matrix(g)
        return tuple(sum(a * x for a, x in zip(row, v)) % g.m for row in M)


NATURAL = Module()


@dataclass(frozen=True, eq=False)
class Cocycle:
    """A map G -> M stored by its values on every element."""

    group: MatGroup
    values: dict[Mat2, tuple[int, ...]]
    module: Module = NATURAL

    def __call__(self, g: Mat2) -> tuple[int, ...]:
        return self.values[g]

    def is_cocycle(self) -> bool:
        return is_cocycle(self.group, self.values, self.module)

    def on_generators(self, gens: Sequence[Mat2]) -> list[int]:
        return [x for s in gens for x in self.values[s]]


def is_cocycle(G: MatGroup, values: dict[Mat2, Sequence[int]], module: Module = NATURAL) -> bool:
    """Exhaustive check of phi(gh) = phi(g) + g phi(h)."""
    m = G.modulus
    if any(values[G.identity()]):
        return False
    for g in G.elements:
        pg = values[g]
        for h in G.elements:
            gh = values[g @ h]
            gp = module.act(g, values[h])
            if any((a + b - c) % m for a, b, c in zip(pg, gp, gh)):
                return False
    return True


@dataclass(frozen=True, eq=False)
class CocycleSpace:
    """Z^1 and B^1 of a group in generator coordinates."""

    group: MatGroup
    module: Module
    gens: tuple[Mat2, ...]
    coeff: dict[Mat2, list[list[int]]]
    z1: RowSpan
    b1: RowSpan

    @property
    def ncols(self) -> int:
        return self.module.rank * len(self.gens)

    def value(self, u: Sequence[int], g: Mat2) -> tuple[int, ...]:
        m = self.group.modulus
        return tuple(sum(c * x for c, x in zip(row, u)) % m for row in self.coeff[g])

    def evaluate(self, u: Sequence[int]) -> Cocycle:
        values = {g: self.value(u, g) for g in self.group.elements}
        return Cocycle(self.group, values, self.module)

    def coordinates(self, phi: Cocycle) -> list[int]:
        """Generator coordinates of a cocycle; raises if phi is not in Z^1."""
        u = phi.on_generators(self.gens)
        if not self.z1.contains(u):
            raise ValueError("values on generators do not define a cocycle")
        if any(self.value(u, g) != tuple(phi(g)) for g in self.group.elements):
            raise ValueError("cocycle disagrees with the one determined by its generator values")
        return u


def cocycle_data(G: MatGroup, module: Module = NATURAL) -> CocycleSpace:
    # groups compare equal regardless of generators, but coordinates depend on them
    return _cocycle_data(G, G.generators, module)


@lru_cache(maxsize=256)
def _cocycle_data(G: MatGroup, generators: tuple[Mat2, ...], module: Module) -> CocycleSpace:
    m = G.modulus
    r = module.rank
    gens = tuple(dict.fromkeys(s for s in generators if not s.is_identity()))
    ncols = r * len(gens)
    ident = G.identity()
    coeff: dict[Mat2, list[list[int]]] = {ident: [[0] * ncols for _ in range(r)]}
    constraints = RowSpan.zero(m, ncols)
    queue = [ident]
    mats = [module.matrix(s) for s in gens]
    for x in queue:
        cx = coeff[x]
        for idx, s in enumerate(gens):
            S = mats[idx]
            cand = [
                [
                    (sum(S[i][t] * cx[t][col] for t in range(r)) + (col == idx * r + i)) % m
                    for col in range(ncols)
                ]
                for i in range(r)
            ]
            y = s @ x
            cy = coeff.get(y)
            if cy is None:
                coeff[y] = cand
                queue.append(y)
                continue
            for i in range(r):
                diff = [(a - b) % m for a, b in zip(cand[i], cy[i])]
                if any(diff) and not constraints.contains(diff):
                    constraints = RowSpan(m, ncols, howell_form(constraints.rows + (tuple(diff),), m, ncols))
    if len(coeff) != G.order:
        raise ValueError("generators do not generate the group")
    z1 = kernel(constraints.rows, m, ncols) if ncols else RowSpan.zero(m, 0)
    b_rows = []
    for i in range(r):
        row = []
        for s in gens:
            D = module.minus_identity(s)
            row.extend(D[t][i] for t in range(r))
        b_rows.append(row)
    b1 = RowSpan.span(b_rows, m, ncols) if ncols else RowSpan.zero(m, 0)
    return CocycleSpace(G, module, gens, coeff, z1, b1)


def coboundary_space(G: MatGroup, module: Module = NATURAL) -> RowSpan:
    """B^1: the cocycles g -> (g - 1) x."""
    return cocycle_data(G, module).b1


def cocycle_space(G: MatGroup, module: Module = NATURAL) -> RowSpan:
    """Z^1, in generator coordinates."""
    return cocycle_data(G, module).z1


@dataclass(frozen=True)
class H1Summary:
    divisors: list[int]
    representatives: list[Cocycle] = field(repr=False)

    @property
    def is_trivial(self) -> bool:
        return not self.divisors

    @property
    def order(self) -> int:
        out = 1
        for d in self.divisors:
            out *= d
        return out


def _summary(space: CocycleSpace, top: RowSpan) -> H1Summary:
    parts = quotient_basis(top, space.b1)
    return H1Summary([d for d, _ in parts], [space.evaluate(u) for _, u in parts])


def h1(G: MatGroup, module: Module = NATURAL) -> H1Summary:
    space = cocycle_data(G, module)
    return _summary(space, space.z1)


def _locally_trivial_in(space: CocycleSpace, elements: Sequence[Mat2]) -> RowSpan:
    m = space.group.modulus
    r = space.module.rank
    ncols = space.ncols
    L = space.z1
    for g in elements:
        D = space.module.minus_identity(g)
        image = RowSpan.span([[D[i][j] for i in range(r)] for j in range(r)], m, r)
        if len(image.rows) == r and all(image.rows[i][i] == 1 for i in range(r)):
            continue  # g - 1 is invertible
        P = space.coeff[g]
        vals = [[sum(c * x for c, x in zip(P[i], u)) % m for i in range(r)] for u in L.rows]
        if all(image.contains(v) for v in vals):
            continue
        # (t, x) with sum_i t_i P u_i = (g - 1) x; keep the t-part
        k = len(L.rows)
        A = [[vals[j][i] for j in range(k)] + [(-D[i][c]) % m for c in range(r)] for i in range(r)]
        ker = kernel(A, m, k + r)
        new_rows = []
        for t in ker.rows:
            vec = [0] * ncols
            for coef, u in zip(t[:k], L.rows):
                if coef:
                    for c in range(ncols):
                        vec[c] = (vec[c] + coef * u[c]) % m
            new_rows.append(vec)
        L = RowSpan.span(new_rows, m, ncols)
    return L


def locally_trivial_cocycles(G: MatGroup, module: Module = NATURAL) -> RowSpan:
    """Cocycles whose value at every g lies in Im(g - 1)."""
    return _locally_trivial(G, G.generators, module)


@lru_cache(maxsize=256)
def _locally_trivial(G: MatGroup, generators: tuple[Mat2, ...], module: Module) -> RowSpan:
    space = _cocycle_data(G, generators, module)
    if not space.ncols:
        return space.z1
    return _locally_trivial_in(space, cyclic_generators(G))


def h1_star(G: MatGroup, module: Module = NATURAL) -> H1Summary:
    space = cocycle_data(G, module)
    return _summary(space, locally_trivial_cocycles(G, module))


def restriction_trivial(phi: Cocycle, g: Mat2) -> bool:
    """Whether phi restricted to <g> is a coboundary."""
    if g not in phi.group:
        raise ElementNotInGroup(f"{g} is not in the group")
    return solve_linear(phi.module.minus_identity(g), list(phi(g)), g.m) is not None


def _is_square_unit(x: int, p: int) -> bool:
    return x % p != 0 and pow(x, (p - 1) // 2, p) == 1


def inert_full_subgroup(p: int, delta: int, image_choice: str) -> MatGroup:
    """Full subgroup of N_{delta,p^2} with mod-p image 1, <sigma1> or <sigma2>."""
    params = CartanParams(p, 2, delta)
    if image_choice == "trivial":
        G1 = MatGroup(p, (Mat2.identity(p),), ())
    elif image_choice in ("sigma1", "sigma2"):
        G1 = closure([standard_generators(params)[image_choice].reduce(1)], p)
    else:
        raise ValueError(f"image_choice must be trivial, sigma1 or sigma2, not {image_choice!r}")
    return full_preimage(G1, params)


def inert_witness_cocycle(p: int, delta: int, image_choice: str = "sigma1") -> Cocycle:
    """The homomorphism h1 -> v, h2 -> 0 on <h1, h2>, extended by zero on sigma."""
    if delta % p == 0 or _is_square_unit(delta, p):
        raise SquareDelta(f"delta = {delta} is not a nonsquare unit mod {p}")
    G = inert_full_subgroup(p, delta, image_choice)
    m = p * p
    v = (p, 0) if image_choice == "sigma2" else (0, p)
    if any(g.act(v) != v for g in G.generators):
        raise NoFixedVector(f"{v} is not fixed by the group")
    sigma = standard_generators(CartanParams(p, 2, delta)).get(image_choice)
    values = {}
    for g in G.elements:
        k = g if g.reduce(1).is_identity() else sigma @ g
        a = ((k.a - 1) // p) % p
        values[g] = ((a * v[0]) % m, (a * v[1]) % m)
    return Cocycle(G, values)


def ramified_full_subgroup(p: int, delta: int) -> MatGroup:
    """Full subgroup of N_{delta,p^2} with mod-p image [[1, *], [0, +-1]]."""
    params = CartanParams(p, 2, delta)
    std = standard_generators(params)
    G1 = closure([std["sigma2"].reduce(1), std["g"].reduce(1)], p)
    return full_preimage(G1, params)


def ramified_cochain_value(a: int, b: int, p: int) -> tuple[int, int]:
    """Value at sigma^a g^b of the dihedral cochain, as an element of V_2."""
    m = p * p
    sign = -1 if a % 2 else 1
    first = b * (b - 1) // 2
    second = sign * b + (1 - sign) // 2
    return ((p * first) % m, (p * second) % m)


def ramified_witness_cocycle(p: int, delta: int) -> Cocycle:
    """The dihedral cochain on G/H inflated to the full subgroup G."""
    if delta % p or delta % (p * p) == 0:
        raise BadDelta(f"need p | delta and p^2 not dividing delta, got delta = {delta}")
    G = ramified_full_subgroup(p, delta)
    values = {}
    for g in G.elements:
        r = g.reduce(1)
        a = 0 if r.d == 1 else 1
        values[g] = ramified_cochain_value(a, r.b, p)
    return Cocycle(G, values)
