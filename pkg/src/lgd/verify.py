"""Machine checks of the vanishing and non-vanishing statements for H^1_*.

Every ``verify_*`` function returns a ``VerificationReport``.  A report passes
exactly when its ``failures`` list is empty; failed witness checks are copied
into ``failures`` as well.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .cohomology import (
    Cocycle,
    cocycle_data,
    h1_star,
    inert_full_subgroup,
    inert_witness_cocycle,
    locally_trivial_cocycles,
    ramified_full_subgroup,
    ramified_witness_cocycle,
    restriction_trivial,
)
from .matgroup import (
    CartanParams,
    Mat2,
    MatGroup,
    all_subgroups_max_gens,
    cartan_normalizer,
    cartan_subgroup,
    enumerate_subgroups,
    is_full_subgroup,
    reduce_group,
    standard_generators,
)
from .modarith import solve_linear

__all__ = [
    "VerificationReport",
    "smallest_square_unit",
    "smallest_nonsquare_unit",
    "verify_split_vanishing",
    "verify_inert_lemma",
    "verify_ramified_lemma",
    "verify_reduce_to_C",
    "verify_closed_forms",
    "verify_witness",
    "worker_count",
]

EXHAUSTIVE_COCYCLE_LIMIT = 200


@dataclass
class VerificationReport:
    lemma: str
    params: dict
    subgroups_checked: int = 0
    failures: list[str] = field(default_factory=list)
    witness_checks: list[tuple[str, bool]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, claim: str, ok: bool) -> bool:
        self.witness_checks.append((claim, bool(ok)))
        if not ok:
            self.failures.append(f"claim failed: {claim}")
        return bool(ok)

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "params": self.params,
            "subgroups_checked": self.subgroups_checked,
            "failures": list(self.failures),
            "witness_checks": [{"claim": c, "pass": ok} for c, ok in self.witness_checks],
            "notes": list(self.notes),
            "pass": self.passed,
        }


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("LGD_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn: Callable, items: Sequence) -> list:
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _h1_star_trivial(G: MatGroup) -> bool:
    return h1_star(G).is_trivial


def _reduce_to_c_holds(args: tuple[MatGroup, MatGroup]) -> bool:
    G, C = args
    if h1_star(G).is_trivial:
        return True
    return not h1_star(G.intersection(C)).is_trivial


def smallest_square_unit(p: int) -> int:
    return 1


def smallest_nonsquare_unit(p: int) -> int:
    for d in range(2, p):
        if pow(d, (p - 1) // 2, p) == p - 1:
            return d
    raise ValueError(f"no nonsquare mod {p}")


def _max_gens(N: MatGroup, budget: int | None) -> int:
    return all_subgroups_max_gens(N) if budget is None else budget


# mod-p shapes named in the vanishing statements
def _diag_pm1_1(g: Mat2) -> bool:
    return g.b == 0 and g.c == 0 and g.d == 1 and g.a in (1, g.m - 1)


def _diag_1_pm1(g: Mat2) -> bool:
    return g.b == 0 and g.c == 0 and g.a == 1 and g.d in (1, g.m - 1)


def _upper_1_pm1(g: Mat2) -> bool:
    return g.a == 1 and g.c == 0 and g.d in (1, g.m - 1)


INERT_SHAPES = (_diag_pm1_1, _diag_1_pm1)
RAMIFIED_SHAPES = (_upper_1_pm1, _diag_pm1_1)


def _image_in_shape(G: MatGroup, shapes: Iterable[Callable[[Mat2], bool]]) -> bool:
    """Literal containment of the mod-p image in one of ``shapes``."""
    image = reduce_group(G, 1)
    return any(all(shape(g) for g in image.elements) for shape in shapes)


@lru_cache(maxsize=8)
def _gl2(p: int) -> tuple[Mat2, ...]:
    return tuple(
        Mat2(a, b, c, d, p)
        for a, b, c, d in itertools.product(range(p), repeat=4)
        if (a * d - b * c) % p
    )


@lru_cache(maxsize=4096)
def _conjugate_into(image: frozenset[Mat2], shapes: tuple[Callable[[Mat2], bool], ...]) -> bool:
    p = next(iter(image)).m
    for x in _gl2(p):
        xi = x.inverse()
        conj = [x @ g @ xi for g in image]
        if any(all(shape(h) for h in conj) for shape in shapes):
            return True
    return False


def _image_exceptional(G: MatGroup, shapes: tuple[Callable[[Mat2], bool], ...]) -> bool:
    """Whether the mod-p image lies in a GL_2(Z/p)-conjugate of one of ``shapes``."""
    return _conjugate_into(reduce_group(G, 1).element_set, shapes)


def _describe(G: MatGroup) -> str:
    return G.describe()


def _check_vanishing(report: VerificationReport, groups: list[MatGroup], tag: str = "") -> None:
    results = _pmap(_h1_star_trivial, groups)
    report.subgroups_checked += len(groups)
    for G, ok in zip(groups, results):
        if not ok:
            report.failures.append(f"{tag}H1_* nonzero for {_describe(G)}")


def verify_witness(report: VerificationReport, phi: Cocycle, label: str) -> None:
    """Cocycle law, local triviality at every element, and a nonzero class."""
    G = phi.group
    if G.order <= EXHAUSTIVE_COCYCLE_LIMIT:
        report.check(f"{label}: cocycle law (all pairs)", phi.is_cocycle())
    else:
        report.check(f"{label}: cocycle law (generator propagation)", _cocycle_by_generators(phi))
    report.check(
        f"{label}: restriction to every cyclic subgroup is a coboundary",
        all(restriction_trivial(phi, g) for g in G.elements),
    )
    space = cocycle_data(G)
    try:
        u = space.coordinates(phi)
    except ValueError:
        report.check(f"{label}: determined by generator values", False)
        return
    report.check(f"{label}: lies in the locally trivial cocycles", locally_trivial_cocycles(G).contains(u))
    report.check(f"{label}: not a coboundary", not space.b1.contains(u))


def _cocycle_by_generators(phi: Cocycle) -> bool:
    # phi(s g) = phi(s) + s phi(g) for generators s and all g characterises Z^1
    G = phi.group
    m = G.modulus
    for s in G.generators:
        ps = phi(s)
        for g in G.elements:
            lhs = phi(s @ g)
            rhs = phi.module.act(s, phi(g))
            if any((a + b - c) % m for a, b, c in zip(ps, rhs, lhs)):
                return False
    return not any(phi(G.identity()))


def _timed(fn):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        report = fn(*args, **kwargs)
        report.elapsed = time.perf_counter() - start
        return report

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


@_timed
def verify_split_vanishing(p: int, n: int, budget: int | None = None) -> VerificationReport:
    """H^1_* vanishes on every enumerated subgroup of N_{delta,p^n}, delta a square."""
    delta = smallest_square_unit(p)
    N = cartan_normalizer(CartanParams(p, n, delta))
    max_gens = _max_gens(N, budget)
    report = VerificationReport("split", {"p": p, "n": n, "delta": delta, "budget": max_gens})
    _check_vanishing(report, enumerate_subgroups(N, max_gens))
    return report


def _part_one(report, p, delta, budget, max_level, shapes) -> set:
    seen = set()
    for level in range(1, max_level + 1):
        N = cartan_normalizer(CartanParams(p, level, delta))
        subs = enumerate_subgroups(N, _max_gens(N, budget))
        chosen = [G for G in subs if not _image_exceptional(G, shapes)]
        only_conj = [G for G in subs if _image_exceptional(G, shapes) and not _image_in_shape(G, shapes)]
        if only_conj:
            bad = sum(1 for G in only_conj if not h1_star(G).is_trivial)
            report.notes.append(
                f"part 1, level {level}: {len(only_conj)} subgroups are exceptional only up to conjugacy; "
                f"{bad} of them have nonzero H1_*"
            )
        report.notes.append(
            f"part 1, level {level}: {len(chosen)} of {len(subs)} subgroups have a mod-{p} image outside every "
            "conjugate of the exceptional shapes"
        )
        _check_vanishing(report, chosen, tag=f"part 1, level {level}: ")
        seen.update(G for G in chosen)
    return seen


def _default_level(p: int) -> int:
    return 2 if p == 3 else 1


@_timed
def verify_inert_lemma(p: int, budget: int | None = 3, max_level: int | None = None) -> VerificationReport:
    """Both parts of the inert-case statement for delta the least nonsquare unit.

    ``budget`` bounds generators in the part-1 enumeration; 0 skips part 1.
    """
    delta = smallest_nonsquare_unit(p)
    max_level = _default_level(p) if max_level is None else max_level
    report = VerificationReport(
        "inert", {"p": p, "delta": delta, "budget": budget, "max_level": max_level if budget != 0 else 0}
    )
    part1 = set()
    if budget != 0:
        part1 = _part_one(report, p, delta, budget, max_level, INERT_SHAPES)
    if max_level < 3:
        report.notes.append("levels above p^2 are outside the enumerated range")
    params = CartanParams(p, 2, delta)
    for choice in ("trivial", "sigma1", "sigma2"):
        G = inert_full_subgroup(p, delta, choice)
        report.subgroups_checked += 1
        report.check(f"part 2 [{choice}]: group is a full subgroup", is_full_subgroup(G, params))
        report.check(f"part 2 [{choice}]: mod-p image is exceptional", _image_in_shape(G, INERT_SHAPES))
        report.check(f"part 2 [{choice}]: disjoint from part 1", G not in part1)
        nonzero = not h1_star(G).is_trivial
        report.check(f"part 2 [{choice}]: H1_* nonzero (order {G.order})", nonzero)
        verify_witness(report, inert_witness_cocycle(p, delta, choice), f"part 2 [{choice}] witness")
    return report


@_timed
def verify_ramified_lemma(p: int, budget: int | None = 3, max_level: int | None = None) -> VerificationReport:
    """Both parts of the ramified-case statement with delta = p."""
    delta = p
    max_level = _default_level(p) if max_level is None else max_level
    report = VerificationReport(
        "ramified", {"p": p, "delta": delta, "budget": budget, "max_level": max_level if budget != 0 else 0}
    )
    part1 = set()
    if budget != 0:
        part1 = _part_one(report, p, delta, budget, max_level, RAMIFIED_SHAPES)
    if max_level < 3:
        report.notes.append("levels above p^2 are outside the enumerated range")
    params = CartanParams(p, 2, delta)
    G = ramified_full_subgroup(p, delta)
    report.subgroups_checked += 1
    report.check("part 2: group is a full subgroup", is_full_subgroup(G, params))
    image = reduce_group(G, 1)
    report.check("part 2: mod-p image is [[1,*],[0,+-1]]", image.order == 2 * p and all(map(_upper_1_pm1, image)))
    report.check("part 2: disjoint from part 1", G not in part1)
    report.check(f"part 2: H1_* nonzero (order {G.order})", not h1_star(G).is_trivial)
    verify_witness(report, ramified_witness_cocycle(p, delta), "part 2 witness")
    return report


@_timed
def verify_reduce_to_C(p: int, n: int, delta: int, budget: int | None = None) -> VerificationReport:
    """H^1_*(G) != 0 implies H^1_*(G cap C) != 0 for enumerated G in N."""
    params = CartanParams(p, n, delta)
    N = cartan_normalizer(params)
    C = cartan_subgroup(params)
    max_gens = _max_gens(N, budget)
    report = VerificationReport("reduce_to_C", {"p": p, "n": n, "delta": params.delta, "budget": max_gens})
    subs = enumerate_subgroups(N, max_gens)
    results = _pmap(_reduce_to_c_holds, [(G, C) for G in subs])
    report.subgroups_checked = len(subs)
    nonzero = 0
    for G, ok in zip(subs, results):
        if not ok:
            report.failures.append(f"H1_* nonzero on G but zero on G cap C for {_describe(G)}")
    nonzero = sum(1 for G in subs if not h1_star(G).is_trivial)
    report.notes.append(f"{nonzero} subgroups with nonzero H1_*")
    return report


def _solves(A: list[list[int]], x: Sequence[int], rhs: Sequence[int], m: int) -> bool:
    return all((sum(a * t for a, t in zip(row, x)) - r) % m == 0 for row, r in zip(A, rhs))


def _matrix_minus_one(g: Mat2) -> list[list[int]]:
    return g.minus_identity()


def _inert_closed_forms(report: VerificationReport, p: int, delta: int) -> None:
    m = p * p
    std = standard_generators(CartanParams(p, 2, delta))
    h1m, h2m, s2 = std["h1"], std["h2"], std["sigma2"]
    inv2 = pow(2, -1, m)
    shape_ok = eq1_ok = eq1_zero_ok = shape2_ok = eq2_ok = True
    stacked_A, stacked_b = [], []
    for a in range(p):
        for b in range(p):
            M = [[a * p % m, b * p % m], [b * delta * p % m, a * p % m]]
            rhs = [0, a * p % m]
            k = (h1m**a) @ (h2m**b)
            shape_ok &= M == _matrix_minus_one(k)
            if a * p % m:
                t = a * pow(a * a - delta * b * b, -1, m)
                eq1_ok &= _solves(M, [-b * t % m, a * t % m], rhs, m)
            else:
                eq1_zero_ok &= _solves(M, [0, 0], rhs, m)
            stacked_A += M
            stacked_b += rhs
            M2 = [[a * p % m, b * p % m], [-b * delta * p % m, (-2 - a * p) % m]]
            shape2_ok &= M2 == _matrix_minus_one(s2 @ k)
            eq2_ok &= _solves(M2, [p, -a * p * inv2 % m], rhs, m)
    report.check("h1^a h2^b system: coefficient matrix equals h1^a h2^b - 1", shape_ok)
    report.check("h1^a h2^b system: x = a/(a^2 - delta b^2) [-b, a] solves it when ap != 0", eq1_ok)
    report.check("h1^a h2^b system: x = 0 solves it when ap = 0", eq1_zero_ok)
    report.check("sigma2 h1^a h2^b system: coefficient matrix equals sigma2 h1^a h2^b - 1", shape2_ok)
    report.check("sigma2 h1^a h2^b system: x = p, y = -ap/2 solves it", eq2_ok)
    report.check(
        "h1^a h2^b system: no common solution over all (a, b)",
        solve_linear(stacked_A, stacked_b, m) is None,
    )


def gb_closed_form(b: int, delta: int, m: int, upper: int) -> Mat2:
    """[[1 + delta b(b-1)/2, b + delta S], [delta b, 1 + delta b(b-1)/2]], S = sum_{i=1}^{upper} i(i-1)/2."""
    tri = b * (b - 1) // 2
    S = sum(i * (i - 1) // 2 for i in range(1, upper + 1))
    return Mat2.of(1 + delta * tri, b + delta * S, delta * b, 1 + delta * tri, m)


def _ramified_closed_forms(report: VerificationReport, p: int, delta: int) -> None:
    m = p * p
    params = CartanParams(p, 2, delta)
    std = standard_generators(params)
    g, h, sigma = std["g"], std["h"], std["sigma2"]
    ord_g = g.order()
    powers = [Mat2.identity(m)]
    for _ in range(ord_g - 1):
        powers.append(powers[-1] @ g)
    sum_to_b = [b for b in range(ord_g) if gb_closed_form(b, delta, m, b) != powers[b]]
    shifted = [b for b in range(ord_g) if gb_closed_form(b, delta, m, b - 1) != powers[b]]
    report.check(
        f"g^b closed form with sum over i = 1..b matches repeated multiplication for 0 <= b < {ord_g}",
        not sum_to_b,
    )
    if sum_to_b:
        report.notes.append(f"g^b closed form with sum to b differs at b = {sum_to_b[:6]}{'...' if len(sum_to_b) > 6 else ''}")
    report.check(
        f"g^b closed form with sum over i = 1..b-1 matches repeated multiplication for 0 <= b < {ord_g}",
        not shifted,
    )

    dp = delta // p  # delta = p * dp with dp a unit
    inv_dp = pow(dp, -1, m)
    inv2 = pow(2, -1, m)
    gh_stated = gh_true = vanish = dih_stated = dih_true = True
    stacked_A, stacked_b = [], []
    for b in range(ord_g):
        tri = b * (b - 1) // 2
        S = sum(i * (i - 1) // 2 for i in range(1, b + 1))
        for c in range(p):
            rhs = [p * tri % m, p * b % m]
            gamma = powers[b] @ (h**c)
            M_true = _matrix_minus_one(gamma)
            M_stated = [
                [(c * p + delta * tri) % m, (b + c * p + delta * S) % m],
                [delta * b % m, (c * p + delta * tri) % m],
            ]
            stacked_A += M_true
            stacked_b += rhs
            if b % p:
                # x = p/delta, y = -c p^2/(delta b)
                x = inv_dp
                y = (-c * p * pow(dp * b, -1, m)) % m
                gh_stated &= _solves(M_stated, [x, y], rhs, m)
                gh_true &= _solves(M_true, [x, y], rhs, m)
            else:
                vanish &= not any(r % m for r in rhs)
            rhs2 = [p * tri % m, (-p * b + p) % m]
            D_stated = [
                [(c * p + delta * tri) % m, (b + b * c * p + delta * S) % m],
                [-delta * b % m, (-2 - c * p - delta * tri) % m],
            ]
            D_true = _matrix_minus_one(sigma @ gamma)
            sol2 = [0, (b - 1) * p * inv2 % m]
            dih_stated &= _solves(D_stated, sol2, rhs2, m)
            dih_true &= _solves(D_true, sol2, rhs2, m)
    report.check("g^b h^c system: x = p/delta, y = -cp^2/(delta b) solves the stated system for p not dividing b", gh_stated)
    report.check("g^b h^c system: the same x, y solve (g^b h^c - 1) x = xi(g^b h^c) for p not dividing b", gh_true)
    report.check("g^b h^c system: right-hand side vanishes when p divides b", vanish)
    report.check("sigma g^b h^c system: x = 0, y = (b-1)p/2 solves the stated system", dih_stated)
    report.check("sigma g^b h^c system: x = 0, y = (b-1)p/2 solves (sigma g^b h^c - 1) x = xi", dih_true)
    report.check("g^b h^c system: no common solution over all (b, c)", solve_linear(stacked_A, stacked_b, m) is None)


@_timed
def verify_closed_forms(p: int, delta: int | None = None, case: str = "inert") -> VerificationReport:
    """Substitute the explicit solutions into their linear systems over Z/p^2."""
    if case == "inert":
        delta = smallest_nonsquare_unit(p) if delta is None else delta
        if delta % p == 0 or pow(delta, (p - 1) // 2, p) == 1:
            raise ValueError(f"delta = {delta} is not a nonsquare unit mod {p}")
    elif case == "ramified":
        delta = p if delta is None else delta
        if delta % p or delta % (p * p) == 0:
            raise ValueError(f"delta = {delta} must be divisible by p exactly once")
    else:
        raise ValueError(f"unknown case {case!r}")
    report = VerificationReport("closed_forms", {"p": p, "delta": delta % (p * p), "case": case})
    if case == "inert":
        _inert_closed_forms(report, p, delta % (p * p))
    else:
        _ramified_closed_forms(report, p, delta % (p * p))
    return report
