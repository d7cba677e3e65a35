"""Primitive solutions of A^2 + D B^2 = C^2, lattice-point counts and linear partitions."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
from sympy import divisors, mobius, primefactors

from salem.spectra.errors import BudgetExceeded
from salem.spectra.polynomials import check_squarefree_D
from salem.spectra.reports import CountReport, count_row
from salem.spectra.sharding import run_sharded

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("D", "X", "count", "main_term", "abs_error", "ratio")
VARIANTS = ("all", "odd", "primitive", "odd_primitive")
REGION_KINDS = ("unit_disk", "ellipse_sector")
METHODS = ("brute", "param")
# C^2 must stay inside int64 for the vectorized brute force.
MAX_BRUTE_X = 2**31 - 1
DEFAULT_LATTICE_BUDGET = 10**8

_VARIANT_FACTORS = {
    "all": 1.0,
    "odd": 0.25,
    "primitive": 6 / math.pi**2,
    "odd_primitive": 2 / math.pi**2,
}


@dataclass(frozen=True, order=True)
class DiophantineTriple:
    """Integer solution of A^2 + D B^2 = C^2 with gcd(|A|, |C|) = 1."""

    A: int
    B: int
    C: int
    D: int

    def __post_init__(self) -> None:
        check_squarefree_D(self.D)
        if self.A * self.A + self.D * self.B * self.B != self.C * self.C:
            raise ValueError("triple must satisfy A^2 + D B^2 = C^2")
        if math.gcd(self.A, self.C) != 1:
            raise ValueError("triple must be primitive: gcd(|A|, |C|) = 1")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.A, self.B, self.C)


@dataclass(frozen=True)
class PrimitiveParams:
    """Normal form (D1, D2, u, v, tau) of a positive primitive solution."""

    D1: int
    D2: int
    u: int
    v: int
    tau: int = 1

    def __post_init__(self) -> None:
        if self.D1 <= 0 or self.D2 <= 0:
            raise ValueError("D1 and D2 must be positive")
        if self.u < 0 or self.v < 0:
            raise ValueError("u and v must be non-negative")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError("u and v must be coprime")
        if self.D1 * self.u * self.u > self.D2 * self.v * self.v:
            raise ValueError("parameters must satisfy D1 u^2 <= D2 v^2")
        if self.tau not in (1, 2):
            raise ValueError("tau must be 1 or 2")
        if self.tau == 2 and not (self.u % 2 and self.v % 2):
            raise ValueError("tau = 2 requires u and v odd")

    @property
    def D(self) -> int:
        return self.D1 * self.D2

    def triple(self) -> tuple[int, int, int]:
        """(A, B, C) = ((D2 v^2 - D1 u^2), 2uv, (D1 u^2 + D2 v^2)) / tau."""
        a = self.D2 * self.v * self.v - self.D1 * self.u * self.u
        c = self.D1 * self.u * self.u + self.D2 * self.v * self.v
        return (a // self.tau, 2 * self.u * self.v // self.tau, c // self.tau)


@dataclass(frozen=True)
class ConvexRegion:
    """Unit disk, or the sector {D1 x^2 + D2 y^2 <= 1, D1 x^2 <= D2 y^2, x, y >= 0}."""

    kind: str = "unit_disk"
    D1: int = 1
    D2: int = 1

    def __post_init__(self) -> None:
        if self.kind not in REGION_KINDS:
            raise ValueError(f"region kind must be one of {REGION_KINDS}")
        if self.D1 <= 0 or self.D2 <= 0:
            raise ValueError("D1 and D2 must be positive")

    @classmethod
    def unit_disk(cls) -> ConvexRegion:
        return cls("unit_disk")

    @classmethod
    def ellipse_sector(cls, D1: int, D2: int) -> ConvexRegion:
        return cls("ellipse_sector", D1, D2)

    @property
    def bounding_radius(self) -> float:
        # the sector sits inside the unit disk because D1, D2 >= 1
        return 1.0

    @property
    def volume(self) -> float:
        if self.kind == "unit_disk":
            return math.pi
        return math.pi / (8 * math.sqrt(self.D1 * self.D2))

    def _rows(self, limit: int) -> Iterator[tuple[int, int, int]]:
        """(x, y_lo, y_hi) for every column of integer points with scaled norm <= limit."""
        if self.kind == "unit_disk":
            reach = math.isqrt(limit)
            for x in range(-reach, reach + 1):
                y_hi = math.isqrt(limit - x * x)
                yield x, -y_hi, y_hi
            return
        d1, d2 = self.D1, self.D2
        for x in range(math.isqrt(limit // d1) + 1):
            rest = limit - d1 * x * x
            y_hi = math.isqrt(rest // d2)
            target = d1 * x * x
            y_lo = math.isqrt(target // d2)
            while d2 * y_lo * y_lo < target:
                y_lo += 1
            if y_lo <= y_hi:
                yield x, y_lo, y_hi


def _as_alpha(alpha: float | int | Fraction) -> Fraction:
    value = Fraction(alpha)
    if value <= 0:
        raise ValueError("alpha must be positive")
    return value


def lattice_count(
    region: ConvexRegion,
    alpha: float | int | Fraction,
    variant: str = "all",
    *,
    budget: int = DEFAULT_LATTICE_BUDGET,
) -> int:
    """Integer points of the closed dilate alpha * region, optionally odd and/or primitive."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    a = _as_alpha(alpha)
    # integer points satisfy norm <= alpha^2 iff norm <= floor(alpha^2)
    limit = math.floor(a * a)
    reach = math.isqrt(limit)
    size = (2 * reach + 1) ** 2
    if size > budget:
        raise BudgetExceeded(size, budget)

    need_odd = variant in ("odd", "odd_primitive")
    need_primitive = variant in ("primitive", "odd_primitive")
    total = 0
    for x, y_lo, y_hi in region._rows(limit):
        if not need_odd and not need_primitive:
            total += y_hi - y_lo + 1
            continue
        if need_odd and x % 2 == 0:
            continue
        ys = np.arange(y_lo, y_hi + 1, dtype=np.int64)
        mask = np.ones(ys.shape, dtype=bool)
        if need_odd:
            mask &= (ys % 2) == 1
        if need_primitive:
            mask &= np.gcd(abs(x), np.abs(ys)) == 1
        total += int(np.count_nonzero(mask))
    return total


def lattice_main_term(
    region: ConvexRegion,
    alpha: float | int | Fraction,
    variant: str = "all",
) -> float:
    """alpha^2 vol(region), scaled by 1, 1/4, 6/pi^2 or 2/pi^2 according to the variant."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    a = float(_as_alpha(alpha))
    return _VARIANT_FACTORS[variant] * a * a * region.volume


def mobius_primitive_count(region: ConvexRegion, alpha: float | int | Fraction) -> int:
    """Primitive points via sum over d of mu(d) (N(alpha/d) - 1)."""
    a = _as_alpha(alpha)
    total = 0
    for d in range(1, math.floor(a * Fraction(region.bounding_radius)) + 1):
        mu = int(mobius(d))
        if mu:
            total += mu * (lattice_count(region, a / d, "all") - 1)
    return total


# -- A^2 + D B^2 = C^2 -----------------------------------------------------------


def _orbit_size(a: int, b: int) -> int:
    """Distinct sign patterns of a non-negative triple (a, b, c) with c > 0."""
    return 2 * (2 if a else 1) * (2 if b else 1)


def _sign_closure(a: int, b: int, c: int) -> set[tuple[int, int, int]]:
    return {(sa * a, sb * b, sc * c) for sa in (1, -1) for sb in (1, -1) for sc in (1, -1)}


def _brute_representatives(D: int, X: int) -> Iterator[tuple[int, int, int]]:
    """Non-negative (A, B, C), C >= 1, by scanning B then C with an exact integer sqrt."""
    b = 0
    while D * b * b <= X * X:
        db2 = D * b * b
        c_lo = max(1, math.isqrt(db2))
        if c_lo * c_lo < db2:
            c_lo += 1
        if c_lo <= X:
            cs = np.arange(c_lo, X + 1, dtype=np.int64)
            a2 = cs * cs - db2
            a = np.sqrt(a2.astype(np.float64)).astype(np.int64)
            a += ((a + 1) * (a + 1) <= a2).astype(np.int64)
            a -= (a * a > a2).astype(np.int64)
            mask = (a * a == a2) & (np.gcd(a, cs) == 1)
            for a_val, c_val in zip(a[mask].tolist(), cs[mask].tolist(), strict=True):
                yield a_val, b, c_val
        b += 1


def _check_brute(D: int, X: int) -> None:
    check_squarefree_D(D)
    if X > MAX_BRUTE_X:
        raise ValueError(f"brute force supports X <= {MAX_BRUTE_X}")


def brute_force_primitive_count(D: int, X: int) -> int:
    """Exact count of (A, B, C) in Z^3 with |C| <= X and gcd(|A|, |C|) = 1."""
    _check_brute(D, X)
    if X <= 0:
        return 0
    return sum(_orbit_size(a, b) for a, b, _ in _brute_representatives(D, X))


def brute_force_primitive_solutions(D: int, X: int) -> frozenset[DiophantineTriple]:
    _check_brute(D, X)
    if X <= 0:
        return frozenset()
    signed: set[tuple[int, int, int]] = set()
    for a, b, c in _brute_representatives(D, X):
        signed |= _sign_closure(a, b, c)
    return frozenset(DiophantineTriple(a, b, c, D) for a, b, c in signed)


def divisor_pairs(D: int) -> list[tuple[int, int]]:
    return [(d, D // d) for d in divisors(D)]


def _parametrized(D1: int, D2: int, X: int) -> Iterator[tuple[int, int, int, int, int, int]]:
    """(u, v, tau, A, B, C) for every admissible parameter set with a primitive output."""
    D = D1 * D2
    branches = [(1, X)]
    if D % 2:
        # both-odd (u, v) with 2C = D1 u^2 + D2 v^2 <= 2X
        branches.append((2, 2 * X))
    for tau, bound in branches:
        for v in range(math.isqrt(bound // D2) + 1):
            d2v2 = D2 * v * v
            u_max = min(math.isqrt((bound - d2v2) // D1), math.isqrt(d2v2 // D1))
            if tau == 2:
                if v % 2 == 0:
                    continue
                us = range(1, u_max + 1, 2)
            else:
                us = range(u_max + 1)
            for u in us:
                if math.gcd(u, v) != 1:
                    continue
                d1u2 = D1 * u * u
                a, b, c = d2v2 - d1u2, 2 * u * v, d1u2 + d2v2
                if tau == 2:
                    a, b, c = a // 2, b // 2, c // 2
                # drops the gcd-2 outputs of both-odd (u, v) at tau = 1 and the
                # degenerate u = 0 outputs with D2 > 1
                if math.gcd(a, c) != 1:
                    continue
                yield u, v, tau, a, b, c


def iter_primitive_params(D: int, X: int) -> Iterator[tuple[PrimitiveParams, DiophantineTriple]]:
    """Parameters and the positive primitive solution each one produces."""
    check_squarefree_D(D)
    if X <= 0:
        return
    for D1, D2 in divisor_pairs(D):
        for u, v, tau, a, b, c in _parametrized(D1, D2, X):
            yield PrimitiveParams(D1, D2, u, v, tau), DiophantineTriple(a, b, c, D)


def _representatives_for_divisor(task: tuple[int, int, int]) -> frozenset[tuple[int, int, int]]:
    D1, D2, X = task
    return frozenset((a, b, c) for _, _, _, a, b, c in _parametrized(D1, D2, X))


def _parametrized_representatives(D: int, X: int, workers: int) -> set[tuple[int, int, int]]:
    tasks = [(D1, D2, X) for D1, D2 in divisor_pairs(D)]
    merged: set[tuple[int, int, int]] = set()
    for part in run_sharded(_representatives_for_divisor, tasks, workers):
        merged |= part
    return merged


def generate_primitive_solutions(
    D: int, X: int, *, workers: int = 1
) -> frozenset[DiophantineTriple]:
    """Every primitive solution with |C| <= X, from the (D1, D2, u, v, tau) parametrization."""
    check_squarefree_D(D)
    if X <= 0:
        return frozenset()
    signed: set[tuple[int, int, int]] = set()
    for a, b, c in _parametrized_representatives(D, X, workers):
        signed |= _sign_closure(a, b, c)
    logger.debug("generated %d signed solutions for D=%d X=%d", len(signed), D, X)
    return frozenset(DiophantineTriple(a, b, c, D) for a, b, c in signed)


def count_primitive_solutions(D: int, X: int, method: str = "param", *, workers: int = 1) -> int:
    """Count through the brute-force scan or through parametrized sign orbits."""
    if method == "brute":
        return brute_force_primitive_count(D, X)
    if method != "param":
        raise ValueError(f"method must be one of {METHODS}")
    check_squarefree_D(D)
    if X <= 0:
        return 0
    reps = _parametrized_representatives(D, X, workers)
    return sum(_orbit_size(a, b) for a, b, _ in reps)


def distinct_prime_count(D: int) -> int:
    return len(primefactors(D))


def asymptotic_main_term(D: int, X: float) -> float:
    """2^t 8X/(pi sqrt D) for odd D and 2^t 6X/(pi sqrt D) for even D."""
    check_squarefree_D(D)
    if X <= 0:
        return 0.0
    factor = 8 if D % 2 else 6
    return 2 ** distinct_prime_count(D) * factor * X / (math.pi * math.sqrt(D))


def case_main_terms(D: int, X: float) -> dict[str, float]:
    """Positive-solution main terms per parity case; eight times their sum is the total."""
    check_squarefree_D(D)
    scale = 2 ** distinct_prime_count(D) * max(X, 0) / (math.pi * math.sqrt(D))
    if D % 2 == 0:
        return {"I": 3 * scale / 4}
    return {"III": scale / 2, "IV": scale / 2}


def count_report(
    D_values: Iterable[int],
    X_values: Iterable[int],
    method: str = "param",
    *,
    workers: int = 1,
) -> CountReport:
    X_list = list(X_values)
    rows = []
    for D in D_values:
        for X in X_list:
            count = count_primitive_solutions(D, X, method, workers=workers)
            main = asymptotic_main_term(D, X)
            logger.info("D=%d X=%d count=%d main_term=%.3f", D, X, count, main)
            rows.append(count_row({"D": D, "X": X}, count, main))
    return CountReport(
        kind="triples",
        columns=REPORT_COLUMNS,
        rows=tuple(rows),
        metadata={"method": method},
    )


# -- linear partitions -------------------------------------------------------------


def _check_coeffs(coeffs: Sequence[int]) -> None:
    if not coeffs:
        raise ValueError("coeffs must be non-empty")
    if any(a <= 0 for a in coeffs):
        raise ValueError("coeffs must be positive integers")


def count_linear_nonneg(coeffs: Sequence[int], N: int) -> int:
    """Non-negative solutions of a_1 x_1 + ... + a_n x_n = N, by a prefix-sum table."""
    _check_coeffs(coeffs)
    if N < 0:
        raise ValueError("N must be non-negative")
    ways = [0] * (N + 1)
    ways[0] = 1
    for a in coeffs:
        for total in range(a, N + 1):
            ways[total] += ways[total - a]
    return ways[N]


def partition_main_term(coeffs: Sequence[int], N: int) -> float:
    """N^(n-1) / (a_1 ... a_n (n-1)!)."""
    _check_coeffs(coeffs)
    if reduce(math.gcd, coeffs) != 1:
        raise ValueError("coeffs must be relatively prime")
    if N < 0:
        raise ValueError("N must be non-negative")
    n = len(coeffs)
    return N ** (n - 1) / (math.prod(coeffs) * math.factorial(n - 1))
