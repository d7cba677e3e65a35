"""Exhaustive Salem census over coefficient boxes and the explicit counting constants."""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from salem.spectra.config import CensusQuery, as_rational
from salem.spectra.diophantine import distinct_prime_count
from salem.spectra.errors import BudgetExceeded
from salem.spectra.polynomials import (
    PalindromicPolynomial,
    SalemClassification,
    check_squarefree_D,
    classify,
    lambda_at_most,
    squarefree_part,
    trace_polynomial,
)
from salem.spectra.reports import CountReport, count_row
from salem.spectra.sharding import (
    Shard,
    box_from_bounds,
    generate_coefficient_shards,
    run_sharded,
)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("m", "D", "Q", "count", "paper_term", "abs_error", "ratio")
SHARDS_PER_WORKER = 4

CensusEntry = tuple[PalindromicPolynomial, SalemClassification]


def coefficient_bounds(m: int, Q: int | float | str | Fraction) -> list[int]:
    """floor(binom(2m, k) Q) for the free coefficients c_1..c_m."""
    if m < 1:
        raise ValueError("m must be positive")
    q = as_rational(Q)
    if q <= 0:
        raise ValueError("Q must be positive")
    return [math.floor(math.comb(2 * m, k) * q) for k in range(1, m + 1)]


def aggregate_bounds(m: int, Q: int | float | str | Fraction) -> tuple[int, int]:
    """(C bound, A bound): |C| <= 2^(2m-1) Q and |A| <= (2^(2m-1) - 2) Q + 2."""
    if m < 1:
        raise ValueError("m must be positive")
    q = as_rational(Q)
    half = 2 ** (2 * m - 1)
    return math.floor(half * q), math.floor((half - 2) * q + 2)


def parity_linear_coefficients(m: int) -> tuple[list[int], list[int]]:
    """Coefficient lists of the linear equations tying (c_1..c_m) to C and A.

    Even m: C/2 = c_1 + c_3 + ... + c_(m-1) and A - 2 = 2c_2 + ... + 2c_(m-2) + c_m.
    Odd m: C = 2c_1 + ... + 2c_(m-2) + c_m and (A - 2)/2 = c_2 + ... + c_(m-1).
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if m % 2 == 0:
        return [1] * (m // 2), [2] * (m // 2 - 1) + [1]
    return [2] * ((m - 1) // 2) + [1], [1] * ((m - 1) // 2)


def _box_size(box: Sequence[tuple[int, int]]) -> int:
    return math.prod(hi - lo + 1 for lo, hi in box)


def _passes_signs(free: Sequence[int], m: int) -> tuple[int, int] | None:
    """(f(1), f(-1)) when f(1) < 0 < f(-1), the sign condition for the root pattern."""
    at_one = 2 + 2 * sum(free[:-1]) + free[-1]
    if at_one >= 0:
        return None
    at_minus_one = 2 + 2 * sum(c if k % 2 == 0 else -c for k, c in enumerate(free[:-1], 1))
    at_minus_one += -free[-1] if m % 2 else free[-1]
    if at_minus_one <= 0:
        return None
    return at_one, at_minus_one


def _keep(classification: SalemClassification, include_reducible: bool) -> bool:
    if include_reducible:
        return classification.root_pattern_ok
    return classification.is_salem


def _scan_shard(task: tuple[Shard, CensusQuery]) -> list[CensusEntry]:
    shard, query = task
    m = query.m
    found: list[CensusEntry] = []
    for free in itertools.product(*(range(lo, hi + 1) for lo, hi in shard.ranges)):
        values = _passes_signs(free, m)
        if values is None:
            continue
        if query.D is not None and -squarefree_part(values[0] * values[1])[0] != query.D:
            continue
        f = PalindromicPolynomial.from_free_coefficients(free)
        g = trace_polynomial(f)
        if not lambda_at_most(g, query.Q):
            continue
        verdict = classify(f, query.precision)
        if _keep(verdict, query.include_reducible):
            found.append((f, verdict))
    logger.debug("shard %s kept %d of %d candidates", shard.shard_id, len(found), shard.size)
    return found


def _sort_key(entry: CensusEntry) -> tuple[Any, tuple[int, ...]]:
    return entry[1].lambda_, entry[0].coefficients


def enumerate_salem(
    query: CensusQuery,
    *,
    workers: int = 1,
    box: Sequence[tuple[int, int]] | None = None,
) -> list[CensusEntry]:
    """All Salem polynomials of degree 2m with lambda <= Q, and D-matched when D is set.

    ``box`` restricts the search to a sub-box of free coefficients (c_1..c_m); the
    default is the full binomial box.
    """
    if box is None:
        box = box_from_bounds(coefficient_bounds(query.m, query.Q))
    else:
        box = tuple((int(lo), int(hi)) for lo, hi in box)
        if len(box) != query.m:
            raise ValueError(f"box needs {query.m} coefficient ranges, got {len(box)}")
    size = _box_size(box)
    if size > query.budget:
        raise BudgetExceeded(size, query.budget)
    if query.Q <= 1:
        return []

    shards = generate_coefficient_shards(box, shards=workers * SHARDS_PER_WORKER)
    found: list[CensusEntry] = []
    for part in run_sharded(_scan_shard, [(shard, query) for shard in shards], workers):
        found.extend(part)
    found.sort(key=_sort_key)
    logger.info(
        "census m=%d D=%s Q=%s: %d polynomials from %d candidates",
        query.m,
        query.D,
        query.Q,
        len(found),
        size,
    )
    return found


# -- explicit constants -----------------------------------------------------------


def omega(m: int) -> Fraction:
    """2^(m(m-1)) / m * prod_{k=0}^{m-2} k!^2 / (2k+1)!."""
    if m < 1:
        raise ValueError("m must be positive")
    value = Fraction(2 ** (m * (m - 1)), m)
    for k in range(m - 1):
        value *= Fraction(math.factorial(k) ** 2, math.factorial(2 * k + 1))
    return value


def kappa0(m: int) -> Fraction:
    if m < 2:
        raise ValueError("m must be at least 2")
    if m % 2 == 0:
        h = m // 2 - 1
        num = 2 ** ((m - 1) * (m - 2)) * (2 ** (2 * m) - 4) ** h
        return Fraction(num, math.factorial(h) ** 2)
    h = (m - 1) // 2
    num = 2 ** ((2 * m - 1) * (m - 1) // 2) * (2 ** (2 * m - 1) - 2) ** ((m - 3) // 2)
    return Fraction(num, math.factorial(h) ** 2)


def kappa(m: int, D: int) -> Fraction:
    """2^(t+2m) kappa0(m) for odd D, 3 * 2^(t+2m-2) kappa0(m) for even D."""
    check_squarefree_D(D)
    t = distinct_prime_count(D)
    if D % 2:
        return 2 ** (t + 2 * m) * kappa0(m)
    return 3 * 2 ** (t + 2 * m - 2) * kappa0(m)


def theorem_A_bound(m: int, D: int, Q: int | float | str | Fraction) -> float:
    """kappa(m, D) / (pi sqrt D) * Q^(m-1) log Q, natural log; zero for Q <= 1."""
    q = as_rational(Q)
    value = kappa(m, D)
    if q <= 1:
        return 0.0
    qf = float(q)
    return float(value) / (math.pi * math.sqrt(D)) * qf ** (m - 1) * math.log(qf)


def pair_main_term(m: int, D: int, Q: int | float | str | Fraction) -> float:
    """Main term for the admissible (A, C) pairs with |C| bounded by 2^(2m-1) Q."""
    check_squarefree_D(D)
    q = float(as_rational(Q))
    t = distinct_prime_count(D)
    if D % 2:
        scale = 2 ** (t + 2 * m)
    else:
        scale = 3 * 2 ** (t + 2 * m - 2)
    return scale * max(q, 0.0) / (math.pi * math.sqrt(D))


@dataclass(frozen=True)
class ConstantsBundle:
    omega_m: Fraction
    kappa0_m: Fraction
    kappa_mD: Fraction
    t: int

    def __post_init__(self) -> None:
        if min(self.omega_m, self.kappa0_m, self.kappa_mD) <= 0:
            raise ValueError("constants must be strictly positive")
        if self.t < 0:
            raise ValueError("t must be non-negative")

    @classmethod
    def for_family(cls, m: int, D: int) -> ConstantsBundle:
        return cls(omega(m), kappa0(m), kappa(m, D), distinct_prime_count(D))

    def summary(self) -> dict[str, object]:
        return {
            "omega": str(self.omega_m),
            "kappa0": str(self.kappa0_m),
            "kappa": str(self.kappa_mD),
            "t": self.t,
        }


# -- reports ---------------------------------------------------------------------


def _predicted_term(m: int, D: int | None, Q: Fraction) -> float:
    if D is None:
        return float(omega(m)) * float(Q) ** m
    return theorem_A_bound(m, D, Q)


def census_report(
    m: int,
    D: int | None,
    Q_grid: Sequence[int | float | str | Fraction],
    *,
    workers: int = 1,
    budget: int | None = None,
    precision: float | None = None,
    include_reducible: bool = False,
) -> CountReport:
    """Census counts against omega_m Q^m (no D) or theorem_A_bound (with D).

    Enumerates once at the largest Q and filters by the exact lambda <= Q test.
    """
    grid = [as_rational(q) for q in Q_grid]
    if not grid:
        raise ValueError("Q grid must be non-empty")
    if any(b <= a for a, b in itertools.pairwise(grid)):
        raise ValueError("Q grid must be strictly ascending")
    options: dict[str, Any] = {"include_reducible": include_reducible}
    if budget is not None:
        options["budget"] = budget
    if precision is not None:
        options["precision"] = precision
    query = CensusQuery(m=m, Q=grid[-1], D=D, **options)
    entries = enumerate_salem(query, workers=workers)
    traces = [trace_polynomial(f) for f, _ in entries]

    rows = []
    for q in grid:
        count = sum(1 for g in traces if lambda_at_most(g, q))
        term = _predicted_term(m, D, q)
        rows.append(count_row({"m": m, "D": D, "Q": q}, count, term, term_column="paper_term"))
    report = CountReport(
        kind="census",
        columns=REPORT_COLUMNS,
        rows=tuple(rows),
        metadata=query.summary(),
        term_column="paper_term",
    )
    if D is not None:
        bound_violations(report)
    return report


def bound_violations(report: CountReport) -> list[dict[str, Any]]:
    """Rows whose count exceeds theorem_A_bound + kappa(m, D) Q^(m-1); each one is logged."""
    violations = []
    for row in report.rows:
        if row.get("D") is None:
            continue
        m, D, q = row["m"], row["D"], Fraction(row["Q"])
        limit = theorem_A_bound(m, D, q) + float(kappa(m, D)) * float(q) ** (m - 1)
        if row["count"] > limit:
            logger.warning(
                "census count %d exceeds bound %.3f at m=%d D=%d Q=%s", row["count"], limit, m, D, q
            )
            violations.append(row)
    return violations
