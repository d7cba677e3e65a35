"""Salem numbers as geodesic lengths, and closed-form length and multiplicity bounds."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import mpmath

from salem.spectra.census import enumerate_salem, kappa
from salem.spectra.config import DEFAULT_BUDGET, CensusQuery
from salem.spectra.errors import DomainError
from salem.spectra.polynomials import (
    DEFAULT_PRECISION,
    PalindromicPolynomial,
    SalemClassification,
    check_squarefree_D,
    format_polynomial,
)
from salem.spectra.quadform import QuadraticForm, reduced_determinant
from salem.spectra.reports import Report

logger = logging.getLogger(__name__)

LENGTH_COLUMNS = ("lambda", "length", "coefficients")
BOUND_COLUMNS = (
    "n",
    "m",
    "D",
    "r",
    "L",
    "ell",
    "corollary_C",
    "corollary_C_nonclassical",
    "gangolli_warner",
    "length_count_upper",
    "mean_multiplicity_lower",
)


@dataclass(frozen=True)
class LengthEntry:
    """Length log(lambda) of a closed geodesic candidate and its Salem polynomial."""

    lambda_: mpmath.mpf
    length: mpmath.mpf
    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.lambda_ > 1:
            raise ValueError("lambda must exceed 1")
        if not self.length > 0:
            raise ValueError("length must be positive")

    @classmethod
    def from_census(cls, f: PalindromicPolynomial, verdict: SalemClassification) -> LengthEntry:
        if verdict.lambda_ is None:
            raise ValueError("classification carries no lambda")
        return cls(verdict.lambda_, mpmath.log(verdict.lambda_), f.coefficients)

    def row(self) -> dict[str, Any]:
        return {
            "lambda": self.lambda_,
            "length": self.length,
            "coefficients": format_polynomial(PalindromicPolynomial(self.coefficients)),
        }


@dataclass(frozen=True)
class SpectrumBounds:
    """Dimension n = 2m - 1 of the hyperbolic space, the class -D and the constant r.

    r comes from the arithmetic group and has no default; pass None when it is unknown
    and the bounds that depend on it are left out of reports.
    """

    n: int
    D: int
    r: float | None

    def __post_init__(self) -> None:
        if self.n < 3 or self.n % 2 == 0:
            raise DomainError("n must be an odd integer >= 3")
        check_squarefree_D(self.D)
        if self.r is not None and not self.r > 0:
            raise ValueError("r must be positive")

    @classmethod
    def from_form(cls, q: QuadraticForm, r: float | None) -> SpectrumBounds:
        """n from the rank and D from the reduced determinant -D of q."""
        det_r = reduced_determinant(q)
        if det_r >= 0:
            raise DomainError(f"reduced determinant {det_r} must be negative")
        return cls(q.rank - 1, -det_r, r)

    @property
    def m(self) -> int:
        return (self.n + 1) // 2

    def summary(self) -> dict[str, object]:
        return {"n": self.n, "m": self.m, "D": self.D, "r": self.r}


def _length_bound(L: float) -> Fraction:
    if not math.isfinite(L):
        raise ValueError("L must be finite")
    # e^L rounded to 53 bits, held exactly past the float range
    mantissa, exponent = mpmath.exp(L).man_exp
    return Fraction(int(mantissa)) * Fraction(2) ** int(exponent)


def realized_length_census(
    m: int,
    D: int,
    L: float,
    *,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    precision: float = DEFAULT_PRECISION,
) -> list[LengthEntry]:
    """Candidate lengths <= L: Salem numbers of degree 2i for 2 <= i < m, plus F_(m,D)."""
    if m < 2:
        raise ValueError("m must be at least 2")
    if L <= 0:
        return []
    Q = _length_bound(L)
    queries = [CensusQuery(i, Q, None, budget=budget, precision=precision) for i in range(2, m)]
    queries.append(CensusQuery(m, Q, D, budget=budget, precision=precision))

    seen: dict[tuple[int, ...], LengthEntry] = {}
    for query in queries:
        for f, verdict in enumerate_salem(query, workers=workers):
            seen.setdefault(f.coefficients, LengthEntry.from_census(f, verdict))
    entries = sorted(seen.values(), key=lambda e: (e.lambda_, e.coefficients))
    logger.info("length census m=%d D=%d L=%s: %d lengths", m, D, L, len(entries))
    return entries


def _finite(value: mpmath.mpf, name: str) -> float:
    out = float(value)
    if not math.isfinite(out):
        raise DomainError(f"{name} overflows double precision at these parameters")
    return out


def predicted_length_bound(m: int, D: int, L: float, classical: bool = True) -> float:
    """kappa(m, D)/(pi sqrt D) e^((m-1)L) L; the non-classical variant is 4x with 2(m-1)L."""
    if L <= 0:
        return 0.0
    value = kappa(m, D)
    scale = mpmath.mpf(value.numerator) / value.denominator / (mpmath.pi * mpmath.sqrt(D))
    if classical:
        return _finite(scale * mpmath.exp((m - 1) * L) * L, "length bound")
    return _finite(4 * scale * mpmath.exp(2 * (m - 1) * L) * L, "non-classical length bound")


def gangolli_warner_main(n: int, ell: float) -> float:
    """e^((n-1) ell) / ((n-1) ell)."""
    if n < 2:
        raise DomainError("n must be at least 2")
    if ell <= 0:
        raise DomainError("ell must be positive")
    return _finite(mpmath.exp((n - 1) * ell) / ((n - 1) * ell), "Gangolli-Warner term")


def length_count_upper(n: int, r: float, ell: float) -> float:
    """r ell e^((n-1) ell / 2)."""
    if ell <= 0 or r <= 0:
        raise DomainError("r and ell must be positive")
    return _finite(r * ell * mpmath.exp((n - 1) * ell / 2), "length count bound")


def mean_multiplicity_lower(n: int, r: float, ell: float) -> float:
    """e^((n-1) ell / 2) / (2 r (n-1) ell^2), for odd n > 4."""
    if n % 2 == 0 or n <= 4:
        raise DomainError("mean multiplicity bound needs odd n > 4")
    if ell <= 0 or r <= 0:
        raise DomainError("r and ell must be positive")
    value = mpmath.exp((n - 1) * ell / 2) / (2 * r * (n - 1) * ell * ell)
    return _finite(value, "mean multiplicity bound")


def bounds_report(bounds: SpectrumBounds, L: float, ell: float | None = None) -> Report:
    """Single-row report with the length-count and multiplicity bounds.

    The two bounds that need r are None when bounds.r is None.
    """
    ell = L if ell is None else ell
    upper = mean = None
    if bounds.r is not None:
        upper = length_count_upper(bounds.n, bounds.r, ell)
        if bounds.n > 4:
            mean = mean_multiplicity_lower(bounds.n, bounds.r, ell)
    row = {
        **bounds.summary(),
        "L": L,
        "ell": ell,
        "corollary_C": predicted_length_bound(bounds.m, bounds.D, L),
        "corollary_C_nonclassical": predicted_length_bound(bounds.m, bounds.D, L, classical=False),
        "gangolli_warner": gangolli_warner_main(bounds.n, ell),
        "length_count_upper": upper,
        "mean_multiplicity_lower": mean,
    }
    return Report(kind="spectrum_bounds", columns=BOUND_COLUMNS, rows=(row,))


def lengths_report(
    entries: Iterable[LengthEntry], metadata: dict[str, Any] | None = None
) -> Report:
    return Report(
        kind="lengths",
        columns=LENGTH_COLUMNS,
        rows=tuple(entry.row() for entry in entries),
        metadata=metadata or {},
    )
