import math
import random
from fractions import Fraction

import mpmath
import pytest

from salem.spectra.errors import BudgetExceeded, DomainError
from salem.spectra.polynomials import PalindromicPolynomial, lambda_at_most, trace_polynomial
from salem.spectra.quadform import QuadraticForm
from salem.spectra.spectrum import (
    BOUND_COLUMNS,
    LengthEntry,
    SpectrumBounds,
    _length_bound,
    bounds_report,
    gangolli_warner_main,
    length_count_upper,
    lengths_report,
    mean_multiplicity_lower,
    predicted_length_bound,
    realized_length_census,
)

QUARTIC_LENGTH = math.log(1.7220838)
SEXTIC = (1, 0, -1, -1, -1, 0, 1)


def test_length_census_contains_quartic() -> None:
    entries = realized_length_census(2, 3, 0.6)
    assert any(abs(float(e.length) - QUARTIC_LENGTH) < 1e-6 for e in entries)
    assert all(e.length <= 0.6 for e in entries)


def test_length_census_empty_cases() -> None:
    assert realized_length_census(2, 3, 0.5) == []
    assert realized_length_census(2, 1, 0) == []
    with pytest.raises(ValueError):
        realized_length_census(1, 1, 0.5)


def test_length_census_unions_lower_degrees() -> None:
    entries = realized_length_census(3, 1, 0.6)
    coefficients = [e.coefficients for e in entries]
    assert SEXTIC in coefficients
    assert abs(float(entries[coefficients.index(SEXTIC)].length) - math.log(1.401268)) < 1e-6
    # the quartic carries D = 3 but lower degrees are unrestricted
    assert (1, -1, -1, -1, 1) in coefficients
    assert len(set(coefficients)) == len(coefficients)
    keys = [(e.lambda_, e.coefficients) for e in entries]
    assert keys == sorted(keys)


def test_lengths_reproduce_lambda() -> None:
    L = 0.6
    Q = _length_bound(L)
    for entry in realized_length_census(3, 1, L):
        assert abs(mpmath.exp(entry.length) - entry.lambda_) < 1e-10
        g = trace_polynomial(PalindromicPolynomial(entry.coefficients))
        assert lambda_at_most(g, Q)


def test_length_entry_validation() -> None:
    with pytest.raises(ValueError, match="lambda"):
        LengthEntry(mpmath.mpf(1), mpmath.mpf("0.1"), (1, -3, 1))
    with pytest.raises(ValueError, match="length"):
        LengthEntry(mpmath.mpf(2), mpmath.mpf(0), (1, -3, 1))


def test_predicted_length_bound_examples() -> None:
    assert predicted_length_bound(2, 1, 3) == pytest.approx(16 / math.pi * math.e**3 * 3)
    assert predicted_length_bound(2, 1, 3) == pytest.approx(306.9, abs=0.1)
    nonclassical = predicted_length_bound(2, 1, 3, classical=False)
    assert nonclassical == pytest.approx(64 / math.pi * math.e**6 * 3)
    assert predicted_length_bound(2, 1, 0) == 0.0


def test_nonclassical_bound_doubles_exponent() -> None:
    rng = random.Random(43)
    for _ in range(200):
        m = rng.randint(2, 5)
        D = rng.choice([1, 2, 3])
        L = rng.uniform(0.1, 4.0)
        classical = predicted_length_bound(m, D, L)
        expected = 4 * classical * math.exp((m - 1) * L)
        assert predicted_length_bound(m, D, L, classical=False) == pytest.approx(expected, rel=1e-12)


def test_gangolli_warner_examples() -> None:
    assert gangolli_warner_main(5, 2) == pytest.approx(math.exp(8) / 8)
    assert gangolli_warner_main(2, 1) == pytest.approx(math.e)
    assert gangolli_warner_main(3, 1) == pytest.approx(3.694, abs=1e-3)
    with pytest.raises(DomainError):
        gangolli_warner_main(1, 1)
    with pytest.raises(DomainError):
        gangolli_warner_main(3, 0)


def test_mean_multiplicity_examples() -> None:
    assert mean_multiplicity_lower(5, 1, 2) == pytest.approx(math.exp(4) / 32)
    assert mean_multiplicity_lower(7, 2, 1) == pytest.approx(0.4185, abs=1e-4)
    for n in (3, 4, 6):
        with pytest.raises(DomainError):
            mean_multiplicity_lower(n, 1, 1)
    with pytest.raises(DomainError):
        mean_multiplicity_lower(5, 1, 0)


def test_mean_multiplicity_factorization() -> None:
    rng = random.Random(47)
    for _ in range(1000):
        n = rng.choice([5, 7, 9, 11])
        r = rng.uniform(0.1, 10)
        ell = rng.uniform(0.05, 3)
        ratio = gangolli_warner_main(n, ell) / (2 * length_count_upper(n, r, ell))
        assert ratio == pytest.approx(mean_multiplicity_lower(n, r, ell), rel=1e-12)


def test_spectrum_bounds_validation() -> None:
    assert SpectrumBounds(5, 3, None).m == 3
    with pytest.raises(DomainError):
        SpectrumBounds(4, 1, None)
    with pytest.raises(DomainError):
        SpectrumBounds(1, 1, None)
    with pytest.raises(ValueError, match="squarefree"):
        SpectrumBounds(3, 4, None)
    with pytest.raises(ValueError, match="r must"):
        SpectrumBounds(3, 1, 0)


def test_spectrum_bounds_from_form() -> None:
    bounds = SpectrumBounds.from_form(QuadraticForm.diagonal([1, 1, 1, -3]), None)
    assert (bounds.n, bounds.m, bounds.D) == (3, 2, 3)
    with pytest.raises(DomainError, match="negative"):
        SpectrumBounds.from_form(QuadraticForm.diagonal([1, 1, 1, 3]), None)
    with pytest.raises(DomainError):
        SpectrumBounds.from_form(QuadraticForm.diagonal([1, 1, -1]), 1.0)


def test_bounds_report_rows() -> None:
    report = bounds_report(SpectrumBounds(5, 1, 2.0), 1.5)
    assert report.columns == BOUND_COLUMNS
    row = report.rows[0]
    assert row["corollary_C"] == pytest.approx(predicted_length_bound(3, 1, 1.5))
    assert row["gangolli_warner"] == pytest.approx(gangolli_warner_main(5, 1.5))
    assert row["mean_multiplicity_lower"] == pytest.approx(mean_multiplicity_lower(5, 2.0, 1.5))

    small = bounds_report(SpectrumBounds(3, 3, 1.0), 1.0, ell=0.5).rows[0]
    assert small["mean_multiplicity_lower"] is None
    assert small["ell"] == 0.5


def test_bounds_report_without_r_leaves_r_bounds_empty() -> None:
    bounds = SpectrumBounds(5, 1, None)
    row = bounds_report(bounds, 1.5).rows[0]
    assert row["r"] is None
    assert row["length_count_upper"] is None
    assert row["mean_multiplicity_lower"] is None
    assert row["gangolli_warner"] == pytest.approx(gangolli_warner_main(5, 1.5))

    given = bounds_report(SpectrumBounds(5, 1, 3.0), 1.5).rows[0]
    assert given["length_count_upper"] == pytest.approx(length_count_upper(5, 3.0, 1.5))


def test_bounds_past_float_range_raise_domain_error() -> None:
    with pytest.raises(DomainError, match="overflows"):
        gangolli_warner_main(5, 200)
    with pytest.raises(DomainError, match="overflows"):
        predicted_length_bound(3, 1, 200, classical=False)
    with pytest.raises(DomainError, match="overflows"):
        length_count_upper(5, 1.0, 400)
    with pytest.raises(DomainError, match="overflows"):
        mean_multiplicity_lower(5, 1.0, 400)
    with pytest.raises(DomainError, match="overflows"):
        bounds_report(SpectrumBounds(5, 1, None), 200)
    assert math.isfinite(gangolli_warner_main(5, 100))


def test_length_bound_is_exact_beyond_float_range() -> None:
    assert abs(_length_bound(0.6) - Fraction(math.exp(0.6))) < Fraction(1, 10**12)
    assert _length_bound(800) > 10**347
    with pytest.raises(BudgetExceeded):
        realized_length_census(2, 1, 800)
    with pytest.raises(ValueError, match="finite"):
        realized_length_census(2, 1, math.inf)


def test_lengths_report_csv() -> None:
    report = lengths_report(realized_length_census(2, 3, 0.6), {"m": 2, "D": 3, "L": 0.6})
    lines = report.to_csv().splitlines()
    assert lines[0] == "lambda,length,coefficients"
    assert '"1,-1,-1,-1,1"' in report.to_csv()
    assert report.metadata == {"m": 2, "D": 3, "L": 0.6}
