"""Palindromic integer polynomials, trace polynomials, Sturm counting and the Salem test."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

import mpmath
import numpy as np
from sympy import cyclotomic_poly, totient
from sympy.polys.densearith import dup_rem
from sympy.polys.densebasic import dup_strip
from sympy.polys.domains import QQ, ZZ
from sympy.polys.rootisolation import dup_sturm
from sympy.polys.sqfreetools import dup_sqf_p

from salem.spectra.errors import EndpointIsRoot, QuadratureUnstable

DEFAULT_PRECISION = 1e-12
DEFAULT_SAMPLES = 2**16

Rational = int | Fraction
# Finite endpoints are rationals; floats are accepted only as +/- infinity.
ExtendedRational = int | Fraction | float
Coefficients = Sequence[int] | Sequence[Fraction]


@dataclass(frozen=True)
class PalindromicPolynomial:
    """Monic palindromic integer polynomial of degree 2m, constant term first."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) < 3 or len(coeffs) % 2 == 0:
            raise ValueError("coefficient sequence must have odd length 2m+1 with m >= 1")
        if coeffs[0] != 1 or coeffs[-1] != 1:
            raise ValueError("c_0 and c_2m must equal 1")
        if coeffs != coeffs[::-1]:
            raise ValueError("coefficients must satisfy c_k = c_(2m-k)")

    @classmethod
    def from_free_coefficients(cls, free: Sequence[int]) -> PalindromicPolynomial:
        """Build f from (c_1, ..., c_m); the rest follows from palindromy."""
        head = (1, *(int(c) for c in free))
        return cls(head + head[-2::-1])

    @property
    def half_degree(self) -> int:
        return (len(self.coefficients) - 1) // 2

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def free_coefficients(self) -> tuple[int, ...]:
        return self.coefficients[1 : self.half_degree + 1]

    def __str__(self) -> str:
        return format_polynomial(self)


@dataclass(frozen=True)
class TracePolynomial:
    """Monic integer g of degree m with x^m g(x + 1/x) = f(x)."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) < 2:
            raise ValueError("trace polynomial must have degree at least 1")
        if coeffs[-1] != 1:
            raise ValueError("trace polynomial must be monic")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def to_palindromic(self) -> PalindromicPolynomial:
        """Expand x^m g(x + 1/x) back into the palindromic polynomial."""
        m = self.degree
        out = [0] * (2 * m + 1)
        for k, g_k in enumerate(self.coefficients):
            if not g_k:
                continue
            # x^(m-k) (x^2 + 1)^k
            for j in range(k + 1):
                out[m - k + 2 * j] += g_k * math.comb(k, j)
        return PalindromicPolynomial(tuple(out))


@dataclass(frozen=True)
class SalemClassification:
    """Verdict of the Salem test for a single palindromic polynomial."""

    is_squarefree: bool
    root_pattern_ok: bool
    cyclotomic_factor: int | None
    is_salem: bool
    lambda_: mpmath.mpf | None
    parity_sums: tuple[int, int]
    square_decomposition: tuple[int, int] | None
    degree_two: bool = False

    def __post_init__(self) -> None:
        expected = self.is_squarefree and self.root_pattern_ok and self.cyclotomic_factor is None
        if self.is_salem != expected:
            raise ValueError("is_salem must match the squarefree, root and cyclotomic flags")
        if (self.lambda_ is not None) != self.root_pattern_ok:
            raise ValueError("lambda is present exactly when the root pattern holds")

    @property
    def D(self) -> int | None:
        return None if self.square_decomposition is None else self.square_decomposition[0]

    @property
    def k(self) -> int | None:
        return None if self.square_decomposition is None else self.square_decomposition[1]

    @property
    def triple(self) -> tuple[int, int, int] | None:
        """(A, B, C) with A^2 + D B^2 = C^2 and B = k."""
        if self.square_decomposition is None:
            return None
        a, c = self.parity_sums
        return (a, self.square_decomposition[1], c)

    def summary(self) -> dict[str, object]:
        a, c = self.parity_sums
        return {
            "is_squarefree": self.is_squarefree,
            "root_pattern_ok": self.root_pattern_ok,
            "cyclotomic_factor": self.cyclotomic_factor,
            "is_salem": self.is_salem,
            "degree_two": self.degree_two,
            "lambda": None if self.lambda_ is None else float(self.lambda_),
            "A": a,
            "B": self.k,
            "C": c,
            "D": self.D,
            "k": self.k,
        }


def lehmer_polynomial() -> PalindromicPolynomial:
    return PalindromicPolynomial((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))


def parse_polynomial(text: str) -> PalindromicPolynomial:
    """Parse the comma-separated wire format, constant term first."""
    tokens = [tok.strip() for tok in text.split(",")]
    if not tokens or any(not tok for tok in tokens):
        raise ValueError(f"malformed polynomial {text!r}")
    try:
        return PalindromicPolynomial(tuple(int(tok) for tok in tokens))
    except ValueError as exc:
        raise ValueError(f"malformed polynomial {text!r}: {exc}") from exc


def format_polynomial(f: PalindromicPolynomial | TracePolynomial) -> str:
    return ",".join(str(c) for c in f.coefficients)


# -- exact arithmetic; our lists are constant-first, sympy dense lists lead-first --


def _dense_qq(coefficients: Coefficients) -> list[Any]:
    fractions = (Fraction(c) for c in reversed(coefficients))
    return dup_strip([QQ(c.numerator, c.denominator) for c in fractions])


def _dense_zz(coefficients: Sequence[int]) -> list[Any]:
    return dup_strip([ZZ(int(c)) for c in reversed(coefficients)])


def _from_dense(dense: Sequence[Any]) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(c.numerator), int(c.denominator)) for c in reversed(dense))


def _sign_at(coefficients: Coefficients, x: Rational) -> int:
    """Exact sign of p(x), evaluated as q^deg p(p/q) with integer Horner steps."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    acc = coefficients[-1]
    den_pow = 1
    for c in reversed(coefficients[:-1]):
        den_pow *= den
        acc = acc * num + c * den_pow
    return (acc > 0) - (acc < 0)


def _sign_at_extended(coefficients: Coefficients, x: ExtendedRational) -> int:
    if isinstance(x, float) and math.isinf(x):
        lead = coefficients[-1]
        sign = (lead > 0) - (lead < 0)
        if x < 0 and (len(coefficients) - 1) % 2:
            sign = -sign
        return sign
    return _sign_at(coefficients, x)


def _as_endpoint(x: ExtendedRational) -> ExtendedRational:
    if isinstance(x, float):
        if math.isinf(x):
            return x
        if math.isnan(x):
            raise ValueError("interval endpoint must not be NaN")
    return Fraction(x)


def evaluate(f: PalindromicPolynomial, x: Rational) -> Fraction:
    """Exact value of f at a rational point (Horner)."""
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(f.coefficients):
        acc = acc * x + c
    return acc


def parity_sums(f: PalindromicPolynomial) -> tuple[int, int]:
    """(A, C): sums of the coefficients on even and odd powers of x."""
    coeffs = f.coefficients
    return sum(coeffs[0::2]), sum(coeffs[1::2])


def trace_polynomial(f: PalindromicPolynomial) -> TracePolynomial:
    """Rewrite f(x)/x^m as a polynomial in y = x + 1/x.

    Uses x^j + x^-j = T_j(y) with T_0 = 2, T_1 = y, T_(j+1) = y T_j - T_(j-1).
    """
    m = f.half_degree
    c = f.coefficients
    result = [0] * (m + 1)
    result[0] = c[m]
    prev: list[int] = [2]
    cur: list[int] = [0, 1]
    for j in range(1, m + 1):
        weight = c[m - j]
        if weight:
            for i, t in enumerate(cur):
                result[i] += weight * t
        shifted = [0, *cur]
        nxt = [s - (prev[i] if i < len(prev) else 0) for i, s in enumerate(shifted)]
        prev, cur = cur, nxt
    return TracePolynomial(tuple(result))


def sturm_chain(coefficients: Coefficients) -> tuple[tuple[Fraction, ...], ...]:
    """Signed remainder sequence p, p', -rem(p, p'), ... of the squarefree part of p.

    The chain starts from the monic squarefree part, so it counts distinct roots and
    vanishes at an endpoint exactly when p does.
    """
    dense = _dense_qq(coefficients)
    if not dense:
        raise ValueError("Sturm chain of the zero polynomial is undefined")
    return tuple(_from_dense(p) for p in dup_sturm(dense, QQ))


def _variations(chain: Sequence[Sequence[Fraction]], x: ExtendedRational) -> int:
    signs = [s for s in (_sign_at_extended(p, x) for p in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:], strict=False) if a != b)


def _count_with_chain(
    chain: Sequence[Sequence[Fraction]],
    lo: ExtendedRational,
    hi: ExtendedRational,
) -> int:
    lo, hi = _as_endpoint(lo), _as_endpoint(hi)
    if not lo < hi:
        raise ValueError("interval requires lo < hi")
    for endpoint in (lo, hi):
        if not isinstance(endpoint, float) and _sign_at(chain[0], endpoint) == 0:
            raise EndpointIsRoot(f"polynomial vanishes at interval endpoint {endpoint}")
    return _variations(chain, lo) - _variations(chain, hi)


def count_roots_in_interval(
    g: TracePolynomial | Coefficients,
    lo: ExtendedRational,
    hi: ExtendedRational,
) -> int:
    """Number of distinct real roots of g in the open interval (lo, hi)."""
    coefficients = g.coefficients if isinstance(g, TracePolynomial) else g
    return _count_with_chain(sturm_chain(coefficients), lo, hi)


def salem_sign_pattern(g: TracePolynomial) -> bool:
    """Necessary signs for one root above 2 and m - 1 roots in (-2, 2).

    g(2) < 0 and (-1)^m g(-2) > 0; both are exact integer evaluations.
    """
    coeffs = g.coefficients
    at_two = _sign_at(coeffs, 2)
    at_minus_two = _sign_at(coeffs, -2)
    if g.degree % 2:
        at_minus_two = -at_minus_two
    return at_two < 0 < at_minus_two


def _root_pattern(g: TracePolynomial) -> bool:
    if not salem_sign_pattern(g):
        return False
    chain = sturm_chain(g.coefficients)
    if _count_with_chain(chain, 2, math.inf) != 1:
        return False
    if g.degree == 1:
        return True
    return _count_with_chain(chain, -2, 2) == g.degree - 1


@lru_cache(maxsize=None)
def _cyclotomic_candidates(max_phi: int) -> tuple[tuple[int, list[Any]], ...]:
    # phi(n) >= sqrt(n / 2), so phi(n) <= B forces n <= 2 B^2
    indices = {1, 2}
    for n in range(3, 2 * max_phi * max_phi + 1):
        if totient(n) <= max_phi:
            indices.add(n)
    return tuple(
        (n, [ZZ(int(c)) for c in cyclotomic_poly(n, polys=True).all_coeffs()])
        for n in sorted(indices)
    )


def cyclotomic_divisor(f: PalindromicPolynomial) -> int | None:
    """Smallest n with Phi_n | f among n in {1, 2} or phi(n) <= 2m - 2."""
    dense = _dense_zz(f.coefficients)
    for n, phi_n in _cyclotomic_candidates(max(2 * f.half_degree - 2, 0)):
        if not dup_rem(dense, phi_n, ZZ):
            return n
    return None


def squarefree_part(n: int) -> tuple[int, int]:
    """Split n = s k^2 with s squarefree carrying the sign of n.

    Trial division runs while p^3 <= the remaining cofactor; what is left then has at
    most two prime factors, so a perfect-square check finishes the job.
    """
    n = int(n)
    if n == 0:
        raise ValueError("squarefree part of 0 is undefined")
    sign = -1 if n < 0 else 1
    rest = abs(n)
    s, k = 1, 1
    p = 2
    while p * p * p <= rest:
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            k *= p ** (e // 2)
            if e % 2:
                s *= p
        p += 1 if p == 2 else 2
    root = math.isqrt(rest)
    if rest > 1 and root * root == rest:
        k *= root
    else:
        s *= rest
    return sign * s, k


def is_squarefree(n: int) -> bool:
    return n != 0 and squarefree_part(n)[1] == 1


_cached_squarefree = lru_cache(maxsize=4096)(is_squarefree)


def check_squarefree_D(D: int) -> None:
    if D <= 0 or not _cached_squarefree(D):
        raise ValueError("D must be a positive squarefree integer")


def lambda_at_most(g: TracePolynomial, bound: Rational) -> bool:
    """Exact test lambda <= bound for g passing the Salem root pattern.

    lambda <= Q iff y0 <= Q + 1/Q iff g(Q + 1/Q) >= 0, since g is negative on (2, y0).
    """
    bound = Fraction(bound)
    if bound <= 1:
        return False
    return _sign_at(g.coefficients, bound + 1 / bound) >= 0


def _workdps(precision: float) -> int:
    return max(20, int(-math.log10(precision)) + 10)


def salem_lambda(g: TracePolynomial, precision: float = DEFAULT_PRECISION) -> mpmath.mpf:
    """lambda = (y0 + sqrt(y0^2 - 4)) / 2 for the unique root y0 of g above 2.

    Bisection keeps exact dyadic endpoints; it stops once the image interval under
    y -> (y + sqrt(y^2 - 4)) / 2 is narrower than ``precision``.
    """
    if precision <= 0:
        raise ValueError("precision must be positive")
    coeffs = g.coefficients
    lo = Fraction(2)
    hi = Fraction(max(3, 1 + max(abs(c) for c in coeffs[:-1])))
    while True:
        if lo > 2:
            lo_f = float(lo)
            slope = (1 + lo_f / math.sqrt(lo_f * lo_f - 4)) / 2
            if slope * float(hi - lo) < precision:
                break
        mid = (lo + hi) / 2
        sign = _sign_at(coeffs, mid)
        if sign == 0:
            lo = hi = mid
            break
        if sign < 0:
            lo = mid
        else:
            hi = mid
    y0 = (lo + hi) / 2
    with mpmath.workdps(_workdps(precision)):
        y = mpmath.mpf(y0.numerator) / y0.denominator
        return (y + mpmath.sqrt(y * y - 4)) / 2


def classify(f: PalindromicPolynomial, precision: float = DEFAULT_PRECISION) -> SalemClassification:
    """Run conditions (i)-(iii) and the square decomposition of f(1)f(-1)."""
    a, c = parity_sums(f)
    product = (a + c) * (a - c)
    decomposition = None
    if product < 0:
        s, k = squarefree_part(product)
        decomposition = (-s, k)

    squarefree = dup_sqf_p(_dense_zz(f.coefficients), ZZ)
    g = trace_polynomial(f)
    pattern = _root_pattern(g)
    cyclotomic = cyclotomic_divisor(f)
    lam = salem_lambda(g, precision) if pattern else None
    return SalemClassification(
        is_squarefree=squarefree,
        root_pattern_ok=pattern,
        cyclotomic_factor=cyclotomic,
        is_salem=squarefree and pattern and cyclotomic is None,
        lambda_=lam,
        parity_sums=(a, c),
        square_decomposition=decomposition,
        degree_two=f.half_degree == 1,
    )


def _jensen_mean(coeffs_high: np.ndarray, theta: np.ndarray, radius: float) -> float:
    values = np.polyval(coeffs_high, radius * np.exp(1j * theta))
    with np.errstate(divide="ignore"):
        return float(np.mean(np.log(np.abs(values))))


def _jensen_estimate(coeffs_high: np.ndarray, samples: int, delta: float) -> float | None:
    # Off the unit circle log|f| is smooth, so the periodic trapezoid rule converges
    # geometrically; I(r) = log M(f) + k log r until r reaches a root outside the disk.
    theta = 2 * np.pi * (np.arange(samples) + 0.5) / samples
    radii = [1 + delta, 1 + 2 * delta, 1 + 3 * delta]
    means = [_jensen_mean(coeffs_high, theta, r) for r in radii]
    if not all(math.isfinite(v) for v in means):
        return None
    logs = [math.log(r) for r in radii]
    slope_low = (means[1] - means[0]) / (logs[1] - logs[0])
    slope_high = (means[2] - means[1]) / (logs[2] - logs[1])
    k = round(slope_low)
    if abs(slope_low - k) > 1e-6 or abs(slope_high - k) > 1e-6:
        return None
    return math.exp(means[0] - k * logs[0])


def mahler_measure_jensen(
    f: PalindromicPolynomial,
    samples: int = DEFAULT_SAMPLES,
    tolerance: float = 1e-9,
) -> float:
    """Mahler measure from trapezoidal quadrature of Jensen's integral.

    The integral is sampled on circles of radius 1 + delta, 1 + 2 delta, 1 + 3 delta
    and extrapolated to radius 1; delta shrinks when a root sits in that annulus.
    """
    if samples < 16:
        raise ValueError("samples must be at least 16")
    coeffs_high = np.array(f.coefficients[::-1], dtype=float)
    delta = 0.01
    for _ in range(8):
        fine = _jensen_estimate(coeffs_high, samples, delta)
        coarse = _jensen_estimate(coeffs_high, samples // 2, delta)
        if fine is not None and coarse is not None:
            if abs(fine - coarse) > tolerance * max(1.0, fine):
                raise QuadratureUnstable(
                    f"refinements disagree: {coarse!r} at {samples // 2} vs {fine!r} at {samples}"
                )
            return fine
        delta /= 4
    raise QuadratureUnstable("no root-free annulus found next to the unit circle")
