"""Rational quadratic forms: signature, reduced determinant, compatibility, integralization."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import sympy
from sympy.matrices.normalforms import hermite_normal_form

from salem.spectra.config import as_rational
from salem.spectra.errors import Degenerate, NonIntegerCharPoly, NotAnIsometry
from salem.spectra.polynomials import PalindromicPolynomial, evaluate, squarefree_part

RationalMatrix = tuple[tuple[Fraction, ...], ...]
_DIAG_PREFIX = "diag"


def _as_matrix(rows: Sequence[Sequence[int | str | Fraction]]) -> RationalMatrix:
    matrix = tuple(tuple(as_rational(x) for x in row) for row in rows)
    if not matrix:
        raise ValueError("matrix must be non-empty")
    if any(len(row) != len(matrix) for row in matrix):
        raise ValueError("matrix must be square")
    return matrix


def _to_sympy(matrix: RationalMatrix) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in matrix]
    )


def _from_sympy(matrix: sympy.Matrix) -> RationalMatrix:
    return tuple(
        tuple(Fraction(int(e.p), int(e.q)) for e in (sympy.Rational(x) for x in matrix.row(i)))
        for i in range(matrix.rows)
    )


@dataclass(frozen=True)
class QuadraticForm:
    """q(x) = x^t S x for a symmetric nondegenerate rational matrix S."""

    matrix: RationalMatrix

    def __post_init__(self) -> None:
        matrix = _as_matrix(self.matrix)
        r = len(matrix)
        for i in range(r):
            for j in range(i + 1, r):
                if matrix[i][j] != matrix[j][i]:
                    raise ValueError("form matrix must be symmetric")
        object.__setattr__(self, "matrix", matrix)
        if determinant(self) == 0:
            raise Degenerate("form matrix has vanishing determinant")

    @classmethod
    def diagonal(cls, entries: Sequence[int | str | Fraction]) -> QuadraticForm:
        values = [as_rational(x) for x in entries]
        size = len(values)
        return cls(
            tuple(
                tuple(v if i == j else Fraction(0) for j in range(size))
                for i, v in enumerate(values)
            )
        )

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def is_diagonal(self) -> bool:
        r = self.rank
        return all(self.matrix[i][j] == 0 for i in range(r) for j in range(r) if i != j)

    def value(self, x: Sequence[int | Fraction]) -> Fraction:
        if len(x) != self.rank:
            raise ValueError("vector length must equal the rank")
        vec = [Fraction(v) for v in x]
        r = self.rank
        return sum(
            (vec[i] * self.matrix[i][j] * vec[j] for i in range(r) for j in range(r)),
            Fraction(0),
        )


@dataclass(frozen=True)
class RationalIsometry:
    """Rational matrix T with T^t S T = S for its form."""

    matrix: RationalMatrix
    form: QuadraticForm

    def __post_init__(self) -> None:
        matrix = _as_matrix(self.matrix)
        if len(matrix) != self.form.rank:
            raise ValueError("isometry and form must have the same rank")
        object.__setattr__(self, "matrix", matrix)
        t = _to_sympy(matrix)
        s = _to_sympy(self.form.matrix)
        if t.T * s * t != s:
            raise NotAnIsometry("matrix does not preserve the quadratic form")


def determinant(q: QuadraticForm) -> Fraction:
    det = sympy.Rational(_to_sympy(q.matrix).det())
    return Fraction(int(det.p), int(det.q))


def diagonalize(q: QuadraticForm) -> tuple[RationalMatrix, tuple[Fraction, ...]]:
    """(P, d) with P^t S P = diag(d), by symmetric row and column elimination."""
    r = q.rank
    s = [list(row) for row in q.matrix]
    p = [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]

    def swap(i: int, j: int) -> None:
        s[i], s[j] = s[j], s[i]
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in p:
            row[i], row[j] = row[j], row[i]

    def add(target: int, source: int, factor: Fraction) -> None:
        # column then row: S <- E^t S E with E = I + factor e_source e_target^t
        for row in s:
            row[target] += factor * row[source]
        for k in range(r):
            s[target][k] += factor * s[source][k]
        for row in p:
            row[target] += factor * row[source]

    for i in range(r):
        if s[i][i] == 0:
            j = next((j for j in range(i + 1, r) if s[j][j] != 0), None)
            if j is not None:
                swap(i, j)
            else:
                j = next((j for j in range(i + 1, r) if s[i][j] != 0), None)
                if j is None:
                    raise Degenerate("a zero block remains after elimination")
                # hyperbolic pair: s[i][i] becomes 2 s[i][j]
                add(i, j, Fraction(1))
        pivot = s[i][i]
        for j in range(i + 1, r):
            if s[j][i]:
                add(j, i, -s[j][i] / pivot)
    return tuple(tuple(row) for row in p), tuple(s[i][i] for i in range(r))


def signature(q: QuadraticForm) -> tuple[int, int]:
    """(n_p, n_n) from the signs of a congruent diagonal form."""
    _, diag = diagonalize(q)
    if any(d == 0 for d in diag):
        raise Degenerate("a zero block remains after elimination")
    positive = sum(1 for d in diag if d > 0)
    return positive, len(diag) - positive


def _denominator_lcm(matrix: RationalMatrix) -> int:
    return math.lcm(*(x.denominator for row in matrix for x in row))


def reduced_determinant(q: QuadraticForm) -> int:
    """Signed squarefree part of det(l S), l the lcm of the entry denominators."""
    scale = _denominator_lcm(q.matrix)
    det = determinant(q) * scale**q.rank
    return squarefree_part(int(det))[0]


def is_admissible_over_Q(q: QuadraticForm, n: int) -> bool:
    if q.rank != n + 1:
        raise ValueError(f"form of rank {q.rank} cannot have signature ({n}, 1)")
    return signature(q) == (n, 1)


def compatible_with_polynomial(q: QuadraticForm, f: PalindromicPolynomial) -> bool:
    """det(q) and f(1) f(-1) agree modulo squares; false when f(1) f(-1) = 0."""
    product = evaluate(f, 1) * evaluate(f, -1)
    if product == 0:
        return False
    return squarefree_part(int(product))[0] == reduced_determinant(q)


def characteristic_polynomial(
    matrix: RationalIsometry | Sequence[Sequence[int | str | Fraction]],
) -> tuple[Fraction, ...]:
    """det(x I - T), constant term first."""
    rows = matrix.matrix if isinstance(matrix, RationalIsometry) else _as_matrix(matrix)
    x = sympy.Symbol("x")
    coeffs = _to_sympy(rows).charpoly(x).all_coeffs()
    rationals = (sympy.Rational(c) for c in reversed(coeffs))
    return tuple(Fraction(int(c.p), int(c.q)) for c in rationals)


def integralize(
    q: QuadraticForm,
    T: RationalIsometry,
) -> tuple[QuadraticForm, tuple[tuple[int, ...], ...], RationalMatrix]:
    """Conjugate T in SO(q, Q) to an integral isometry of an equivalent form.

    The lattice sum_k T^k Z^r for k < r is T-stable once the characteristic polynomial
    is integral; its Hermite basis g gives T' = g^-1 T g and S' = g^t S g.
    """
    if T.form != q:
        raise NotAnIsometry("isometry belongs to a different form")
    t = _to_sympy(T.matrix)
    if t.det() != 1:
        raise NotAnIsometry("integralize needs an isometry of determinant 1")
    if any(c.denominator != 1 for c in characteristic_polynomial(T)):
        raise NonIntegerCharPoly("characteristic polynomial has non-integer coefficients")

    r = q.rank
    blocks = [sympy.eye(r)]
    for _ in range(r - 1):
        blocks.append(t * blocks[-1])
    generators = sympy.Matrix.hstack(*blocks)
    scale = math.lcm(*(int(sympy.Rational(x).q) for x in generators))
    hnf = hermite_normal_form(sympy.Matrix(generators * scale))
    nonzero = [j for j in range(hnf.cols) if any(hnf[i, j] != 0 for i in range(hnf.rows))]
    basis = hnf.extract(list(range(r)), nonzero)
    if basis.cols != r:
        raise ValueError("generator lattice does not have full rank")
    g = basis / scale

    t_new = g.inv() * t * g
    if any(sympy.Rational(x).q != 1 for x in t_new):
        raise NonIntegerCharPoly("isometry does not preserve an integral lattice")
    s_new = g.T * _to_sympy(q.matrix) * g
    q_new = QuadraticForm(_from_sympy(s_new))
    t_int = tuple(tuple(int(x) for x in t_new.row(i)) for i in range(r))
    RationalIsometry(t_int, q_new)
    return q_new, t_int, _from_sympy(g)


def _split_wire(text: str) -> tuple[str, list[str]]:
    head, sep, body = text.partition(":")
    if not sep or not body.strip():
        raise ValueError(f"malformed matrix {text!r}")
    tokens = [tok.strip() for tok in body.split(",")]
    if any(not tok for tok in tokens):
        raise ValueError(f"malformed matrix {text!r}")
    return head.strip(), tokens


def parse_matrix(text: str) -> RationalMatrix:
    """``<rank>:<row-major p/q entries>``, or ``diag:...`` for a diagonal matrix."""
    head, tokens = _split_wire(text)
    if head == _DIAG_PREFIX:
        size = len(tokens)
        rows = [[tok if i == j else 0 for j in range(size)] for i, tok in enumerate(tokens)]
        return _as_matrix(rows)
    try:
        r = int(head)
    except ValueError as exc:
        raise ValueError(f"malformed matrix {text!r}: rank must be an integer") from exc
    if r <= 0 or len(tokens) != r * r:
        raise ValueError(f"matrix of rank {r} needs {r * r} entries, got {len(tokens)}")
    return _as_matrix([tokens[i * r : (i + 1) * r] for i in range(r)])


def parse_form(text: str) -> QuadraticForm:
    """``diag:1,1,1,-3`` or ``<rank>:<row-major p/q entries>``."""
    return QuadraticForm(parse_matrix(text))


def format_matrix(matrix: Sequence[Sequence[int | Fraction]]) -> str:
    return f"{len(matrix)}:" + ",".join(str(x) for row in matrix for x in row)


def format_form(q: QuadraticForm) -> str:
    if q.is_diagonal():
        return f"{_DIAG_PREFIX}:" + ",".join(str(q.matrix[i][i]) for i in range(q.rank))
    return format_matrix(q.matrix)
