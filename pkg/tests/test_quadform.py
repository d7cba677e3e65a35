import random
from fractions import Fraction

import pytest
import sympy

from salem.spectra.errors import Degenerate, NonIntegerCharPoly, NotAnIsometry
from salem.spectra.polynomials import PalindromicPolynomial, lehmer_polynomial
from salem.spectra.quadform import (
    QuadraticForm,
    RationalIsometry,
    characteristic_polynomial,
    compatible_with_polynomial,
    determinant,
    diagonalize,
    format_form,
    integralize,
    is_admissible_over_Q,
    parse_form,
    parse_matrix,
    reduced_determinant,
    signature,
)

QUARTIC = PalindromicPolynomial((1, -1, -1, -1, 1))

# integral isometries of diag(1, 1, -1), both of determinant 1
M1 = [[1, -2, 2], [2, -1, 2], [2, -2, 3]]
M3 = [[-1, 2, 2], [-2, 1, 2], [-2, 2, 3]]
# even permutations of the first three coordinates of diag(1, 1, 1, -1)
CYCLE = [[0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 1]]


def _sym(rows: list[list[object]]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in rows])


def _rows(matrix: sympy.Matrix) -> list[list[Fraction]]:
    return [[Fraction(int(x.p), int(x.q)) for x in matrix.row(i)] for i in range(matrix.rows)]


def _block(T: list[list[int]]) -> sympy.Matrix:
    return sympy.diag(1, sympy.Matrix(T))


def _random_isometry(rng: random.Random, rank: int) -> sympy.Matrix:
    if rank == 3:
        pool = [sympy.Matrix(M1), sympy.Matrix(M3), sympy.Matrix(M1).inv(), sympy.Matrix(M3).inv()]
    else:
        pool = [_block(M1), _block(M3), sympy.Matrix(CYCLE), sympy.Matrix(CYCLE).T]
    T = sympy.eye(rank)
    for _ in range(rng.randint(1, 3)):
        T = T * rng.choice(pool)
    return T


def _random_change_of_basis(rng: random.Random, rank: int) -> sympy.Matrix:
    h = sympy.eye(rank)
    for i in range(rank):
        h[i, i] = sympy.Rational(rng.choice([1, 2, 3]), rng.choice([1, 2, 5]))
        for j in range(i + 1, rank):
            h[i, j] = sympy.Rational(rng.randint(-3, 3), rng.randint(1, 4))
    return h


def test_form_validation() -> None:
    with pytest.raises(ValueError, match="symmetric"):
        QuadraticForm(((1, 2), (3, 4)))
    with pytest.raises(Degenerate):
        QuadraticForm(((1, 1), (1, 1)))
    with pytest.raises(ValueError, match="square"):
        QuadraticForm(((1, 2),))


def test_signature_examples() -> None:
    assert signature(QuadraticForm.diagonal([1, 1, 1, -1])) == (3, 1)
    assert signature(QuadraticForm.diagonal([1, 4, -9])) == (2, 1)
    assert signature(QuadraticForm(((0, 1), (1, 0)))) == (1, 1)
    assert signature(QuadraticForm(((0, 1, 1), (1, 0, 1), (1, 1, 0)))) == (1, 2)


def test_diagonalize_on_random_forms() -> None:
    rng = random.Random(29)
    checked = 0
    while checked < 40:
        r = rng.randint(1, 6)
        entries = [[Fraction(0)] * r for _ in range(r)]
        for i in range(r):
            for j in range(i, r):
                # sparse diagonals force pivot exchanges
                value = 0 if i == j and rng.random() < 0.5 else rng.randint(-5, 5)
                entries[i][j] = entries[j][i] = Fraction(value, rng.randint(1, 4))
        try:
            q = QuadraticForm(tuple(tuple(row) for row in entries))
        except Degenerate:
            continue
        P, diag = diagonalize(q)
        congruent = _sym(P).T * _sym(q.matrix) * _sym(P)
        assert congruent == sympy.diag(*[sympy.Rational(str(d)) for d in diag])
        n_p, n_n = signature(q)
        assert n_p + n_n == r
        eigen_signs = sum(1 for d in diag if d > 0)
        assert eigen_signs == n_p
        checked += 1


def test_determinant_and_reduced_determinant() -> None:
    assert determinant(QuadraticForm.diagonal([1, 4, -1])) == -4
    assert reduced_determinant(QuadraticForm.diagonal([1, 1, 1, -1])) == -1
    assert reduced_determinant(QuadraticForm.diagonal([1, 4, -1])) == -1
    assert reduced_determinant(QuadraticForm.diagonal([1, 1, 1, 1, -3])) == -3
    assert reduced_determinant(QuadraticForm.diagonal(["1/2", "1/2", 1, -1])) == -1


def test_reduced_determinant_invariances() -> None:
    rng = random.Random(31)
    base = QuadraticForm.diagonal([1, 2, 3, -7])
    expected = reduced_determinant(base)
    for _ in range(20):
        M = sympy.eye(4)
        for _ in range(6):
            i, j = rng.sample(range(4), 2)
            E = sympy.eye(4)
            E[i, j] = rng.randint(-3, 3)
            M = M * E
        assert abs(M.det()) == 1
        moved = QuadraticForm(tuple(map(tuple, _rows(M.T * _sym(base.matrix) * M))))
        assert reduced_determinant(moved) == expected
    for square in (4, 9, 25):
        scaled = QuadraticForm(tuple(tuple(x * square for x in row) for row in base.matrix))
        assert reduced_determinant(scaled) == expected


def test_admissibility_examples() -> None:
    assert is_admissible_over_Q(QuadraticForm.diagonal([1, 1, 1, -1]), 3)
    assert not is_admissible_over_Q(QuadraticForm.diagonal([1, 1, 1, 1]), 3)
    assert is_admissible_over_Q(QuadraticForm.diagonal([1, 1, -2]), 2)
    with pytest.raises(ValueError, match="rank"):
        is_admissible_over_Q(QuadraticForm.diagonal([1, 1, -2]), 3)


def test_compatibility_examples() -> None:
    assert compatible_with_polynomial(QuadraticForm.diagonal([1, 1, 1, -3]), QUARTIC)
    assert not compatible_with_polynomial(QuadraticForm.diagonal([1, 1, 1, -1]), QUARTIC)
    assert compatible_with_polynomial(QuadraticForm.diagonal([1, 1, 1, -1]), lehmer_polynomial())
    # f(-1) = 0
    assert not compatible_with_polynomial(
        QuadraticForm.diagonal([1, 1, 1, -1]), PalindromicPolynomial((1, 2, 1))
    )


def test_compatibility_invariant_under_rational_equivalence() -> None:
    rng = random.Random(37)
    q = QuadraticForm.diagonal([1, 1, 1, -3])
    for _ in range(20):
        M = _random_change_of_basis(rng, 4)
        M[3, 3] = 1 / (M[0, 0] * M[1, 1] * M[2, 2])
        assert M.det() == 1
        moved = QuadraticForm(tuple(map(tuple, _rows(M.T * _sym(q.matrix) * M))))
        assert compatible_with_polynomial(moved, QUARTIC)


def test_isometry_validation() -> None:
    q = QuadraticForm.diagonal([1, 1, -1])
    RationalIsometry(tuple(map(tuple, M1)), q)
    with pytest.raises(NotAnIsometry):
        RationalIsometry(((2, 0, 0), (0, 1, 0), (0, 0, 1)), q)
    with pytest.raises(ValueError, match="same rank"):
        RationalIsometry(((1, 0), (0, 1)), q)


def test_characteristic_polynomial() -> None:
    assert characteristic_polynomial([[1, 0], [0, 1]]) == (1, -2, 1)
    assert characteristic_polynomial([["1/2", 0], [0, 2]]) == (1, Fraction(-5, 2), 1)


def test_integralize_identity_and_integral_input() -> None:
    q = QuadraticForm.diagonal([1, 1, -1])
    identity = tuple(tuple(int(i == j) for j in range(3)) for i in range(3))
    q_new, t_new, g = integralize(q, RationalIsometry(identity, q))
    assert q_new == q
    assert t_new == identity
    assert g == identity

    q_new, t_new, g = integralize(q, RationalIsometry(tuple(map(tuple, M1)), q))
    assert t_new == tuple(map(tuple, M1))
    assert q_new == q
    assert g == identity


def test_integralize_rejects_non_integral_charpoly() -> None:
    q = QuadraticForm.diagonal([1, 1, -1])
    rotation = (("3/5", "-4/5", 0), ("4/5", "3/5", 0), (0, 0, 1))
    with pytest.raises(NonIntegerCharPoly):
        integralize(q, RationalIsometry(rotation, q))


def test_integralize_rejects_foreign_isometry() -> None:
    q = QuadraticForm.diagonal([1, 1, -1])
    other = QuadraticForm.diagonal([2, 2, -2])
    with pytest.raises(NotAnIsometry):
        integralize(q, RationalIsometry(tuple(map(tuple, M1)), other))


def test_integralize_rejects_determinant_minus_one() -> None:
    q = QuadraticForm.diagonal([1, 1, -1])
    reflection = ((-1, 0, 0), (0, 1, 0), (0, 0, 1))
    RationalIsometry(reflection, q)
    with pytest.raises(NotAnIsometry, match="determinant 1"):
        integralize(q, RationalIsometry(reflection, q))
    # -M1 preserves q but reverses orientation in odd rank
    flipped = tuple(tuple(-x for x in row) for row in M1)
    with pytest.raises(NotAnIsometry, match="determinant 1"):
        integralize(q, RationalIsometry(flipped, q))


@pytest.mark.parametrize("rank", [3, 4])
def test_integralize_round_trip(rank: int) -> None:
    rng = random.Random(41 + rank)
    S0 = sympy.diag(*([1] * (rank - 1) + [-1]))
    for _ in range(50):
        T0 = _random_isometry(rng, rank)
        h = _random_change_of_basis(rng, rank)
        T = h * T0 * h.inv()
        S = h.inv().T * S0 * h.inv()
        q = QuadraticForm(tuple(map(tuple, _rows(S))))
        iso = RationalIsometry(tuple(map(tuple, _rows(T))), q)

        q_new, t_new, g = integralize(q, iso)

        assert all(isinstance(x, int) for row in t_new for x in row)
        assert characteristic_polynomial(t_new) == characteristic_polynomial(_rows(T0))
        T_new = sympy.Matrix(t_new)
        S_new = _sym(q_new.matrix)
        assert T_new.T * S_new * T_new == S_new
        G = _sym(g)
        assert G.inv() * T * G == T_new
        assert G.T * S * G == S_new


def test_parse_and_format_forms() -> None:
    q = parse_form("diag:1,1,1,-3")
    assert q == QuadraticForm.diagonal([1, 1, 1, -3])
    assert format_form(q) == "diag:1,1,1,-3"

    hyperbolic = parse_form("2:0,1/2,1/2,0")
    assert hyperbolic.matrix == ((0, Fraction(1, 2)), (Fraction(1, 2), 0))
    assert format_form(hyperbolic) == "2:0,1/2,1/2,0"
    assert parse_form(format_form(hyperbolic)) == hyperbolic

    assert parse_matrix("2:1,2,3,4") == ((1, 2), (3, 4))
    with pytest.raises(ValueError, match="needs 4 entries"):
        parse_form("2:1,2,3")
    with pytest.raises(ValueError, match="malformed"):
        parse_form("1,2,3")
    with pytest.raises(ValueError, match="rank must be an integer"):
        parse_form("two:1,0,0,1")
