from fractions import Fraction

from sesqui import linalg
from sesqui.fields import PrimeField, Rationals


def test_rref_and_rank_over_gf3():
    F = PrimeField(3)
    # (2, 1, 0) = 2 * (1, 2, 0) mod 3, so the first two rows are proportional
    assert linalg.rank(F, [[1, 2, 0], [2, 1, 0], [0, 0, 0]]) == 1
    assert linalg.rank(F, [[1, 0, 0], [2, 1, 0], [0, 0, 0]]) == 2


def test_solve_exact_and_inconsistent():
    F = PrimeField(3)
    a = [[1, 1], [0, 1]]
    b = [[2], [1]]
    x = linalg.solve(F, a, b)
    assert linalg.mat_mul(F, a, x) == b
    # inconsistent: x + y = 1 and x + y = 2
    assert linalg.solve(F, [[1, 1], [1, 1]], [[1], [2]]) is None


def test_inverse_round_trip():
    F = PrimeField(5)
    a = [[1, 2], [3, 4]]
    inv = linalg.inverse(F, a)
    assert linalg.mat_mul(F, a, inv) == linalg.identity(F, 2)
    assert linalg.inverse(F, [[1, 2], [2, 4]]) is None


def test_nullspace_members_are_in_the_kernel():
    F = PrimeField(3)
    a = [[1, 2, 1], [2, 1, 1]]
    basis = linalg.nullspace(F, a, 3)
    assert len(basis) == 1
    v = basis[0]
    for row in a:
        assert sum(r * x for r, x in zip(row, v)) % 3 == 0


def test_nullspace_is_stable_under_field_extension():
    # the canonical RREF basis must embed to the extension's basis verbatim
    from sesqui.fields import finite_field

    F3 = PrimeField(3)
    F27 = finite_field(3, 3, [2, 2, 0, 1])
    a3 = [[1, 2, 1], [0, 1, 2]]
    base_basis = linalg.nullspace(F3, a3, 3)
    a27 = [[F27.from_int(x) for x in row] for row in a3]
    ext_basis = linalg.nullspace(F27, a27, 3)
    embedded = [[F27.from_int(x) for x in vec] for vec in base_basis]
    assert embedded == ext_basis


def test_det_matches_cofactor_expansion():
    F = PrimeField(7)
    a = [[1, 2, 3], [4, 5, 6], [1, 0, 1]]

    def det3(m):  # oracle: direct cofactor expansion mod 7
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        ) % 7

    assert linalg.det(F, a) == det3(a)


def test_charpoly_over_q():
    Q = Rationals()
    a = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
    # oracle: det(xI - A) = x^2 - 1 for the swap matrix
    assert linalg.charpoly(Q, a) == [Fraction(-1), Fraction(0), Fraction(1)]
    b = [[Fraction(2)]]
    assert linalg.charpoly(Q, b) == [Fraction(-2), Fraction(1)]
