import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from sesqui.algebra import Mat, enumerate_elements, enumerate_units
from sesqui.budget import Budget
from sesqui.errors import (
    BudgetExceededError,
    DimensionMismatch,
    InfiniteBaseError,
    NotInvertibleError,
)
from sesqui.forms import (
    System,
    canonical_representative,
    classify_isometry_classes,
    congruence_profile,
    enumerate_systems,
    find_isometry,
    hermitian_unimodular_predicate,
    orthogonal_sum,
    transform,
)


def vec(algebra, *ints):
    return tuple(algebra.from_int(n) for n in ints)


# -- evaluation ---------------------------------------------------------------


def test_evaluate_unit_form(A3):
    s = System.from_ints(A3, [[[1]]])
    assert s.evaluate(0, vec(A3, 1), vec(A3, 1)) == A3.one()


def test_evaluate_base_pairs_non_hermitian_witness(A3):
    s = System.from_ints(A3, [[[0, 1], [0, 0]]])
    e1, e2 = vec(A3, 1, 0), vec(A3, 0, 1)
    assert s.evaluate(0, e1, e2) == A3.one()
    assert s.evaluate(0, e2, e1) == A3.zero()


def test_sesquilinearity_exhaustive_rank1(A9):
    # s(xa, yb) = sigma(a) s(x, y) b over the Frobenius algebra, all tuples
    s = System.single(Mat.from_rows(A9, [[A9.basis_element(1)]]))
    elems = list(enumerate_elements(A9))
    for a, b, x, y in itertools.product(elems, repeat=4):
        lhs = s.evaluate(0, (A9.mul(x, a),), (A9.mul(y, b),))
        rhs = A9.mul(A9.mul(A9.involve(a), s.evaluate(0, (x,), (y,))), b)
        assert lhs == rhs


def test_evaluate_errors(A3):
    s = System.from_ints(A3, [[[1]]])
    with pytest.raises(IndexError):
        s.evaluate(1, vec(A3, 1), vec(A3, 1))
    with pytest.raises(DimensionMismatch):
        s.evaluate(0, vec(A3, 1, 0), vec(A3, 1))


def test_rank_zero_evaluation(A3):
    s = System(A3, 0, (Mat.zeros(A3, 0, 0),))
    assert s.evaluate(0, (), ()) == A3.zero()


# -- adjoints ------------------------------------------------------------------


def test_adjoints_symmetric_coincide(A3):
    s = System.from_ints(A3, [[[1, 2], [2, 0]]])
    assert s.left_adjoint(0).matrix == s.right_adjoint(0).matrix


def test_adjoints_transpose_relation(A3):
    s = System.from_ints(A3, [[[0, 1], [0, 0]]])
    left, right = s.left_adjoint(0).matrix, s.right_adjoint(0).matrix
    # oracle: evaluate both functionals on all basis pairs
    for i in range(2):
        x = tuple(A3.from_int(1 if k == i else 0) for k in range(2))
        for j in range(2):
            y = tuple(A3.from_int(1 if k == j else 0) for k in range(2))
            stored_l = left.mul(Mat(A3, 2, 1, tuple((c,) for c in x)))
            val_l = stored_l.conj_transpose().mul(Mat(A3, 2, 1, tuple((c,) for c in y)))
            assert val_l.entries[0][0] == s.evaluate(0, x, y)
            stored_r = right.mul(Mat(A3, 2, 1, tuple((c,) for c in x)))
            val_r = stored_r.conj_transpose().mul(Mat(A3, 2, 1, tuple((c,) for c in y)))
            assert val_r.entries[0][0] == A3.involve(s.evaluate(0, y, x))
    assert right == left.transpose()


def test_right_adjoint_is_dual_of_left_exhaustive(A3):
    # the dual of a map with matrix L is conj_transpose(L); with the identity
    # double-dual map this forces right = conj_transpose(left)
    for s in enumerate_systems(A3, 2, 1):
        assert s.right_adjoint(0).matrix == s.left_adjoint(0).matrix.conj_transpose()


def test_adjoints_rank_zero(A3):
    s = System(A3, 0, (Mat.zeros(A3, 0, 0),))
    assert s.left_adjoint(0).matrix.rows == 0
    assert s.right_adjoint(0).source_rank == 0


# -- predicates -----------------------------------------------------------------


def test_epsilon_hermitian_examples(A3, AQ):
    assert System.from_ints(A3, [[[0, 1], [1, 0]]]).is_epsilon_hermitian(1)
    assert System.from_ints(AQ, [[[0, 1], [-1, 0]]]).is_epsilon_hermitian(-1)
    s = System.from_ints(A3, [[[0, 1], [0, 0]]])
    assert not s.is_epsilon_hermitian(1)
    assert not s.is_epsilon_hermitian(-1)
    with pytest.raises(ValueError):
        s.is_epsilon_hermitian(2)


def test_epsilon_hermitian_matches_pointwise_identity(A9):
    # matrix formulation vs sigma(s(x, y)) = eps * s(y, x) on all vectors
    elems = list(enumerate_elements(A9))
    rng = random.Random(3)
    for _ in range(40):
        g = Mat.from_rows(
            A9,
            [[elems[rng.randrange(9)] for _ in range(2)] for _ in range(2)],
        )
        s = System.single(g)
        for eps in (1, -1):
            pointwise = all(
                A9.involve(s.evaluate(0, x, y))
                == A9.scalar_mul(A9.field.from_int(eps), s.evaluate(0, y, x))
                for x in itertools.product(elems, repeat=2)
                for y in itertools.product(elems, repeat=2)
            )
            assert pointwise == s.is_epsilon_hermitian(eps)


def test_unimodular_examples(A3):
    assert System.from_ints(A3, [[[1, 0], [0, 1]]]).is_unimodular()
    assert not System.from_ints(A3, [[[0]]]).is_unimodular()
    assert not System.from_ints(A3, [[[1, 1], [1, 1]]]).is_unimodular()


# -- orthogonal sum ----------------------------------------------------------------


def test_sum_neutral_element(A3):
    a = System.from_ints(A3, [[[1]]])
    zero = System(A3, 0, (Mat.zeros(A3, 0, 0),))
    assert orthogonal_sum(a, zero) == a
    assert orthogonal_sum(zero, a) == a


def test_sum_block_diagonal(A3):
    a = System.from_ints(A3, [[[1]]])
    b = System.from_ints(A3, [[[2]]])
    assert orthogonal_sum(a, b) == System.from_ints(A3, [[[1, 0], [0, 2]]])


def test_sum_evaluation_splits_exhaustively(A3):
    for a_val, b_val in itertools.product(range(3), repeat=2):
        a = System.from_ints(A3, [[[a_val]]])
        b = System.from_ints(A3, [[[b_val]]])
        total = orthogonal_sum(a, b)
        for x1, x2, y1, y2 in itertools.product(range(3), repeat=4):
            lhs = total.evaluate(0, vec(A3, x1, x2), vec(A3, y1, y2))
            rhs = A3.add(
                a.evaluate(0, vec(A3, x1), vec(A3, y1)),
                b.evaluate(0, vec(A3, x2), vec(A3, y2)),
            )
            assert lhs == rhs


def test_sum_commutative_associative_up_to_isometry(A3):
    a = System.from_ints(A3, [[[1]]])
    b = System.from_ints(A3, [[[0, 1], [0, 2]]])
    ab, ba = orthogonal_sum(a, b), orthogonal_sum(b, a)
    # explicit permutation witness moving the b-block before the a-block
    perm = Mat.from_ints(A3, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert transform(ba, perm) == ab or transform(ab, perm) == ba
    assert find_isometry(ab, ba) is not None
    c = System.from_ints(A3, [[[2]]])
    left = orthogonal_sum(orthogonal_sum(a, b), c)
    right = orthogonal_sum(a, orthogonal_sum(b, c))
    assert left == right  # associativity is literal for block sums


def test_sum_mismatch_errors(A3, A5):
    with pytest.raises(DimensionMismatch):
        orthogonal_sum(System.from_ints(A3, [[[1]]]), System.from_ints(A5, [[[1]]]))
    with pytest.raises(DimensionMismatch):
        orthogonal_sum(
            System.from_ints(A3, [[[1]]]),
            System.from_ints(A3, [[[1]], [[2]]]),
        )


# -- transform --------------------------------------------------------------------


def test_transform_identity_and_square(A3):
    s = System.from_ints(A3, [[[1]]])
    assert transform(s, Mat.identity(A3, 1)) == s
    assert transform(s, Mat.from_ints(A3, [[2]])) == s  # 2 * 1 * 2 = 4 = 1


def test_transform_not_invertible(A3):
    with pytest.raises(NotInvertibleError):
        transform(System.from_ints(A3, [[[1]]]), Mat.from_ints(A3, [[0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3**4 - 1), st.data())
def test_transform_round_trip_random(si, data):
    from sesqui.fields import PrimeField
    from sesqui.algebra import field_algebra, unit_matrix_indices, _mat_from_indices

    A3 = field_algebra(PrimeField(3))
    digits = []
    v = si
    for _ in range(4):
        digits.append(v % 3)
        v //= 3
    s = System.from_ints(A3, [[digits[:2], digits[2:]]])
    units = unit_matrix_indices(A3, 2)
    p = _mat_from_indices(A3, 2, 2, units[data.draw(st.integers(0, len(units) - 1))])
    assert transform(transform(s, p), p.inverse()) == s


def test_transform_preserves_hermitian_and_unimodular(A3):
    for s in (
        System.from_ints(A3, [[[0, 1], [1, 0]]]),
        System.from_ints(A3, [[[1, 0], [0, 2]]]),
    ):
        for p in enumerate_units(A3, 2):
            t = transform(s, p)
            assert t.is_epsilon_hermitian(1) == s.is_epsilon_hermitian(1)
            assert t.is_unimodular() == s.is_unimodular()


# -- isometry oracle -----------------------------------------------------------------


def test_isometry_identity_witness(A3):
    s = System.from_ints(A3, [[[1, 2], [0, 1]]])
    assert find_isometry(s, s) == Mat.identity(A3, 2)


def test_isometry_square_classes(A3, A5):
    one3 = System.from_ints(A3, [[[1]]])
    two3 = System.from_ints(A3, [[[2]]])
    assert find_isometry(one3, two3) is None  # 2 is a non-square mod 3
    one5 = System.from_ints(A5, [[[1]]])
    four5 = System.from_ints(A5, [[[4]]])
    w = find_isometry(one5, four5)
    assert w == Mat.from_ints(A5, [[2]])  # 2 * 4 * 2 = 16 = 1 (first in order)
    assert transform(four5, w) == one5


def test_isometry_is_equivalence_relation(A3):
    forms = list(enumerate_systems(A3, 1, 2))
    for a in forms:
        assert find_isometry(a, a) is not None
    for a, b in itertools.product(forms, repeat=2):
        w = find_isometry(a, b)
        if w is None:
            assert find_isometry(b, a) is None
        else:
            # symmetric: the inverse witness works the other way
            assert transform(a, w.inverse()) == b
            for c in forms:
                w2 = find_isometry(b, c)
                if w2 is not None:
                    # transitive: compose witnesses
                    assert transform(c, w2.mul(w)) == a


def test_isometry_infinite_base_rejected(AQ):
    s = System.from_ints(AQ, [[[1]]])
    t = System.from_ints(AQ, [[[4]]])
    with pytest.raises(InfiniteBaseError):
        find_isometry(s, t)


def test_isometry_over_gf9_systems(A9):
    # simultaneous pair: N(u) scales both entries together
    a = System(
        A9, 1, (Mat.from_rows(A9, [[A9.from_int(1)]]), Mat.from_rows(A9, [[A9.from_int(1)]]))
    )
    b = System(
        A9, 1, (Mat.from_rows(A9, [[A9.from_int(2)]]), Mat.from_rows(A9, [[A9.from_int(2)]]))
    )
    w = find_isometry(a, b)
    assert w is not None  # norms hit 2 = -1
    mixed = System(
        A9, 1, (Mat.from_rows(A9, [[A9.from_int(1)]]), Mat.from_rows(A9, [[A9.from_int(2)]]))
    )
    assert find_isometry(a, mixed) is None


# -- classification --------------------------------------------------------------------


def test_classify_rank1_all_forms(A3):
    reps = classify_isometry_classes(A3, 1, 1)
    assert [r.grams[0].entries[0][0] for r in reps] == [
        A3.from_int(0),
        A3.from_int(1),
        A3.from_int(2),
    ]


def test_classify_rank1_symmetric_unimodular(A3):
    reps = classify_isometry_classes(
        A3, 1, 1, predicate=hermitian_unimodular_predicate(1)
    )
    assert [r.grams[0].entries[0][0] for r in reps] == [A3.from_int(1), A3.from_int(2)]


def test_classify_rank0(A3):
    assert len(classify_isometry_classes(A3, 0, 1)) == 1


def test_classify_budget_exceeded(A3):
    with pytest.raises(BudgetExceededError) as err:
        classify_isometry_classes(A3, 2, 2, budget=Budget(10))
    assert err.value.estimate > 10


def test_classification_is_a_transversal(A3):
    # every rank-1 pair-system is isometric to exactly one representative
    reps = classify_isometry_classes(A3, 1, 2)
    for s in enumerate_systems(A3, 1, 2):
        hits = [r for r in reps if find_isometry(s, r) is not None]
        assert len(hits) == 1


def test_canonical_representative_is_orbit_minimum(A3):
    s = System.from_ints(A3, [[[2, 1], [1, 1]]])
    canon = canonical_representative(s)
    best = min(
        (transform(s, p) for p in enumerate_units(A3, 2)),
        key=lambda f: f.sort_key(),
    )
    assert canon == best


# -- congruence profile soundness ----------------------------------------------------------


def test_profile_is_isometry_invariant(A9):
    rng = random.Random(11)
    elems = list(enumerate_elements(A9))
    units = list(enumerate_units(A9, 2))
    for _ in range(10):
        grams = tuple(
            Mat.from_rows(
                A9, [[elems[rng.randrange(9)] for _ in range(2)] for _ in range(2)]
            )
            for _ in range(2)
        )
        s = System(A9, 2, grams)
        base = congruence_profile(s)
        assert base is not None
        for _ in range(8):
            p = units[rng.randrange(len(units))]
            assert congruence_profile(transform(s, p)) == base


def test_profile_unsupported_over_matrix_algebra(A3):
    from sesqui.transfer import module_endomorphism_ring

    m2 = module_endomorphism_ring(A3, 2).as_algebra_without_involution()
    s = System.single(Mat.identity(m2, 1))
    assert congruence_profile(s) is None
