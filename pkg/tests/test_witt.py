import itertools
import random
from fractions import Fraction

import pytest

from sesqui.algebra import Mat, enumerate_elements, enumerate_matrices
from sesqui.budget import Budget
from sesqui.double_arrow import find_isometry as find_da_isometry, hyperbolic_form, to_hermitian
from sesqui.errors import BudgetExceededError, NotInvertibleError
from sesqui.forms import (
    System,
    enumerate_systems,
    find_isometry,
    hermitian_unimodular_predicate,
    orthogonal_sum,
    transform,
)
from sesqui.witt import (
    HyperbolicSpec,
    RationalInvariants,
    build_witt_table,
    cancellation_check,
    cancellation_sweep,
    enumerate_hyperbolic_specs,
    find_hyperbolic_structure,
    hyperbolic_system,
    spec_gives_hermitian,
    spec_gives_unimodular,
    standard_hyperbolic,
    standardizing_isometry,
    symmetric_diagonalize,
    symmetric_rational_invariants,
    witt_equivalent,
)
from sesqui.witt import _find_hyperbolic_split


def _pair_spec(algebra, f_grid, g_grid):
    return HyperbolicSpec.from_pair(
        Mat.from_ints(algebra, f_grid), Mat.from_ints(algebra, g_grid)
    )


def _formula_value(algebra, spec, gram_index, x_full, y_full):
    """Independent oracle for the hyperbolic evaluation: split the vectors and
    compute functional(g(x)) + involution(functional'(f(x')))."""
    m, n = spec.source_rank, spec.target_rank
    f, g = spec.arrows[gram_index]
    x1, y1 = x_full[:m], x_full[m:]
    x2, y2 = y_full[:m], y_full[m:]

    def col(v):
        return Mat(algebra, len(v), 1, tuple((c,) for c in v))

    term1 = algebra.zero()
    if n:
        gx2 = g.mul(col(x2)) if m else Mat.zeros(algebra, n, 1)
        term1 = col(y1).conj_transpose().mul(gx2).entries[0][0]
    term2 = algebra.zero()
    if n:
        fx1 = f.mul(col(x1)) if m else Mat.zeros(algebra, n, 1)
        term2 = algebra.involve(col(y2).conj_transpose().mul(fx1).entries[0][0])
    return algebra.add(term1, term2)


# -- the evaluation formula --------------------------------------------------------


def test_hyperbolic_formula_on_basis_pairs_gf9(A9):
    # m = n = 1 over the Frobenius algebra: Gram [[0, sigma(a)], [b, 0]]
    a, b = A9.basis_element(1), A9.add(A9.one(), A9.basis_element(1))
    spec = HyperbolicSpec.from_pair(Mat.from_rows(A9, [[a]]), Mat.from_rows(A9, [[b]]))
    h = hyperbolic_system(spec)
    g = h.grams[0]
    assert g.entries[0][1] == A9.involve(a)
    assert g.entries[1][0] == b
    assert A9.is_zero(g.entries[0][0]) and A9.is_zero(g.entries[1][1])
    basis = [tuple(A9.one() if i == k else A9.zero() for i in range(2)) for k in range(2)]
    for x, y in itertools.product(basis, repeat=2):
        assert h.evaluate(0, x, y) == _formula_value(A9, spec, 0, x, y)


def test_standard_hyperbolic_plane(A3, AQ):
    spec = _pair_spec(A3, [[1]], [[1]])
    assert hyperbolic_system(spec) == System.from_ints(A3, [[[0, 1], [1, 0]]])
    assert standard_hyperbolic(AQ, 1, 1) == System.from_ints(AQ, [[[0, 1], [1, 0]]])
    minus = standard_hyperbolic(AQ, 1, -1)
    assert minus == System.from_ints(AQ, [[[0, -1], [1, 0]]])
    assert standard_hyperbolic(AQ, 1, 1).is_epsilon_hermitian(1)
    assert minus.is_epsilon_hermitian(-1)


def test_empty_hyperbolic(A3):
    spec = HyperbolicSpec.from_pair(Mat.zeros(A3, 0, 0), Mat.zeros(A3, 0, 0))
    assert hyperbolic_system(spec).rank == 0


def test_formula_exhaustive_small(A3):
    # every spec with m, n <= 1 over GF(3), all vector pairs
    for m, n in itertools.product((0, 1), repeat=2):
        mats = list(enumerate_matrices(A3, n, m))
        vectors = list(itertools.product([A3.from_int(i) for i in range(3)], repeat=m + n))
        for f, g in itertools.product(mats, repeat=2):
            spec = HyperbolicSpec.from_pair(f, g)
            h = hyperbolic_system(spec)
            for x, y in itertools.product(vectors, repeat=2):
                assert h.evaluate(0, x, y) == _formula_value(A3, spec, 0, x, y)


# -- equal arrows, invertible arrows ----------------------------------------------------


def test_hermitian_iff_equal_arrows_sweep(A3, A9):
    for algebra in (A3, A9):
        elems = list(enumerate_elements(algebra))
        for fe, ge in itertools.product(elems, repeat=2):
            spec = HyperbolicSpec.from_pair(
                Mat.from_rows(algebra, [[fe]]), Mat.from_rows(algebra, [[ge]])
            )
            form = hyperbolic_system(spec)
            assert spec_gives_hermitian(spec) == (fe == ge)
            assert form.is_epsilon_hermitian(1) == spec_gives_hermitian(spec)
            assert spec_gives_unimodular(spec) == form.is_unimodular()


def test_hermitian_false_unimodular_true_example(A3):
    spec = _pair_spec(A3, [[1]], [[2]])
    assert not spec_gives_hermitian(spec)
    assert spec_gives_unimodular(spec)
    assert not hyperbolic_system(spec).is_epsilon_hermitian(1)
    assert hyperbolic_system(spec).is_unimodular()
    assert not spec_gives_unimodular(_pair_spec(A3, [[0]], [[1]]))


# -- the standardizing witness ----------------------------------------------------------


def test_standardizing_identity_arrow(A3):
    spec = _pair_spec(A3, [[1]], [[1]])
    assert standardizing_isometry(spec) == Mat.identity(A3, 2)


def test_standardizing_f2_over_gf5(A5):
    spec = _pair_spec(A5, [[2]], [[2]])
    w = standardizing_isometry(spec)
    assert w == Mat.from_ints(A5, [[1, 0], [0, 2]])  # diag(1, sigma(2))
    assert transform(standard_hyperbolic(A5, 1, 1), w) == hyperbolic_system(spec)


def test_standardizing_rank2(A3):
    f = Mat.from_ints(A3, [[1, 1], [0, 1]])
    spec = HyperbolicSpec.from_pair(f, f)
    w = standardizing_isometry(spec)
    assert transform(standard_hyperbolic(A3, 2, 1), w) == hyperbolic_system(spec)


def test_standardizing_witness_every_invertible_arrow(A3, A5):
    for algebra in (A3, A5):
        for e in enumerate_elements(algebra):
            f = Mat.from_rows(algebra, [[e]])
            spec = HyperbolicSpec.from_pair(f, f)
            if f.inverse() is None:
                with pytest.raises(NotInvertibleError):
                    standardizing_isometry(spec)
            else:
                w = standardizing_isometry(spec)
                assert transform(standard_hyperbolic(algebra, 1, 1), w) == hyperbolic_system(spec)


def test_standardizing_rejects_unequal_arrows(A3):
    with pytest.raises(ValueError):
        standardizing_isometry(_pair_spec(A3, [[1]], [[2]]))


# -- hyperbolicity oracle ------------------------------------------------------------------


def test_hyperbolic_plane_detected_first_in_order(A3):
    found = find_hyperbolic_structure(System.from_ints(A3, [[[0, 1], [1, 0]]]))
    assert found is not None
    spec, witness = found
    assert spec.arrows[0][0] == Mat.from_ints(A3, [[1]])
    assert spec.arrows[0][1] == Mat.from_ints(A3, [[1]])
    assert transform(hyperbolic_system(spec), witness) == System.from_ints(
        A3, [[[0, 1], [1, 0]]]
    )


def test_unit_form_not_hyperbolic(A3):
    assert find_hyperbolic_structure(System.from_ints(A3, [[[1]]])) is None


def test_isotropy_oracle_and_hyperbolicity(A3):
    # oracle: enumerate the 9 vector candidates for isotropy of diag(d1, d2)
    def isotropic_vectors(d1, d2):
        return [
            (x, y)
            for x in range(3)
            for y in range(3)
            if (x, y) != (0, 0) and (d1 * x * x + d2 * y * y) % 3 == 0
        ]

    assert isotropic_vectors(1, 1) == []  # diag(1,1) is anisotropic
    assert len(isotropic_vectors(1, 2)) > 0  # diag(1,2) is isotropic
    assert find_hyperbolic_structure(System.from_ints(A3, [[[1, 0], [0, 1]]])) is None
    found = find_hyperbolic_structure(System.from_ints(A3, [[[1, 0], [0, 2]]]))
    assert found is not None
    spec, w = found
    assert transform(hyperbolic_system(spec), w) == System.from_ints(A3, [[[1, 0], [0, 2]]])


def test_zero_forms_are_hyperbolic(A3):
    assert find_hyperbolic_structure(System.from_ints(A3, [[[0]]])) is not None
    assert find_hyperbolic_structure(System.from_ints(A3, [[[0, 0], [0, 0]]])) is not None


def test_split_strategy_matches_enumeration(A3, A5, A9):
    # dual-route check on all unimodular epsilon-hermitian rank-2 forms
    for algebra, eps in ((A3, 1), (A5, 1), (A9, 1), (A9, -1)):
        count = algebra.element_count
        for flat in itertools.product(range(count), repeat=4):
            g = Mat.from_rows(
                algebra,
                [
                    [algebra.element_at(flat[0]), algebra.element_at(flat[1])],
                    [algebra.element_at(flat[2]), algebra.element_at(flat[3])],
                ],
            )
            s = System.single(g)
            if not (s.is_epsilon_hermitian(eps) and s.is_unimodular()):
                continue
            by_enum = find_hyperbolic_structure(s, strategy="enumerate")
            by_split = _find_hyperbolic_split(s, Budget(None))
            assert (by_enum is None) == (by_split is None)
            if by_split is not None:
                spec, w = by_split
                assert transform(hyperbolic_system(spec), w) == s


def test_hyperbolic_budget(A9):
    # rank-2 systems with two forms over GF(9) exceed a tiny budget up front
    s = System(
        A9,
        2,
        (Mat.identity(A9, 2), Mat.identity(A9, 2)),
    )
    with pytest.raises(BudgetExceededError):
        find_hyperbolic_structure(s, Budget(50))


def test_hyperbolic_sesquilinear_maps_to_hyperbolic_da_form(A3):
    # images under the system->hermitian functor of hyperbolic systems are
    # isometric to the double-arrow hyperbolic forms (tiny exhaustive)
    for spec in enumerate_hyperbolic_specs(A3, 2, 1):
        if spec.source_rank != 1:
            continue
        h_img = to_hermitian(hyperbolic_system(spec))
        h_da = hyperbolic_form(spec.object(), 1)
        w = find_da_isometry(h_img, h_da)
        assert w is not None


# -- witt equivalence ------------------------------------------------------------------------


def test_witt_equivalent_reflexive(A3):
    a = System.from_ints(A3, [[[1]]])
    cert = witt_equivalent(a, a, 0)
    assert cert is not None
    assert cert.left_stabilizer.rank == 0


def test_witt_equivalent_with_hyperbolic_pad(A3):
    a = System.from_ints(A3, [[[1]]])
    b = orthogonal_sum(a, System.from_ints(A3, [[[0, 1], [1, 0]]]))
    cert = witt_equivalent(a, b, 2)
    assert cert is not None
    left = orthogonal_sum(a, cert.left_stabilizer) if cert.left_stabilizer.rank else a
    right = orthogonal_sum(b, cert.right_stabilizer) if cert.right_stabilizer.rank else b
    assert transform(right, cert.witness) == left


def test_witt_inequivalent_square_classes(A3):
    a = System.from_ints(A3, [[[1]]])
    b = System.from_ints(A3, [[[2]]])
    assert witt_equivalent(a, b, 2) is None


# -- witt tables -----------------------------------------------------------------------------


def test_witt_table_gf3_symmetric_unimodular(A3):
    table = build_witt_table(A3, 2, 1, hermitian_unimodular_predicate(1))
    assert table.witt_class_count == 4
    assert table.sum_law_consistent
    hyp_ids = {e.witt_class_id for e in table.entries if e.is_hyperbolic}
    assert hyp_ids == {0}
    law = dict(table.sum_law)
    assert law.get((0, 0)) == 0  # hyperbolic classes absorb under sums
    # the rank-2 classes: the hyperbolic plane and the anisotropic diag(1,1)
    rank2 = table.classes_of_rank(2)
    assert len(rank2) == 2
    assert sorted(e.is_hyperbolic for e in rank2) == [False, True]


def test_witt_table_gf9_hermitian_unimodular(A9):
    table = build_witt_table(A9, 2, 1, hermitian_unimodular_predicate(1))
    assert table.witt_class_count == 2
    # hermitian rank-1 forms collapse to one class; rank-2 class is hyperbolic
    assert len(table.classes_of_rank(1)) == 1
    rank2 = table.classes_of_rank(2)
    assert len(rank2) == 1 and rank2[0].is_hyperbolic


def test_witt_table_rank_zero(A3):
    table = build_witt_table(A3, 0, 1)
    assert table.witt_class_count == 1
    assert table.entries[0].witt_class_id == 0


def test_witt_table_sesquilinear_rank1(A3):
    # degenerate forms are first-class: the zero form of rank 1 is hyperbolic
    table = build_witt_table(A3, 1, 1)
    by_rank1 = table.classes_of_rank(1)
    zero_entry = [e for e in by_rank1 if e.representative.grams[0].is_zero()]
    assert len(zero_entry) == 1 and zero_entry[0].is_hyperbolic
    assert zero_entry[0].witt_class_id == 0


# -- cancellation -----------------------------------------------------------------------------


def test_cancellation_check_trivial(A3):
    v = System.from_ints(A3, [[[1]]])
    report = cancellation_check(v, v, v)
    assert report["consistent"] and report["premise"]


def test_cancellation_check_premise_false(A3):
    report = cancellation_check(
        System.from_ints(A3, [[[1]]]),
        System.from_ints(A3, [[[2]]]),
        System.from_ints(A3, [[[0]]]),
    )
    assert report["consistent"] and not report["premise"]


def test_cancellation_sweep_small(A3, A9):
    rep = cancellation_sweep(A3, 1, 1)
    assert rep["counterexamples"] == []
    rep9 = cancellation_sweep(A9, 1, 1)
    assert rep9["counterexamples"] == []


# -- rational invariants ----------------------------------------------------------------------


def _q_system(AQ, grid):
    return System.single(
        Mat.from_rows(AQ, [[(Fraction(x),) for x in row] for row in grid])
    )


def test_rational_invariants_examples(AQ):
    assert symmetric_rational_invariants(_q_system(AQ, [[1, 0], [0, -1]])) == RationalInvariants(2, -1, 0)
    assert symmetric_rational_invariants(_q_system(AQ, [[0, 1], [1, 0]])) == RationalInvariants(2, -1, 0)
    assert symmetric_rational_invariants(_q_system(AQ, [[1, 0], [0, 1]])) == RationalInvariants(2, 1, 2)


def test_rational_invariants_squarefree_reduction(AQ):
    inv = symmetric_rational_invariants(_q_system(AQ, [[8, 0], [0, 1]]))
    assert inv.determinant_class == 2  # 8 = 2 * 2^2
    inv2 = symmetric_rational_invariants(
        _q_system(AQ, [[Fraction(1, 2), 0], [0, 1]])
    )
    assert inv2.determinant_class == 2  # 1/2 ~ 2 mod squares


def test_rational_invariants_degenerate(AQ):
    inv = symmetric_rational_invariants(_q_system(AQ, [[1, 0], [0, 0]]))
    assert inv.rank == 1 and inv.signature == 1 and inv.determinant_class == 1


def test_rational_invariants_signature_cross_check(AQ):
    # Sturm-count signature vs congruence diagonalization on random matrices
    rng = random.Random(5)
    for _ in range(25):
        n = rng.randrange(1, 5)
        m = [[Fraction(rng.randrange(-4, 5)) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i):
                m[i][j] = m[j][i]
        s = _q_system(AQ, m)
        inv = symmetric_rational_invariants(s)
        diag = symmetric_diagonalize([[Fraction(x) for x in row] for row in m])
        expected = sum(1 for d in diag if d > 0) - sum(1 for d in diag if d < 0)
        assert inv.signature == expected
        assert inv.rank == sum(1 for d in diag if d != 0)


def test_rational_invariants_preconditions(A3, AQ, AQS2):
    with pytest.raises(ValueError):
        symmetric_rational_invariants(System.from_ints(A3, [[[1]]]))
    with pytest.raises(ValueError):
        symmetric_rational_invariants(System.from_ints(AQ, [[[0, 1], [0, 0]]]))
    with pytest.raises(ValueError):
        symmetric_rational_invariants(System.single(Mat.identity(AQS2, 1)))
