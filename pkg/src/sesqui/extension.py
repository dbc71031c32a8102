"""Scalar extension of algebras and forms, with descent verification suites.

A field extension is presented by an explicit monic irreducible modulus over
the base; extending an algebra keeps its structure constants and involution
matrix and merely reads them in the larger field (the involution extends
linearly).  Extending a form reinterprets its Gram entries the same way, so
extension is functorial and preserves sums, hermitian signs, unimodularity
and isometries.

``springer_check`` verifies odd-degree descent exhaustively at bounded rank:
it classifies base systems, extends one representative per class, and confirms
that distinct classes stay non-isometric after extension.  Run on an
even-degree extension it reports the collapses instead (over GF(3) inside
GF(9) the square classes merge, which is the canonical control case).

``restriction_check`` verifies, for an odd-degree extension, that no
unimodular epsilon-hermitian form acquires a hyperbolic extension without
being hyperbolic itself, and that transferring into the endomorphism ring
commutes with extension on exhaustive rank-one instances.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Algebra, Mat
from .budget import Budget, ensure_budget
from .errors import DimensionMismatch, EvenDegreeError, InfiniteBaseError
from .fields import BaseField, ExtensionField, smallest_irreducible
from .forms import (
    System,
    classify_isometry_classes,
    congruence_profile,
    find_isometry,
    hermitian_unimodular_predicate,
)
from .transfer import module_endomorphism_ring, transfer_form
from .witt import find_hyperbolic_structure


class FieldExtension:
    """A finite extension L/K given by a monic irreducible modulus over K."""

    __slots__ = ("base", "modulus", "field")

    def __init__(self, base: BaseField, modulus):
        self.base = base
        self.field = ExtensionField(base, modulus)
        self.modulus = self.field.modulus

    @property
    def degree(self) -> int:
        return self.field.degree

    @property
    def is_odd(self) -> bool:
        return self.degree % 2 == 1

    def embed(self, a):
        return self.field.embed(a)

    def __eq__(self, other):
        if not isinstance(other, FieldExtension):
            return NotImplemented
        return self.base == other.base and self.modulus == other.modulus

    def __hash__(self):
        return hash((self.base, self.modulus))

    def __repr__(self):
        return f"FieldExtension(degree={self.degree} over {self.base!r})"


def default_extension(base: BaseField, degree: int) -> FieldExtension:
    """The extension with the lexicographically smallest monic irreducible
    modulus of the given degree (deterministic CLI default)."""
    return FieldExtension(base, smallest_irreducible(base, degree))


def extend_algebra(algebra: Algebra, ext: FieldExtension) -> Algebra:
    """A tensored up to L: same structure constants and involution, read in L."""
    if algebra.field != ext.base:
        raise DimensionMismatch("extension base does not match the algebra's field")
    emb = ext.embed
    sc = tuple(
        tuple(tuple(emb(c) for c in entry) for entry in row) for row in algebra.sc
    )
    unit = tuple(emb(c) for c in algebra.unit)
    invol = tuple(tuple(emb(c) for c in row) for row in algebra.invol)
    return Algebra(ext.field, sc, unit, invol)


def extend_element(ext: FieldExtension, element):
    return tuple(ext.embed(c) for c in element)


def extend_matrix(ext: FieldExtension, extended_algebra: Algebra, mat: Mat) -> Mat:
    return mat.map_entries(
        lambda e: extend_element(ext, e), algebra=extended_algebra
    )


def extend_system(
    ext: FieldExtension, form: System, extended_algebra: Algebra | None = None
) -> System:
    """Same Gram entries reinterpreted over the extended algebra."""
    if extended_algebra is None:
        extended_algebra = extend_algebra(form.algebra, ext)
    grams = tuple(extend_matrix(ext, extended_algebra, g) for g in form.grams)
    return System(extended_algebra, form.rank, grams)


# ---------------------------------------------------------------------------
# descent of isometry (exhaustive)


@dataclass(frozen=True)
class Collapse:
    rank: int
    left: System
    right: System
    witness: Mat  # isometry of the extensions


@dataclass(frozen=True)
class DescentReport:
    degree: int
    rank_bound: int
    num_forms: int
    classes_by_rank: tuple  # (rank, count) pairs
    pairs_checked: int
    pairs_swept: int
    collapses: tuple

    @property
    def descent_holds(self) -> bool:
        return not self.collapses


def springer_check(
    algebra: Algebra,
    ext: FieldExtension,
    rank_bound: int,
    num_forms: int,
    budget: Budget | None = None,
) -> DescentReport:
    """Exhaustively verify that extension-isometric systems are base-isometric.

    Works over the classification: two systems are extension-isometric iff
    their class representatives are, so it suffices to check all pairs of
    distinct base classes.  Congruence profiles over the extended field settle
    most pairs; the rest get a full unit sweep.  An even-degree control run
    uses the same code path and is expected to produce collapses.
    """
    if not algebra.is_finite:
        raise InfiniteBaseError("descent sweep needs a finite base field")
    budget = ensure_budget(budget)
    a_ext = extend_algebra(algebra, ext)
    class_counts = []
    collapses = []
    pairs_checked = 0
    pairs_swept = 0
    for rank in range(rank_bound + 1):
        reps = classify_isometry_classes(algebra, rank, num_forms, budget=budget)
        class_counts.append((rank, len(reps)))
        extended = [extend_system(ext, rep, a_ext) for rep in reps]
        profiles = [congruence_profile(e) for e in extended]
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                pairs_checked += 1
                pi, pj = profiles[i], profiles[j]
                if pi is not None and pj is not None and pi != pj:
                    continue  # certified non-isometric over L
                pairs_swept += 1
                witness = find_isometry(extended[i], extended[j], budget)
                if witness is not None:
                    collapses.append(Collapse(rank, reps[i], reps[j], witness))
    return DescentReport(
        ext.degree,
        rank_bound,
        num_forms,
        tuple(class_counts),
        pairs_checked,
        pairs_swept,
        tuple(collapses),
    )


# ---------------------------------------------------------------------------
# restriction map checks (hyperbolicity descent + transfer square)


@dataclass(frozen=True)
class RestrictionReport:
    degree: int
    rank_bound: int
    epsilon: int
    classes_checked: int
    hyperbolicity_violations: tuple  # forms with hyperbolic extension, non-hyperbolic base
    square_instances: int
    square_failures: tuple

    @property
    def ok(self) -> bool:
        return not self.hyperbolicity_violations and not self.square_failures


def restriction_check(
    algebra: Algebra,
    ext: FieldExtension,
    rank_bound: int,
    epsilon: int = 1,
    budget: Budget | None = None,
) -> RestrictionReport:
    """Odd-degree restriction suite.

    Part one: for every isometry class of unimodular epsilon-hermitian forms
    within the rank bound, a hyperbolic extension forces a hyperbolic base
    form.  Part two: transferring into the endomorphism ring of M = A^1 and
    then extending agrees with extending first and transferring over the
    extended ring, on all rank-one instances (the two presentations coincide
    literally, and an isometry witness is produced anyway).
    """
    if ext.degree % 2 == 0:
        raise EvenDegreeError("the restriction suite requires an odd-degree extension")
    if not algebra.is_finite:
        raise InfiniteBaseError("restriction sweep needs a finite base field")
    budget = ensure_budget(budget)
    a_ext = extend_algebra(algebra, ext)
    violations = []
    checked = 0
    predicate = hermitian_unimodular_predicate(epsilon)
    for rank in range(rank_bound + 1):
        reps = classify_isometry_classes(algebra, rank, 1, predicate, budget)
        for rep in reps:
            checked += 1
            base_hyp = find_hyperbolic_structure(rep, budget) is not None
            ext_form = extend_system(ext, rep, a_ext)
            ext_hyp = find_hyperbolic_structure(ext_form, budget) is not None
            if ext_hyp and not base_hyp:
                violations.append(rep)
    instances, failures = _transfer_extension_square(
        algebra, ext, a_ext, epsilon, budget
    )
    return RestrictionReport(
        ext.degree,
        rank_bound,
        epsilon,
        checked,
        tuple(violations),
        instances,
        tuple(failures),
    )


def _transfer_extension_square(
    algebra: Algebra,
    ext: FieldExtension,
    a_ext: Algebra,
    epsilon: int,
    budget: Budget,
):
    """transfer-then-extend versus extend-then-transfer on rank-one instances."""
    instances = 0
    failures = []
    rank1_forms = [
        System(algebra, 1, (Mat(algebra, 1, 1, ((algebra.element_at(i),),)),))
        for i in range(algebra.element_count)
    ]
    for eps0 in (1, -1):
        for h0 in rank1_forms:
            if not (h0.is_epsilon_hermitian(eps0) and h0.is_unimodular()):
                continue
            ring = module_endomorphism_ring(algebra, 1).with_involution(h0, eps0)
            e_alg = ring.as_algebra()
            e_ext_alg = extend_algebra(e_alg, ext)
            h0_l = extend_system(ext, h0, a_ext)
            ring_l = module_endomorphism_ring(a_ext, 1).with_involution(h0_l, eps0)
            for h in rank1_forms:
                if not (h.is_epsilon_hermitian(epsilon) and h.is_unimodular()):
                    continue
                instances += 1
                transferred = transfer_form(ring, h)
                path_one = extend_system(ext, transferred, e_ext_alg)
                path_two = transfer_form(ring_l, extend_system(ext, h, a_ext))
                if path_two.algebra != e_ext_alg:
                    failures.append((h0, h, "presentations differ"))
                    continue
                witness = find_isometry(path_one, path_two, budget)
                if witness is None:
                    failures.append((h0, h, "no isometry between the two routes"))
    return instances, failures
