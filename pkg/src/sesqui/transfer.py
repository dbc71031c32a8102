"""Transfer into the endomorphism ring of an object carrying a unimodular form.

Given an ambient object M (a free module A^r or a double-arrow object) the
endomorphism ring E = End(M) is presented as a finite-dimensional algebra over
the base field: a basis of endomorphisms is computed by exact linear solving,
structure constants come from composition, and a unimodular epsilon_0-hermitian
form h_0 on M induces the involution  f -> h_0^{-1} . dual(f) . h_0.

A unimodular epsilon-hermitian form h on N = M^k transfers to the
(epsilon . epsilon_0)-hermitian form over (E, involution) whose Gram entry
(r, c) is  h_0^{-1} . dual(insert_r) . h . insert_c  expressed in the basis.

``unit_class_bijection_report`` runs the two independent enumerations behind
the classification of systems sharing a fixed double-arrow object: isometry
classes of such systems on one side, and classes of involution-symmetric units
of E under the congruence  f -> twist(g) . f . g  on the other, together with
the explicit comparison map.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .algebra import Algebra, Mat, validate_algebra
from .budget import Budget, ensure_budget
from .double_arrow import (
    DAForm,
    DAObject,
    all_object_isomorphisms,
    compose,
    dual_morphism,
    find_object_isomorphism,
    inverse_morphism,
    system_object,
)
from .errors import DimensionMismatch, InfiniteBaseError
from .forms import System, enumerate_systems, find_isometry


def _vec_mat(mat: Mat):
    """Flatten a matrix over A to base-field coordinates, row-major."""
    out = []
    for row in mat.entries:
        for e in row:
            out.extend(e)
    return out


def _vec_endo(endo):
    out = []
    for mat in endo:
        out.extend(_vec_mat(mat))
    return out


class EndomorphismRing:
    """A basis presentation of End(M) over the base field.

    ``basis`` elements are endomorphisms: 1-tuples of matrices for a module
    ambient, (phi, psi) pairs for a double-arrow ambient.  The embedding of
    the presented algebra back into matrices is ``from_coords``.
    """

    def __init__(self, algebra: Algebra, ambient, kind: str, basis):
        self.base_algebra = algebra
        self.field = algebra.field
        self.ambient = ambient
        self.kind = kind  # "module" | "double_arrow"
        self.basis = tuple(tuple(m for m in endo) for endo in basis)
        self.dim = len(self.basis)
        self._solve_matrix = self._build_solve_matrix()
        self._structure = None
        self._unit_coords = None
        self.h0 = None
        self.epsilon0 = None
        self.involution_matrix = None

    # -- linear coordinates ---------------------------------------------------
    def _build_solve_matrix(self):
        cols = [_vec_endo(e) for e in self.basis]
        if not cols:
            return []
        nrows = len(cols[0])
        return [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]

    def to_coords(self, endo):
        vec = _vec_endo(endo)
        rhs = [[x] for x in vec]
        sol = linalg.solve(self.field, self._solve_matrix, rhs)
        if sol is None:
            raise ValueError("endomorphism is outside the presented ring")
        coords = tuple(sol[i][0] for i in range(self.dim))
        if _vec_endo(self.from_coords(coords)) != vec:
            raise ValueError("endomorphism is outside the presented ring")
        return coords

    def from_coords(self, coords):
        K = self.field
        parts = []
        for piece_index, template in enumerate(self.basis[0]):
            acc = Mat.zeros(template.algebra, template.rows, template.cols)
            for c, endo in zip(coords, self.basis):
                if K.is_zero(c):
                    continue
                scaled = endo[piece_index].map_entries(
                    lambda e: tuple(K.mul(c, x) for x in e)
                )
                acc = acc.add(scaled)
            parts.append(acc)
        return tuple(parts)

    # -- ring structure ----------------------------------------------------------
    def compose_endos(self, e1, e2):
        return tuple(m1.mul(m2) for m1, m2 in zip(e1, e2))

    def identity_endo(self):
        if self.kind == "module":
            alg, rank = self.ambient
            return (Mat.identity(alg, rank),)
        obj = self.ambient
        return (
            Mat.identity(obj.algebra, obj.source_rank),
            Mat.identity(obj.algebra, obj.target_rank),
        )

    def structure_constants(self):
        if self._structure is None:
            sc = []
            for ei in self.basis:
                row = []
                for ej in self.basis:
                    row.append(self.to_coords(self.compose_endos(ei, ej)))
                sc.append(tuple(row))
            self._structure = tuple(sc)
            self._unit_coords = self.to_coords(self.identity_endo())
        return self._structure

    def unit_coords(self):
        self.structure_constants()
        return self._unit_coords

    # -- the induced involution ----------------------------------------------------
    def dual_endo(self, endo):
        if self.kind == "module":
            return (endo[0].conj_transpose(),)
        return dual_morphism(endo)

    def _h0_maps(self):
        """h0 and its inverse as composable endo-shaped tuples."""
        if self.kind == "module":
            t0 = self.h0.grams[0].conj_transpose()  # form map M -> M*
            t0_inv = t0.inverse()
            return (t0,), (t0_inv,)
        pair = self.h0.as_pair()
        return pair, inverse_morphism(pair)

    def twist(self, endo):
        """sigma(f) = h0^{-1} . dual(f) . h0."""
        if self.h0 is None:
            raise ValueError("no involution: attach a base form first")
        h0, h0_inv = self._h0_maps()
        return tuple(
            a.mul(b).mul(c)
            for a, b, c in zip(h0_inv, self.dual_endo(endo), h0)
        )

    def with_involution(self, h0, epsilon0: int | None = None) -> "EndomorphismRing":
        """Attach a unimodular epsilon_0-hermitian base form and compute the
        induced involution matrix on the basis."""
        ring = EndomorphismRing(self.base_algebra, self.ambient, self.kind, self.basis)
        if self.kind == "module":
            if not isinstance(h0, System) or h0.num_forms != 1:
                raise ValueError("module ambient needs a single-form base")
            if h0.rank != self.ambient[1]:
                raise DimensionMismatch("base form rank mismatch")
            eps = [e for e in (1, -1) if h0.is_epsilon_hermitian(e)]
            if not eps or not h0.is_unimodular():
                raise ValueError("the base form must be unimodular and hermitian or skew-hermitian")
        else:
            if not isinstance(h0, DAForm) or h0.obj != self.ambient:
                raise ValueError("the base form must live on the ambient object")
            h0.require_valid()
            eps = [h0.epsilon]
        if epsilon0 is not None and epsilon0 not in eps:
            raise ValueError("epsilon_0 does not match the base form")
        ring.h0 = h0
        ring.epsilon0 = epsilon0 if epsilon0 is not None else eps[0]
        rows = [ring.to_coords(ring.twist(e)) for e in ring.basis]
        # the matrix acts on coordinate columns: column j is twist(basis_j)
        ring.involution_matrix = tuple(
            tuple(rows[j][k] for j in range(ring.dim)) for k in range(ring.dim)
        )
        return ring

    def as_algebra(self) -> Algebra:
        """Package the presentation as an algebra with involution."""
        if self.involution_matrix is None:
            raise ValueError("no involution attached yet")
        return Algebra(
            self.field,
            self.structure_constants(),
            self.unit_coords(),
            self.involution_matrix,
        )

    def as_algebra_without_involution(self) -> Algebra:
        """The presentation with the identity as a placeholder involution; the
        returned algebra is only guaranteed to pass the ring axioms."""
        return Algebra(
            self.field,
            self.structure_constants(),
            self.unit_coords(),
            linalg.identity(self.field, self.dim),
        )


def module_endomorphism_ring(algebra: Algebra, rank: int) -> EndomorphismRing:
    """End(A^rank) with the elementary-matrix basis (no solving needed)."""
    basis = []
    for i in range(rank):
        for j in range(rank):
            for t in range(algebra.dim):
                ent = [
                    [algebra.zero() for _ in range(rank)] for _ in range(rank)
                ]
                ent[i][j] = algebra.basis_element(t)
                basis.append((Mat.from_rows(algebra, ent),))
    return EndomorphismRing(algebra, (algebra, rank), "module", basis)


def endomorphism_ring(obj: DAObject) -> EndomorphismRing:
    """End of a double-arrow object, by solving the intertwining system."""
    A = obj.algebra
    K = A.field
    m, n, d = obj.source_rank, obj.target_rank, A.dim
    phi_cells = m * m * d
    psi_cells = n * n * d

    def unpack(coords):
        phi_entries = [
            [
                tuple(coords[(i * m + j) * d + t] for t in range(d))
                for j in range(m)
            ]
            for i in range(m)
        ]
        psi_entries = [
            [
                tuple(
                    coords[phi_cells + (i * n + j) * d + t] for t in range(d)
                )
                for j in range(n)
            ]
            for i in range(n)
        ]
        return (
            Mat.from_rows(A, phi_entries) if m else Mat(A, 0, 0, ()),
            Mat.from_rows(A, psi_entries) if n else Mat(A, 0, 0, ()),
        )

    total = phi_cells + psi_cells
    rows = []
    unit_vecs = []
    zero_vec = [K.zero()] * total
    for u in range(total):
        vec = list(zero_vec)
        vec[u] = K.one()
        unit_vecs.append(unpack(vec))
    # linear conditions psi f_i = f_i phi and psi g_i = g_i phi, columnwise
    conditions_per_arrow = 2 * n * m * d
    num_rows = obj.num_arrows * conditions_per_arrow
    rows = [[K.zero()] * total for _ in range(num_rows)]
    for u, (phi_u, psi_u) in enumerate(unit_vecs):
        base_row = 0
        for f, g in obj.arrows:
            for arrow in (f, g):
                diff = psi_u.mul(arrow).sub(arrow.mul(phi_u))
                vec = _vec_mat(diff)
                for r, val in enumerate(vec):
                    if not K.is_zero(val):
                        rows[base_row + r][u] = val
                base_row += n * m * d
    basis_vectors = linalg.nullspace(K, rows, total)
    basis = [unpack(vec) for vec in basis_vectors]
    return EndomorphismRing(A, obj, "double_arrow", basis)


# ---------------------------------------------------------------------------
# transfer of forms and homomorphisms


def _module_injection(algebra: Algebra, rank: int, k: int, c: int) -> Mat:
    cols = []
    ent = [[algebra.zero()] * rank for _ in range(rank * k)]
    for t in range(rank):
        ent[c * rank + t][t] = algebra.one()
    del cols
    return Mat.from_rows(algebra, ent)


def _da_injection(obj: DAObject, k: int, c: int):
    A = obj.algebra
    return (
        _module_injection(A, obj.source_rank, k, c),
        _module_injection(A, obj.target_rank, k, c),
    )


def transfer_form(ring: EndomorphismRing, h, k: int | None = None) -> System:
    """Transfer a unimodular epsilon-hermitian form on M^k to a rank-k form
    over the presented (E, involution)."""
    if ring.involution_matrix is None:
        raise ValueError("attach the base form (involution) before transferring")
    e_alg = ring.as_algebra()
    if ring.kind == "module":
        algebra, rank = ring.ambient
        if not isinstance(h, System) or h.num_forms != 1:
            raise ValueError("module transfer expects a single-form system")
        if rank == 0 or h.rank % rank != 0:
            raise DimensionMismatch("the form does not live on a power of M")
        kk = h.rank // rank
        if k is not None and k != kk:
            raise DimensionMismatch("inconsistent power")
        eps = [e for e in (1, -1) if h.is_epsilon_hermitian(e)]
        if not eps or not h.is_unimodular():
            raise ValueError("transfer needs a unimodular (skew-)hermitian form")
        t_map = h.grams[0].conj_transpose()
        t0_inv = ring.h0.grams[0].conj_transpose().inverse()
        entries = []
        for r in range(kk):
            row = []
            for c in range(kk):
                block = t_map.submatrix(
                    range(r * rank, (r + 1) * rank),
                    range(c * rank, (c + 1) * rank),
                )
                row.append(ring.to_coords((t0_inv.mul(block),)))
            entries.append(tuple(row))
        return System(e_alg, kk, (Mat.from_rows(e_alg, entries),))
    # double-arrow ambient
    obj = ring.ambient
    if not isinstance(h, DAForm):
        raise ValueError("double-arrow transfer expects a hermitian form")
    h.require_valid()
    if k is None:
        if obj.source_rank:
            k = h.obj.source_rank // obj.source_rank
        elif obj.target_rank:
            k = h.obj.target_rank // obj.target_rank
        else:
            raise DimensionMismatch("zero ambient object")
    if h.obj != obj.direct_power(k):
        raise DimensionMismatch("the form does not live on a power of M")
    h0_pair, h0_inv = ring._h0_maps()
    h_pair = h.as_pair()
    entries = []
    for r in range(k):
        iota_r_dual = dual_morphism(_da_injection(obj, k, r))
        row = []
        for c in range(k):
            iota_c = _da_injection(obj, k, c)
            b = compose(h0_inv, compose(iota_r_dual, compose(h_pair, iota_c)))
            row.append(ring.to_coords(b))
        entries.append(tuple(row))
    e_alg2 = ring.as_algebra()
    return System(e_alg2, k, (Mat.from_rows(e_alg2, entries),))


def transfer_hom(ring: EndomorphismRing, f, k_from: int, k_to: int) -> Mat:
    """Image of a morphism M^k_from -> M^k_to as a k_to x k_from matrix over E.

    This is the fully-faithful hom functor on the power objects; used by the
    tests to certify bijectivity of the hom transfer on small instances.
    """
    e_alg = (
        ring.as_algebra()
        if ring.involution_matrix is not None
        else ring.as_algebra_without_involution()
    )
    if ring.kind == "module":
        algebra, rank = ring.ambient
        mat = f[0] if isinstance(f, tuple) else f
        entries = []
        for r in range(k_to):
            row = []
            for c in range(k_from):
                block = mat.submatrix(
                    range(r * rank, (r + 1) * rank),
                    range(c * rank, (c + 1) * rank),
                )
                row.append(ring.to_coords((block,)))
            entries.append(tuple(row))
        return Mat.from_rows(e_alg, entries)
    obj = ring.ambient
    entries = []
    for r in range(k_to):
        pi_r = _da_projection(obj, k_to, r)
        row = []
        for c in range(k_from):
            iota_c = _da_injection(obj, k_from, c)
            row.append(ring.to_coords(compose(pi_r, compose(f, iota_c))))
        entries.append(tuple(row))
    return Mat.from_rows(e_alg, entries)


def _da_projection(obj: DAObject, k: int, r: int):
    A = obj.algebra
    return (
        _module_injection(A, obj.source_rank, k, r).transpose(),
        _module_injection(A, obj.target_rank, k, r).transpose(),
    )


# ---------------------------------------------------------------------------
# symmetric unit classes


def _unit_elements(algebra: Algebra):
    units = []
    for i in range(algebra.element_count):
        e = algebra.element_at(i)
        if algebra.element_inverse(e) is not None:
            units.append(e)
    return units


def enumerate_symmetric_unit_classes(algebra: Algebra, budget: Budget | None = None):
    """Representatives of {units f with twist(f) = f} under f -> twist(g).f.g.

    The representative of each class is its serialization-order minimum.
    """
    if not algebra.is_finite:
        raise InfiniteBaseError("unit-class enumeration needs a finite field")
    budget = ensure_budget(budget)
    units = _unit_elements(algebra)
    budget.check_estimate(len(units) * len(units))
    symmetric = [u for u in units if algebra.involve(u) == u]
    seen = set()
    reps = []
    for f in symmetric:  # ascending serialization order by construction
        if f in seen:
            continue
        reps.append(f)
        for g in units:
            budget.charge()
            seen.add(algebra.mul(algebra.involve(g), algebra.mul(f, g)))
    return reps


def unit_class_orbit_min(algebra: Algebra, f, budget: Budget | None = None):
    """Canonical representative of the congruence class of a symmetric unit."""
    budget = ensure_budget(budget)
    best = None
    for g in _unit_elements(algebra):
        budget.charge()
        image = algebra.mul(algebra.involve(g), algebra.mul(f, g))
        key = algebra.sort_key(image)
        if best is None or key < best[0]:
            best = (key, image)
    return best[1]


# ---------------------------------------------------------------------------
# the classification bijection


@dataclass(frozen=True)
class BijectionReport:
    base_object_arrows: int
    form_class_count: int
    unit_class_count: int
    bijection: bool
    theta_independent: bool
    pairs: tuple  # (form class representative, unit class representative)

    def as_json_summary(self):
        return {
            "form_classes": self.form_class_count,
            "unit_classes": self.unit_class_count,
            "bijection": self.bijection,
            "theta_independent": self.theta_independent,
        }


def _class_of_system_in(reps, s, budget):
    for idx, rep in enumerate(reps):
        if find_isometry(s, rep, budget) is not None:
            return idx
    return None


def unit_class_bijection_report(
    base_system: System, budget: Budget | None = None, check_theta: bool = True
) -> BijectionReport:
    """Verify that isometry classes of systems sharing the double-arrow object
    of ``base_system`` biject onto the symmetric-unit classes of its
    endomorphism ring, with both sides enumerated independently."""
    budget = ensure_budget(budget)
    s0 = base_system
    A = s0.algebra
    q0 = system_object(s0)
    eta0 = DAForm(
        q0,
        Mat.identity(A, s0.rank),
        Mat.identity(A, s0.rank),
        1,
    ).require_valid()
    ring = endomorphism_ring(q0).with_involution(eta0)
    e_alg = ring.as_algebra()
    rep_check = validate_algebra(e_alg)
    if not rep_check.ok:
        raise AssertionError("induced involution failed the algebra axioms")

    # side one: isometry classes of systems with the same object
    matching_reps = []
    for s in enumerate_systems(A, s0.rank, s0.num_forms):
        budget.charge()
        if find_object_isomorphism(system_object(s), q0, budget) is None:
            continue
        if _class_of_system_in(matching_reps, s, budget) is None:
            matching_reps.append(s)

    # side two: symmetric unit classes of E
    unit_reps = enumerate_symmetric_unit_classes(e_alg, budget)

    # the comparison map
    def h_class_of(s, theta):
        alpha, beta = theta
        alpha_inv = alpha.inverse()
        beta_inv = beta.inverse()
        f = (
            beta.conj_transpose().inverse().mul(alpha_inv),
            alpha.conj_transpose().inverse().mul(beta_inv),
        )
        coords = ring.to_coords(f)
        if e_alg.involve(coords) != coords:
            raise AssertionError("transported form element is not symmetric")
        if e_alg.element_inverse(coords) is None:
            raise AssertionError("transported form element is not a unit")
        return unit_class_orbit_min(e_alg, coords, budget)

    pairs = []
    images = []
    theta_independent = True
    for s in matching_reps:
        qs = system_object(s)
        theta = find_object_isomorphism(qs, q0, budget)
        image = h_class_of(s, theta)
        if check_theta:
            for other in all_object_isomorphisms(qs, q0, budget):
                if h_class_of(s, other) != image:
                    theta_independent = False
                    break
        images.append(image)
        pairs.append((s, image))
    bijection = (
        len(set(images)) == len(images)
        and sorted(images, key=e_alg.sort_key) == sorted(unit_reps, key=e_alg.sort_key)
    )
    return BijectionReport(
        q0.num_arrows,
        len(matching_reps),
        len(unit_reps),
        bijection,
        theta_independent,
        tuple(pairs),
    )
