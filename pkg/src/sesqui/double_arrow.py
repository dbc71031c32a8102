"""The double-arrow hermitian category and its equivalence with form systems.

Objects are tuples (A^m, A^n, (f_i, g_i)) of two free modules with a family of
parallel map pairs between them.  A morphism is a pair (phi, psi) of module
maps intertwining every arrow pair; the dual object swaps the modules and
conjugate-transposes the arrows in reversed roles.

A hermitian form on an object Q is a morphism xi = (xi_1, xi_2) from Q to its
dual satisfying the epsilon-symmetry xi_1 = epsilon . conj_transpose(xi_2);
it is unimodular when both components are invertible.

``to_hermitian`` sends a system of sesquilinear forms to the unimodular
hermitian form ((V, V*, (adjoint pairs)), (id, id)); ``to_sesquilinear`` goes
back by reading the Gram of xi_2 composed with the first arrow.  Under the
free-module storage conventions the round trip through ``to_hermitian`` is the
literal identity, and the reverse round trip has the explicit isometry witness
(id, xi_2^{-1}).
"""

from __future__ import annotations

import itertools

from .algebra import (
    Algebra,
    Mat,
    _imat_conj_transpose,
    _imat_mul,
    _mat_from_indices,
    _mat_to_indices,
    unit_matrix_indices,
)
from .budget import Budget, ensure_budget
from .errors import DimensionMismatch, InfiniteBaseError, NotInvertibleError
from .forms import System


class DAObject:
    """An object (A^m, A^n, (f_i, g_i)): arrow matrices are n x m."""

    __slots__ = ("algebra", "source_rank", "target_rank", "arrows", "_hash")

    def __init__(self, algebra: Algebra, source_rank: int, target_rank: int, arrows):
        arrows = tuple((f, g) for f, g in arrows)
        if not arrows:
            raise DimensionMismatch("an object needs at least one arrow pair")
        for f, g in arrows:
            for h in (f, g):
                if (
                    h.algebra != algebra
                    or h.rows != target_rank
                    or h.cols != source_rank
                ):
                    raise DimensionMismatch("arrows must be target_rank x source_rank")
        self.algebra = algebra
        self.source_rank = source_rank
        self.target_rank = target_rank
        self.arrows = arrows
        self._hash = None

    @property
    def num_arrows(self) -> int:
        return len(self.arrows)

    def dual(self) -> "DAObject":
        """Swap the modules; arrow pairs become (g^dagger, f^dagger)."""
        return DAObject(
            self.algebra,
            self.target_rank,
            self.source_rank,
            tuple((g.conj_transpose(), f.conj_transpose()) for f, g in self.arrows),
        )

    def direct_sum(self, other: "DAObject") -> "DAObject":
        if other.algebra != self.algebra or other.num_arrows != self.num_arrows:
            raise DimensionMismatch("incompatible objects")
        return DAObject(
            self.algebra,
            self.source_rank + other.source_rank,
            self.target_rank + other.target_rank,
            tuple(
                (f1.direct_sum(f2), g1.direct_sum(g2))
                for (f1, g1), (f2, g2) in zip(self.arrows, other.arrows)
            ),
        )

    def direct_power(self, k: int) -> "DAObject":
        if k < 1:
            raise ValueError("power must be >= 1")
        out = self
        for _ in range(k - 1):
            out = out.direct_sum(self)
        return out

    def sort_key(self):
        return tuple(
            key for f, g in self.arrows for key in (f.sort_key(), g.sort_key())
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DAObject):
            return NotImplemented
        return (
            self.source_rank == other.source_rank
            and self.target_rank == other.target_rank
            and self.arrows == other.arrows
            and self.algebra == other.algebra
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.source_rank, self.target_rank, self.arrows))
        return self._hash

    def __repr__(self):
        return (
            f"DAObject({self.source_rank},{self.target_rank},"
            f"arrows={self.num_arrows} over {self.algebra!r})"
        )


# -- morphism pairs ----------------------------------------------------------


def is_morphism(src: DAObject, dst: DAObject, phi: Mat, psi: Mat) -> bool:
    """True when (phi, psi) intertwines every arrow pair of src and dst."""
    if src.algebra != dst.algebra or src.num_arrows != dst.num_arrows:
        raise DimensionMismatch("objects are incompatible")
    if phi.rows != dst.source_rank or phi.cols != src.source_rank:
        raise DimensionMismatch("phi has the wrong shape")
    if psi.rows != dst.target_rank or psi.cols != src.target_rank:
        raise DimensionMismatch("psi has the wrong shape")
    for (f, g), (f2, g2) in zip(src.arrows, dst.arrows):
        if psi.mul(f) != f2.mul(phi):
            return False
        if psi.mul(g) != g2.mul(phi):
            return False
    return True


def identity_morphism(obj: DAObject):
    return (
        Mat.identity(obj.algebra, obj.source_rank),
        Mat.identity(obj.algebra, obj.target_rank),
    )


def compose(outer, inner):
    """Composition of morphism pairs, componentwise."""
    return (outer[0].mul(inner[0]), outer[1].mul(inner[1]))


def dual_morphism(pair):
    """(phi, psi)^* = (psi^dagger, phi^dagger), a morphism between the duals."""
    return (pair[1].conj_transpose(), pair[0].conj_transpose())


def inverse_morphism(pair):
    phi_inv = pair[0].inverse()
    psi_inv = pair[1].inverse()
    if phi_inv is None or psi_inv is None:
        raise NotInvertibleError("morphism pair is not invertible")
    return (phi_inv, psi_inv)


# -- hermitian forms ----------------------------------------------------------


class DAForm:
    """A unimodular epsilon-hermitian form (xi_1, xi_2) on a DAObject."""

    __slots__ = ("obj", "xi1", "xi2", "epsilon", "_hash")

    def __init__(self, obj: DAObject, xi1: Mat, xi2: Mat, epsilon: int = 1):
        if epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        self.obj = obj
        self.xi1 = xi1
        self.xi2 = xi2
        self.epsilon = epsilon
        self._hash = None

    @property
    def algebra(self) -> Algebra:
        return self.obj.algebra

    def validity_report(self):
        """Empty when the form satisfies all its invariants."""
        issues = []
        obj = self.obj
        dual = obj.dual()
        m, n = obj.source_rank, obj.target_rank
        if self.xi1.rows != n or self.xi1.cols != m:
            issues.append("xi1 has the wrong shape")
        if self.xi2.rows != m or self.xi2.cols != n:
            issues.append("xi2 has the wrong shape")
        if issues:
            return issues
        if not is_morphism(obj, dual, self.xi1, self.xi2):
            issues.append("xi is not a morphism into the dual object")
        eps_one = self.algebra.from_int(self.epsilon)
        if self.xi1 != self.xi2.conj_transpose().scale(eps_one):
            issues.append("xi is not epsilon-symmetric")
        if self.xi1.rows != self.xi1.cols or self.xi1.inverse() is None:
            issues.append("xi1 is not invertible")
        elif self.xi2.inverse() is None:
            issues.append("xi2 is not invertible")
        return issues

    def is_valid(self) -> bool:
        return not self.validity_report()

    def require_valid(self) -> "DAForm":
        issues = self.validity_report()
        if issues:
            raise ValueError("invalid hermitian form: " + "; ".join(issues))
        return self

    def direct_sum(self, other: "DAForm") -> "DAForm":
        if other.epsilon != self.epsilon:
            raise DimensionMismatch("signs differ")
        return DAForm(
            self.obj.direct_sum(other.obj),
            self.xi1.direct_sum(other.xi1),
            self.xi2.direct_sum(other.xi2),
            self.epsilon,
        )

    def as_pair(self):
        return (self.xi1, self.xi2)

    def sort_key(self):
        return (self.obj.sort_key(), self.xi1.sort_key(), self.xi2.sort_key())

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DAForm):
            return NotImplemented
        return (
            self.obj == other.obj
            and self.xi1 == other.xi1
            and self.xi2 == other.xi2
            and self.epsilon == other.epsilon
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.obj, self.xi1, self.xi2, self.epsilon))
        return self._hash

    def __repr__(self):
        return f"DAForm(eps={self.epsilon} on {self.obj!r})"


# -- the equivalence functors ---------------------------------------------------


def system_object(form: System) -> DAObject:
    """The object (V, V*, (left adjoint, right adjoint)) attached to a system."""
    arrows = tuple(
        (g.conj_transpose(), g) for g in form.grams
    )
    return DAObject(form.algebra, form.rank, form.rank, arrows)


def to_hermitian(form: System) -> DAForm:
    """System -> unimodular hermitian form on its double-arrow object.

    The form component is the identity pair, so validity is automatic.
    """
    obj = system_object(form)
    ident = Mat.identity(form.algebra, form.rank)
    return DAForm(obj, ident, ident, 1)


def to_hermitian_map(p: Mat):
    """Image of a form isometry P: the morphism pair (P, (P^dagger)^-1)."""
    pc_inv = p.conj_transpose().inverse()
    if pc_inv is None:
        raise NotInvertibleError("isometry matrix is not invertible")
    return (p, pc_inv)


def _sesquilinear_unchecked(h: DAForm) -> System:
    grams = tuple(h.xi2.mul(f).conj_transpose() for f, _g in h.obj.arrows)
    return System(h.algebra, h.obj.source_rank, grams)


def to_sesquilinear(h: DAForm) -> System:
    """Hermitian form -> system: the i-th Gram realizes xi_2 composed with the
    i-th first arrow; inverse to ``to_hermitian`` on the nose."""
    h.require_valid()
    return _sesquilinear_unchecked(h)


def to_sesquilinear_map(pair) -> Mat:
    """Image of a hermitian-form isometry: its first component."""
    return pair[0]


# -- hyperbolic forms --------------------------------------------------------------


def hyperbolic_form(obj: DAObject, epsilon: int = 1) -> DAForm:
    """The hyperbolic epsilon-hermitian form on obj + dual(obj).

    Both xi components are permutation-like blocks of (scaled) identities.
    """
    A = obj.algebra
    m, n = obj.source_rank, obj.target_rank
    eps = A.from_int(epsilon)
    i_m = Mat.identity(A, m)
    i_n = Mat.identity(A, n)
    xi1 = Mat.block(
        [
            [Mat.zeros(A, n, m), i_n],
            [i_m.scale(eps), Mat.zeros(A, m, n)],
        ]
    )
    xi2 = Mat.block(
        [
            [Mat.zeros(A, m, n), i_m],
            [i_n.scale(eps), Mat.zeros(A, n, m)],
        ]
    )
    return DAForm(obj.direct_sum(obj.dual()), xi1, xi2, epsilon)


# -- isometry --------------------------------------------------------------------


def is_isometry(h1: DAForm, h2: DAForm, phi: Mat, psi: Mat) -> bool:
    """Check that the invertible pair (phi, psi) carries h2 back onto h1."""
    if h1.epsilon != h2.epsilon:
        return False
    if not is_morphism(h1.obj, h2.obj, phi, psi):
        return False
    if phi.rows != phi.cols or phi.inverse() is None:
        return False
    if psi.rows != psi.cols or psi.inverse() is None:
        return False
    # xi(h1) = u^* . xi(h2) . u componentwise
    if h1.xi1 != psi.conj_transpose().mul(h2.xi1).mul(phi):
        return False
    if h1.xi2 != phi.conj_transpose().mul(h2.xi2).mul(psi):
        return False
    return True


def find_isometry(h1: DAForm, h2: DAForm, budget: Budget | None = None):
    """An invertible morphism pair witnessing h1 isometric to h2, or None."""
    if h1.algebra != h2.algebra:
        raise DimensionMismatch("forms live over different algebras")
    if h1.epsilon != h2.epsilon:
        return None
    o1, o2 = h1.obj, h2.obj
    if (
        o1.source_rank != o2.source_rank
        or o1.target_rank != o2.target_rank
        or o1.num_arrows != o2.num_arrows
    ):
        return None
    if h1 == h2:
        return identity_morphism(o1)
    budget = ensure_budget(budget)
    A = h1.algebra
    m, n = o1.source_rank, o1.target_rank
    phis = unit_matrix_indices(A, m, budget)
    psis = unit_matrix_indices(A, n, budget)
    for phi_flat in phis:
        phi = _mat_from_indices(A, m, m, phi_flat)
        # precompose the parts of the conditions that only involve phi
        lhs1 = [f2.mul(phi) for f2, _ in o2.arrows]
        lhs2 = [g2.mul(phi) for _, g2 in o2.arrows]
        xi1_target = h2.xi1.mul(phi)
        phic = phi.conj_transpose()
        for psi_flat in psis:
            budget.charge()
            psi = _mat_from_indices(A, n, n, psi_flat)
            if h1.xi1 != psi.conj_transpose().mul(xi1_target):
                continue
            ok = True
            for (f1, g1), l1, l2 in zip(o1.arrows, lhs1, lhs2):
                if psi.mul(f1) != l1 or psi.mul(g1) != l2:
                    ok = False
                    break
            if not ok:
                continue
            if h1.xi2 != phic.mul(h2.xi2).mul(psi):
                continue
            return (phi, psi)
    return None


def find_object_isomorphism(q1: DAObject, q2: DAObject, budget: Budget | None = None):
    """An invertible intertwining pair q1 -> q2, or None."""
    if q1.algebra != q2.algebra or q1.num_arrows != q2.num_arrows:
        raise DimensionMismatch("objects are incompatible")
    if (
        q1.source_rank != q2.source_rank
        or q1.target_rank != q2.target_rank
    ):
        return None
    if q1 == q2:
        return identity_morphism(q1)
    budget = ensure_budget(budget)
    A = q1.algebra
    m, n = q1.source_rank, q1.target_rank
    for phi_flat in unit_matrix_indices(A, m, budget):
        phi = _mat_from_indices(A, m, m, phi_flat)
        targets_f = [f2.mul(phi) for f2, _ in q2.arrows]
        targets_g = [g2.mul(phi) for _, g2 in q2.arrows]
        for psi_flat in unit_matrix_indices(A, n, budget):
            budget.charge()
            psi = _mat_from_indices(A, n, n, psi_flat)
            ok = True
            for (f1, g1), tf, tg in zip(q1.arrows, targets_f, targets_g):
                if psi.mul(f1) != tf or psi.mul(g1) != tg:
                    ok = False
                    break
            if ok:
                return (phi, psi)
    return None


def all_object_isomorphisms(q1: DAObject, q2: DAObject, budget: Budget | None = None):
    """Every invertible intertwining pair q1 -> q2 (for well-definedness tests)."""
    if (
        q1.source_rank != q2.source_rank
        or q1.target_rank != q2.target_rank
    ):
        return
    budget = ensure_budget(budget)
    A = q1.algebra
    m, n = q1.source_rank, q1.target_rank
    for phi_flat in unit_matrix_indices(A, m, budget):
        phi = _mat_from_indices(A, m, m, phi_flat)
        targets_f = [f2.mul(phi) for f2, _ in q2.arrows]
        targets_g = [g2.mul(phi) for _, g2 in q2.arrows]
        for psi_flat in unit_matrix_indices(A, n, budget):
            budget.charge()
            psi = _mat_from_indices(A, n, n, psi_flat)
            ok = all(
                psi.mul(f1) == tf and psi.mul(g1) == tg
                for (f1, g1), tf, tg in zip(q1.arrows, targets_f, targets_g)
            )
            if ok:
                yield (phi, psi)


def roundtrip_isometry(h: DAForm):
    """The explicit witness (id, xi_2^{-1}) that to_hermitian(to_sesquilinear(h))
    is isometric to h; verified before it is returned."""
    h.require_valid()
    xi2_inv = h.xi2.inverse()
    if xi2_inv is None:
        raise NotInvertibleError("xi2 is not invertible")
    witness = (Mat.identity(h.algebra, h.obj.source_rank), xi2_inv)
    back = to_hermitian(_sesquilinear_unchecked(h))
    if not is_isometry(back, h, *witness):
        raise AssertionError("constructed round-trip witness failed verification")
    return witness


# -- enumeration of valid hermitian forms -----------------------------------------


def enumerate_hermitian_forms(
    algebra: Algebra,
    rank: int,
    num_arrows: int,
    epsilon: int = 1,
    budget: Budget | None = None,
):
    """All valid unimodular epsilon-hermitian forms on rank-(m, m) objects.

    The intertwining constraints determine the second arrow family from the
    first together with xi, so the enumeration runs over (xi_1 invertible,
    first arrows free); this is a bijective parameterization of the valid
    forms.  Deterministic order: xi_1 ascending, then the arrow tuple.
    """
    budget = ensure_budget(budget)
    A = algebra
    m = rank
    eps = A.from_int(epsilon)
    count = A.element_count
    units = unit_matrix_indices(A, m, budget)
    budget.check_estimate(len(units) * count ** (num_arrows * m * m))
    for xi1_flat in units:
        xi1 = _mat_from_indices(A, m, m, xi1_flat)
        xi2 = xi1.conj_transpose().scale(eps)
        xi1_inv = xi1.inverse()
        for combo in itertools.product(
            range(count), repeat=num_arrows * m * m
        ):
            budget.charge()
            fs = [
                _mat_from_indices(A, m, m, combo[k * m * m : (k + 1) * m * m])
                for k in range(num_arrows)
            ]
            arrows = tuple(
                (f, xi2.mul(f).mul(xi1_inv).conj_transpose()) for f in fs
            )
            yield DAForm(DAObject(A, m, m, arrows), xi1, xi2, epsilon)


def roundtrip_sweep(
    algebra: Algebra,
    rank: int,
    num_arrows: int,
    budget: Budget | None = None,
) -> dict:
    """Exhaustively verify the reverse round trip on every valid hermitian form.

    For every unimodular 1-hermitian form h on a rank-(m, m) object the sweep
    checks h's invariants and that the explicit witness (id, xi_2^{-1}) is an
    isometry from to_hermitian(to_sesquilinear(h)) to h.  Runs on the integer
    index tables, which is the same exact arithmetic as the public operations
    (cross-checked against them in the test suite); returns counters.

    Conditions that involve only xi (not the arrows) are verified once per
    xi_1 rather than once per form, since they are literally the same
    equations.
    """
    budget = ensure_budget(budget)
    t = algebra.tables()
    if t is None:
        raise InfiniteBaseError("sweep needs a small finite algebra")
    m = rank
    count = algebra.element_count
    units = unit_matrix_indices(algebra, m, budget)
    total = len(units) * count ** (num_arrows * m * m)
    budget.check_estimate(total)
    mul, add, sigma = t.mul, t.add, t.sigma
    checked = 0
    failures = []
    ident = _mat_to_indices(Mat.identity(algebra, m))

    def imul(a, b):
        return _imat_mul(a, b, m, m, m, mul, add)

    def ict(a):
        return _imat_conj_transpose(a, m, m, sigma)

    all_arrow_tuples = list(itertools.product(range(count), repeat=m * m))
    for xi1_flat in units:
        xi1 = tuple(xi1_flat)
        xi2 = ict(xi1)  # epsilon = 1 symmetry
        xi1_inv = _mat_to_indices(_mat_from_indices(algebra, m, m, xi1).inverse())
        xi2_inv = ict(xi1_inv)
        # xi-only parts of the witness conditions, once per xi_1:
        #   psi^dagger . xi1 = id  and  xi2 . psi = id  for psi = xi2^{-1}
        if imul(ict(xi2_inv), xi1) != ident or imul(xi2, xi2_inv) != ident:
            failures.append(("xi", xi1))
            continue
        for combo in itertools.product(all_arrow_tuples, repeat=num_arrows):
            budget.charge()
            ok = True
            for f in combo:
                tmap = imul(xi2, f)  # xi2 . f_i, the Gram transpose of G(h)
                g = ict(imul(tmap, xi1_inv))
                # validity of h: xi intertwines (f, g) with the dual arrows
                if tmap != imul(ict(g), xi1) or imul(xi2, g) != imul(ict(f), xi1):
                    ok = False
                    break
                # witness morphism conditions: xi2^{-1} carries the arrows
                # (tmap, tmap^dagger) of the round-tripped object back to (f, g)
                if imul(xi2_inv, tmap) != f or imul(xi2_inv, ict(tmap)) != g:
                    ok = False
                    break
            checked += 1
            if not ok:
                failures.append((xi1, combo))
    return {"checked": checked, "failures": failures}
