"""Systems of sesquilinear forms on free modules and their isometry oracles.

A system is a free right module A^n together with Gram matrices S_1..S_k over
the algebra; the form values are s_i(x, y) = conj_transpose(x) . S_i . y.  A
single sesquilinear form is the case k = 1.

Under the fixed dual-storage convention the left adjoint of S is the matrix
conj_transpose(S) and the right adjoint is S itself, which turns all the
adjoint identities into one-line matrix statements.

Isometry over a finite base field is decided by exhaustive search over the
unit group: P is a witness that ``a`` is isometric to ``b`` when
conj_transpose(P) . S_i(b) . P = S_i(a) for every i.  Classification walks all
Gram tuples in serialization order and sweeps each fresh orbit, so the chosen
representative is the orbit minimum by construction.

``congruence_profile`` computes cheap invariants (ranks, determinant classes
and trace data of Gram pencils) that are provably constant on isometry
classes when the algebra is a finite field; the exhaustive suites use them to
certify non-isometry without sweeping.  A profile match never certifies
isometry -- a witness search always follows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import (
    Algebra,
    Mat,
    _mat_from_indices,
    _mat_to_indices,
    unit_matrix_indices,
)
from .budget import Budget, ensure_budget
from .errors import DimensionMismatch, InfiniteBaseError, NotInvertibleError


@dataclass(frozen=True)
class ModuleMap:
    """A map of free right modules A^source -> A^target, as a matrix."""

    matrix: Mat

    @property
    def source_rank(self) -> int:
        return self.matrix.cols

    @property
    def target_rank(self) -> int:
        return self.matrix.rows

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.matrix.mul(other.matrix))

    def inverse(self) -> "ModuleMap":
        inv = self.matrix.inverse()
        if inv is None:
            raise NotInvertibleError("module map is not invertible")
        return ModuleMap(inv)


class System:
    """A free module of rank n with an indexed family of Gram matrices."""

    __slots__ = ("algebra", "rank", "grams", "_hash")

    def __init__(self, algebra: Algebra, rank: int, grams):
        grams = tuple(grams)
        if not grams:
            raise DimensionMismatch("a system needs at least one Gram matrix")
        for g in grams:
            if g.algebra != algebra or g.rows != rank or g.cols != rank:
                raise DimensionMismatch("every Gram matrix must be rank x rank over the algebra")
        self.algebra = algebra
        self.rank = rank
        self.grams = grams
        self._hash = None

    @staticmethod
    def from_ints(algebra: Algebra, grids) -> "System":
        grams = [Mat.from_ints(algebra, g) for g in grids]
        rank = grams[0].rows
        return System(algebra, rank, grams)

    @staticmethod
    def single(gram: Mat) -> "System":
        return System(gram.algebra, gram.rows, (gram,))

    @property
    def num_forms(self) -> int:
        return len(self.grams)

    def gram(self, i: int) -> Mat:
        return self.grams[i]

    # -- evaluation ------------------------------------------------------------
    def evaluate(self, i: int, x, y):
        """s_i(x, y) for coordinate vectors x, y of length rank."""
        if not 0 <= i < len(self.grams):
            raise IndexError(i)
        if len(x) != self.rank or len(y) != self.rank:
            raise DimensionMismatch("vector length must equal the rank")
        A = self.algebra
        S = self.grams[i].entries
        acc = A.zero()
        for r, xr in enumerate(x):
            if A.is_zero(xr):
                continue
            xr_c = A.involve(xr)
            row = S[r]
            for c, yc in enumerate(y):
                if A.is_zero(yc) or A.is_zero(row[c]):
                    continue
                acc = A.add(acc, A.mul(A.mul(xr_c, row[c]), yc))
        return acc

    # -- adjoints ----------------------------------------------------------------
    def left_adjoint(self, i: int) -> ModuleMap:
        """The map x -> s_i(x, .) into the dual module (matrix S_i^dagger)."""
        return ModuleMap(self.grams[i].conj_transpose())

    def right_adjoint(self, i: int) -> ModuleMap:
        """The map x -> sigma(s_i(., x)) into the dual module (matrix S_i)."""
        return ModuleMap(self.grams[i])

    # -- predicates ----------------------------------------------------------------
    def is_epsilon_hermitian(self, epsilon: int) -> bool:
        if epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        A = self.algebra
        for g in self.grams:
            target = g if epsilon == 1 else g.neg()
            if g.conj_transpose() != target:
                return False
        return True

    def is_unimodular(self) -> bool:
        return all(g.inverse() is not None for g in self.grams)

    # -- ordering -----------------------------------------------------------------
    def sort_key(self):
        return tuple(g.sort_key() for g in self.grams)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, System):
            return NotImplemented
        return (
            self.rank == other.rank
            and self.grams == other.grams
            and self.algebra == other.algebra
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, self.grams))
        return self._hash

    def __repr__(self):
        return f"System(rank={self.rank}, forms={self.num_forms} over {self.algebra!r})"


# ---------------------------------------------------------------------------
# constructions


def orthogonal_sum(a: System, b: System) -> System:
    if a.algebra != b.algebra:
        raise DimensionMismatch("summands live over different algebras")
    if a.num_forms != b.num_forms:
        raise DimensionMismatch("summands have different index sets")
    grams = tuple(ga.direct_sum(gb) for ga, gb in zip(a.grams, b.grams))
    return System(a.algebra, a.rank + b.rank, grams)


def transform(form: System, p) -> System:
    """Pull back along an invertible P: Grams become conj_transpose(P).S.P."""
    mat = p.matrix if isinstance(p, ModuleMap) else p
    if mat.rows != form.rank or mat.cols != form.rank:
        raise DimensionMismatch("transform matrix must be rank x rank")
    if mat.inverse() is None:
        raise NotInvertibleError("transform matrix is not invertible")
    pc = mat.conj_transpose()
    return System(form.algebra, form.rank, tuple(pc.mul(g).mul(mat) for g in form.grams))


# ---------------------------------------------------------------------------
# enumeration in serialization order


def enumerate_systems(algebra: Algebra, rank: int, num_forms: int):
    """All systems of ``num_forms`` Grams of size rank, serialization order."""
    if not algebra.is_finite:
        raise InfiniteBaseError("cannot enumerate forms over an infinite field")
    if num_forms < 1:
        raise ValueError("num_forms must be >= 1")
    count = algebra.element_count
    cells = num_forms * rank * rank
    for combo in itertools.product(range(count), repeat=cells):
        grams = tuple(
            _mat_from_indices(
                algebra, rank, rank, combo[k * rank * rank : (k + 1) * rank * rank]
            )
            for k in range(num_forms)
        )
        yield System(algebra, rank, grams)


def system_count(algebra: Algebra, rank: int, num_forms: int) -> int:
    return algebra.element_count ** (num_forms * rank * rank)


# ---------------------------------------------------------------------------
# indexed kernel: Gram tuples as flat integer tuples


def _indexed_grams(form: System):
    return tuple(_mat_to_indices(g) for g in form.grams)


def _system_from_indexed(algebra: Algebra, rank: int, grams_idx) -> System:
    return System(
        algebra,
        rank,
        tuple(_mat_from_indices(algebra, rank, rank, g) for g in grams_idx),
    )


def _make_transformer(algebra: Algebra, n: int):
    """Returns transform(gram_flat, unit_flat) -> gram_flat on index tuples."""
    t = algebra.tables()
    if t is None:
        return None
    mul, add, sigma, zero = t.mul, t.add, t.sigma, t.zero

    def apply(gram, unit):
        # R = P^dagger . S . P with P^dagger[i][j] = sigma(P[j][i])
        tmp = [zero] * (n * n)
        for i in range(n):
            for j in range(n):
                acc = zero
                for k in range(n):
                    p = unit[k * n + i]
                    if p:
                        s = gram[k * n + j]
                        if s:
                            acc = add[acc][mul[sigma[p]][s]]
                tmp[i * n + j] = acc
        out = [zero] * (n * n)
        for i in range(n):
            base = i * n
            for j in range(n):
                acc = zero
                for k in range(n):
                    x = tmp[base + k]
                    if x:
                        p = unit[k * n + j]
                        if p:
                            acc = add[acc][mul[x][p]]
                out[base + j] = acc
        return tuple(out)

    return apply


def _orbit_of(algebra: Algebra, rank: int, grams_idx, units, apply_fn, budget: Budget):
    """Set of all transforms of one indexed Gram tuple (includes itself)."""
    seen = set()
    for unit in units:
        budget.charge()
        seen.add(tuple(apply_fn(g, unit) for g in grams_idx))
    return seen


# ---------------------------------------------------------------------------
# isometry oracle


def find_isometry(a: System, b: System, budget: Budget | None = None) -> Mat | None:
    """An invertible P with conj_transpose(P) . S_i(b) . P = S_i(a), or None.

    The identity is tried first, so equal systems get the identity witness;
    after that units are scanned in serialization order.
    """
    if a.algebra != b.algebra:
        raise DimensionMismatch("systems live over different algebras")
    if a.num_forms != b.num_forms:
        raise DimensionMismatch("systems have different index sets")
    if a.rank != b.rank:
        return None
    if not a.algebra.is_finite:
        raise InfiniteBaseError("brute-force isometry needs a finite base field")
    if a == b:
        return Mat.identity(a.algebra, a.rank)
    n = a.rank
    budget = ensure_budget(budget)
    algebra = a.algebra
    units = unit_matrix_indices(algebra, n, budget)
    apply_fn = _make_transformer(algebra, n)
    if apply_fn is not None:
        target = _indexed_grams(a)
        source = _indexed_grams(b)
        if n == 2:
            flat = _find_isometry_2x2(algebra, source, target, units, budget)
            return None if flat is None else _mat_from_indices(algebra, 2, 2, flat)
        first_target = target[0]
        first_source = source[0]
        rest = tuple(zip(source[1:], target[1:]))
        for unit in units:
            budget.charge()
            if apply_fn(first_source, unit) != first_target:
                continue
            if all(apply_fn(src, unit) == tgt for src, tgt in rest):
                return _mat_from_indices(algebra, n, n, unit)
        return None
    # generic fallback
    for unit in units:
        budget.charge()
        p = _mat_from_indices(algebra, n, n, unit)
        pc = p.conj_transpose()
        if all(pc.mul(g).mul(p) == ga for g, ga in zip(b.grams, a.grams)):
            return p
    return None


def _find_isometry_2x2(algebra: Algebra, source, target, units, budget: Budget):
    """Unrolled rank-2 unit sweep with entrywise early exit.

    Covers the dominant cost of the descent and cancellation suites; the
    budget is charged per candidate in bulk before the scan.
    """
    t = algebra.tables()
    mul, add, sigma = t.mul, t.add, t.sigma
    budget.charge(len(units))
    s0, s1, s2, s3 = source[0]
    t0, t1, t2, t3 = target[0]
    rest = tuple(zip(source[1:], target[1:]))
    identity_sigma = all(sigma[i] == i for i in range(len(sigma)))
    for unit in units:
        p0, p1, p2, p3 = unit
        if identity_sigma:
            q0, q1, q2, q3 = p0, p2, p1, p3  # plain transpose
        else:
            q0, q1, q2, q3 = sigma[p0], sigma[p2], sigma[p1], sigma[p3]
        # tmp = P^dagger . S (row 0 first, to allow the early exit)
        u0 = add[mul[q0][s0]][mul[q1][s2]]
        u1 = add[mul[q0][s1]][mul[q1][s3]]
        if add[mul[u0][p0]][mul[u1][p2]] != t0:
            continue
        if add[mul[u0][p1]][mul[u1][p3]] != t1:
            continue
        u2 = add[mul[q2][s0]][mul[q3][s2]]
        u3 = add[mul[q2][s1]][mul[q3][s3]]
        if add[mul[u2][p0]][mul[u3][p2]] != t2:
            continue
        if add[mul[u2][p1]][mul[u3][p3]] != t3:
            continue
        ok = True
        for (r0, r1, r2, r3), (w0, w1, w2, w3) in rest:
            v0 = add[mul[q0][r0]][mul[q1][r2]]
            v1 = add[mul[q0][r1]][mul[q1][r3]]
            if (
                add[mul[v0][p0]][mul[v1][p2]] != w0
                or add[mul[v0][p1]][mul[v1][p3]] != w1
            ):
                ok = False
                break
            v2 = add[mul[q2][r0]][mul[q3][r2]]
            v3 = add[mul[q2][r1]][mul[q3][r3]]
            if (
                add[mul[v2][p0]][mul[v3][p2]] != w2
                or add[mul[v2][p1]][mul[v3][p3]] != w3
            ):
                ok = False
                break
        if ok:
            return unit
    return None


def is_isometric(a: System, b: System, budget: Budget | None = None) -> bool:
    return find_isometry(a, b, budget) is not None


# ---------------------------------------------------------------------------
# classification


def classify_isometry_classes(
    algebra: Algebra,
    rank: int,
    num_forms: int,
    predicate=None,
    budget: Budget | None = None,
):
    """One representative per isometry class of systems, in canonical order.

    The representative of each class is the minimum of its orbit in
    serialization order.  ``predicate`` must be isometry-invariant (it is
    applied to representatives and taken to hold across each orbit).
    """
    if not algebra.is_finite:
        raise InfiniteBaseError("classification needs a finite base field")
    budget = ensure_budget(budget)
    total = system_count(algebra, rank, num_forms)
    units = unit_matrix_indices(algebra, rank, budget)
    budget.check_estimate(total)
    apply_fn = _make_transformer(algebra, rank)
    reps = []
    if apply_fn is None:
        from .errors import BudgetExceededError

        raise BudgetExceededError(total)
    count = algebra.element_count
    cells = num_forms * rank * rank
    nn = rank * rank
    seen = set()
    for combo in itertools.product(range(count), repeat=cells):
        budget.charge()
        grams_idx = tuple(combo[k * nn : (k + 1) * nn] for k in range(num_forms))
        if grams_idx in seen:
            continue
        rep = _system_from_indexed(algebra, rank, grams_idx)
        if predicate is not None and not predicate(rep):
            continue
        # fresh orbit: the enumeration is in serialization order, so this
        # first-seen member is the orbit minimum
        seen.update(_orbit_of(algebra, rank, grams_idx, units, apply_fn, budget))
        reps.append(rep)
    return reps


def canonical_representative(form: System, budget: Budget | None = None) -> System:
    """The minimum of the isometry orbit of ``form`` in serialization order."""
    budget = ensure_budget(budget)
    algebra = form.algebra
    n = form.rank
    units = unit_matrix_indices(algebra, n, budget)
    apply_fn = _make_transformer(algebra, n)
    if apply_fn is None:
        raise InfiniteBaseError("algebra too large for orbit canonicalization")
    grams_idx = _indexed_grams(form)
    best = None
    for unit in units:
        budget.charge()
        image = tuple(apply_fn(g, unit) for g in grams_idx)
        if best is None or image < best:
            best = image
    return _system_from_indexed(algebra, n, best)


# ---------------------------------------------------------------------------
# sound congruence invariants (finite-field algebras)


def _field_like_ops(algebra: Algebra):
    if not algebra.is_finite_field_like:
        return None
    return algebra.tables()


def _mat_rank_indexed(t, flat, n):
    """Rank of an n x n index-matrix over a finite-field-like algebra."""
    if n == 0:
        return 0
    mul, add, neg, inv, zero = t.mul, t.add, t.neg, t.inv, t.zero
    rows = [list(flat[i * n : (i + 1) * n]) for i in range(n)]
    rank = 0
    for col in range(n):
        pivot = None
        for r in range(rank, n):
            if rows[r][col] != zero:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        iv = inv[rows[rank][col]]
        rows[rank] = [mul[iv][x] for x in rows[rank]]
        for r in range(n):
            if r != rank and rows[r][col] != zero:
                f = rows[r][col]
                rows[r] = [add[x][neg[mul[f][y]]] for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _det_indexed(t, flat, n):
    mul, add, neg = t.mul, t.add, t.neg
    if n == 0:
        return t.one
    if n == 1:
        return flat[0]
    if n == 2:
        a, b, c, d = flat
        return add[mul[a][d]][neg[mul[b][c]]]
    # Leibniz over a commutative algebra, fine for the tiny n we sweep
    total = t.zero
    for perm in itertools.permutations(range(n)):
        sign = 1
        p = list(perm)
        for i in range(n):
            while p[i] != i:
                j = p[i]
                p[i], p[j] = p[j], p[i]
                sign = -sign
        prod = t.one
        for i, j in enumerate(perm):
            prod = mul[prod][flat[i * n + j]]
        total = add[total][prod if sign == 1 else neg[prod]]
    return total


def _norm_class_map(algebra: Algebra):
    """Canonical representative of d modulo the group {sigma(u) u : u unit}."""
    t = algebra.tables()
    mul, sigma = t.mul, t.sigma
    norms = sorted({mul[sigma[u]][u] for u in t.unit_indices})
    cache = {}

    def cls(d):
        got = cache.get(d)
        if got is None:
            got = min(mul[g][d] for g in norms)
            cache[d] = got
        return got

    return cls


def congruence_profile(form: System):
    """A tuple constant on isometry classes, or None when unsupported.

    Only defined over finite-field-like algebras.  Components: for every Gram
    pencil combination T (each single Gram, and lambda.S_i + S_j over the
    projective line for pairs): the rank of T, the rank of the sigma-symmetric
    and sigma-skew parts, the norm class of det(T), and for rank-2 invertible
    pairs the invariants (trace, det) of S_i^-1 . S_j.  Distinct profiles
    certify non-isometry; equal profiles certify nothing.
    """
    t = _field_like_ops(form.algebra)
    if t is None:
        return None
    algebra = form.algebra
    n = form.rank
    mul, add, neg, sigma = t.mul, t.add, t.neg, t.sigma
    norm_cls = _norm_class_map(algebra)
    grams = [_mat_to_indices(g) for g in form.grams]

    def sym_parts(flat):
        ct = [sigma[flat[j * n + i]] for i in range(n) for j in range(n)]
        plus = tuple(add[x][y] for x, y in zip(flat, ct))
        minus = tuple(add[x][neg[y]] for x, y in zip(flat, ct))
        return plus, minus

    def stats(flat):
        r = _mat_rank_indexed(t, flat, n)
        d = norm_cls(_det_indexed(t, flat, n))
        plus, minus = sym_parts(flat)
        return (
            r,
            d,
            _mat_rank_indexed(t, plus, n),
            _mat_rank_indexed(t, minus, n),
        )

    def conj_t(flat):
        return tuple(sigma[flat[j * n + i]] for i in range(n) for j in range(n))

    def pencil(gi, gj):
        # pointwise stats of lambda.gi + gj over the projective line; the
        # transforms act the same way on every combination, so the whole map
        # (not just its multiset) is an invariant
        line = []
        for lam_idx in range(count):
            combo = tuple(add[mul[lam_idx][x]][y] for x, y in zip(gi, gj))
            line.append(stats(combo))
        line.append(stats(gi))  # the point at infinity (lambda : 0)
        return tuple(line)

    def trace_det_of_quotient(gi, gj):
        # (trace, det) of gi^-1 . gj, a similarity invariant (n = 2 only)
        inv = t.inv
        det_i = _det_indexed(t, gi, 2)
        if inv[det_i] is None:
            return "sing"
        a, b, c, d = gi
        di = inv[det_i]
        ia, ib = mul[di][d], mul[di][neg[b]]
        ic, idd = mul[di][neg[c]], mul[di][a]
        e, f, g, h = gj
        m00 = add[mul[ia][e]][mul[ib][g]]
        m11 = add[mul[ic][f]][mul[idd][h]]
        m01 = add[mul[ia][f]][mul[ib][h]]
        m10 = add[mul[ic][e]][mul[idd][g]]
        return (add[m00][m11], add[mul[m00][m11]][neg[mul[m01][m10]]])

    profile = [tuple(stats(g) for g in grams)]
    count = algebra.element_count
    if count**n <= 4096:
        # joint distribution of the diagonal values (s_1(v,v), ..., s_k(v,v))
        # over all vectors v; congruence permutes the vectors, so the counted
        # multiset is invariant -- and it sees the square classes that the
        # determinant of a singular Gram forgets
        dist: dict = {}
        for v in itertools.product(range(count), repeat=n):
            vals = []
            for g in grams:
                acc = 0
                for i in range(n):
                    vi = v[i]
                    if not vi:
                        continue
                    svi = sigma[vi]
                    row = i * n
                    for j in range(n):
                        x = g[row + j]
                        if x and v[j]:
                            acc = add[acc][mul[mul[svi][x]][v[j]]]
                vals.append(acc)
            key = tuple(vals)
            dist[key] = dist.get(key, 0) + 1
        profile.append(tuple(sorted(dist.items())))
    conj_grams = [conj_t(g) for g in grams]
    # pencils with the conjugate transposes pick up the orientation data that
    # plain rank/det profiles miss (they cannot tell a system from its
    # entrywise conjugate transpose)
    for i in range(len(grams)):
        profile.append(pencil(grams[i], conj_grams[i]))
    if len(grams) >= 2:
        for i, j in itertools.combinations(range(len(grams)), 2):
            profile.append(pencil(grams[i], grams[j]))
            profile.append(pencil(grams[i], conj_grams[j]))
            profile.append(pencil(conj_grams[i], grams[j]))
    if n == 2:
        for i in range(len(grams)):
            for j in range(len(grams)):
                profile.append(
                    ("q", i, j, trace_det_of_quotient(grams[i], grams[j]))
                    if i != j
                    else ("qc", i, trace_det_of_quotient(grams[i], conj_grams[i]))
                )
                if i != j:
                    profile.append(
                        ("qx", i, j, trace_det_of_quotient(grams[i], conj_grams[j]))
                    )
    return tuple(profile)


# ---------------------------------------------------------------------------
# predicates for filtered classifications


def hermitian_unimodular_predicate(epsilon: int = 1):
    def predicate(form: System) -> bool:
        return form.is_epsilon_hermitian(epsilon) and form.is_unimodular()

    predicate.description = {"epsilon": epsilon, "unimodular": True}
    return predicate
