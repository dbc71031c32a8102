"""Finite-dimensional algebras with involution, and exact matrices over them.

An algebra is presented by structure constants over an exact base field K:
``sc[i][j]`` is the coefficient vector of the product ``e_i * e_j`` in the
basis ``e_0, ..., e_{m-1}``.  Elements are coefficient tuples of length ``m``;
the involution is a K-linear map given by a matrix on the basis (it is an
algebra datum, so K-linearity of the involution is built in).

Matrices over the algebra represent all module maps between the free right
modules A^n (columns are coordinate vectors, maps act from the left).  The
conjugate transpose applies the involution entrywise to the transpose and is
the matrix realization of dualization: a functional on A^n is stored as the
column u with value conj_transpose(u) . x.

Inversion goes through the regular representation: an n x n matrix over A is
invertible exactly when the induced K-linear map on the nm-dimensional
K-space is, and the inverse is read back from an exact linear solve.

For small finite algebras the element set is indexed 0..|A|-1 in serialization
order and multiplication/involution lookup tables are built on demand; the
brute-force layers in the forms modules run on those integer indices.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

from . import linalg
from .budget import Budget, ensure_budget
from .errors import DimensionMismatch, InfiniteBaseError, NotInvertibleError
from .fields import BaseField, ExtensionField, PrimeField, Rationals

# lookup tables are built for algebras with at most this many elements
_ALG_TABLE_LIMIT = 1024
# unit lists for GL_n(A) are cached up to this many candidate matrices
_UNIT_ENUM_LIMIT = 1_200_000


@dataclass(frozen=True)
class Violation:
    """One failed algebra axiom with its witness basis indices."""

    kind: str  # "associativity" | "unit" | "anti_automorphism" | "involution_square"
    indices: tuple
    lhs: tuple
    rhs: tuple


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def as_json(self):
        return {
            "ok": self.ok,
            "violations": [
                {
                    "kind": v.kind,
                    "indices": list(v.indices),
                    "lhs": list(v.lhs),
                    "rhs": list(v.rhs),
                }
                for v in self.violations
            ],
        }


class _Tables:
    """Integer lookup tables for a small finite algebra."""

    __slots__ = (
        "elements",
        "index",
        "mul",
        "add",
        "neg",
        "sigma",
        "inv",
        "zero",
        "one",
        "unit_indices",
        "is_field_like",
    )


class Algebra:
    """A finite-dimensional algebra with involution over an exact base field.

    The constructor checks shapes only; the ring/involution axioms are the
    business of :func:`validate_algebra`, so deliberately broken presentations
    can be built and inspected.
    """

    __slots__ = (
        "field",
        "dim",
        "sc",
        "unit",
        "invol",
        "_tables",
        "_lock",
        "_hash",
        "_commutative",
    )

    def __init__(self, field: BaseField, structure_constants, unit, involution):
        m = len(structure_constants)
        sc = tuple(
            tuple(tuple(entry) for entry in row) for row in structure_constants
        )
        if any(len(row) != m for row in sc) or any(
            len(entry) != m for row in sc for entry in row
        ):
            raise DimensionMismatch("structure constants must form an m x m x m array")
        unit = tuple(unit)
        if len(unit) != m:
            raise DimensionMismatch("unit vector has wrong length")
        invol = tuple(tuple(r) for r in involution)
        if len(invol) != m or any(len(r) != m for r in invol):
            raise DimensionMismatch("involution matrix must be m x m")
        self.field = field
        self.dim = m
        self.sc = sc
        self.unit = unit
        self.invol = invol
        self._tables = None
        self._lock = threading.Lock()
        self._hash = None
        self._commutative = None

    # -- element arithmetic ---------------------------------------------------
    def zero(self):
        z = self.field.zero()
        return (z,) * self.dim

    def one(self):
        return self.unit

    def basis_element(self, i: int):
        z, o = self.field.zero(), self.field.one()
        return tuple(o if k == i else z for k in range(self.dim))

    def add(self, a, b):
        t = self._tables
        if t is not None:
            return t.elements[t.add[t.index[a]][t.index[b]]]
        K = self.field
        return tuple(K.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        K = self.field
        return tuple(K.neg(x) for x in a)

    def sub(self, a, b):
        K = self.field
        return tuple(K.sub(x, y) for x, y in zip(a, b))

    def scalar_mul(self, k, a):
        K = self.field
        return tuple(K.mul(k, x) for x in a)

    def mul(self, a, b):
        t = self._tables
        if t is not None:
            return t.elements[t.mul[t.index[a]][t.index[b]]]
        return self._mul_sc(a, b)

    def _mul_sc(self, a, b):
        K = self.field
        out = list(self.zero())
        sc = self.sc
        for i, ai in enumerate(a):
            if K.is_zero(ai):
                continue
            sci = sc[i]
            for j, bj in enumerate(b):
                if K.is_zero(bj):
                    continue
                c = K.mul(ai, bj)
                row = sci[j]
                for k in range(self.dim):
                    if not K.is_zero(row[k]):
                        out[k] = K.add(out[k], K.mul(c, row[k]))
        return tuple(out)

    def involve(self, a):
        """Apply the involution; applying twice returns the input."""
        if len(a) != self.dim:
            raise DimensionMismatch("element has wrong length")
        t = self._tables
        if t is not None:
            return t.elements[t.sigma[t.index[a]]]
        K = self.field
        return tuple(
            _dot(K, row, a) for row in self.invol
        )

    def is_zero(self, a) -> bool:
        K = self.field
        return all(K.is_zero(x) for x in a)

    def from_field(self, k):
        return self.scalar_mul(k, self.unit)

    def from_int(self, n: int):
        return self.from_field(self.field.from_int(n))

    def element_inverse(self, a):
        """Two-sided inverse of an element, or None."""
        t = self._tables
        if t is not None:
            j = t.inv[t.index[a]]
            return None if j is None else t.elements[j]
        inv = Mat(self, 1, 1, ((a,),)).inverse()
        return None if inv is None else inv.entries[0][0]

    # -- properties -----------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self.field.is_finite

    @property
    def element_count(self) -> int:
        if not self.is_finite:
            raise InfiniteBaseError("algebra over an infinite field")
        return self.field.order**self.dim

    @property
    def is_commutative(self) -> bool:
        if self._commutative is None:
            self._commutative = all(
                self.sc[i][j] == self.sc[j][i]
                for i in range(self.dim)
                for j in range(self.dim)
            )
        return self._commutative

    @property
    def is_finite_field_like(self) -> bool:
        """True when A is a finite commutative algebra all of whose nonzero
        elements are invertible (i.e. a finite field in disguise).  Requires
        lookup tables; large algebras conservatively answer False."""
        if not self.is_finite or not self.is_commutative:
            return False
        t = self.tables()
        if t is None:
            return False
        return t.is_field_like

    def has_identity_involution(self) -> bool:
        K = self.field
        return all(
            self.invol[i][j] == (K.one() if i == j else K.zero())
            for i in range(self.dim)
            for j in range(self.dim)
        )

    # -- canonical element order ----------------------------------------------
    def element_index(self, a) -> int:
        K = self.field
        q = K.order
        i = 0
        for c in a:
            i = i * q + K.index(c)
        return i

    def element_at(self, i: int):
        K = self.field
        q = K.order
        digits = []
        for _ in range(self.dim):
            digits.append(i % q)
            i //= q
        return tuple(K.element_at(d) for d in reversed(digits))

    def sort_key(self, a):
        K = self.field
        return tuple(K.sort_key(x) for x in a)

    # -- lookup tables ----------------------------------------------------------
    def tables(self) -> _Tables | None:
        """Integer op tables, or None when the algebra is too large/infinite."""
        if not self.is_finite or self.element_count > _ALG_TABLE_LIMIT:
            return None
        if self._tables is None:
            with self._lock:
                if self._tables is None:
                    self._tables = self._build_tables()
        return self._tables

    def _build_tables(self) -> _Tables:
        n = self.element_count
        elements = [self.element_at(i) for i in range(n)]
        index = {e: i for i, e in enumerate(elements)}
        ints = list(range(n))  # shared int objects for the table slots
        one_idx = index[self.unit]
        mul = [None] * n
        inv = [None] * n
        for i in range(n):
            ei = elements[i]
            row = [0] * n
            for j in range(n):
                k = index[self._mul_sc(ei, elements[j])]
                row[j] = ints[k]
                if k == one_idx:
                    inv[i] = ints[j]
            mul[i] = row
        add = [
            [ints[index[self.add(elements[i], elements[j])]] for j in range(n)]
            for i in range(n)
        ]
        K = self.field
        sigma = [
            ints[index[tuple(_dot(K, row, elements[i]) for row in self.invol)]]
            for i in range(n)
        ]
        neg = [ints[index[self.neg(elements[i])]] for i in range(n)]
        t = _Tables()
        t.elements = elements
        t.index = index
        t.mul = mul
        t.add = add
        t.neg = neg
        t.sigma = sigma
        t.inv = inv
        t.zero = index[self.zero()]
        t.one = one_idx
        t.unit_indices = [i for i in range(n) if inv[i] is not None]
        t.is_field_like = self.is_commutative and all(
            inv[i] is not None for i in range(n) if i != t.zero
        )
        return t

    # -- structural identity -----------------------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Algebra):
            return NotImplemented
        return (
            self.field == other.field
            and self.dim == other.dim
            and self.sc == other.sc
            and self.unit == other.unit
            and self.invol == other.invol
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.dim, self.sc, self.unit, self.invol))
        return self._hash

    def __repr__(self):
        return f"Algebra(dim={self.dim} over {self.field!r})"


def _dot(K, row, vec):
    acc = K.zero()
    for r, v in zip(row, vec):
        if not K.is_zero(r) and not K.is_zero(v):
            acc = K.add(acc, K.mul(r, v))
    return acc


# ---------------------------------------------------------------------------
# shipped constructors


def field_algebra(field: BaseField) -> Algebra:
    """The base field itself as a 1-dimensional algebra with trivial involution."""
    one = field.one()
    return Algebra(field, (((one,),),), (one,), ((one,),))


def extension_algebra(
    field: BaseField, modulus, involution: str = "identity"
) -> Algebra:
    """The extension field K[x]/(modulus) as an algebra over K.

    ``involution`` is ``"identity"`` or ``"conjugation"``; conjugation means
    the order-2 automorphism fixing K.  For a quadratic modulus x^2 + b x + c
    that is t -> -b - t (the Frobenius x -> x^|K| when K is finite); finite
    even degrees e use the |K|^(e/2)-power map.
    """
    ext = ExtensionField(field, modulus)
    e = ext.degree
    t_elem = tuple(field.one() if i == 1 else field.zero() for i in range(e))
    basis_pows = [ext.one()]
    for _ in range(e - 1):
        basis_pows.append(ext._mul_poly(basis_pows[-1], t_elem))
    # power basis: element coordinates of t^i are just unit vectors, so the
    # structure constants are the reduced products t^(i+j)
    sc = [
        [ext._mul_poly(basis_pows[i], basis_pows[j]) for j in range(e)]
        for i in range(e)
    ]
    unit = ext.one()
    if involution == "identity":
        invol = linalg.identity(field, e)
    elif involution == "conjugation":
        if e == 2:
            b = ext.modulus[1]
            sigma_t = (field.neg(b), field.neg(field.one()))
        elif field.is_finite and e % 2 == 0:
            t = tuple(
                field.one() if i == 1 else field.zero() for i in range(e)
            )
            sigma_t = ext.pow(t, field.order ** (e // 2))
        else:
            raise ValueError("conjugation needs degree 2 (or finite even degree)")
        # sigma is multiplicative, so its matrix columns are sigma(t)^i
        images = []
        acc = ext.one()
        for _ in range(e):
            images.append(acc)
            acc = ext._mul_poly(acc, sigma_t)
        invol = [[images[j][k] for j in range(e)] for k in range(e)]
    else:
        raise ValueError(f"unknown involution {involution!r}")
    return Algebra(field, sc, unit, invol)


# ---------------------------------------------------------------------------
# validation


def validate_algebra(algebra: Algebra) -> ValidationReport:
    """Check associativity, the unit, anti-multiplicativity and sigma^2 = id on
    all basis tuples; violations are collected with witnesses, not raised."""
    violations = []
    m = algebra.dim
    basis = [algebra.basis_element(i) for i in range(m)]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                lhs = algebra.mul(algebra.mul(basis[i], basis[j]), basis[k])
                rhs = algebra.mul(basis[i], algebra.mul(basis[j], basis[k]))
                if lhs != rhs:
                    violations.append(Violation("associativity", (i, j, k), lhs, rhs))
    for i in range(m):
        left = algebra.mul(algebra.unit, basis[i])
        right = algebra.mul(basis[i], algebra.unit)
        if left != basis[i]:
            violations.append(Violation("unit", (i,), left, basis[i]))
        if right != basis[i]:
            violations.append(Violation("unit", (i,), right, basis[i]))
    for i in range(m):
        for j in range(m):
            lhs = algebra.involve(algebra.mul(basis[i], basis[j]))
            rhs = algebra.mul(algebra.involve(basis[j]), algebra.involve(basis[i]))
            if lhs != rhs:
                violations.append(Violation("anti_automorphism", (i, j), lhs, rhs))
    for i in range(m):
        lhs = algebra.involve(algebra.involve(basis[i]))
        if lhs != basis[i]:
            violations.append(Violation("involution_square", (i,), lhs, basis[i]))
    return ValidationReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# matrices over the algebra


class Mat:
    """Immutable matrix over an algebra; rows of coefficient-tuple entries."""

    __slots__ = ("algebra", "rows", "cols", "entries", "_hash")

    def __init__(self, algebra: Algebra, rows: int, cols: int, entries):
        entries = tuple(tuple(row) for row in entries)
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise DimensionMismatch("entry grid does not match the declared shape")
        self.algebra = algebra
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._hash = None

    # -- constructors -----------------------------------------------------------
    @classmethod
    def _raw(cls, algebra: Algebra, rows: int, cols: int, entries) -> "Mat":
        """Internal constructor for pre-validated tuple-of-tuples entries."""
        m = object.__new__(cls)
        m.algebra = algebra
        m.rows = rows
        m.cols = cols
        m.entries = entries
        m._hash = None
        return m

    @staticmethod
    def identity(algebra: Algebra, n: int) -> "Mat":
        z, o = algebra.zero(), algebra.one()
        return Mat(
            algebra, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))
        )

    @staticmethod
    def zeros(algebra: Algebra, rows: int, cols: int) -> "Mat":
        z = algebra.zero()
        return Mat(algebra, rows, cols, ((z,) * cols,) * rows)

    @staticmethod
    def from_rows(algebra: Algebra, entries) -> "Mat":
        entries = tuple(tuple(row) for row in entries)
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        return Mat(algebra, rows, cols, entries)

    @staticmethod
    def from_ints(algebra: Algebra, grid) -> "Mat":
        """Convenience constructor from nested ints (scalar multiples of 1)."""
        return Mat.from_rows(
            algebra, [[algebra.from_int(x) for x in row] for row in grid]
        )

    @staticmethod
    def scalar(algebra: Algebra, a, n: int) -> "Mat":
        z = algebra.zero()
        return Mat(
            algebra, n, n, tuple(tuple(a if i == j else z for j in range(n)) for i in range(n))
        )

    # -- ring operations -----------------------------------------------------------
    def _check_same(self, other: "Mat"):
        if self.algebra != other.algebra:
            raise DimensionMismatch("matrices live over different algebras")

    def mul(self, other: "Mat") -> "Mat":
        self._check_same(other)
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        A = self.algebra
        a_mul, a_add = A.mul, A.add
        zero = A.zero()
        out = []
        o_entries = other.entries
        inner = self.cols
        for i in range(self.rows):
            srow = self.entries[i]
            new_row = []
            for j in range(other.cols):
                acc = zero
                for k in range(inner):
                    acc = a_add(acc, a_mul(srow[k], o_entries[k][j]))
                new_row.append(acc)
            out.append(tuple(new_row))
        return Mat._raw(A, self.rows, other.cols, tuple(out))

    def add(self, other: "Mat") -> "Mat":
        self._check_same(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shapes differ")
        A = self.algebra
        return Mat._raw(
            A,
            self.rows,
            self.cols,
            tuple(
                tuple(A.add(x, y) for x, y in zip(r1, r2))
                for r1, r2 in zip(self.entries, other.entries)
            ),
        )

    def neg(self) -> "Mat":
        A = self.algebra
        return Mat._raw(
            A,
            self.rows,
            self.cols,
            tuple(tuple(A.neg(x) for x in row) for row in self.entries),
        )

    def sub(self, other: "Mat") -> "Mat":
        return self.add(other.neg())

    def scale(self, a) -> "Mat":
        """Left scalar multiple a * X (entrywise a * x)."""
        A = self.algebra
        return Mat._raw(
            A,
            self.rows,
            self.cols,
            tuple(tuple(A.mul(a, x) for x in row) for row in self.entries),
        )

    __mul__ = mul
    __add__ = add
    __sub__ = sub
    __neg__ = neg

    def conj_transpose(self) -> "Mat":
        """Involution applied entrywise to the transpose; reverses products."""
        A = self.algebra
        return Mat._raw(
            A,
            self.cols,
            self.rows,
            tuple(
                tuple(A.involve(self.entries[i][j]) for i in range(self.rows))
                for j in range(self.cols)
            ),
        )

    def transpose(self) -> "Mat":
        return Mat._raw(
            self.algebra,
            self.cols,
            self.rows,
            tuple(
                tuple(self.entries[i][j] for i in range(self.rows))
                for j in range(self.cols)
            ),
        )

    def is_zero(self) -> bool:
        A = self.algebra
        return all(A.is_zero(x) for row in self.entries for x in row)

    # -- inversion through the regular representation ---------------------------
    def inverse(self) -> "Mat | None":
        """Two-sided inverse, or None when the matrix is not invertible.

        Results are memoized globally; the same handful of unit matrices gets
        inverted over and over in the exhaustive suites.
        """
        if self.rows != self.cols:
            raise DimensionMismatch("only square matrices can be inverted")
        n = self.rows
        A = self.algebra
        if n == 0:
            return self
        cached = _inverse_cache.get(self)
        if cached is not None:
            return cached[0]
        inv = self._inverse_uncached()
        if len(_inverse_cache) < _INVERSE_CACHE_CAP:
            _inverse_cache[self] = (inv,)
            if inv is not None:
                _inverse_cache.setdefault(inv, (self,))
        return inv

    def _inverse_uncached(self) -> "Mat | None":
        n = self.rows
        A = self.algebra
        m = A.dim
        K = A.field
        rr = regular_representation(self)
        rhs = linalg.zeros(K, n * m, n)
        for j in range(n):
            for t in range(m):
                rhs[j * m + t][j] = A.unit[t]
        sol = linalg.solve(K, rr, rhs)
        if sol is None:
            return None
        entries = [
            tuple(
                tuple(sol[i * m + t][j] for t in range(m)) for j in range(n)
            )
            for i in range(n)
        ]
        inv = Mat(A, n, n, tuple(entries))
        # the solve can only succeed when the K-linear map is bijective, in
        # which case the one-sided inverse is automatically two-sided
        return inv

    def is_invertible(self) -> bool:
        if self.rows != self.cols:
            return False
        return self.inverse() is not None

    # -- block helpers -----------------------------------------------------------
    def direct_sum(self, other: "Mat") -> "Mat":
        self._check_same(other)
        A = self.algebra
        z = A.zero()
        top = [row + (z,) * other.cols for row in self.entries]
        bottom = [(z,) * self.cols + row for row in other.entries]
        return Mat(A, self.rows + other.rows, self.cols + other.cols, tuple(top + bottom))

    @staticmethod
    def block(blocks) -> "Mat":
        """Assemble from a 2D grid of compatible blocks."""
        algebra = blocks[0][0].algebra
        rows = []
        for brow in blocks:
            height = brow[0].rows
            if any(b.rows != height for b in brow):
                raise DimensionMismatch("ragged block row")
            for i in range(height):
                row = ()
                for b in brow:
                    row += b.entries[i]
                rows.append(row)
        total_cols = sum(b.cols for b in blocks[0])
        return Mat(algebra, len(rows), total_cols, tuple(rows))

    def submatrix(self, row_range, col_range) -> "Mat":
        ent = tuple(
            tuple(self.entries[i][j] for j in col_range) for i in row_range
        )
        return Mat(self.algebra, len(row_range), len(col_range), ent)

    def column(self, j: int):
        return tuple(self.entries[i][j] for i in range(self.rows))

    def map_entries(self, fn, algebra=None) -> "Mat":
        A = algebra if algebra is not None else self.algebra
        return Mat(
            A,
            self.rows,
            self.cols,
            tuple(tuple(fn(x) for x in row) for row in self.entries),
        )

    # -- ordering and identity ----------------------------------------------------
    def sort_key(self):
        A = self.algebra
        return tuple(A.sort_key(x) for row in self.entries for x in row)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Mat):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
            and self.algebra == other.algebra
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols} over {self.algebra!r})"


def regular_representation(x: Mat):
    """The base-field matrix of left multiplication by ``x`` on A^cols.

    Column vectors over A are flattened blockwise (coordinates of the first
    entry, then the second, ...); the result is an (rows*m) x (cols*m) grid of
    base field elements, multiplicative and unital in ``x``.
    """
    A = x.algebra
    K = A.field
    m = A.dim
    sc = A.sc
    out = linalg.zeros(K, x.rows * m, x.cols * m)
    for i in range(x.rows):
        for j in range(x.cols):
            a = x.entries[i][j]
            # block L(a): L[k][l] = sum_i a_i * sc[i][l][k]
            for idx, ai in enumerate(a):
                if K.is_zero(ai):
                    continue
                for l in range(m):
                    row_coeffs = sc[idx][l]
                    for k in range(m):
                        c = row_coeffs[k]
                        if not K.is_zero(c):
                            out[i * m + k][j * m + l] = K.add(
                                out[i * m + k][j * m + l], K.mul(ai, c)
                            )
    return out


# ---------------------------------------------------------------------------
# enumeration


def enumerate_elements(algebra: Algebra):
    """All algebra elements, each exactly once, in serialization order."""
    if not algebra.is_finite:
        raise InfiniteBaseError("cannot enumerate elements over an infinite field")
    return (algebra.element_at(i) for i in range(algebra.element_count))


def enumerate_matrices(algebra: Algebra, rows: int, cols: int):
    """All rows x cols matrices over A in serialization order."""
    if not algebra.is_finite:
        raise InfiniteBaseError("cannot enumerate matrices over an infinite field")
    count = algebra.element_count
    cells = rows * cols
    for combo in itertools.product(range(count), repeat=cells):
        entries = tuple(
            tuple(algebra.element_at(combo[i * cols + j]) for j in range(cols))
            for i in range(rows)
        )
        yield Mat(algebra, rows, cols, entries)


_unit_cache: dict = {}
_unit_cache_lock = threading.Lock()

# Mat -> (inverse or None,); keys include the algebra through Mat.__eq__
_inverse_cache: dict = {}
_INVERSE_CACHE_CAP = 200_000


def _invertibility_test(algebra: Algebra, n: int):
    """Fast invertibility predicate on flat index tuples, if available."""
    t = algebra.tables()
    if t is None:
        return None
    mul = t.mul
    if n == 1:
        inv = t.inv
        return lambda flat: inv[flat[0]] is not None
    if n == 2 and algebra.is_commutative:
        # over a commutative ring a square matrix is invertible iff its
        # determinant is a unit
        inv = t.inv
        add, neg = t.add, t.neg
        def test(flat):
            a, b, c, d = flat
            det = add[mul[a][d]][neg[mul[b][c]]]
            return inv[det] is not None
        return test
    return None


def unit_matrix_indices(algebra: Algebra, n: int, budget: Budget | None = None):
    """Flat index tuples of all invertible n x n matrices, ascending.

    The list is cached per (algebra, n); a size guard refuses enumerations that
    cannot fit in memory or the budget.
    """
    key = (algebra, n)
    cached = _unit_cache.get(key)
    if cached is not None:
        return cached
    if not algebra.is_finite:
        raise InfiniteBaseError("cannot enumerate units over an infinite field")
    count = algebra.element_count
    total = count ** (n * n)
    budget = ensure_budget(budget)
    budget.check_estimate(total)
    if total > _UNIT_ENUM_LIMIT:
        # the budget check above normally fires first; this is a memory guard
        from .errors import BudgetExceededError

        raise BudgetExceededError(total)
    fast = _invertibility_test(algebra, n)
    units = []
    if fast is not None:
        budget.charge(total)
        for flat in itertools.product(range(count), repeat=n * n):
            if fast(flat):
                units.append(flat)
    else:
        for flat in itertools.product(range(count), repeat=n * n):
            budget.charge()
            mat = _mat_from_indices(algebra, n, n, flat)
            if mat.inverse() is not None:
                units.append(flat)
    with _unit_cache_lock:
        _unit_cache.setdefault(key, units)
    return units


def enumerate_units(algebra: Algebra, n: int, budget: Budget | None = None):
    """All invertible n x n matrices over A, in serialization order."""
    for flat in unit_matrix_indices(algebra, n, budget):
        yield _mat_from_indices(algebra, n, n, flat)


def _mat_to_indices(x: Mat):
    idx = x.algebra.element_index
    return tuple(idx(e) for row in x.entries for e in row)


def _mat_from_indices(algebra: Algebra, rows: int, cols: int, flat) -> Mat:
    at = algebra.element_at
    entries = tuple(
        tuple(at(flat[i * cols + j]) for j in range(cols)) for i in range(rows)
    )
    return Mat._raw(algebra, rows, cols, entries)


def _imat_mul(a, b, rows, inner, cols, mul, add):
    """Flat index-matrix product; index 0 is always the zero element."""
    out = []
    for i in range(rows):
        base = i * inner
        for j in range(cols):
            acc = 0
            for k in range(inner):
                x = a[base + k]
                if x:
                    y = b[k * cols + j]
                    if y:
                        acc = add[acc][mul[x][y]]
            out.append(acc)
    return tuple(out)


def _imat_conj_transpose(a, rows, cols, sigma):
    return tuple(sigma[a[i * cols + j]] for j in range(cols) for i in range(rows))


def require_invertible(x: Mat) -> Mat:
    inv = x.inverse()
    if inv is None:
        raise NotInvertibleError("matrix is not invertible")
    return inv
