"""Exact base fields: Q, GF(p), GF(p^e) and quadratic extensions of Q.

Field elements are plain immutable Python values so they hash, compare and
serialize without wrapper objects; the field object supplies the arithmetic:

* ``PrimeField(p)``       -- elements are ints in ``range(p)``
* ``ExtensionField(K,m)`` -- elements are tuples of ``K``-elements of length
  ``deg(m)``, coefficients in ascending degree; ``m`` is the monic irreducible
  modulus polynomial (also ascending, length ``deg+1``)
* ``Rationals()``         -- elements are ``fractions.Fraction``

The characteristic is never 2 (standing assumption of the whole library).

Finite fields carry a canonical element order: lexicographic on coefficient
vectors with the prime field ordered ``0, 1, ..., p-1``.  ``index``/
``element_at`` convert between an element and its rank in that order, which is
what every deterministic enumeration in the library is built on.
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction

from .errors import InfiniteBaseError

# mul/inv lookup tables are built for finite fields up to this many elements
_TABLE_LIMIT = 4096


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class BaseField:
    """Common interface of the exact base fields."""

    kind = "abstract"
    is_finite = False
    characteristic = 0
    order: int | None = None

    # -- arithmetic ---------------------------------------------------------
    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def from_int(self, n: int):
        """Image of the integer ``n`` under the canonical map Z -> K."""
        raise NotImplementedError

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = self.one()
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    # -- enumeration and ordering -------------------------------------------
    def elements(self):
        """All elements in canonical order (finite fields only)."""
        raise InfiniteBaseError(f"cannot enumerate elements of {self!r}")

    def index(self, a) -> int:
        raise InfiniteBaseError(f"no canonical index over {self!r}")

    def element_at(self, i: int):
        raise InfiniteBaseError(f"no canonical index over {self!r}")

    def sort_key(self, a):
        """Key for the canonical (serialization) order of elements."""
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class Rationals(BaseField):
    """The field Q; elements are ``Fraction`` values."""

    kind = "rationals"
    is_finite = False
    characteristic = 0
    order = None

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def from_int(self, n):
        return Fraction(n)

    def sort_key(self, a):
        return a

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash(("field", "rationals"))


class PrimeField(BaseField):
    """GF(p) for an odd prime p; elements are ints in ``range(p)``."""

    kind = "prime"
    is_finite = True

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p == 2:
            raise ValueError("characteristic 2 is not supported")
        self.p = p
        self.characteristic = p
        self.order = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def from_int(self, n):
        return n % self.p

    def elements(self):
        return iter(range(self.p))

    def index(self, a):
        return a

    def element_at(self, i):
        if not 0 <= i < self.p:
            raise IndexError(i)
        return i

    def sort_key(self, a):
        return a

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("field", "prime", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


def _poly_trim(field, coeffs):
    coeffs = list(coeffs)
    while coeffs and field.is_zero(coeffs[-1]):
        coeffs.pop()
    return coeffs


def _poly_mul(field, a, b):
    if not a or not b:
        return []
    out = [field.zero()] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if field.is_zero(ai):
            continue
        for j, bj in enumerate(b):
            out[i + j] = field.add(out[i + j], field.mul(ai, bj))
    return _poly_trim(field, out)


def _poly_divmod(field, a, b):
    a = list(a)
    b = _poly_trim(field, b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [field.zero()] * max(len(a) - len(b) + 1, 0)
    inv_lead = field.inv(b[-1])
    for i in range(len(a) - len(b), -1, -1):
        c = field.mul(a[i + len(b) - 1], inv_lead)
        if field.is_zero(c):
            continue
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] = field.sub(a[i + j], field.mul(c, bj))
    return _poly_trim(field, q), _poly_trim(field, a)


def _poly_gcd(field, a, b):
    a, b = _poly_trim(field, a), _poly_trim(field, b)
    while b:
        a, b = b, _poly_divmod(field, a, b)[1]
    if a:
        inv_lead = field.inv(a[-1])
        a = [field.mul(c, inv_lead) for c in a]
    return a


def _poly_powmod(field, a, n, mod):
    result = [field.one()]
    base = _poly_divmod(field, a, mod)[1]
    while n:
        if n & 1:
            result = _poly_divmod(field, _poly_mul(field, result, base), mod)[1]
        base = _poly_divmod(field, _poly_mul(field, base, base), mod)[1]
        n >>= 1
    return result


def _is_irreducible(field, modulus) -> bool:
    """Exact irreducibility test for a monic polynomial over ``field``.

    Finite fields use the standard gcd test against x^(q^i) - x; over Q only
    degrees 1..2 can occur (larger number fields are out of scope) and a
    quadratic is irreducible iff its discriminant is not a square.
    """
    deg = len(modulus) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    if field.is_finite:
        q = field.order
        x = [field.zero(), field.one()]
        power = x
        for _ in range(deg // 2):
            power = _poly_powmod(field, power, q, modulus)
            diff = _poly_trim(
                field,
                [field.sub(p, xe) for p, xe in itertools.zip_longest(power, x, fillvalue=field.zero())],
            )
            if len(_poly_gcd(field, modulus, diff)) > 1:
                return False
        return True
    if isinstance(field, Rationals):
        if deg != 2:
            raise ValueError("extensions of Q beyond degree 2 are not supported")
        c, b, _ = modulus
        disc = b * b - 4 * c
        return not _is_rational_square(disc)
    raise ValueError(f"irreducibility test not available over {field!r}")


def _is_rational_square(x: Fraction) -> bool:
    if x < 0:
        return False
    num, den = x.numerator, x.denominator
    rn = int(num**0.5)
    while rn * rn < num:
        rn += 1
    while rn * rn > num:
        rn -= 1
    rd = int(den**0.5)
    while rd * rd < den:
        rd += 1
    while rd * rd > den:
        rd -= 1
    return rn * rn == num and rd * rd == den


class ExtensionField(BaseField):
    """Simple extension ``base[x]/(modulus)`` with a monic irreducible modulus.

    Elements are tuples of ``base`` elements of length ``degree`` (coefficients
    of 1, x, ..., x^(degree-1)).  Covers GF(p^e) (base ``PrimeField``) and
    Q(sqrt(d)) (base ``Rationals``, modulus x^2 - d); towers of finite
    extensions compose by nesting.
    """

    kind = "extension"

    def __init__(self, base: BaseField, modulus):
        modulus = list(modulus)
        if len(modulus) < 2:
            raise ValueError("modulus must have degree >= 1")
        if base.is_zero(modulus[-1]):
            raise ValueError("modulus has zero leading coefficient")
        if modulus[-1] != base.one():
            inv_lead = base.inv(modulus[-1])
            modulus = [base.mul(c, inv_lead) for c in modulus]
        if not _is_irreducible(base, modulus):
            raise ValueError("modulus polynomial is reducible")
        self.base = base
        self.modulus = tuple(modulus)
        self.degree = len(modulus) - 1
        self.characteristic = base.characteristic
        self.is_finite = base.is_finite
        self.order = base.order**self.degree if base.is_finite else None
        self._zero = tuple(base.zero() for _ in range(self.degree))
        self._one = tuple(
            base.one() if i == 0 else base.zero() for i in range(self.degree)
        )
        self._tables = None
        self._lock = threading.Lock()

    # -- arithmetic ---------------------------------------------------------
    def zero(self):
        return self._zero

    def one(self):
        return self._one

    def add(self, a, b):
        base = self.base
        return tuple(base.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        base = self.base
        return tuple(base.neg(x) for x in a)

    def from_int(self, n):
        base = self.base
        return tuple(
            base.from_int(n) if i == 0 else base.zero() for i in range(self.degree)
        )

    def embed(self, a):
        """Image of a ``base`` element under base -> extension."""
        return tuple(a if i == 0 else self.base.zero() for i in range(self.degree))

    def mul(self, a, b):
        tables = self._table_pair()
        if tables is not None:
            mul_t, _ = tables
            return self.element_at(mul_t[self.index(a)][self.index(b)])
        return self._mul_poly(a, b)

    def _mul_poly(self, a, b):
        base = self.base
        prod = _poly_mul(base, list(a), list(b))
        rem = _poly_divmod(base, prod, list(self.modulus))[1]
        rem = rem + [base.zero()] * (self.degree - len(rem))
        return tuple(rem)

    def inv(self, a):
        if a == self._zero:
            raise ZeroDivisionError("inverse of 0")
        tables = self._table_pair()
        if tables is not None:
            _, inv_t = tables
            return self.element_at(inv_t[self.index(a)])
        return self._inv_poly(a)

    def _inv_poly(self, a):
        # extended Euclid in base[x]
        base = self.base
        r0, r1 = list(self.modulus), _poly_trim(base, list(a))
        s0, s1 = [], [base.one()]
        while r1:
            q, r = _poly_divmod(base, r0, r1)
            r0, r1 = r1, r
            qs = _poly_mul(base, q, s1)
            new_s = [
                base.sub(x, y)
                for x, y in itertools.zip_longest(s0, qs, fillvalue=base.zero())
            ]
            s0, s1 = s1, _poly_trim(base, new_s)
        # r0 is the gcd, a nonzero constant since the modulus is irreducible
        c = base.inv(r0[0])
        out = [base.mul(x, c) for x in s0]
        out = out + [base.zero()] * (self.degree - len(out))
        return tuple(out[: self.degree])

    def is_zero(self, a):
        return a == self._zero

    # -- enumeration ---------------------------------------------------------
    def elements(self):
        if not self.is_finite:
            raise InfiniteBaseError(f"cannot enumerate elements of {self!r}")
        return (self.element_at(i) for i in range(self.order))

    def index(self, a):
        if not self.is_finite:
            raise InfiniteBaseError(f"no canonical index over {self!r}")
        base = self.base
        q = base.order
        i = 0
        for c in a:
            i = i * q + base.index(c)
        return i

    def element_at(self, i):
        if not self.is_finite:
            raise InfiniteBaseError(f"no canonical index over {self!r}")
        base = self.base
        q = base.order
        digits = []
        for _ in range(self.degree):
            digits.append(i % q)
            i //= q
        return tuple(base.element_at(d) for d in reversed(digits))

    def sort_key(self, a):
        base = self.base
        return tuple(base.sort_key(c) for c in a)

    def frobenius_power(self, a, k: int):
        """a^(q0^k) where q0 is the order of the prime field (finite only)."""
        return self.pow(a, self.characteristic**k)

    # -- lookup tables --------------------------------------------------------
    def _table_pair(self):
        if not self.is_finite or self.order > _TABLE_LIMIT:
            return None
        if self._tables is None:
            with self._lock:
                if self._tables is None:
                    n = self.order
                    elems = [self.element_at(i) for i in range(n)]
                    one_idx = self.index(self._one)
                    mul_t = [[0] * n for _ in range(n)]
                    inv_t = [None] * n
                    for i in range(n):
                        for j in range(i, n):
                            k = self.index(self._mul_poly(elems[i], elems[j]))
                            mul_t[i][j] = k
                            mul_t[j][i] = k
                            if k == one_idx:
                                inv_t[i] = j
                                inv_t[j] = i
                    self._tables = (mul_t, inv_t)
        return self._tables

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and other.base == self.base
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("field", "extension", self.base, self.modulus))

    def __repr__(self):
        if self.is_finite:
            return f"ExtensionField(GF({self.characteristic}), degree={self.degree})"
        return f"ExtensionField(Q, degree={self.degree})"


def finite_field(p: int, e: int, modulus_ints) -> BaseField:
    """GF(p^e) with an explicit modulus (ascending integer coefficients)."""
    prime = PrimeField(p)
    if e == 1:
        return prime
    coeffs = [c % p for c in modulus_ints]
    if len(coeffs) != e + 1:
        raise ValueError(f"modulus must have degree {e}")
    return ExtensionField(prime, coeffs)


def quadratic_rationals(d) -> ExtensionField:
    """Q(sqrt(d)) for a non-square rational d, as Q[x]/(x^2 - d)."""
    d = Fraction(d)
    if _is_rational_square(d):
        raise ValueError(f"{d} is a square in Q")
    Q = Rationals()
    return ExtensionField(Q, [-d, Fraction(0), Fraction(1)])


def smallest_irreducible(field: BaseField, degree: int):
    """Lexicographically smallest monic irreducible of ``degree`` (finite base).

    Candidates are scanned in ascending serialization order of the coefficient
    vector (c_0, ..., c_{degree-1}); used for deterministic CLI defaults.
    """
    if not field.is_finite:
        raise InfiniteBaseError("canonical modulus choice needs a finite base")
    for lower in itertools.product(
        *[[field.element_at(i) for i in range(field.order)] for _ in range(degree)]
    ):
        candidate = list(lower) + [field.one()]
        if _is_irreducible(field, candidate):
            return candidate
    raise RuntimeError("unreachable: irreducible polynomials exist in every degree")
