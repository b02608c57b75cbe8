"""Finite fields F_p and F_{p^2}, and rationals with one square root.

Elements of F_{p^2} are stored as ``c0 + c1*u`` with ``u^2 = r`` where ``r`` is
the least quadratic non-residue mod p.  The integer encoding ``c0 + c1*p``
(used by the vectorised engine) enumerates the field as ``range(q)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt

from .errors import (
    CompositeModulus,
    DenominatorNotInvertible,
    DomainMismatch,
    NoSquareRootInField,
    TooSmallPrime,
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def least_nonresidue(p: int) -> int:
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise ValueError(f"no quadratic non-residue mod {p}")


@dataclass(frozen=True)
class FieldSpec:
    p: int
    k: int = 1
    nonresidue: int | None = None  # r with F_{p^2} = F_p[u]/(u^2 - r)

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def irreducible(self) -> tuple[int, int, int] | None:
        """Coefficients (1, 0, -r) of the monic defining quadratic, or None."""
        if self.k == 1:
            return None
        return (1, 0, (-self.nonresidue) % self.p)

    def __call__(self, value) -> "FieldElement":
        return self.element(value)

    def __str__(self) -> str:
        return f"F_{self.p}" if self.k == 1 else f"F_{self.p}^2"

    def descriptor(self) -> dict:
        return {"p": self.p, "k": self.k, "q": self.q,
                "irreducible": None if self.k == 1 else f"u^2 - {self.nonresidue}"}

    # -- construction of elements ----------------------------------------

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise DomainMismatch(f"element of {value.field} used in {self}")
            return value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return FieldElement(self, value % self.p, 0)
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise DenominatorNotInvertible(f"{value} has denominator divisible by {self.p}")
            return FieldElement(self, value.numerator * pow(den, -1, self.p) % self.p, 0)
        if isinstance(value, tuple) and len(value) == 2:
            if self.k == 1 and value[1] % self.p:
                raise DomainMismatch(f"{value} is not in {self}")
            return FieldElement(self, value[0] % self.p, value[1] % self.p)
        if isinstance(value, SurdRational):
            return embed_surd(self, value)
        raise DomainMismatch(f"cannot coerce {value!r} into {self}")

    @cached_property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0, 0)

    @cached_property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1, 0)

    def decode(self, code: int) -> "FieldElement":
        c1, c0 = divmod(int(code), self.p)
        return FieldElement(self, c0, c1)

    def elements(self):
        """All q elements, in encoding order (0, 1, ..., q-1)."""
        return [self.decode(c) for c in range(self.q)]

    @cached_property
    def generator(self) -> "FieldElement":
        order = self.q - 1
        primes = [f for f in range(2, order + 1) if order % f == 0 and is_prime(f)]
        for code in range(1, self.q):
            g = self.decode(code)
            if all(g ** (order // f) != self.one for f in primes):
                return g
        raise ArithmeticError("no multiplicative generator")


def field_make(p: int, k: int = 1, *, allow_small: bool = False) -> FieldSpec:
    """Build F_p (k=1) or F_{p^2} (k=2).

    ``allow_small`` admits p = 2, 3 for pure incidence geometry; every
    surface-level routine asserts p >= 5 separately.
    """
    if k not in (1, 2):
        raise ValueError("extension degree must be 1 or 2")
    if not is_prime(p):
        raise CompositeModulus(f"{p} is not prime")
    if p < 5 and not allow_small:
        raise TooSmallPrime(f"p={p} < 5")
    if k == 1:
        return FieldSpec(p, 1, None)
    if p == 2:
        raise TooSmallPrime("quadratic extensions need odd p")
    return FieldSpec(p, 2, least_nonresidue(p))


class FieldElement:
    """Immutable element ``c0 + c1*u`` of a :class:`FieldSpec`."""

    __slots__ = ("field", "c0", "c1")

    def __init__(self, field: FieldSpec, c0: int, c1: int = 0):
        self.field = field
        self.c0 = c0
        self.c1 = c1

    @property
    def coords(self) -> tuple[int, int]:
        return (self.c0, self.c1)

    @property
    def code(self) -> int:
        return self.c0 + self.c1 * self.field.p

    def _coerce(self, other) -> "FieldElement | None":
        if type(other) is FieldElement:
            if other.field is not self.field and other.field != self.field:
                raise DomainMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, (self.c0 + o.c0) % p, (self.c1 + o.c1) % p)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, -self.c0 % p, -self.c1 % p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, (self.c0 - o.c0) % p, (self.c1 - o.c1) % p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        F = self.field
        p = F.p
        if F.k == 1:
            return FieldElement(F, self.c0 * o.c0 % p, 0)
        a0, a1, b0, b1 = self.c0, self.c1, o.c0, o.c1
        return FieldElement(F, (a0 * b0 + F.nonresidue * a1 * b1) % p, (a0 * b1 + a1 * b0) % p)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        F = self.field
        p = F.p
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if F.k == 1:
            return FieldElement(F, pow(self.c0, -1, p), 0)
        # 1/(a + b u) = (a - b u) / (a^2 - r b^2)
        norm = (self.c0 * self.c0 - F.nonresidue * self.c1 * self.c1) % p
        inv = pow(norm, -1, p)
        return FieldElement(F, self.c0 * inv % p, -self.c1 * inv % p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 1:
            return self
        if self.field.k == 1:
            return FieldElement(self.field, pow(self.c0, n, self.field.p), 0)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.c0 or self.c1)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.c0 == other.c0 and self.c1 == other.c1
        if isinstance(other, (int, Fraction)):
            try:
                o = self.field.element(other)
            except DenominatorNotInvertible:
                return False
            return self.c0 == o.c0 and self.c1 == o.c1
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.c0, self.c1))

    def sort_key(self) -> tuple[int, int]:
        return (self.c0, self.c1)

    def __int__(self):
        if self.c1:
            raise ValueError(f"{self} is not in the prime field")
        return self.c0

    def __repr__(self):
        if self.field.k == 1:
            return str(self.c0)
        if self.c1 == 0:
            return str(self.c0)
        return f"({self.c0}+{self.c1}*u)"

    __str__ = __repr__


def _sqrt_mod_p(a: int, p: int) -> int | None:
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def field_sqrt(F: FieldSpec, a) -> FieldElement | None:
    """Canonical square root (smaller of ±r by (c0, c1)) or None."""
    a = F.element(a)
    p = F.p
    if not a:
        return F.zero
    if F.k == 1:
        r = _sqrt_mod_p(a.c0, p)
        if r is None:
            return None
        return FieldElement(F, min(r, (-r) % p), 0)
    rr = F.nonresidue
    if a.c1 == 0:
        s = _sqrt_mod_p(a.c0, p)
        if s is not None:
            cand = FieldElement(F, s, 0)
        else:
            # (c u)^2 = c^2 r
            c = _sqrt_mod_p(a.c0 * pow(rr, -1, p), p)
            cand = FieldElement(F, 0, c)
    else:
        norm = (a.c0 * a.c0 - rr * a.c1 * a.c1) % p
        s = _sqrt_mod_p(norm, p)
        if s is None:
            return None
        inv2 = pow(2, -1, p)
        cand = None
        for sign in (s, -s % p):
            x2 = (a.c0 + sign) * inv2 % p
            x = _sqrt_mod_p(x2, p)
            if x is not None and x:
                y = a.c1 * pow(2 * x, -1, p) % p
                cand = FieldElement(F, x, y)
                break
        if cand is None:
            return None
    assert cand * cand == a
    neg = -cand
    return min(cand, neg, key=FieldElement.sort_key)


def squarefree_part(n: int) -> tuple[int, int]:
    """Return (s, d) with n = s^2 * d and d square-free (sign kept on d)."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, d, f = 1, 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            s *= f
        if n % f == 0:
            n //= f
            d *= f
        f += 1
    return s, sign * d * n


class SurdRational:
    """``a + b*sqrt(d)`` with rational a, b and square-free d (d=0 means b=0)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 0):
        a, b = Fraction(a), Fraction(b)
        if d == 0 or b == 0:
            d, b = 0, Fraction(0)
        else:
            s, d = squarefree_part(d)
            b *= s
            if d == 1:
                a, b, d = a + b, Fraction(0), 0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("SurdRational is immutable")

    @classmethod
    def sqrt(cls, d: int) -> "SurdRational":
        return cls(0, 1, d)

    def _coerce(self, other):
        if isinstance(other, SurdRational):
            if self.d and other.d and self.d != other.d:
                raise DomainMismatch(f"sqrt({self.d}) and sqrt({other.d}) mixed")
            return other
        if isinstance(other, (int, Fraction)):
            return SurdRational(other)
        return None

    def _d(self, other):
        return self.d or other.d

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return SurdRational(self.a + o.a, self.b + o.b, self._d(o))

    __radd__ = __add__

    def __neg__(self):
        return SurdRational(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return SurdRational(self.a - o.a, self.b - o.b, self._d(o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._d(o)
        return SurdRational(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return SurdRational(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = SurdRational(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.a or self.b)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, SurdRational) else other
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.d == o.d)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        bs = "" if self.b == 1 else ("-" if self.b == -1 else f"{self.b}*")
        surd = f"{bs}sqrt({self.d})"
        if self.a == 0:
            return surd
        sign = " - " if surd.startswith("-") else " + "
        return f"{self.a}{sign}{surd.lstrip('-')}"

    __str__ = __repr__


def embed_surd(F: FieldSpec, s) -> FieldElement:
    """Image of a + b*sqrt(d) under the embedding sqrt(d) -> field_sqrt(F, d)."""
    if isinstance(s, (int, Fraction)):
        return F.element(s)
    a = F.element(s.a)
    if s.b == 0:
        return a
    root = field_sqrt(F, s.d)
    if root is None:
        raise NoSquareRootInField(f"sqrt({s.d}) is not in {F}")
    return a + F.element(s.b) * root
