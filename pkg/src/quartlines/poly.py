"""Sparse multivariate polynomials, the expression parser, and resultants.

A :class:`MultiPoly` maps exponent tuples to nonzero coefficients.  Coefficients
are :class:`~fractions.Fraction`, :class:`~quartlines.field.SurdRational` (the
"rational" domain, ``domain=None``) or :class:`~quartlines.field.FieldElement`
(``domain`` is the :class:`~quartlines.field.FieldSpec`).

Expression grammar (whitespace ignored)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*        # "/" only by a nonzero constant
    unary   := ("+" | "-") unary | power
    power   := atom (("^" | "**") INT)?
    atom    := INT | VAR | "sqrt" "(" ["-"] INT ")" | "(" expr ")"

Juxtaposition (``2x``, ``x y``) is rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb

import numpy as np

from .errors import (
    BothZero,
    DegenerateLine,
    DomainMismatch,
    NotDivisible,
    PolynomialSyntaxError,
    SingularMatrix,
)
from .field import FieldElement, FieldSpec, SurdRational, embed_surd

VARS = ("x", "y", "z", "w")


def _is_scalar(c) -> bool:
    return isinstance(c, (int, Fraction, FieldElement, SurdRational))


def _to_domain(c, domain):
    if domain is None:
        if isinstance(c, FieldElement):
            raise DomainMismatch("field element in a rational polynomial")
        if isinstance(c, int):
            return Fraction(c)
        return c
    return domain.element(c)


class MultiPoly:
    __slots__ = ("terms", "nvars", "names", "domain")

    def __init__(self, terms=None, nvars: int = 4, names=None, domain: FieldSpec | None = None):
        self.nvars = nvars
        self.names = tuple(names) if names is not None else (VARS if nvars == 4 else tuple(f"x{i}" for i in range(nvars)))
        self.domain = domain
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    if len(e) != nvars:
                        raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                    clean[tuple(e)] = c
        self.terms = clean

    # -- construction ----------------------------------------------------

    def _new(self, terms):
        return MultiPoly(terms, self.nvars, self.names, self.domain)

    def like(self, terms=None):
        """Empty/new polynomial in the same ring."""
        return self._new(terms or {})

    @classmethod
    def var(cls, i: int, nvars: int = 4, names=None, domain=None) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        one = domain.one if domain is not None else Fraction(1)
        return cls({tuple(e): one}, nvars, names, domain)

    @classmethod
    def const(cls, c, nvars: int = 4, names=None, domain=None) -> "MultiPoly":
        return cls({(0,) * nvars: _to_domain(c, domain)}, nvars, names, domain)

    def constant(self, c) -> "MultiPoly":
        return self._new({(0,) * self.nvars: _to_domain(c, self.domain)})

    def gens(self) -> list["MultiPoly"]:
        return [MultiPoly.var(i, self.nvars, self.names, self.domain) for i in range(self.nvars)]

    @property
    def one(self):
        return self.domain.one if self.domain is not None else Fraction(1)

    @property
    def zero(self):
        return self.domain.zero if self.domain is not None else Fraction(0)

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    @property
    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    @property
    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_component(self, d: int) -> "MultiPoly":
        return self._new({e: c for e, c in self.terms.items() if sum(e) == d})

    def coefficient(self, exp) -> object:
        return self.terms.get(tuple(exp), self.zero)

    def variables(self) -> list[int]:
        return [i for i in range(self.nvars) if any(e[i] for e in self.terms)]

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, self.zero)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly | None":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DomainMismatch("polynomials in different numbers of variables")
            if other.domain != self.domain and other.terms and self.terms:
                raise DomainMismatch(f"{self.domain} vs {other.domain}")
            return other
        if _is_scalar(other):
            return self.constant(other)
        return None

    def _merge_domain(self, other):
        return self.domain if self.domain is not None else other.domain

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in o.terms.items():
            if e in terms:
                s = terms[e] + c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
            else:
                terms[e] = c
        return MultiPoly(terms, self.nvars, self.names, self._merge_domain(o))

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if _is_scalar(other):
            c = _to_domain(other, self.domain)
            if not c:
                return self._new({})
            return self._new({e: v * c for e, v in self.terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict = {}
        n = self.nvars
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(e1[i] + e2[i] for i in range(n))
                v = c1 * c2
                if e in out:
                    out[e] = out[e] + v
                else:
                    out[e] = v
        return MultiPoly(out, n, self.names, self._merge_domain(o))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = self.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if _is_scalar(other):
            c = _to_domain(other, self.domain)
            inv = 1 / c
            return self * inv
        if isinstance(other, MultiPoly):
            if other.is_constant() and other:
                return self / other.constant_value()
            return self.exact_div(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if _is_scalar(other):
            return self == self.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- division ----------------------------------------------------------

    def leading(self):
        e = max(self.terms)
        return e, self.terms[e]

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        """Quotient of an exact division; raises NotDivisible otherwise."""
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = self
        lead_e, lead_c = other.leading()
        inv = 1 / lead_c
        quot: dict = {}
        n = self.nvars
        while rem:
            e, c = rem.leading()
            shift = tuple(e[i] - lead_e[i] for i in range(n))
            if min(shift) < 0:
                raise NotDivisible("polynomial is not divisible")
            m = c * inv
            quot[shift] = m
            rem = rem - other.mul_monomial(shift, m)
        return self._new(quot)

    def mul_monomial(self, exp, c=None) -> "MultiPoly":
        n = self.nvars
        if c is None:
            return self._new({tuple(e[i] + exp[i] for i in range(n)): v for e, v in self.terms.items()})
        return self._new({tuple(e[i] + exp[i] for i in range(n)): v * c for e, v in self.terms.items()})

    def div_monomial(self, exp) -> "MultiPoly":
        """Divide by the monomial x^exp; raises NotDivisible if it is not a factor."""
        n = self.nvars
        out = {}
        for e, c in self.terms.items():
            s = tuple(e[i] - exp[i] for i in range(n))
            if min(s) < 0:
                raise NotDivisible(f"{self.monomial_str(exp)} does not divide the polynomial")
            out[s] = c
        return self._new(out)

    def divides_by_monomial(self, exp) -> bool:
        return all(all(e[i] >= exp[i] for i in range(self.nvars)) for e in self.terms)

    # -- calculus and substitution -----------------------------------------

    def diff(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return self._new(out)

    def gradient(self) -> list["MultiPoly"]:
        return [self.diff(i) for i in range(self.nvars)]

    def hessian_matrix(self) -> list[list["MultiPoly"]]:
        g = self.gradient()
        return [[g[i].diff(j) for j in range(self.nvars)] for i in range(self.nvars)]

    def evaluate(self, pt):
        if len(pt) != self.nvars:
            raise ValueError("point has wrong number of coordinates")
        if self.domain is not None:
            pt = [self.domain.element(v) for v in pt]
        acc = self.zero
        for e, c in self.terms.items():
            t = c
            for v, k in zip(pt, e):
                if k:
                    t = t * v ** k
            acc = acc + t
        return acc

    __call__ = evaluate

    def compose(self, polys, nvars: int | None = None, names=None) -> "MultiPoly":
        """Substitute variable i by ``polys[i]`` (all in one common ring)."""
        if len(polys) != self.nvars:
            raise ValueError("need one substitution per variable")
        base = next((p for p in polys if isinstance(p, MultiPoly)), None)
        if base is None:
            raise ValueError("compose needs MultiPoly substitutions; use evaluate for points")
        nv = base.nvars if nvars is None else nvars
        nm = base.names if names is None else names
        domain = self.domain if self.domain is not None else base.domain
        polys = [p if isinstance(p, MultiPoly) else MultiPoly.const(p, nv, nm, domain) for p in polys]
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                if k == 0:
                    cache[key] = MultiPoly.const(1, nv, nm, domain)
                elif k == 1:
                    cache[key] = polys[i]
                else:
                    cache[key] = power(i, k - 1) * polys[i]
            return cache[key]

        out = MultiPoly({}, nv, nm, domain)
        acc: dict = {}
        for e, c in self.terms.items():
            t = None
            for i, k in enumerate(e):
                if k:
                    t = power(i, k) if t is None else t * power(i, k)
            if t is None:
                t = MultiPoly.const(1, nv, nm, domain)
            for e2, c2 in t.terms.items():
                v = c2 * c
                acc[e2] = acc[e2] + v if e2 in acc else v
        out = MultiPoly(acc, nv, nm, domain)
        return out

    def substitute_linear(self, M) -> "MultiPoly":
        """P(M x): variable i becomes sum_j M[i][j] x_j.  M must be invertible."""
        n = self.nvars
        dom = self.domain
        rows = [[_to_domain(v, dom) for v in row] for row in M]
        if det_scalar(rows) == 0:
            raise SingularMatrix("substitution matrix is singular")
        gens = self.gens()
        lin = []
        for i in range(n):
            lp = self._new({})
            for j in range(n):
                if rows[i][j]:
                    lp = lp + gens[j] * rows[i][j]
            lin.append(lp)
        return self.compose(lin)

    def map_coeffs(self, fn, domain=None) -> "MultiPoly":
        return MultiPoly({e: fn(c) for e, c in self.terms.items()}, self.nvars, self.names, domain)

    def to_field(self, F: FieldSpec) -> "MultiPoly":
        """Embed coefficients into F (surds through the canonical square root)."""
        if self.domain == F:
            return self
        if self.domain is not None:
            raise DomainMismatch(f"cannot move coefficients from {self.domain} to {F}")
        return self.map_coeffs(lambda c: embed_surd(F, c) if isinstance(c, SurdRational) else F.element(c), F)

    def rename(self, names) -> "MultiPoly":
        return MultiPoly(self.terms, self.nvars, names, self.domain)

    def extend_vars(self, nvars: int, names=None, positions=None) -> "MultiPoly":
        """Embed into a ring with more variables (old var i -> positions[i])."""
        positions = positions or list(range(self.nvars))
        out = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            for i, k in enumerate(e):
                f[positions[i]] += k
            out[tuple(f)] = c
        return MultiPoly(out, nvars, names, self.domain)

    def drop_var(self, i: int, names=None) -> "MultiPoly":
        """Remove variable i (must not occur)."""
        if any(e[i] for e in self.terms):
            raise ValueError(f"variable {self.names[i]} occurs")
        nm = names if names is not None else self.names[:i] + self.names[i + 1:]
        return MultiPoly({e[:i] + e[i + 1:]: c for e, c in self.terms.items()}, self.nvars - 1, nm, self.domain)

    def coefficients_in(self, i: int) -> dict[int, "MultiPoly"]:
        """Split as sum_k var_i^k * C_k; C_k does not involve var i."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            f = list(e)
            k = f[i]
            f[i] = 0
            out.setdefault(k, {})[tuple(f)] = c
        return {k: self._new(t) for k, t in out.items()}

    # -- printing ----------------------------------------------------------

    def monomial_str(self, e) -> str:
        parts = []
        for name, k in zip(self.names, e):
            if k == 1:
                parts.append(name)
            elif k > 1:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda it: it[0], reverse=True)

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for idx, (e, c) in enumerate(self.sorted_terms()):
            neg, body = _coeff_str(c)
            mono = self.monomial_str(e)
            if mono:
                text = mono if body == "1" else f"{body}*{mono}"
            else:
                text = body
            if idx == 0:
                out.append(("-" if neg else "") + text)
            else:
                out.append((" - " if neg else " + ") + text)
        return "".join(out)

    __str__ = to_str

    def __repr__(self):
        return f"MultiPoly({self.to_str()!r})"


def _coeff_str(c) -> tuple[bool, str]:
    if isinstance(c, FieldElement):
        return False, repr(c)
    if isinstance(c, Fraction):
        return c < 0, str(abs(c))
    if isinstance(c, SurdRational):
        if c.is_rational:
            return c.a < 0, str(abs(c.a))
        return False, f"({c})"
    return (c < 0, str(abs(c)))


def det_scalar(rows):
    """Determinant of a square matrix of field/rational scalars (Gaussian elimination)."""
    m = [list(r) for r in rows]
    n = len(m)
    det = None
    sign = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return m[0][0] * 0 if n else 1
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pv = m[col][col]
        det = pv if det is None else det * pv
        inv = 1 / pv
        for r in range(col + 1, n):
            if m[r][col]:
                f = m[r][col] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    if det is None:
        return 1
    return det if sign == 1 else -det


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", text,
                                        len(text) - len(text[pos:].lstrip()))
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("sqrt", "sqrt", start))
        elif m.group(3):
            toks.append(("name", m.group(3), start))
        else:
            toks.append(("op", "^" if m.group(4) == "**" else m.group(4), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)
        self.n = len(self.variables)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolynomialSyntaxError(msg, self.text, tok[2])

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            self.error(f"expected {op!r}", t)
        return t

    def const(self, c):
        return MultiPoly({(0,) * self.n: SurdRational(c) if not isinstance(c, SurdRational) else c},
                         self.n, self.variables, None)

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            t = self.peek()
            if t[0] in ("num", "name", "sqrt") or t[1] == "(":
                self.error("implicit multiplication is not allowed", t)
            self.error(f"unexpected token {t[1]!r}", t)
        return p

    def expr(self):
        p = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                q = self.unary()
                if t[1] == "*":
                    p = p * q
                else:
                    if not q.is_constant() or not q:
                        self.error("division only by a nonzero constant", t)
                    p = p * (1 / q.constant_value())
            elif t[0] in ("num", "name", "sqrt") or (t[0] == "op" and t[1] == "("):
                self.error("implicit multiplication is not allowed", t)
            else:
                return p

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            p = self.unary()
            return -p if t[1] == "-" else p
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                self.error("exponent must be a nonnegative integer literal", e)
            return base ** e[1]
        return base

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return self.const(t[1])
        if t[0] == "sqrt":
            self.expect("(")
            neg = False
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                neg = True
            d = self.take()
            if d[0] != "num":
                self.error("sqrt() takes an integer literal", d)
            self.expect(")")
            return self.const(SurdRational.sqrt(-d[1] if neg else d[1]))
        if t[0] == "name":
            if t[1] not in self.variables:
                self.error(f"unknown variable {t[1]!r}", t)
            return MultiPoly.var(self.variables.index(t[1]), self.n, self.variables, None).map_coeffs(SurdRational)
        if t[0] == "op" and t[1] == "(":
            p = self.expr()
            self.expect(")")
            return p
        self.error("unexpected " + ("end of input" if t[0] == "end" else repr(t[1])), t)


def _simplify_rational(p: MultiPoly) -> MultiPoly:
    if all(c.is_rational for c in p.terms.values()):
        return p.map_coeffs(lambda c: c.a, None)
    return p


def parse_polynomial(text: str, domain: FieldSpec | None = None, variables=VARS) -> MultiPoly:
    """Parse and expand an expression.

    With ``domain=None`` coefficients are Fractions (or SurdRationals when a
    ``sqrt`` occurs); with a FieldSpec they are embedded into that field.
    Homogeneity is available as ``.is_homogeneous``.
    """
    p = _Parser(text, variables).parse()
    p = _simplify_rational(p)
    if domain is not None:
        p = p.to_field(domain)
    return p


# ---------------------------------------------------------------------------
# forms in a parameter, binary quartics, resultants


@dataclass(frozen=True)
class BinaryQuartic:
    """c[i] is the coefficient of s^(4-i) * t^i."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != 5:
            raise ValueError("a binary quartic has exactly 5 coefficients")

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]


def restrict_to_line(P: MultiPoly, line) -> BinaryQuartic:
    """Coefficients of P(s*A + t*B) for the stored spanning points A, B of ``line``."""
    if P.degree != 4 or not P.is_homogeneous:
        raise ValueError("restriction needs a homogeneous quartic")
    F = P.domain
    A = [F.element(v) for v in line.a.coords]
    B = [F.element(v) for v in line.b.coords]
    if all(not (A[i] * B[j] - A[j] * B[i]) for i in range(4) for j in range(4)):
        raise DegenerateLine("spanning points coincide projectively")
    s, t = MultiPoly.var(0, 2, ("s", "t"), F), MultiPoly.var(1, 2, ("s", "t"), F)
    subs = [s * A[i] + t * B[i] for i in range(4)]
    R = P.compose(subs)
    return BinaryQuartic(tuple(R.coefficient((4 - i, i)) for i in range(5)))


def hessian(P: MultiPoly, pt) -> list[list]:
    """Matrix of second partials of P evaluated at pt."""
    H = P.hessian_matrix()
    return [[h.evaluate(pt) for h in row] for row in H]


class ParamForm:
    """sum_k t^k * coeffs[k], each coefficient a MultiPoly in the space variables."""

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.coeffs = coeffs

    @classmethod
    def from_poly(cls, P: MultiPoly, t_index: int) -> "ParamForm":
        parts = P.coefficients_in(t_index)
        deg = max(parts, default=-1)
        zero = P.like().drop_var(t_index)
        return cls([parts[k].drop_var(t_index) if k in parts else zero for k in range(deg + 1)])

    @property
    def deg_t(self) -> int:
        return len(self.coeffs) - 1

    @property
    def deg_x(self) -> int:
        return max((c.degree for c in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_homogeneous(self) -> bool:
        degs = {c.degree for c in self.coeffs if c}
        return len(degs) <= 1 and all(c.is_homogeneous for c in self.coeffs)

    def divide_by_t(self) -> "ParamForm":
        if not self.coeffs or self.coeffs[0]:
            raise NotDivisible("form is not divisible by t")
        return ParamForm(self.coeffs[1:])

    def evaluate_t(self, t):
        acc = None
        for k, c in enumerate(self.coeffs):
            term = c * (t ** k)
            acc = term if acc is None else acc + term
        return acc


def sylvester_matrix(f: ParamForm, g: ParamForm, m: int | None = None, n: int | None = None) -> list[list[MultiPoly]]:
    """Sylvester matrix for formal t-degrees m >= deg f, n >= deg g."""
    m = f.deg_t if m is None else m
    n = g.deg_t if n is None else n
    if m < f.deg_t or n < g.deg_t:
        raise ValueError("formal degree below the actual degree")
    size = m + n
    proto = (f.coeffs or g.coeffs)[0]
    zero = proto.like()
    fc = f.coeffs + [zero] * (m + 1 - len(f.coeffs))
    gc = g.coeffs + [zero] * (n + 1 - len(g.coeffs))
    rows = []
    for i in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[i + k] = fc[m - k]
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[i + k] = gc[n - k]
        rows.append(row)
    return rows


def poly_matrix_det(M) -> MultiPoly:
    """Bareiss fraction-free elimination with exact multivariate division."""
    n = len(M)
    if n == 0:
        raise ValueError("empty matrix")
    A = [list(r) for r in M]
    proto = A[0][0]
    sign = 1
    prev = None
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((r for r in range(k + 1, n) if A[r][k]), None)
            if swap is None:
                return proto.like()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = num if prev is None else num.exact_div(prev)
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return d if sign == 1 else -d


def _det_degree_bound(M) -> int:
    rows = sum(max((e.degree for e in row), default=0) for row in M)
    cols = sum(max((M[i][j].degree for i in range(len(M))), default=0) for j in range(len(M)))
    return max(0, min(rows, cols))


def det_by_interpolation(M, F: FieldSpec, degree: int | None = None, homogeneous: bool = False) -> MultiPoly:
    """Determinant of a polynomial matrix by evaluation on a grid and interpolation.

    ``degree`` bounds the total degree of the result (default: row/column sum
    bound).  When ``homogeneous`` is set the result is known to be homogeneous
    of exactly ``degree`` and the last variable is dehomogenised away.
    """
    from .vec import CompiledPoly, VecField, batched_det, interpolate_grid, inverse_vandermonde

    n = len(M)
    proto = M[0][0]
    nv = proto.nvars
    D = _det_degree_bound(M) if degree is None else degree
    if D + 1 > F.q:
        raise ValueError(f"degree {D} too large to interpolate over {F}")
    vf = VecField(F)
    free = nv - 1 if homogeneous else nv
    nodes = list(range(D + 1))
    grid = np.array(list(product(nodes, repeat=free)), dtype=np.int64).reshape(-1, free)
    if homogeneous:
        pts = np.concatenate([grid, np.ones((grid.shape[0], 1), dtype=np.int64)], axis=1)
    else:
        pts = grid
    N = pts.shape[0]
    mats = np.zeros((N, n, n), dtype=np.int64)
    cache: dict = {}
    for i in range(n):
        for j in range(n):
            e = M[i][j]
            if not e:
                continue
            key = id(e)
            if key not in cache:
                cache[key] = CompiledPoly(e.to_field(F) if e.domain is None else e, F)(pts)
            mats[:, i, j] = cache[key]
    vals = batched_det(vf, mats).reshape((D + 1,) * free) if free else batched_det(vf, mats)
    if free == 0:
        return proto.like({(0,) * nv: F.decode(int(vals[0]))}) if int(vals[0]) else proto.like()
    coeffs = interpolate_grid(vf, vals, inverse_vandermonde(F, nodes))
    terms = {}
    for idx in zip(*np.nonzero(coeffs)):
        e = tuple(int(k) for k in idx)
        c = F.decode(int(coeffs[idx]))
        if homogeneous:
            s = sum(e)
            if s > D:
                raise ArithmeticError("interpolated polynomial exceeds the homogeneous degree")
            e = e + (D - s,)
        elif sum(e) > D:
            raise ArithmeticError("interpolated polynomial exceeds the degree bound")
        terms[e] = c
    return MultiPoly(terms, nv, proto.names, F)


def sylvester_resultant(f: ParamForm, g: ParamForm, method: str = "auto", degrees=None) -> MultiPoly:
    """Res_t(f, g) as the determinant of the Sylvester matrix (sign not normalised).

    ``method`` is "bareiss", "interpolate" or "auto" (interpolation when both
    forms are homogeneous over a large enough finite field).  ``degrees``
    gives formal t-degrees (m, n); vanishing leading coefficients are then
    kept, which is the resultant of the forms homogenised in t.
    """
    if f.is_zero() and g.is_zero():
        raise BothZero("both forms vanish identically in t")
    proto = (f.coeffs or g.coeffs)[0]
    m, n = degrees if degrees is not None else (f.deg_t, g.deg_t)
    if f.is_zero() or g.is_zero():
        return proto.like()
    if m == 0 and n == 0:
        return proto.constant(1)
    M = sylvester_matrix(f, g, m, n)
    F = proto.domain
    homog = f.is_homogeneous() and g.is_homogeneous()
    D = n * f.deg_x + m * g.deg_x
    if method == "auto":
        method = "interpolate" if (F is not None and homog and D + 1 <= F.q and proto.nvars > 1) else "bareiss"
    if method == "interpolate":
        if F is None:
            raise DomainMismatch("interpolation needs a finite field")
        if homog:
            return det_by_interpolation(M, F, D, homogeneous=True)
        return det_by_interpolation(M, F)
    return poly_matrix_det(M)


def degree_bound_resultant(f: ParamForm, g: ParamForm) -> int:
    """deg_t(g)*deg_x(f) + deg_t(f)*deg_x(g)."""
    return g.deg_t * f.deg_x + f.deg_t * g.deg_x


def univariate(coeffs, domain, name: str = "t") -> MultiPoly:
    """Univariate polynomial from a coefficient list (index = power)."""
    return MultiPoly({(k,): domain.element(c) if domain is not None else Fraction(c)
                      for k, c in enumerate(coeffs)}, 1, (name,), domain)


def univariate_coeffs(P: MultiPoly) -> list:
    if P.nvars != 1:
        raise ValueError("not univariate")
    d = P.degree
    return [P.coefficient((k,)) for k in range(d + 1)]


def monomial_count(nvars: int, degree: int) -> int:
    return comb(degree + nvars - 1, nvars - 1)
