"""Certificates for line bounds: residual cubic pencils, principal-line resultants,
and the Hessian pencil of a quartic with a double line.

Everything is computed over the finite field of the enumeration it is meant to
cross-check.  Divisibility is always verified by exact division.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import CurveNotOnSurface, DegenerateCurve, LineMissing, NotDivisible, WrongShape, ZeroResultant
from .field import FieldSpec
from .linalg import matmul, nullspace
from .poly import MultiPoly, ParamForm, poly_matrix_det, sylvester_resultant
from .surface import as_poly, normal_form_shape
from .vec import CompiledPoly
from .enumeration import CurveParam
from .geom import ProjLine, ProjPoint

XYZW = ("x", "y", "z", "w")


def _univ_roots(P: MultiPoly, F: FieldSpec) -> list:
    """F-rational roots of a univariate polynomial (by evaluation)."""
    return [t for t in F.elements() if not P.evaluate([t])]


def _as_univariate(P: MultiPoly, i: int, name: str = "l") -> MultiPoly:
    """Keep only variable i (all other exponents must be zero)."""
    if any(e[k] for e in P.terms for k in range(P.nvars) if k != i):
        raise WrongShape("expression depends on more than one variable")
    return MultiPoly({(e[i],): c for e, c in P.terms.items()}, 1, (name,), P.domain)


# ---------------------------------------------------------------------------
# residual cubic pencil for Q4


@dataclass
class PencilCertificate:
    b3: MultiPoly | None
    b4: MultiPoly | None
    common_roots: list = dc_field(default_factory=list)
    degenerate: str | None = None  # subcase label when q02 = 0

    @property
    def b3_zero(self) -> bool:
        return self.b3 is not None and self.b3.is_zero()

    def b4_roots(self, F: FieldSpec) -> list:
        """Distinct F-rational roots of b4."""
        if self.b4 is None or self.b4.is_zero():
            return []
        return _univ_roots(self.b4, F)

    def to_json(self) -> dict:
        return {"b3": None if self.b3 is None else self.b3.to_str(),
                "b4": None if self.b4 is None else self.b4.to_str(),
                "common_roots": [str(r) for r in self.common_roots],
                "degenerate": self.degenerate}


def residual_cubic_pencil(S, F: FieldSpec) -> PencilCertificate:
    """Pencil of planes x = lam*z through the line {x = z = 0} of a Q4 normal form.

    Each plane cuts z * C_lam; C_lam meets the line again at P_lam, and the
    tangent line of C_lam there meets C_lam in z^2 (b3(lam) y + b4(lam) z).
    """
    N = as_poly(S, F)
    if normal_form_shape(N) != "Q4":
        raise WrongShape("expected w^2 z^2 + w z Q2 + H4")
    if N.coefficient((0, 4, 0, 0)):
        raise LineMissing("h040 != 0: the line {x = z = 0} is not on the surface")
    q02 = N.coefficient((0, 2, 1, 1))
    h031 = N.coefficient((0, 3, 1, 0))
    h130 = N.coefficient((1, 3, 0, 0))
    names = ("l", "y", "z", "w")
    l, y, z, w = (MultiPoly.var(i, 4, names, F) for i in range(4))
    C = N.compose([l * z, y, z, w], 4, names).div_monomial((0, 0, 1, 0))
    if not q02:
        label = "q02=0,h130=0" if not h130 else "q02=0,h130!=0"
        return PencilCertificate(None, None, [], degenerate=label)
    # P_lam = (y, z, w) = (1, 0, w0(lam))
    w0 = -(MultiPoly.const(h031, 4, names, F) + l * h130) / q02
    one = MultiPoly.const(F.one, 4, names, F)
    zero = MultiPoly.const(F.zero, 4, names, F)
    at_P = [l, one, zero, w0]
    Cz = C.diff(2).compose(at_P, 4, names)
    Cw = C.diff(3).compose(at_P, 4, names)
    if Cw != MultiPoly.const(q02, 4, names, F):
        raise WrongShape("unexpected w-derivative of the residual cubic")
    # tangent line: (y, z, w) = y*P_lam + z*(0, 1, -Cz/Cw)
    restricted = C.compose([l, y, z, y * w0 - z * Cz / q02], 4, names)
    parts = restricted.coefficients_in(1)  # by powers of y
    for k in (3, 2):
        if k in parts and parts[k]:
            raise WrongShape("tangent line does not have contact 2 with the residual cubic")
    b3 = parts.get(1, l.like()).div_monomial((0, 0, 2, 0)) if 1 in parts else l.like()
    b4 = parts.get(0, l.like()).div_monomial((0, 0, 3, 0)) if 0 in parts else l.like()
    b3u, b4u = _as_univariate(b3, 0), _as_univariate(b4, 0)
    if b3u.degree > 3 or b4u.degree > 4:
        raise WrongShape("pencil coefficients exceed their degree bounds")
    roots = [t for t in F.elements() if not b3u.evaluate([t]) and not b4u.evaluate([t])]
    return PencilCertificate(b3u, b4u, roots)


# ---------------------------------------------------------------------------
# principal lines along a rational curve


@dataclass
class ResultantCertificate:
    R: MultiPoly
    monomial_divisor: str
    quotient: MultiPoly
    degree: int
    degree_bound: int
    deg_t_l: int
    deg_t_q: int
    nondegenerate: bool
    samples: list = dc_field(default_factory=list)
    vanishing: dict = dc_field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.nondegenerate and self.degree <= self.degree_bound and all(self.vanishing.values())

    def to_json(self) -> dict:
        return {"divisor": self.monomial_divisor, "degree": self.degree, "degree_bound": self.degree_bound,
                "deg_t_l": self.deg_t_l, "deg_t_q": self.deg_t_q,
                "quotient_degree": self.quotient.degree, "nondegenerate": self.nondegenerate,
                "samples": [str(s) for s in self.samples],
                "vanishing": dict(sorted(self.vanishing.items())), "verified": self.verified}


def principal_forms(S, C: CurveParam, F: FieldSpec):
    """(l_t, q_t) as polynomials in (t, x, y, z, w)."""
    P = as_poly(S, F)
    names = ("t",) + XYZW
    t = MultiPoly.var(0, 5, names, F)
    X = [MultiPoly.var(i + 1, 5, names, F) for i in range(4)]
    curve = [c.compose([t], 5, names) for c in C.coords]
    grad = [g.compose(curve, 5, names) for g in P.gradient()]
    H = [[h.compose(curve, 5, names) for h in row] for row in P.hessian_matrix()]
    lt = t.like()
    for g, x in zip(grad, X):
        lt = lt + g * x
    qt = t.like()
    for i in range(4):
        for j in range(4):
            qt = qt + H[i][j] * X[i] * X[j]
    return lt, qt


def _tangent_not_in_hessian(S, pt, F) -> bool:
    """T_P is not a component of V_P: the Hessian form is nonzero on the tangent plane."""
    P = as_poly(S, F)
    g = [d.evaluate(pt) for d in P.gradient()]
    if not any(g):
        return False
    H = [[h.evaluate(pt) for h in row] for row in P.hessian_matrix()]
    basis = nullspace([g])
    for a in basis:
        for b in basis:
            if sum((a[i] * H[i][j] * b[j] for i in range(4) for j in range(4)), F.zero):
                return True
    return False


def principal_resultant(S, C: CurveParam, F: FieldSpec, divisor=(0, 0, 2, 0), divide_t: bool = False,
                        samples=None, vanish_on=None, degrees=None) -> ResultantCertificate:
    """Res_t(l_t, q_t) with its monomial-divisibility and degree certificate.

    ``divisor`` is the exponent of the monomial expected to divide the
    resultant (z^2 by default).  With ``divide_t`` the tangent form is first
    divided by t (the curve passes through a singular point at t = 0).
    ``vanish_on`` maps labels to point lists on which all partials of the
    quotient must vanish.  ``degrees`` fixes the formal t-degrees of (l_t, q_t)
    for a family, so that specialisations with a dropped leading coefficient
    keep the factor the generic resultant has.
    """
    if not as_poly(S, F).compose(C.coords, 1, ("t",)).is_zero():
        raise CurveNotOnSurface("parametrised curve is not on the surface")
    lt, qt = principal_forms(S, C, F)
    lf, qf = ParamForm.from_poly(lt, 0), ParamForm.from_poly(qt, 0)
    if divide_t:
        try:
            lf = lf.divide_by_t()
        except NotDivisible as exc:
            raise DegenerateCurve("tangent form is not divisible by t") from exc
    m, n = degrees if degrees is not None else (lf.deg_t, qf.deg_t)
    if m < lf.deg_t or n < qf.deg_t:
        raise WrongShape(f"forms exceed the formal degrees {degrees}: ({lf.deg_t}, {qf.deg_t})")
    bound = n + 2 * m
    # nondegeneracy at sampled parameters
    if samples is None:
        samples = [t for t in F.elements() if t][:3] if F.q > 3 else list(F.elements())
    checks = []
    for s in samples:
        pt = [c.evaluate([s]) for c in C.coords]
        checks.append(_tangent_not_in_hessian(S, pt, F))
    nondeg = all(checks)
    if not nondeg:
        raise DegenerateCurve(f"tangent plane lies in the Hessian quadric at a sampled parameter: {checks}")
    if lf.is_zero() or qf.is_zero():
        raise ZeroResultant("a principal form vanishes identically along the curve")
    R = sylvester_resultant(lf, qf, degrees=(m, n))
    if R.is_zero():
        raise ZeroResultant("resultant vanishes identically")
    quotient = R.div_monomial(divisor)
    label = MultiPoly.var(0, 4, XYZW, F).monomial_str(divisor)
    vanishing = {}
    grads = [CompiledPoly(g, F) for g in quotient.gradient() if g]
    for name, pts in (vanish_on or {}).items():
        arr = np.array([p.key for p in pts], dtype=np.int64).reshape(-1, 4)
        vanishing[name] = all(not g(arr).any() for g in grads)
    return ResultantCertificate(R, label, quotient, R.degree, bound, m, n, nondeg,
                                list(samples), vanishing)


def q5_curve(N: MultiPoly, F: FieldSpec) -> CurveParam:
    """Curve residual to the line {y = z = 0} in the section z = 0 of a Q5 normal form.

    For h220 = 1 the conic (t : 1 : 0 : -t^2 - h130 t - h040); for h220 = 0 the
    line (t : 1 : 0 : -h130 t - h040).
    """
    h220 = N.coefficient((2, 2, 0, 0))
    h130 = N.coefficient((1, 3, 0, 0))
    h040 = N.coefficient((0, 4, 0, 0))
    t = MultiPoly.var(0, 1, ("t",), F)
    one = t.constant(F.one)
    zero = t.like()
    if h220:
        if h220 != 1:
            raise WrongShape("normalise h220 to 1 first")
        return CurveParam([t, one, zero, -(t * t) - t * h130 - one * h040], "conic",
                          extra_points=[ProjPoint((F.zero, F.zero, F.zero, F.one))])
    return CurveParam([t, one, zero, -(t * h130) - one * h040], "line",
                      extra_points=[ProjPoint((F.one, F.zero, F.zero, -h130))])


def double_line_conic(F: FieldSpec) -> CurveParam:
    """The conic (0 : t : 1 : t^2), residual to the double line {x = y = 0} in {x = 0}."""
    t = MultiPoly.var(0, 1, ("t",), F)
    one = t.constant(F.one)
    return CurveParam([t.like(), t, one, t * t], "conic",
                      extra_points=[ProjPoint((F.zero, F.zero, F.zero, F.one))])


# ---------------------------------------------------------------------------
# double line


@dataclass
class HessianPencil:
    det: MultiPoly  # univariate in lam
    roots: list
    at_infinity: bool  # the plane x = 0 (lam = infinity) is a split member

    def to_json(self) -> dict:
        return {"det": self.det.to_str(), "degree": self.det.degree,
                "roots": [str(r) for r in self.roots], "at_infinity": self.at_infinity}


def _pencil_det(P: MultiPoly, F: FieldSpec, a: int, b: int) -> MultiPoly:
    """det Hess of P(x_a = s, x_b = lam*s, ...)/s^2 in the remaining variables."""
    names = ("l", "s", "u", "v")
    l, s, u, v = (MultiPoly.var(i, 4, names, F) for i in range(4))
    others = [k for k in range(4) if k not in (a, b)]
    subs = [None] * 4
    subs[a] = s
    subs[b] = l * s
    subs[others[0]] = u
    subs[others[1]] = v
    try:
        G = P.compose(subs, 4, names).div_monomial((0, 2, 0, 0))
    except NotDivisible as exc:
        raise WrongShape("the surface is not singular along {x = y = 0}") from exc
    if any(sum(e[1:]) != 2 for e in G.terms):
        raise WrongShape("the pencil members are not conics")
    H = [[G.diff(i).diff(j) for j in (1, 2, 3)] for i in (1, 2, 3)]
    return _as_univariate(poly_matrix_det(H), 0)


def double_line_hessian_pencil(S, F: FieldSpec) -> HessianPencil:
    """Singular members of the conic pencil cut by the planes y = lam x."""
    P = as_poly(S, F)
    det = _pencil_det(P, F, 0, 1)
    if det.degree > 8:
        raise WrongShape(f"Hessian pencil has degree {det.degree} > 8")
    at_inf = _pencil_det(P, F, 1, 0).evaluate([F.zero]) == 0
    return HessianPencil(det, _univ_roots(det, F) if not det.is_zero() else list(F.elements()), at_inf)


# formal t-degrees (deg l_t, deg q_t) for the standard curves
Q5_CONIC_DEGREES = (3, 4)
Q5_LINE_DEGREES = (3, 2)
EQ18_CONIC_DEGREES = (4, 4)


def _line_points(F, a, b):
    return list(ProjLine(a, b).points())


def certify_q5(N: MultiPoly, F: FieldSpec) -> ResultantCertificate:
    """z^2-divisibility certificate along the curve residual to {y = z = 0}."""
    h220 = N.coefficient((2, 2, 0, 0))
    if h220 and h220 != 1:
        # rescale x so that h220 = 1 is not possible in general; scale the pencil instead
        raise WrongShape("h220 must be 0 or 1")
    C = q5_curve(N, F)
    zero, one = F.zero, F.one
    ell0 = _line_points(F, [one, zero, zero, zero], [zero, zero, zero, one])
    curve_pts = C.points(F)
    if h220:
        return principal_resultant(N, C, F, divisor=(0, 0, 2, 0), degrees=Q5_CONIC_DEGREES,
                                   vanish_on={"ell0": ell0, "C": curve_pts})
    return principal_resultant(N, C, F, divisor=(0, 0, 2, 0), degrees=Q5_LINE_DEGREES,
                               vanish_on={"ell1": curve_pts})


def certify_eq18(N: MultiPoly, F: FieldSpec) -> ResultantCertificate:
    """x^2-divisibility certificate along the conic (0 : t : 1 : t^2)."""
    zero, one = F.zero, F.one
    ell0 = _line_points(F, [zero, zero, one, zero], [zero, zero, zero, one])
    return principal_resultant(N, double_line_conic(F), F, divisor=(2, 0, 0, 0), divide_t=True,
                               degrees=EQ18_CONIC_DEGREES, vanish_on={"singular_line": ell0})


def to_double_line_form(S, F: FieldSpec):
    """Change (z, w) so that Q02(0, y, z, w) becomes c (z w - y^2).

    S must be singular along {x = y = 0}, and the residual conic in {x = 0}
    must meet that line in two distinct F-points.  Returns (N, M) with
    N = S(M X).
    """
    P = as_poly(S, F)
    if any(e[0] + e[1] < 2 for e in P.terms):
        raise WrongShape("the surface is not singular along {x = y = 0}")
    Q = {e: c for e, c in P.terms.items() if e[0] == 0 and e[1] >= 2}
    a = Q.get((0, 2, 2, 0), F.zero)
    b = Q.get((0, 2, 1, 1), F.zero)
    c = Q.get((0, 2, 0, 2), F.zero)
    if not (a or b or c):
        raise WrongShape("the section x = 0 contains the double line with multiplicity > 2")
    roots = [(z, w) for z, w in [(F.one, t) for t in F.elements()] + [(F.zero, F.one)]
             if not (a * z * z + b * z * w + c * w * w)]
    if len(roots) != 2:
        raise WrongShape("the residual conic does not meet the double line in two F-points")
    (z1, w1), (z2, w2) = roots
    one, zero = F.one, F.zero
    M1 = [[one, zero, zero, zero], [zero, one, zero, zero],
          [zero, zero, z1, z2], [zero, zero, w1, w2]]
    N1 = P.substitute_linear(M1)
    B = N1.coefficient((0, 2, 1, 1))
    al = N1.coefficient((0, 3, 1, 0))
    be = N1.coefficient((0, 3, 0, 1))
    M2 = [[one, zero, zero, zero], [zero, one, zero, zero],
          [zero, -be / B, one, zero], [zero, -al / B, zero, one]]
    N2 = N1.substitute_linear(M2)
    d = N2.coefficient((0, 4, 0, 0))
    if not d:
        raise WrongShape("the residual conic is reducible")
    M3 = [[one, zero, zero, zero], [zero, one, zero, zero],
          [zero, zero, -d / B, zero], [zero, zero, zero, one]]
    N = N2.substitute_linear(M3)
    M = matmul(matmul(M1, M2), M3)
    cz = N.coefficient((0, 2, 1, 1))
    if N.coefficient((0, 4, 0, 0)) != -cz or any(
            N.coefficient(e) for e in ((0, 3, 1, 0), (0, 3, 0, 1), (0, 2, 2, 0), (0, 2, 0, 2))):
        raise WrongShape("normalisation failed")
    return N, M


def lines_on_quotient(cert: ResultantCertificate, lines) -> dict:
    """For each line, whether the quotient vanishes at five of its points."""
    Qt = cert.quotient
    out = {}
    for ln in lines:
        a, b = ln.a.coords, ln.b.coords
        pts = [a, b] + [[x + y * k for x, y in zip(a, b)] for k in (1, 2, 3)]
        out[ln.key] = all(not Qt.evaluate(p) for p in pts)
    return out
