import numpy as np
import pytest

from quartlines.bounds import (
    EQ18_CONIC_DEGREES,
    certify_eq18,
    certify_q5,
    double_line_conic,
    double_line_hessian_pencil,
    lines_on_quotient,
    principal_resultant,
    q5_curve,
    residual_cubic_pencil,
    to_double_line_form,
)
from quartlines.enumeration import (
    CurveParam,
    incidence_graph,
    line_param,
    lines_meeting_curve,
    lines_on_surface,
)
from quartlines.errors import CurveNotOnSurface, DegenerateCurve, LineMissing, WrongShape
from quartlines.families import random_eq18, random_q4, random_q5
from quartlines.field import field_make
from quartlines.geom import ProjLine, ProjPoint
from quartlines.poly import MultiPoly, parse_polynomial


def ell(F, a, b):
    return ProjLine(ProjPoint(a, F), ProjPoint(b, F))


def q4_with_line(F, rng):
    P = random_q4(F, rng)
    return P.like({e: c for e, c in P.terms.items() if e != (0, 4, 0, 0)})


def test_pencil_on_q4_example(corpus):
    for p in (17, 41):
        F = field_make(p)
        cert = residual_cubic_pencil(corpus["ex_q4_20"], F)
        assert cert.b3_zero
        assert cert.b4.degree == 4
        assert len(cert.b4_roots(F)) == 4


def test_pencil_degrees_on_random_q4(F13):
    rng = np.random.default_rng(0)
    for _ in range(20):
        cert = residual_cubic_pencil(q4_with_line(F13, rng), F13)
        if cert.degenerate is None:
            assert cert.b3.degree <= 3 and cert.b4.degree <= 4


def test_pencil_errors(F13):
    rng = np.random.default_rng(1)
    with pytest.raises(WrongShape):
        residual_cubic_pencil(random_q5(F13, rng), F13)
    P = q4_with_line(F13, rng) + MultiPoly({(0, 4, 0, 0): F13.one}, 4, domain=F13)
    with pytest.raises(LineMissing):
        residual_cubic_pencil(P, F13)


def test_pencil_degenerate_case_lines_through_origin(F13):
    rng = np.random.default_rng(2)
    O = ProjPoint((0, 0, 0, 1), F13)
    ell0 = ell(F13, (0, 1, 0, 0), (0, 0, 0, 1))
    seen = 0
    for _ in range(30):
        P = q4_with_line(F13, rng)
        P = P.like({e: c for e, c in P.terms.items() if e not in ((0, 2, 1, 1), (1, 3, 0, 0))})
        cert = residual_cubic_pencil(P, F13)
        assert cert.degenerate == "q02=0,h130=0"
        _, meet = lines_meeting_curve(lines_on_surface(P, F13), line_param(ell0))
        assert all(l.contains(O) for l in meet)
        seen += len(meet)
    assert seen > 0


def test_pencil_bounds_lines_meeting_the_line(F13):
    """Lines meeting {x = z = 0} away from O are at most the common roots, at most 4."""
    rng = np.random.default_rng(3)
    O = ProjPoint((0, 0, 0, 1), F13)
    ell0 = ell(F13, (0, 1, 0, 0), (0, 0, 0, 1))
    for _ in range(40):
        P = q4_with_line(F13, rng)
        cert = residual_cubic_pencil(P, F13)
        if cert.degenerate is not None:
            continue
        assert not (cert.b3.is_zero() and cert.b4.is_zero())
        _, meet = lines_meeting_curve(lines_on_surface(P, F13), line_param(ell0))
        off = [l for l in meet if not l.contains(O)]
        assert len(off) <= len(cert.common_roots) <= 4


def test_q5_conic_certificate(F13):
    rng = np.random.default_rng(4)
    done = 0
    for _ in range(6):
        N = random_q5(F13, rng, h220="one")
        try:
            cert = certify_q5(N, F13)
        except DegenerateCurve:
            continue
        assert cert.R == cert.quotient * parse_polynomial("z^2", domain=F13)
        assert cert.degree <= 10 and cert.degree <= cert.degree_bound
        assert cert.vanishing == {"C": True, "ell0": True}
        assert cert.verified
        done += 1
    assert done >= 3


def test_q5_line_certificate(F13):
    rng = np.random.default_rng(5)
    done = 0
    for _ in range(6):
        N = random_q5(F13, rng, h220="zero")
        try:
            cert = certify_q5(N, F13)
        except DegenerateCurve:
            continue
        assert cert.R == cert.quotient * parse_polynomial("z^2", domain=F13)
        assert cert.quotient.degree == 6
        assert cert.verified
        done += 1
    assert done >= 3


def test_eq18_certificate(F13):
    rng = np.random.default_rng(6)
    for _ in range(4):
        N = random_eq18(F13, rng)
        cert = certify_eq18(N, F13)
        assert cert.R == cert.quotient * parse_polynomial("x^2", domain=F13)
        assert cert.degree <= 12 and (cert.deg_t_l, cert.deg_t_q) == EQ18_CONIC_DEGREES
        assert cert.verified


def test_lines_meeting_curve_lie_on_quotient(F13):
    rng = np.random.default_rng(7)
    total = 0
    for _ in range(10):
        N = random_q5(F13, rng, h220="one")
        try:
            cert = certify_q5(N, F13)
        except DegenerateCurve:
            continue
        _, meet = lines_meeting_curve(lines_on_surface(N, F13), q5_curve(N, F13))
        assert all(lines_on_quotient(cert, meet).values())
        total += len(meet)
    assert total > 0


def test_resultant_errors(F13):
    rng = np.random.default_rng(8)
    N = random_q5(F13, rng, h220="one")
    t = MultiPoly.var(0, 1, ("t",), F13)
    off = CurveParam([t, t.constant(F13.one), t, t], "line")
    with pytest.raises(CurveNotOnSurface):
        principal_resultant(N, off, F13)


def test_hessian_pencil_on_double_line_example(corpus):
    F = field_make(43)
    P = corpus["ex_doubleline27"].over(F)
    hp = double_line_hessian_pencil(P, F)
    assert hp.det.degree <= 8
    L = lines_on_surface(P, F)
    G = incidence_graph(L)
    sing = G.index_of(ell(F, (0, 0, 1, 0), (0, 0, 0, 1)))
    assert G.valence(sing) == 16
    # every line meeting the double line lies in a split member y = lam x
    planes = {}
    for j in G.graph[sing]:
        a, b = L[j].a.coords, L[j].b.coords
        lam = next((v[1] / v[0] for v in (a, b) if v[0]), None)
        assert lam is not None and all(v[1] == lam * v[0] for v in (a, b))
        planes.setdefault(lam, []).append(j)
    assert set(planes) <= set(hp.roots)
    assert all(len(v) == 2 for v in planes.values())
    assert len(planes) == 8


def test_hessian_pencil_degree_on_random_eq18(F13):
    rng = np.random.default_rng(9)
    for _ in range(10):
        assert double_line_hessian_pencil(random_eq18(F13, rng), F13).det.degree <= 8


def test_hessian_pencil_symmetry(F13):
    Q = parse_polynomial("x^2+y^2+3*x*y+x*z+y*z+2*x*w+2*y*w+z*w+5*z^2+7*w^2", domain=F13)
    S = Q * parse_polynomial("x^2+y^2", domain=F13)
    det = double_line_hessian_pencil(S, F13).det
    for lam in F13.elements():
        if lam:
            assert det.evaluate([1 / lam]) * lam ** 8 == det.evaluate([lam])


def test_hessian_pencil_wrong_shape(corpus, F13):
    with pytest.raises(WrongShape):
        double_line_hessian_pencil(corpus["ex_39"].over(F13), F13)


def test_double_line_form_normalisation(corpus):
    F = field_make(109)
    P = corpus["ex_doubleline27"].over(F)
    N, M = to_double_line_form(P, F)
    assert P.substitute_linear(M) == N
    cert = certify_eq18(N, F)
    assert cert.verified
    _, meet = lines_meeting_curve(lines_on_surface(N, F), double_line_conic(F))
    assert meet and all(lines_on_quotient(cert, meet).values())
    with pytest.raises(WrongShape):
        to_double_line_form(corpus["ex_doubleline27"].over(field_make(43)), field_make(43))
