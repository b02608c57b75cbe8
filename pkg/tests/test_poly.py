import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from quartlines.errors import BothZero, DomainMismatch, PolynomialSyntaxError, SingularMatrix
from quartlines.field import field_make
from quartlines.geom import ProjLine
from quartlines.poly import (
    MultiPoly,
    ParamForm,
    degree_bound_resultant,
    det_by_interpolation,
    hessian,
    parse_polynomial,
    poly_matrix_det,
    restrict_to_line,
    sylvester_resultant,
)
from quartlines.linalg import rank

EX39 = "x^4 + x*z^3 + y^2*z*w + x*w^3"


def test_parse_examples():
    P = parse_polynomial(EX39)
    assert len(P) == 4
    assert P.is_homogeneous and P.degree == 4
    assert parse_polynomial("x - x").terms == {}
    sq = parse_polynomial("(x+y)^2")
    assert len(sq) == 3
    assert sq.coefficient((1, 1, 0, 0)) == 2


def test_non_homogeneous_flag():
    assert not parse_polynomial("x^2 + y").is_homogeneous


@pytest.mark.parametrize("text,pos", [("x +* y", 3), ("2x", 1), ("(x + y", 6), ("x^", 2)])
def test_syntax_error_position(text, pos):
    with pytest.raises(PolynomialSyntaxError) as exc:
        parse_polynomial(text)
    assert exc.value.pos == pos


def test_canonical_round_trip():
    P = parse_polynomial("(w*z+y*w+y*z-10/3*x*y-4*y^2)*x^2 + sqrt(7)*z^4")
    assert parse_polynomial(P.to_str()) == P
    assert parse_polynomial(P.to_str()).to_str() == P.to_str()


def test_evaluate_examples():
    F7 = field_make(7)
    P = parse_polynomial(EX39, domain=F7)
    assert P.evaluate([0, 0, 0, 1]) == 0
    Q = parse_polynomial("x^2 + y*w", domain=F7)
    assert Q.evaluate([1, 2, 0, 3]) == 0


def test_evaluate_domain_mismatch():
    P = parse_polynomial("x^2", domain=field_make(7))
    with pytest.raises(DomainMismatch):
        P.evaluate([field_make(11).one, 0, 0, 0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=4, max_size=4), st.integers(1, 12))
def test_homogeneity_scaling(pt, lam):
    F = field_make(13)
    P = parse_polynomial(EX39, domain=F)
    scaled = [lam * c for c in pt]
    assert P.evaluate(scaled) == F.element(lam) ** 4 * P.evaluate(pt)


def test_gradient_examples():
    x4 = parse_polynomial("x^4")
    assert x4.gradient()[0] == parse_polynomial("4*x^3")
    assert all(g.is_zero() for g in x4.gradient()[1:])
    g = parse_polynomial("w^2*z^2").gradient()
    assert g[2] == parse_polynomial("2*w^2*z") and g[3] == parse_polynomial("2*w*z^2")


def test_hessian_examples():
    F = field_make(13)
    H = hessian(parse_polynomial("x^2+y^2+z^2+w^2", domain=F), [1, 5, 7, 2])
    assert H == [[2 if i == j else 0 for j in range(4)] for i in range(4)]
    assert rank(hessian(parse_polynomial("x*y - z*w", domain=F), [3, 1, 4, 1])) == 4


def test_hessian_rank_drops_on_double_line(corpus):
    F = field_make(13)
    P = corpus["ex_doubleline27"].over(F)
    for t in F.elements():
        assert rank(hessian(P, [0, 0, 1, t])) <= 2


def test_substitute_linear(corpus):
    F = field_make(13)
    P = corpus["ex_q4_20"].over(F)
    ident = [[int(i == j) for j in range(4)] for i in range(4)]
    assert P.substitute_linear(ident) == P
    swap = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    assert P.substitute_linear(swap) == P
    with pytest.raises(SingularMatrix):
        P.substitute_linear([[1, 0, 0, 0]] * 4)


def test_restrict_to_line_examples():
    F = field_make(13)
    e = [[F.element(int(i == j)) for j in range(4)] for i in range(4)]
    q5 = parse_polynomial("w*(y^3 + z*(x*y + y^2)) + z^2*w^2 + x^3*z + y^4", domain=F)
    assert restrict_to_line(q5, ProjLine(e[0], e[3])).is_zero()  # {y = z = 0}
    assert restrict_to_line(parse_polynomial("x^4", domain=F), ProjLine(e[1], e[2])).is_zero()
    fermat = parse_polynomial("x^4+y^4+z^4+w^4", domain=F)
    assert restrict_to_line(fermat, ProjLine(e[0], e[1])).coeffs == (1, 0, 0, 0, 1)


def _form(text, F, names=("t", "x", "y")):
    P = parse_polynomial(text, domain=F, variables=names)
    return ParamForm.from_poly(P, 0)


def test_linear_resultant():
    F = field_make(13)
    R = sylvester_resultant(_form("t - x", F), _form("t - y", F))
    target = parse_polynomial("x - y", domain=F, variables=("x", "y"))
    assert R == target or R == -target


def test_resultant_degree_bound():
    F = field_make(101)
    rng = random.Random(3)

    def rand_form(dt, dx):
        terms = {}
        for k in range(dt + 1):
            for i in range(dx + 1):
                terms[(k, i, dx - i)] = F.element(rng.randrange(1, 101))
        return ParamForm.from_poly(MultiPoly(terms, 3, ("t", "x", "y"), F), 0)

    f, g = rand_form(3, 1), rand_form(4, 2)
    assert degree_bound_resultant(f, g) == 10
    R = sylvester_resultant(f, g)
    assert R.degree <= 10
    assert R == sylvester_resultant(f, g, method="bareiss")


def test_resultant_vanishes_at_common_root():
    F = field_make(7)
    f = _form("t^2 - x*t + y", F)
    g = _form("t^3 + x + y", F)
    R = sylvester_resultant(f, g)
    hits = 0
    for x, y in itertools.product(F.elements(), repeat=2):
        common = any(not f.evaluate_t(t).evaluate([x, y]) and not g.evaluate_t(t).evaluate([x, y])
                     for t in F.elements())
        if common:
            hits += 1
            assert R.evaluate([x, y]) == 0
    assert hits > 0


def test_resultant_both_zero():
    with pytest.raises(BothZero):
        sylvester_resultant(ParamForm([]), ParamForm([]))


def test_poly_matrix_det():
    F = field_make(13)
    f = parse_polynomial("x + 2*y", domain=F)
    g = parse_polynomial("x*y - w^2", domain=F)
    zero = f.like()
    assert poly_matrix_det([[f, zero], [zero, g]]) == f * g
    assert poly_matrix_det([[f, g], [f, g]]).is_zero()


def test_det_by_interpolation_matches_expansion():
    F = field_make(31)
    gens = [MultiPoly.var(i, 2, ("x", "y"), F) for i in range(2)]
    x, y = gens
    M = [[x + y, x * y, y], [x, y * y + x, x + 3], [y, x, x * x]]
    assert det_by_interpolation(M, F) == poly_matrix_det(M)
