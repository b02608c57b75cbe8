import numpy as np
import pytest

from quartlines.bounds import q5_curve
from quartlines.enumeration import (
    CurveParam,
    LineSet,
    flecnodal_test,
    incidence_graph,
    line_param,
    lines_by_plane_pencil,
    lines_meeting_curve,
    lines_on_surface,
    lines_through_point,
)
from quartlines.errors import CurveNotOnSurface, SingularPoint, SmoothPoint
from quartlines.families import random_q5, random_q6
from quartlines.field import field_make
from quartlines.geom import ProjLine, ProjPoint, enumerate_points, lines_meet, span_plane
from quartlines.poly import MultiPoly, parse_polynomial, restrict_to_line


def pt(F, *c):
    return ProjPoint(c, F)


def random_quartic(F, rng):
    terms = {}
    for i in range(5):
        for j in range(5 - i):
            for k in range(5 - i - j):
                terms[(i, j, k, 4 - i - j - k)] = F.decode(int(rng.integers(F.q)))
    return MultiPoly(terms, 4, domain=F)


def test_soundness_and_order(corpus, F13):
    for name in ("ex_39", "ex_q4_20", "schur"):
        P = corpus[name].over(F13)
        L = lines_on_surface(P, F13)
        keys = [l.key for l in L]
        assert keys == sorted(keys) and len(set(keys)) == len(keys)
        assert all(restrict_to_line(P, l).is_zero() for l in L)


def test_q4_example_section_lines(corpus, F13):
    L = lines_on_surface(corpus["ex_q4_20"], F13)
    i = F13.element(5)
    assert i * i == -1
    z, one = F13.zero, F13.one
    wanted = [ProjLine([z, one, z, z], [z, z, z, one]),        # x = z = 0
              ProjLine([one, z, z, z], [z, z, z, one]),        # y = z = 0
              ProjLine([i, one, z, z], [z, z, z, one]),        # x = i y
              ProjLine([-i, one, z, z], [z, z, z, one])]       # x = -i y
    assert {l.key for l in wanted} <= L.keys()


def test_fermat_over_f5_matches_oracle(corpus, F5):
    P = corpus["fermat"].over(F5)
    L = lines_on_surface(P, F5)
    assert all(restrict_to_line(P, l).is_zero() for l in L)
    assert L.keys() == lines_by_plane_pencil(P, F5).keys()


def test_random_quartics_match_oracle():
    for q in (5, 7):
        F = field_make(q)
        rng = np.random.default_rng(q)
        for _ in range(3):
            P = random_quartic(F, rng)
            assert lines_on_surface(P, F).keys() == lines_by_plane_pencil(P, F).keys()


def test_workers_are_deterministic(corpus, F13):
    a = lines_on_surface(corpus["ex_39"], F13, workers=1)
    b = lines_on_surface(corpus["ex_39"], F13, workers=2)
    assert [l.key for l in a] == [l.key for l in b]


def test_small_field_rejected(corpus):
    with pytest.raises(ValueError):
        lines_on_surface(corpus["fermat"], field_make(3, allow_small=True))


def test_incidence_graph_invariants(corpus, F13):
    L = lines_on_surface(corpus["ex_39"], F13)
    G = incidence_graph(L)
    for i in range(len(L)):
        for j in range(len(L)):
            if i != j:
                meet = lines_meet(L[i], L[j]) is not None
                assert G.graph.has_edge(i, j) == meet
    assert G.valences == [G.graph.degree[i] for i in range(len(L))]
    for quad in G.coplanar_quadruples:
        planes = {tuple(span_plane(L[a], L[b])) for a in quad for b in quad if a < b}
        assert len(planes) == 1
    assert sum(G.valence_histogram().values()) == len(L)


def test_skew_pair_has_no_edges(F13):
    z, one = F13.zero, F13.one
    a = ProjLine([one, z, z, z], [z, one, z, z])
    b = ProjLine([z, z, one, z], [z, z, z, one])
    G = incidence_graph([a, b])
    assert G.graph.number_of_edges() == 0
    assert G.max_disjoint_set() == ([0, 1], True)


def test_max_disjoint_exact_and_greedy(corpus, F13):
    L = lines_on_surface(corpus["ex_39"], F13)
    G = incidence_graph(L)
    exact, is_exact = G.max_disjoint_set()
    greedy, flag = G.max_disjoint_set(exact_limit=0)
    assert is_exact and not flag
    assert len(greedy) <= len(exact)
    for s in (exact, greedy):
        assert all(not G.graph.has_edge(i, j) for i in s for j in s)


def test_lines_through_triple_point(corpus):
    F = field_make(29)
    lines = lines_through_point(corpus["ex_triple31"].over(F), pt(F, 0, 0, 0, 1), F)
    assert len(lines) == 12
    # they hit {w = 0} at the twelve points where Q3 = Q4 = 0
    Q3 = parse_polynomial("(x+y+z)^3+x*y*z", domain=F, variables=("x", "y", "z"))
    Q4 = parse_polynomial("(x+y+z)*(x-y)*(y-z)*(z-x)", domain=F, variables=("x", "y", "z"))
    for ln in lines:
        a, b = ln.a.coords, ln.b.coords
        foot = [b[3] * u - a[3] * v for u, v in zip(a, b)][:3]
        assert not Q3.evaluate(foot) and not Q4.evaluate(foot)


def test_lines_through_q5_and_q6_points(F13):
    O = pt(F13, 0, 0, 0, 1)
    z, one = F13.zero, F13.one
    for seed in range(3):
        rng = np.random.default_rng(seed)
        assert lines_through_point(random_q5(F13, rng), O, F13) == [ProjLine([one, z, z, z], [z, z, z, one])]
        assert lines_through_point(random_q6(F13, rng), O, F13) == []


def test_lines_through_smooth_point(corpus, F13):
    P = corpus["ex_39"].over(F13)
    with pytest.raises(SmoothPoint):
        lines_through_point(P, pt(F13, 0, 0, 0, 1), F13)


def brute_force_flecnodal(P, p, F):
    # S(p + t d) - t^4 S(d) has no constant term and degree <= 3,
    # so it vanishes identically iff it vanishes at t = 1, 2, 3
    for d in enumerate_points(F, 3):
        if d == p:
            continue
        sd = P.evaluate(d.coords)
        if all(P.evaluate([a + t * b for a, b in zip(p.coords, d.coords)]) == sd * t ** 4
               for t in (F.element(1), F.element(2), F.element(3))):
            return True
    return False


def test_flecnodal_true_on_lines(corpus, F13):
    P = corpus["ex_39"].over(F13)
    L = lines_on_surface(P, F13)
    for ln in list(L)[:5]:
        for p in list(ln.points())[:4]:
            if any(g.evaluate(p.coords) for g in P.gradient()):
                ok, witness = flecnodal_test(P, p, F13)
                assert ok and witness.contains(p)


def test_flecnodal_false_matches_brute_force(corpus):
    # over F_7 and F_13 every rational point of ex_39 lies on a line; F_19 has others
    F = field_make(19)
    P = corpus["ex_39"].over(F)
    on_lines = {p for l in lines_on_surface(P, F) for p in l.points()}
    smooth = [p for p in enumerate_points(F, 3)
              if not P.evaluate(p.coords) and p not in on_lines and any(g.evaluate(p.coords) for g in P.gradient())]
    seen_false = 0
    for p in smooth[::5][:12]:
        ok, _ = flecnodal_test(P, p, F)
        assert ok == brute_force_flecnodal(P, p, F)
        seen_false += not ok
    assert seen_false > 0


def test_flecnodal_at_singular_point(corpus, F13):
    with pytest.raises(SingularPoint):
        flecnodal_test(corpus["ex_39"].over(F13), pt(F13, 0, 1, 0, 0), F13)


def test_lines_meeting_a_line_are_its_neighbours(corpus, F13):
    L = lines_on_surface(corpus["ex_39"], F13)
    G = incidence_graph(L)
    for i in range(0, len(L), 5):
        n, sub = lines_meeting_curve(L, line_param(L[i]))
        assert n == G.valence(i)
        assert {G.index_of(l) for l in sub} == set(G.graph[i])


def test_lines_meeting_empty_set(F13):
    t = MultiPoly.var(0, 1, ("t",), F13)
    C = CurveParam([t, t.constant(F13.one), t.like(), t.like()], "line")
    assert lines_meeting_curve(LineSet([], F13), C) == (0, [])


def test_every_q5_line_meets_residual_conic(F13):
    checked = 0
    for seed in range(40):
        S = random_q5(F13, np.random.default_rng(seed), h220="one")
        L = lines_on_surface(S, F13)
        if len(L) < 2:
            continue
        n, sub = lines_meeting_curve(L, q5_curve(S, F13))
        z, one = F13.zero, F13.one
        ell0 = ProjLine([one, z, z, z], [z, z, z, one])
        assert L.keys() - {ell0.key} <= {l.key for l in sub}
        checked += 1
    assert checked > 0


def test_curve_not_on_surface(corpus, F13):
    L = lines_on_surface(corpus["ex_39"], F13)
    t = MultiPoly.var(0, 1, ("t",), F13)
    C = CurveParam([t, t.constant(F13.one), t, t], "line")
    with pytest.raises(CurveNotOnSurface):
        lines_meeting_curve(L, C)
