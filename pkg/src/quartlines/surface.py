"""Quartic surfaces: ingestion, singular points, double-point types, normal forms.

Double points are typed by the splitting lemma: the nondegenerate part of the
local quadratic form is eliminated by solving the corresponding partials as
truncated power series, leaving a residual germ ``g`` in the kernel
variables.  For a rank-1 cone ``g`` is (up to a unit) the branch curve of the
double cover, and its Milnor number is the local intersection multiplicity of
``g_u`` and ``g_v`` (Fulton's algorithm).  All jets are cut at degree ``T``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

import numpy as np

from .errors import (
    LineInCone,
    LineNotOnSurface,
    NotDegree4,
    NotDoublePoint,
    NotHomogeneous,
    NotNormalizable,
    ParseFailure,
    PlaneThroughConeAxis,
    PointNotOnSurface,
)
from .field import FieldSpec
from .geom import ProjLine, ProjPoint, enumerate_points, plane_through
from .linalg import complete_basis, inverse, matmul, nullspace, rank
from .poly import MultiPoly, parse_polynomial, restrict_to_line
from .vec import CompiledPoly

DEFAULT_TRUNCATION = 12
LOCAL = ("x", "y", "z")


@dataclass
class QuarticSurface:
    poly: MultiPoly
    name: str = "unnamed"
    domain: str = "rational"
    source: str = ""
    irreducible: str = "unknown"  # "asserted" for corpus surfaces, "unknown" otherwise

    def __post_init__(self):
        if self.poly.is_zero():
            raise NotDegree4("the zero polynomial is not a surface")
        if not self.poly.is_homogeneous:
            raise NotHomogeneous(f"{self.name}: equation is not homogeneous")
        if self.poly.degree != 4:
            raise NotDegree4(f"{self.name}: degree {self.poly.degree}, expected 4")

    def over(self, F: FieldSpec) -> MultiPoly:
        """Equation with coefficients embedded in F."""
        return self.poly.to_field(F)

    def serialize(self) -> str:
        lines = [f"name: {self.name}"]
        if self.source:
            lines.append(f"source: {self.source}")
        lines.append(f"domain: {self.domain}")
        if self.irreducible != "unknown":
            lines.append(f"irreducible: {self.irreducible}")
        lines.append(self.poly.to_str())
        return "\n".join(lines) + "\n"


def as_poly(S, F: FieldSpec | None = None) -> MultiPoly:
    P = S.poly if isinstance(S, QuarticSurface) else S
    return P.to_field(F) if F is not None else P


def parse_surface(text: str, name: str = "unnamed") -> QuarticSurface:
    meta = {"name": name, "source": "", "domain": "rational", "irreducible": "unknown"}
    body = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition(":")
        if sep and key.strip() in meta and not body:
            meta[key.strip()] = val.strip()
        else:
            body.append(line)
    if not body:
        raise ParseFailure("surface file has no equation line")
    poly = parse_polynomial(" ".join(body))
    dom = meta["domain"]
    if dom != "rational" and not (dom.startswith("surd(") and dom.endswith(")")):
        raise ParseFailure(f"unknown domain {dom!r}")
    return QuarticSurface(poly, meta["name"], dom, meta["source"], meta["irreducible"])


def load_surface(path) -> QuarticSurface:
    path = Path(path)
    if not path.exists():
        candidate = corpus_dir() / path.name
        if candidate.exists():
            path = candidate
    return parse_surface(path.read_text(encoding="utf-8"), name=path.stem)


def corpus_dir() -> Path:
    env = os.environ.get("QUARTIC_CORPUS_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "corpus"


def corpus_surfaces() -> list[QuarticSurface]:
    return [load_surface(p) for p in sorted(corpus_dir().glob("*.quartic"))]


# ---------------------------------------------------------------------------
# singular points


@dataclass
class SingularRecord:
    point: ProjPoint
    multiplicity: int
    tangent_cone: MultiPoly
    classification: str

    def to_json(self) -> dict:
        return {"point": self.point.to_json(), "multiplicity": self.multiplicity,
                "tangent_cone": self.tangent_cone.to_str(), "classification": self.classification}


@dataclass
class SingularCurve:
    kind: str  # "line" | "conic" | "cubic"
    points: list

    def to_json(self) -> dict:
        return {"kind": self.kind, "npoints": len(self.points)}


class SingularLocus(list):
    """List of SingularRecord plus detected curves of singular points."""

    def __init__(self, records=(), curves=()):
        super().__init__(records)
        self.curves = list(curves)

    @property
    def non_isolated(self) -> bool:
        return bool(self.curves)

    def on_curve(self, P: ProjPoint) -> bool:
        return any(P in c.points for c in self.curves)


def _point_array(F: FieldSpec, n: int = 3) -> np.ndarray:
    """All points of P^n(F) as codes, pivot-first order (matches enumerate_points)."""
    q = F.q
    blocks = []
    for pivot in range(n + 1):
        m = n - pivot
        tail = np.array(list(product(range(q), repeat=m)), dtype=np.int64).reshape(q ** m, m)
        head = np.zeros((tail.shape[0], pivot + 1), dtype=np.int64)
        head[:, pivot] = 1
        blocks.append(np.concatenate([head, tail], axis=1))
    return np.concatenate(blocks, axis=0)


def singular_point_set(S, F: FieldSpec) -> list[ProjPoint]:
    P = as_poly(S, F)
    pts = _point_array(F)
    mask = np.ones(pts.shape[0], dtype=bool)
    for g in P.gradient():
        if g:
            mask &= CompiledPoly(g, F)(pts) == 0
    mask &= CompiledPoly(P, F)(pts) == 0
    return [ProjPoint._raw(tuple(F.decode(int(c)) for c in row)) for row in pts[mask]]


def singular_points(S, F: FieldSpec, truncation: int = DEFAULT_TRUNCATION) -> SingularLocus:
    """All F-points where every partial vanishes, typed, with curve detection."""
    P = as_poly(S, F)
    pts = singular_point_set(P, F)
    curves = detect_singular_curves(P, F, pts)
    on_curve = {pt for c in curves for pt in c.points}
    records = []
    for pt in pts:
        m, cone = multiplicity_at(P, pt)
        if pt in on_curve:
            cls = "NonSimple"
        elif m == 2:
            cls = classify_double_point(P, pt, truncation)
        else:
            cls = "NonSimple"
        records.append(SingularRecord(pt, m, cone, cls))
    return SingularLocus(records, curves)


def detect_singular_curves(P: MultiPoly, F: FieldSpec, pts: list[ProjPoint]) -> list[SingularCurve]:
    """Lines, conics and twisted cubics made of singular F-points.

    Only attempted when the singular set has more than q/2 points; each curve
    is accepted only if all of its q+1 rational points are singular.
    """
    q = F.q
    if len(pts) <= q / 2:
        return []
    sing = set(pts)
    curves: list[SingularCurve] = []
    covered: set = set()
    seen_lines = set()
    for a, b in combinations(pts, 2):
        if a in covered and b in covered:
            continue
        line = ProjLine(a, b)
        if line.key in seen_lines:
            continue
        seen_lines.add(line.key)
        lp = list(line.points())
        if all(x in sing for x in lp):
            curves.append(SingularCurve("line", lp))
            covered.update(lp)
    rest = [x for x in pts if x not in covered]
    if len(rest) > q / 2:
        curve = _fit_quadric_curve(F, rest)
        if curve is not None and all(x in sing for x in curve.points):
            curves.append(curve)
    return curves


def _quadric_monomials(v):
    x = v
    return [x[i] * x[j] for i in range(4) for j in range(i, 4)]


def _fit_quadric_curve(F: FieldSpec, pts: list[ProjPoint]) -> SingularCurve | None:
    rows = [list(p.coords) for p in pts]
    r = rank(rows)
    if r == 3:
        # plane conic: quadrics through the points modulo the plane
        normal = nullspace(rows)[0]
        conds = [_quadric_monomials(p.coords) for p in pts]
        quads = nullspace(conds)
        cand = [p for p in enumerate_points(F, 3)
                if not sum((a * b for a, b in zip(normal, p.coords)), F.zero)
                and all(not sum((c * m for c, m in zip(Q, _quadric_monomials(p.coords))), F.zero) for Q in quads)]
        if len(cand) == q_plus_one(F):
            return SingularCurve("conic", cand)
        return None
    if r == 4:
        conds = [_quadric_monomials(p.coords) for p in pts]
        quads = nullspace(conds)
        if len(quads) != 3:
            return None
        cand = [p for p in enumerate_points(F, 3)
                if all(not sum((c * m for c, m in zip(Q, _quadric_monomials(p.coords))), F.zero) for Q in quads)]
        if len(cand) == q_plus_one(F) and rank([list(p.coords) for p in cand]) == 4:
            return SingularCurve("cubic", cand)
    return None


def q_plus_one(F: FieldSpec) -> int:
    return F.q + 1


# ---------------------------------------------------------------------------
# local analysis


def chart_matrix(P: ProjPoint) -> list[list]:
    """Columns: three standard vectors completing P, then P itself.

    For P = (0:0:0:1) this is the identity.
    """
    coords = list(P.coords)
    F = coords[0].field
    pivot = max(i for i, c in enumerate(coords) if c)
    cols = []
    for i in range(4):
        if i == pivot:
            continue
        e = [F.zero] * 4
        e[i] = F.one
        cols.append(e)
    cols.append(coords)
    return [[cols[c][r] for c in range(4)] for r in range(4)]


def local_equation(S, P: ProjPoint) -> MultiPoly:
    """f(x, y, z) = S(M (x, y, z, 1)) with P at the origin."""
    F = P.coords[0].field
    poly = as_poly(S, F)
    M = chart_matrix(P)
    gens = [MultiPoly.var(i, 3, LOCAL, F) for i in range(3)]
    subs = []
    for r in range(4):
        lp = MultiPoly.const(M[r][3], 3, LOCAL, F)
        for c in range(3):
            if M[r][c]:
                lp = lp + gens[c] * M[r][c]
        subs.append(lp)
    return poly.compose(subs, 3, LOCAL)


def multiplicity_at(S, P: ProjPoint) -> tuple[int, MultiPoly]:
    """Order of the local equation at P and its lowest jet (the tangent cone)."""
    f = local_equation(S, P)
    if f.coefficient((0, 0, 0)):
        raise PointNotOnSurface(f"{P} is not on the surface")
    m = f.min_degree
    if m < 0:
        raise PointNotOnSurface("surface equation vanishes identically near the point")
    return m, f.homogeneous_component(m)


def _truncate(P: MultiPoly, T: int) -> MultiPoly:
    return P.like({e: c for e, c in P.terms.items() if sum(e) <= T})


def _mul_trunc(a: MultiPoly, b: MultiPoly, T: int) -> MultiPoly:
    out: dict = {}
    n = a.nvars
    for e1, c1 in a.terms.items():
        s1 = sum(e1)
        for e2, c2 in b.terms.items():
            if s1 + sum(e2) > T:
                continue
            e = tuple(e1[i] + e2[i] for i in range(n))
            v = c1 * c2
            out[e] = out[e] + v if e in out else v
    return a.like(out)


def _compose_trunc(P: MultiPoly, subs, T: int) -> MultiPoly:
    proto = subs[0]
    cache: dict = {}

    def power(i, k):
        if (i, k) not in cache:
            if k == 1:
                cache[(i, k)] = subs[i]
            else:
                cache[(i, k)] = _mul_trunc(power(i, k - 1), subs[i], T)
        return cache[(i, k)]

    acc = proto.like()
    for e, c in P.terms.items():
        t = proto.constant(c)
        for i, k in enumerate(e):
            if k:
                t = _mul_trunc(t, power(i, k), T)
        acc = acc + t
    return acc


def _diagonalize(Q, F):
    """Congruence Q -> L^T Q L diagonal; returns (L, diag) with nonzeros first."""
    n = len(Q)
    A = [row[:] for row in Q]
    L = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]

    def col_op(j, k, f):  # column/row j += f * column/row k
        for r in range(n):
            A[r][j] = A[r][j] + f * A[r][k]
        for c in range(n):
            A[j][c] = A[j][c] + f * A[k][c]
        for r in range(n):
            L[r][j] = L[r][j] + f * L[r][k]

    def swap(j, k):
        for r in range(n):
            A[r][j], A[r][k] = A[r][k], A[r][j]
        A[j], A[k] = A[k], A[j]
        for r in range(n):
            L[r][j], L[r][k] = L[r][k], L[r][j]

    for i in range(n):
        if not A[i][i]:
            j = next((j for j in range(i + 1, n) if A[j][j]), None)
            if j is not None:
                swap(i, j)
            else:
                j = next((j for j in range(i + 1, n) if A[i][j]), None)
                if j is None:
                    continue
                col_op(i, j, F.one)
        if not A[i][i]:
            continue
        for j in range(i + 1, n):
            if A[i][j]:
                col_op(j, i, -A[i][j] / A[i][i])
    order = sorted(range(n), key=lambda i: 0 if A[i][i] else 1)
    Lp = [[L[r][c] for c in order] for r in range(n)]
    return Lp, [A[i][i] for i in order]


def quadratic_matrix(q: MultiPoly):
    F = q.domain
    n = q.nvars
    Q = [[F.zero] * n for _ in range(n)]
    half = F.element(Fraction(1, 2))
    for e, c in q.terms.items():
        idx = [i for i in range(n) for _ in range(e[i])]
        if len(idx) != 2:
            continue
        i, j = idx
        if i == j:
            Q[i][i] = Q[i][i] + c
        else:
            Q[i][j] = Q[i][j] + c * half
            Q[j][i] = Q[j][i] + c * half
    return Q


def split_germ(f: MultiPoly, T: int = DEFAULT_TRUNCATION):
    """Splitting lemma on a local germ with zero linear part.

    Returns (rank of the Hessian, residual germ g in the kernel variables,
    truncated at degree T).
    """
    F = f.domain
    q2 = f.homogeneous_component(2)
    Q = quadratic_matrix(q2)
    Lm, diag = _diagonalize(Q, F)
    r = sum(1 for d in diag if d)
    n = f.nvars
    gens = [MultiPoly.var(i, n, f.names, F) for i in range(n)]
    lin = []
    for i in range(n):
        lp = f.like()
        for j in range(n):
            if Lm[i][j]:
                lp = lp + gens[j] * Lm[i][j]
        lin.append(lp)
    fp = _truncate(f.compose(lin), T)
    k = n - r
    if k == 0:
        return r, None
    knames = tuple(("u", "v", "s")[:k])
    kg = [MultiPoly.var(i, k, knames, F) for i in range(k)]
    partials = [fp.diff(i) for i in range(r)]
    phi = [kg[0].like() for _ in range(r)]
    for _ in range(T + 1):
        subs = phi + kg
        new = []
        for i in range(r):
            rest = partials[i] - gens[i] * (diag[i] * 2)
            val = _compose_trunc(rest, subs, T) if rest else kg[0].like()
            new.append(val * (-(1 / (diag[i] * 2))))
        if all(a == b for a, b in zip(new, phi)):
            break
        phi = new
    g = _compose_trunc(fp, phi + kg, T)
    return r, g


def intersection_multiplicity(Fp: MultiPoly, Gp: MultiPoly, cap: float = math.inf) -> float:
    """Local intersection number at the origin of two plane curves (Fulton).

    The running total only grows, so the search stops once it reaches ``cap``
    and returns ``cap`` (meaning "at least cap").  With a finite cap, terms of
    order >= cap - total are dropped at every step: if the remaining number
    is below that bound, such terms lie in m*(F, G) and do not change it.
    """
    zero2 = (0, 0)
    if Fp.coefficient(zero2) or Gp.coefficient(zero2):
        return 0
    F, G = Fp, Gp
    total = 0
    for _ in range(10000):
        if total >= cap:
            return cap
        if cap != math.inf:
            F, G = _truncate(F, cap - total - 1), _truncate(G, cap - total - 1)
            if F.is_zero() or G.is_zero():
                return cap
        if F.coefficient(zero2) or G.coefficient(zero2):
            return total
        fx = {e[0]: c for e, c in F.terms.items() if e[1] == 0}
        gx = {e[0]: c for e, c in G.terms.items() if e[1] == 0}
        r = max(fx) if fx else 0
        s = max(gx) if gx else 0
        if r > s:
            F, G, fx, gx, r, s = G, F, gx, fx, s, r
        if r == 0:
            if not gx:
                return math.inf
            # F = y*H; I(y, G) = order of G(x, 0)
            total += min(gx)
            F = F.div_monomial((0, 1))
            if F.coefficient(zero2):
                return min(total, cap)
            continue
        lf, lg = fx[r], gx[s]
        G = G * (1 / lg) - F.mul_monomial((s - r, 0), 1 / lf)
    raise ArithmeticError("intersection multiplicity did not terminate")


def milnor_number(g: MultiPoly, cap: float = math.inf) -> float:
    return intersection_multiplicity(g.diff(0), g.diff(1), cap)


def _is_perfect_cube(c3: MultiPoly) -> bool:
    """A binary cubic is a cube of a linear form iff its Hessian vanishes."""
    gx, gy = c3.diff(0), c3.diff(1)
    H = gx.diff(0) * gy.diff(1) - gx.diff(1) * gy.diff(0)
    return H.is_zero()


def classify_germ(f: MultiPoly, T: int = DEFAULT_TRUNCATION) -> str:
    """Type of a double point given its local equation (origin on the germ)."""
    if f.coefficient((0,) * f.nvars):
        raise PointNotOnSurface("germ does not pass through the origin")
    if f.min_degree != 2:
        raise NotDoublePoint(f"multiplicity {f.min_degree}")
    r, g = split_germ(f, T)
    if r == 3:
        return "A1"
    if r == 2:
        if g.is_zero():
            return f"Unresolved({T})"
        return f"A{g.min_degree - 1}"
    # rank one: residual germ in two variables, 2-jet zero
    if g.is_zero() or g.min_degree >= 4:
        return "NonSimple"
    c3 = g.homogeneous_component(3)
    mu = milnor_number(g, cap=T)
    if not _is_perfect_cube(c3):
        if mu >= T:
            return f"Unresolved({T})"
        return f"D{int(mu)}"
    if mu in (6, 7, 8):
        return f"E{int(mu)}"
    return "NonSimple"


def classify_double_point(S, P: ProjPoint, truncation: int = DEFAULT_TRUNCATION) -> str:
    m, _ = multiplicity_at(S, P)
    if m != 2:
        raise NotDoublePoint(f"{P} has multiplicity {m}")
    return classify_germ(local_equation(S, P), truncation)


def is_simple(classification: str) -> bool:
    return classification[0] in "ADE" and classification[1:].isdigit()


def nonsimple_conditions(q20, q11, h400, h310, h301) -> bool:
    """Non-simplicity test for the y^3 normal form: all three expressions vanish."""
    return not (q20 * q20 - 4 * h400) and not (2 * q20 * q11 - 4 * h310) and not (q20 * h301)


# ---------------------------------------------------------------------------
# normal forms


@dataclass
class FamilyTag:
    tag: str
    point: ProjPoint | None = None
    normalizing_map: list | None = None
    scale: object = None
    coefficients: dict = dc_field(default_factory=dict)
    normal_form: MultiPoly | None = None

    def to_json(self) -> dict:
        out = {"tag": self.tag}
        if self.point is not None:
            out["point"] = self.point.to_json()
        if self.normalizing_map is not None:
            out["normalizing_map"] = [[str(v) for v in row] for row in self.normalizing_map]
            out["normal_form"] = self.normal_form.to_str()
            out["coefficients"] = {k: str(v) for k, v in sorted(self.coefficients.items())}
        return out


def _split_w(P: MultiPoly) -> dict[int, MultiPoly]:
    return P.coefficients_in(3)


def _absorb_z2(P: MultiPoly):
    """Replace w by w - L1 so the w-linear part has no z^2 multiple.

    Returns (new polynomial, substitution matrix).
    """
    F = P.domain
    parts = _split_w(P)
    G3 = parts.get(1, P.like())
    z2 = {e: c for e, c in G3.terms.items() if e[2] >= 2}
    half = F.element(Fraction(1, 2))
    L1 = [F.zero] * 4
    for e, c in z2.items():
        rest = (e[0], e[1], e[2] - 2, e[3])
        i = [k for k in range(4) if rest[k]][0]
        L1[i] = L1[i] + c * half
    M = [[F.one if i == j else F.zero for j in range(4)] for i in range(4)]
    for j in range(3):
        M[3][j] = -L1[j]
    return P.substitute_linear(M), M


def normal_form_coefficients(N: MultiPoly) -> dict:
    out = {}
    for i in range(3):
        out[f"q{i}{2 - i}"] = N.coefficient((i, 2 - i, 1, 1))
    for i in range(5):
        for j in range(5 - i):
            k = 4 - i - j
            out[f"h{i}{j}{k}"] = N.coefficient((i, j, k, 0))
    return out


def normal_form_shape(N: MultiPoly) -> str | None:
    """'Q4' for w^2z^2 + wzQ2 + H4, 'Q56' for w^2z^2 + w(y^3 + zQ2) + H4, else None."""
    parts = _split_w(N)
    if any(k > 2 for k in parts):
        return None
    w2 = parts.get(2, N.like())
    F = N.domain
    if w2.terms != {(0, 0, 2, 0): F.one}:
        return None
    w1 = parts.get(1, N.like())
    cubic_free = {e: c for e, c in w1.terms.items() if e[2] == 0}
    for e in w1.terms:
        if e[2] >= 2:
            return None
    if not cubic_free:
        return "Q4"
    if cubic_free == {(0, 3, 0, 0): F.one}:
        return "Q56"
    return None


def _cube_root_form(P3: MultiPoly):
    """For c*(a x + b y)^3 return (c, a, b) normalised with a or b equal to 1."""
    c30 = P3.coefficient((3, 0, 0, 0))
    c21 = P3.coefficient((2, 1, 0, 0))
    c03 = P3.coefficient((0, 3, 0, 0))
    if c30:
        return c30, P3.domain.one, c21 / (c30 * 3)
    return c03, P3.domain.zero, P3.domain.one


def normalize_at(S, P: ProjPoint) -> FamilyTag:
    """Coordinate change putting a non-simple double point into shape Q4 or Q5/Q6."""
    F = P.coords[0].field
    poly = as_poly(S, F)
    one, zero = F.one, F.zero
    M = chart_matrix(P)
    S1 = poly.substitute_linear(M)
    parts = _split_w(S1)
    C2 = parts.get(2)
    if C2 is None or any(k > 2 for k in parts):
        raise NotNormalizable("point is not a double point")
    Q = quadratic_matrix(C2.drop_var(3, LOCAL))
    if rank(Q) != 1:
        raise NotNormalizable("tangent cone is not a double plane")
    i = next(i for i in range(3) if Q[i][i])
    Lc = [v / Q[i][i] for v in Q[i]]
    # new coordinates (x', y', z') with z' = L(x, y, z)
    rows = complete_basis([Lc], 3, one)
    rows = rows[1:] + rows[:1]
    N3 = inverse(rows)
    M2 = [[N3[r][c] if r < 3 and c < 3 else (one if r == c else zero) for c in range(4)] for r in range(4)]
    S2 = S1.substitute_linear(M2) * (1 / Q[i][i])
    scale = 1 / Q[i][i]
    S3, M3 = _absorb_z2(S2)
    total = matmul(matmul(M, M2), M3)
    G3 = _split_w(S3).get(1, S3.like())
    P3 = S3.like({e: c for e, c in G3.terms.items() if e[2] == 0})
    if P3.is_zero():
        tag = "Q4"
        N = S3
    else:
        binary = MultiPoly({(e[0], e[1]): c for e, c in P3.terms.items()}, 2, ("x", "y"), F)
        if not _is_perfect_cube(binary):
            raise NotNormalizable("cubic part is not a perfect cube (D-type point)")
        c, a, b = _cube_root_form(P3)
        # new coordinates x' = y, y' = x + b y when the cube involves x
        if a:
            old_from_new = inverse([[zero, one], [one, b]])
        else:
            old_from_new = [[one, zero], [zero, one]]
        M4 = [[old_from_new[r][cc] if r < 2 and cc < 2 else (one if r == cc else zero) for cc in range(4)]
              for r in range(4)]
        S4 = S3.substitute_linear(M4)
        M5 = [[one, zero, zero, zero], [zero, one, zero, zero], [zero, zero, c, zero], [zero, zero, zero, 1 / c]]
        N = S4.substitute_linear(M5)
        total = matmul(matmul(total, M4), M5)
        tag = "Q56"
    if normal_form_shape(N) != tag:
        raise NotNormalizable(f"normalisation produced an unexpected shape: {N}")
    coeffs = normal_form_coefficients(N)
    if tag == "Q56":
        q20, q11, h400, h310, h301 = (coeffs[k] for k in ("q20", "q11", "h400", "h310", "h301"))
        if not nonsimple_conditions(q20, q11, h400, h310, h301):
            raise NotNormalizable("normal form violates the non-simplicity conditions")
        if not q20 and not h400 and not h310 and h301:
            tag = "Q5"
        elif q20 and not h301:
            tag = "Q6"
        else:
            raise NotNormalizable("q20 = h301 = 0: the point is not isolated")
    return FamilyTag(tag, P, total, scale, coeffs, N)


def classify_family(S, F: FieldSpec, locus: SingularLocus | None = None) -> FamilyTag:
    """Family of S at its first isolated non-simple double point, else a fallback tag."""
    locus = singular_points(S, F) if locus is None else locus
    if locus.non_isolated:
        return FamilyTag("NonIsolated")
    for rec in locus:
        if rec.multiplicity == 2 and rec.classification == "NonSimple":
            return normalize_at(S, rec.point)
    if any(rec.multiplicity == 4 for rec in locus):
        return FamilyTag("Cone", point=next(r.point for r in locus if r.multiplicity == 4))
    if any(rec.multiplicity == 3 for rec in locus):
        return FamilyTag("TriplePoint", point=next(r.point for r in locus if r.multiplicity == 3))
    if locus:
        return FamilyTag("ADEonly")
    return FamilyTag("Smooth")


def normalize_line_to_plane(S, line: ProjLine):
    """Move a line of a normal-form surface into {x = 0}, keeping the shape.

    Returns (new polynomial, substitution matrix M with new = S(M X)).
    """
    F = line.field
    N = as_poly(S, F)
    shape = normal_form_shape(N)
    if shape is None:
        raise NotNormalizable("surface is not in normal form")
    if not restrict_to_line(N, line).is_zero():
        raise LineNotOnSurface("line does not lie on the surface")
    if not line.a.coords[2] and not line.b.coords[2]:
        raise LineInCone("line lies in the tangent cone {z=0}")
    O = ProjPoint((F.zero, F.zero, F.zero, F.one))
    one, zero = F.one, F.zero
    normal = plane_through(line, O)
    if normal is None:
        # the line passes through O: any plane through it and O works; take the one through a third point
        raise LineInCone("line passes through the singular point O")
    a, b, c, _ = normal
    swap = None
    if not a:
        if shape != "Q4" or not b:
            raise PlaneThroughConeAxis("no plane of the form y = lambda z cuts out a line")
        # Q4 is symmetric in x and y: exchange them first
        swap = [[zero, one, zero, zero], [one, zero, zero, zero], [zero, zero, one, zero], [zero, zero, zero, one]]
        N = N.substitute_linear(swap)
        a, b = b, a
    b, c = b / a, c / a
    ident = [[one if i == j else zero for j in range(4)] for i in range(4)]
    pre = swap if swap is not None else ident
    if not b and not c:
        return N, pre
    M = [[one, -b, -c, zero], [zero, one, zero, zero], [zero, zero, one, zero], [zero, zero, zero, one]]
    N1 = N.substitute_linear(M)
    N2, M2 = _absorb_z2(N1)
    if normal_form_shape(N2) != shape:
        raise NotNormalizable("line normalisation broke the normal form")
    return N2, matmul(matmul(pre, M), M2)
