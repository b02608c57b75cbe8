"""Lines on a quartic surface over a finite field, and the incidence graph.

The main engine walks the six RREF charts of the Grassmannian.  In chart
(i, j) a line is spanned by rows A (pivot i) and B (pivot j); both rows must
be points of S, so only S-points of the two affine slices are paired.  A pair
survives if S also vanishes at A+B, A+2B, A+3B: five points of a line on
which a quartic vanishes force the restriction to be zero.

The oracle works plane by plane instead: S restricted to each plane is a
ternary quartic, and its linear factors are found by symbolic substitution.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from itertools import combinations, product

import networkx as nx
import numpy as np

from .errors import (
    CurveNotOnSurface,
    PointNotOnSurface,
    SingularPoint,
    SmoothPoint,
    WrongShape,
)
from .field import FieldSpec
from .geom import PIVOT_PAIRS, ProjLine, ProjPoint, chart_free_columns, enumerate_planes, plucker_pairing, span_plane
from .poly import MultiPoly
from .surface import QuarticSurface, as_poly
from .vec import CompiledPoly, VecField, inverse_vandermonde

CHUNK = 200_000
EXACT_DISJOINT_LIMIT = 40


@dataclass
class LineSet:
    lines: list
    field: FieldSpec
    surface: MultiPoly | None = None
    name: str = ""

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    def __getitem__(self, i):
        return self.lines[i]

    def keys(self) -> set:
        return {l.key for l in self.lines}

    def to_json(self) -> list:
        return [l.to_json() for l in self.lines]


def _grid(q: int, m: int) -> np.ndarray:
    return np.array(list(product(range(q), repeat=m)), dtype=np.int64).reshape(q ** m, m)


def _slice_points(cp: CompiledPoly, q: int, pivot: int, free: list[int]) -> np.ndarray:
    """S-points with coordinate ``pivot`` = 1, zeros outside ``free``."""
    g = _grid(q, len(free))
    pts = np.zeros((g.shape[0], 4), dtype=np.int64)
    pts[:, pivot] = 1
    pts[:, free] = g
    return pts[cp(pts) == 0]


def _pair_lines(cp: CompiledPoly, vf: VecField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Index pairs (a, b) such that S vanishes at A+B, A+2B, A+3B."""
    if len(A) == 0 or len(B) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    found = []
    step = max(1, CHUNK // len(B))
    ib_all = np.arange(len(B))
    for start in range(0, len(A), step):
        ia = np.repeat(np.arange(start, min(start + step, len(A))), len(B))
        ib = np.tile(ib_all, min(step, len(A) - start))
        for lam in (1, 2, 3):
            pts = vf.add(A[ia], vf.mul(np.int64(lam % vf.p), B[ib]))
            keep = cp(pts) == 0
            ia, ib = ia[keep], ib[keep]
            if not len(ia):
                break
        if len(ia):
            found.append(np.stack([ia, ib], axis=1))
    return np.concatenate(found) if found else np.zeros((0, 2), dtype=np.int64)


def _chart_lines(args):
    poly, F, i, j = args
    cp = CompiledPoly(poly, F)
    vf = VecField(F)
    fa, fb = chart_free_columns(i, j)
    A = _slice_points(cp, F.q, i, fa)
    B = _slice_points(cp, F.q, j, fb)
    pairs = _pair_lines(cp, vf, A, B)
    return [(tuple(int(c) for c in A[a]), tuple(int(c) for c in B[b])) for a, b in pairs]


def lines_on_surface(S, F: FieldSpec, workers: int = 1) -> LineSet:
    """Every F-rational line on S, sorted by normalised Plucker key."""
    poly = as_poly(S, F)
    if F.p < 5:
        raise ValueError("the five-point line test needs at least five points per line")
    tasks = [(poly, F, i, j) for i, j in PIVOT_PAIRS]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_chart_lines, tasks))
    else:
        results = [_chart_lines(t) for t in tasks]
    lines = {}
    for res in results:
        for a, b in res:
            ln = ProjLine.from_rref(tuple(F.decode(c) for c in a), tuple(F.decode(c) for c in b))
            lines[ln.key] = ln
    name = S.name if isinstance(S, QuarticSurface) else ""
    return LineSet(sorted(lines.values()), F, poly, name)


# ---------------------------------------------------------------------------
# plane-pencil oracle


def _plane_basis(normal):
    """Three points spanning the plane normal . x = 0 (normal has leading 1)."""
    F = normal[0].field
    i = next(k for k, c in enumerate(normal) if c)
    basis = []
    for k in range(4):
        if k == i:
            continue
        v = [F.zero] * 4
        v[k] = F.one
        v[i] = -normal[k]
        basis.append(v)
    return basis


def _ternary_restriction(poly: MultiPoly, basis) -> MultiPoly:
    F = poly.domain
    names = ("u", "v", "r")
    gens = [MultiPoly.var(c, 3, names, F) for c in range(3)]
    subs = []
    for m in range(4):
        lp = MultiPoly({}, 3, names, F)
        for c in range(3):
            if basis[c][m]:
                lp = lp + gens[c] * basis[c][m]
        subs.append(lp)
    return poly.compose(subs, 3, names)


def _dense_ternary(f: MultiPoly, vf: VecField) -> np.ndarray:
    arr = np.zeros((5, 5, 5), dtype=np.int64)
    for e, c in f.terms.items():
        arr[e] = c.code
    return arr


def _binary_mul(vf, a, b):
    """Product of coefficient stacks (N, da+1) x (N, db+1) -> (N, da+db+1)."""
    n, da, db = a.shape[0], a.shape[1], b.shape[1]
    out = np.zeros((n, da + db - 1), dtype=np.int64)
    for i in range(da):
        for j in range(db):
            out[:, i + j] = vf.add(out[:, i + j], vf.mul(a[:, i], b[:, j]))
    return out


def _factor_lines_in_plane(f: MultiPoly, vf: VecField):
    """Linear forms (a, b, c) dividing the ternary quartic f, as code triples."""
    q = vf.q
    arr = _dense_ternary(f, vf)
    if not arr.any():
        return None  # the plane lies on S
    found = []
    # r = alpha u + beta v: substitute and require the binary quartic in (u, v) to vanish
    ab = _grid(q, 2)
    n = ab.shape[0]
    lin = np.stack([ab[:, 0], ab[:, 1]], axis=1)  # coefficients of u, v
    powers = [np.ones((n, 1), dtype=np.int64)]
    for _ in range(4):
        powers.append(_binary_mul(vf, powers[-1], lin))
    entries = [(a, b, c, int(arr[a, b, c])) for a, b, c in zip(*np.nonzero(arr))]
    total = np.zeros((n, 5), dtype=np.int64)
    for a, b, c, code in entries:
        # u^a v^b as a binary form of degree a+b: a single coefficient at index b
        mono = np.zeros((n, a + b + 1), dtype=np.int64)
        mono[:, b] = code
        total = vf.add(total, _binary_mul(vf, mono, powers[c]))
    for idx in np.nonzero(~total.any(axis=1))[0]:
        found.append((int(vf.neg(ab[idx, 0])), int(vf.neg(ab[idx, 1])), 1))
    # lines with no r: v = alpha u (binary quartic in u, r), and u = 0
    alphas = np.arange(q, dtype=np.int64)
    val = np.zeros((q, 5), dtype=np.int64)
    for a, b, c, code in entries:
        val[:, c] = vf.add(val[:, c], vf.mul(np.int64(code), vf.power(alphas, b)))
    for alpha in np.nonzero(~val.any(axis=1))[0]:
        found.append((int(vf.neg(np.int64(alpha))), 1, 0))
    if not arr[0].any():
        found.append((1, 0, 0))
    return found


def lines_by_plane_pencil(S, F: FieldSpec) -> LineSet:
    """Independent line enumeration: linear factors of S on every plane."""
    poly = as_poly(S, F)
    vf = VecField(F)
    lines = {}
    for normal in enumerate_planes(F):
        basis = _plane_basis(list(normal.coords))
        f = _ternary_restriction(poly, basis)
        facs = _factor_lines_in_plane(f, vf)
        if facs is None:
            raise WrongShape("surface contains a plane")
        for a, b, c in facs:
            form = [F.decode(a), F.decode(b), F.decode(c)]
            # two points of the plane line a u + b v + c r = 0
            sols = _kernel_2(form)
            P1 = [sum((s * bv[m] for s, bv in zip(sols[0], basis)), F.zero) for m in range(4)]
            P2 = [sum((s * bv[m] for s, bv in zip(sols[1], basis)), F.zero) for m in range(4)]
            ln = ProjLine(P1, P2)
            lines[ln.key] = ln
    name = S.name if isinstance(S, QuarticSurface) else ""
    return LineSet(sorted(lines.values()), F, poly, name)


def _kernel_2(form):
    F = form[0].field
    i = next(k for k, c in enumerate(form) if c)
    out = []
    for k in range(3):
        if k == i:
            continue
        v = [F.zero] * 3
        v[k] = F.one
        v[i] = -form[k] / form[i]
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# incidence


@dataclass
class IncidenceGraph:
    lines: list
    graph: nx.Graph
    coplanar_quadruples: list = dc_field(default_factory=list)

    def valence(self, i: int) -> int:
        return self.graph.degree[i]

    @property
    def valences(self) -> list[int]:
        return [self.graph.degree[i] for i in range(len(self.lines))]

    def valence_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for v in self.valences:
            hist[v] = hist.get(v, 0) + 1
        return dict(sorted(hist.items()))

    def components(self) -> list[list[int]]:
        return sorted(sorted(c) for c in nx.connected_components(self.graph))

    def max_disjoint_set(self, exact_limit: int = EXACT_DISJOINT_LIMIT) -> tuple[list[int], bool]:
        """A set of pairwise skew lines and whether it is provably maximum.

        Exact (clique search on the complement) up to ``exact_limit`` lines,
        a greedy lower bound above that.
        """
        if len(self.lines) <= exact_limit:
            best, _ = nx.max_weight_clique(nx.complement(self.graph), weight=None)
            return sorted(best), True
        chosen: list[int] = []
        blocked: set[int] = set()
        for i in sorted(range(len(self.lines)), key=lambda i: (self.graph.degree[i], i)):
            if i not in blocked:
                chosen.append(i)
                blocked.add(i)
                blocked.update(self.graph[i])
        return sorted(chosen), False

    def index_of(self, line: ProjLine) -> int:
        return next(i for i, l in enumerate(self.lines) if l.key == line.key)


def incidence_graph(lines) -> IncidenceGraph:
    lines = list(lines)
    G = nx.Graph()
    G.add_nodes_from(range(len(lines)))
    for i, j in combinations(range(len(lines)), 2):
        if not plucker_pairing(lines[i].plucker, lines[j].plucker):
            G.add_edge(i, j)
    planes: dict[tuple, set] = {}
    for i, j in G.edges:
        normal = span_plane(lines[i], lines[j])
        if normal is not None:
            planes.setdefault(ProjPoint._raw(normal).key, set()).update((i, j))
    quads = []
    for members in planes.values():
        if len(members) >= 4:
            quads.extend(combinations(sorted(members), 4))
    return IncidenceGraph(lines, G, sorted(quads))


# ---------------------------------------------------------------------------
# lines through a point and flecnodal directions


def _directions(F: FieldSpec, pivot: int) -> np.ndarray:
    """Points of P^3 with coordinate ``pivot`` zero (one per direction)."""
    q = F.q
    blocks = []
    others = [k for k in range(4) if k != pivot]
    for lead in range(3):
        tail = _grid(q, 2 - lead)
        d = np.zeros((tail.shape[0], 4), dtype=np.int64)
        d[:, others[lead]] = 1
        d[:, others[lead + 1:]] = tail
        blocks.append(d)
    return np.concatenate(blocks)


def contact_coefficients(S, P: ProjPoint, F: FieldSpec):
    """(directions, c) with S(P + t d) = sum_k c_k t^k, k = 1..4, for every direction d."""
    poly = as_poly(S, F)
    cp = CompiledPoly(poly, F)
    vf = VecField(F)
    pc = np.array(P.key, dtype=np.int64)
    if cp(pc[None, :])[0] != 0:
        raise PointNotOnSurface(f"{P} is not on the surface")
    pivot = next(k for k, c in enumerate(P.coords) if c)
    dirs = _directions(F, pivot)
    nodes = [F.element(t).code for t in range(1, 5)]
    vals = np.stack([cp(vf.add(pc[None, :], vf.mul(np.int64(t), dirs))) for t in nodes], axis=1)
    # values at t = 1..4 of c1 t + ... + c4 t^4: divide by t and interpolate a cubic
    tinv = vf.inv(np.array(nodes, dtype=np.int64))
    reduced = vf.mul(vals, tinv[None, :])
    vinv = inverse_vandermonde(F, nodes)
    coeffs = np.zeros_like(reduced)
    for i in range(4):
        for j in range(4):
            coeffs[:, i] = vf.add(coeffs[:, i], vf.mul(np.int64(vinv[i, j]), reduced[:, j]))
    return dirs, coeffs


def _line_from(P: ProjPoint, d_codes, F: FieldSpec) -> ProjLine:
    return ProjLine(list(P.coords), [F.decode(int(c)) for c in d_codes])


def lines_through_point(S, P: ProjPoint, F: FieldSpec) -> list[ProjLine]:
    """Lines of S through a singular point P (directions with full contact)."""
    poly = as_poly(S, F)
    if any(g.evaluate(P.coords) for g in poly.gradient()):
        raise SmoothPoint(f"{P} is a smooth point of the surface")
    dirs, c = contact_coefficients(poly, P, F)
    hits = dirs[~c.any(axis=1)]
    return sorted({_line_from(P, d, F) for d in hits}, key=lambda l: l.key)


def flecnodal_test(S, P: ProjPoint, F: FieldSpec) -> tuple[bool, ProjLine | None]:
    """Whether some line through the smooth point P has contact order >= 4.

    Returns (found, witness) where the witness is the first such line in
    canonical order.
    """
    poly = as_poly(S, F)
    if not any(g.evaluate(P.coords) for g in poly.gradient()):
        raise SingularPoint(f"{P} is a singular point of the surface")
    dirs, c = contact_coefficients(poly, P, F)
    hits = dirs[~c[:, :3].any(axis=1)]
    if not len(hits):
        return False, None
    return True, min((_line_from(P, d, F) for d in hits), key=lambda l: l.key)


# ---------------------------------------------------------------------------
# curves


@dataclass
class CurveParam:
    """A rational curve t -> (P0(t):...:P3(t)); ``extra_points`` are limit points."""

    coords: list  # four univariate MultiPoly in t
    kind: str = "curve"
    extra_points: list = dc_field(default_factory=list)

    def at(self, t) -> ProjPoint | None:
        vals = [c.evaluate([t]) for c in self.coords]
        if not any(vals):
            return None
        return ProjPoint(vals)

    def points(self, F: FieldSpec):
        pts = set()
        for t in F.elements():
            pt = self.at(t)
            if pt is not None:
                pts.add(pt)
        pts.update(self.extra_points)
        return sorted(pts)


def line_param(line: ProjLine) -> CurveParam:
    """t -> a + t b, with b as the limit point."""
    F = line.field
    t = MultiPoly.var(0, 1, ("t",), F)
    coords = [t.constant(a) + t * b for a, b in zip(line.a.coords, line.b.coords)]
    return CurveParam(coords, "line", extra_points=[ProjPoint._raw(line.b.coords)])


def lines_meeting_curve(L: LineSet, C: CurveParam) -> tuple[int, list[ProjLine]]:
    """Lines of L (other than C itself) meeting the curve in an F-point."""
    S = L.surface
    if S is not None:
        comp = S.compose(C.coords, 1, ("t",))
        if not comp.is_zero():
            raise CurveNotOnSurface("curve is not contained in the surface")
    pts = C.points(L.field)
    own = _as_line(C)
    out = []
    for ln in L:
        if own is not None and ln.key == own.key:
            continue
        if any(ln.contains(p) for p in pts):
            out.append(ln)
    return len(out), out


def _as_line(C: CurveParam) -> ProjLine | None:
    if C.kind != "line":
        return None
    pts = C.points(next(c.domain for c in C.coords))
    return ProjLine(pts[0], pts[1])


def line_on_surface(S, line: ProjLine) -> bool:
    from .poly import restrict_to_line
    return restrict_to_line(as_poly(S, line.field), line).is_zero()
