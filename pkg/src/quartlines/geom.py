"""Points, lines and planes of P^2 / P^3 over a finite field, and the orchard count."""
from __future__ import annotations

from itertools import combinations, islice, product

from .errors import DegenerateLine, DuplicatePoint, NotLinear, SameLine
from .field import FieldElement, FieldSpec
from .linalg import nullspace, rank, rref
from .poly import MultiPoly, det_scalar


def _key(c):
    return c.code if isinstance(c, FieldElement) else c


class ProjPoint:
    """Projective point, normalised so the first nonzero coordinate is 1."""

    __slots__ = ("coords",)

    def __init__(self, coords, field: FieldSpec | None = None):
        if field is not None:
            coords = [field.element(c) for c in coords]
        lead = next((c for c in coords if c), None)
        if lead is None:
            raise ValueError("the zero vector is not a projective point")
        if lead != 1:
            inv = 1 / lead
            coords = [c * inv for c in coords]
        self.coords = tuple(coords)

    @classmethod
    def _raw(cls, coords) -> "ProjPoint":
        obj = cls.__new__(cls)
        obj.coords = tuple(coords)
        return obj

    @property
    def field(self) -> FieldSpec | None:
        c = self.coords[0]
        return c.field if isinstance(c, FieldElement) else None

    @property
    def key(self) -> tuple:
        return tuple(_key(c) for c in self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"

    def to_json(self) -> list:
        return [_json_scalar(c) for c in self.coords]


def _json_scalar(c):
    if isinstance(c, FieldElement):
        return c.c0 if c.field.k == 1 else [c.c0, c.c1]
    return str(c)


def _plucker(a, b) -> tuple:
    pk = []
    for i, j in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        pk.append(a[i] * b[j] - a[j] * b[i])
    lead = next(c for c in pk if c)
    inv = 1 / lead
    return tuple(c * inv for c in pk)


class ProjLine:
    """Line of P^3 spanned by two points.

    ``a`` and ``b`` are the rows of the reduced row echelon basis, so the pair
    is canonical; ``plucker`` is the normalised Plucker 6-vector.
    """

    __slots__ = ("a", "b", "plucker")

    def __init__(self, a, b):
        A = list(a.coords if isinstance(a, ProjPoint) else a)
        B = list(b.coords if isinstance(b, ProjPoint) else b)
        m, piv = rref([A, B])
        if len(piv) < 2:
            raise DegenerateLine("spanning points coincide projectively")
        self.a = ProjPoint._raw(m[0])
        self.b = ProjPoint._raw(m[1])
        self.plucker = _plucker(m[0], m[1])

    @classmethod
    def from_rref(cls, a, b) -> "ProjLine":
        obj = cls.__new__(cls)
        obj.a = ProjPoint._raw(a)
        obj.b = ProjPoint._raw(b)
        obj.plucker = _plucker(a, b)
        return obj

    @property
    def key(self) -> tuple:
        return tuple(_key(c) for c in self.plucker)

    @property
    def field(self):
        return self.a.field

    def __eq__(self, other):
        return isinstance(other, ProjLine) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"Line[{self.a!r}, {self.b!r}]"

    def contains(self, P) -> bool:
        coords = P.coords if isinstance(P, ProjPoint) else P
        return rank([list(self.a.coords), list(self.b.coords), list(coords)]) == 2

    def point(self, s, t) -> ProjPoint:
        return ProjPoint([s * x + t * y for x, y in zip(self.a.coords, self.b.coords)])

    def points(self):
        """All q+1 rational points of the line."""
        F = self.field
        yield ProjPoint._raw(self.a.coords)
        for t in F.elements():
            yield ProjPoint([x * t + y for x, y in zip(self.a.coords, self.b.coords)])

    def to_json(self) -> dict:
        return {"points": [self.a.to_json(), self.b.to_json()],
                "plucker": [_json_scalar(c) for c in self.plucker]}


def plucker_relation(pk) -> object:
    """p01 p23 - p02 p13 + p03 p12 (zero for every line)."""
    return pk[0] * pk[5] - pk[1] * pk[4] + pk[2] * pk[3]


def plucker_pairing(p, q):
    """Bilinear form whose vanishing means the two lines meet."""
    return (p[0] * q[5] - p[1] * q[4] + p[2] * q[3]
            + p[3] * q[2] - p[4] * q[1] + p[5] * q[0])


# ---------------------------------------------------------------------------
# enumeration

def point_count(q: int, n: int) -> int:
    return (q ** (n + 1) - 1) // (q - 1)


def line_count(q: int) -> int:
    return (q * q + 1) * (q * q + q + 1)


def enumerate_points(F: FieldSpec, n: int = 3):
    """Each point of P^n(F) once, pivot-first order."""
    els = F.elements()
    one, zero = F.one, F.zero
    for pivot in range(n + 1):
        for tail in product(els, repeat=n - pivot):
            yield ProjPoint._raw((zero,) * pivot + (one,) + tail)


def enumerate_planes(F: FieldSpec):
    """Planes of P^3 as normalised coefficient vectors (points of the dual space)."""
    return enumerate_points(F, 3)


PIVOT_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def chart_free_columns(i: int, j: int) -> tuple[list[int], list[int]]:
    """Free columns of the two rows of a 2x4 RREF with pivots (i, j)."""
    return [k for k in range(i + 1, 4) if k != j], [k for k in range(j + 1, 4)]


def enumerate_lines(F: FieldSpec, start: int = 0, stop: int | None = None):
    """Each line of P^3(F) once, via RREF 2x4 matrices; ``start``/``stop`` slice the stream."""
    return islice(_lines(F), start, stop)


def _lines(F):
    els = F.elements()
    one, zero = F.one, F.zero
    for i, j in PIVOT_PAIRS:
        fa, fb = chart_free_columns(i, j)
        for va in product(els, repeat=len(fa)):
            a = [zero] * 4
            a[i] = one
            for k, v in zip(fa, va):
                a[k] = v
            for vb in product(els, repeat=len(fb)):
                b = [zero] * 4
                b[j] = one
                for k, v in zip(fb, vb):
                    b[k] = v
                yield ProjLine.from_rref(tuple(a), tuple(b))


# ---------------------------------------------------------------------------
# incidence

def lines_meet(l1: ProjLine, l2: ProjLine) -> ProjPoint | None:
    """Intersection point of two distinct lines, or None if they are skew."""
    if l1.key == l2.key:
        raise SameLine("lines coincide")
    a, b, c, d = (list(l1.a.coords), list(l1.b.coords), list(l2.a.coords), list(l2.b.coords))
    if plucker_pairing(l1.plucker, l2.plucker):
        return None
    cols = [[a[r], b[r], -c[r], -d[r]] for r in range(4)]
    ns = nullspace(cols)
    al, be = ns[0][0], ns[0][1]
    return ProjPoint([al * x + be * y for x, y in zip(a, b)])


def line_in_plane(line: ProjLine, h: MultiPoly) -> bool:
    if h.degree != 1 or not h.is_homogeneous:
        raise NotLinear("plane equation must be a linear form")
    return not h.evaluate(line.a.coords) and not h.evaluate(line.b.coords)


def plane_form(normal, domain: FieldSpec) -> MultiPoly:
    gens = [MultiPoly.var(i, 4, domain=domain) for i in range(4)]
    out = MultiPoly({}, 4, domain=domain)
    for g, c in zip(gens, normal):
        if c:
            out = out + g * c
    return out


def plane_through(line: ProjLine, P) -> list | None:
    """Normal vector of the plane spanned by a line and a point (None if P is on it)."""
    coords = P.coords if isinstance(P, ProjPoint) else P
    ns = nullspace([list(line.a.coords), list(line.b.coords), list(coords)])
    if len(ns) != 1:
        return None
    return list(ProjPoint(ns[0]).coords)


def span_plane(l1: ProjLine, l2: ProjLine) -> list | None:
    """Normal vector of the plane containing two meeting lines."""
    ns = nullspace([list(l1.a.coords), list(l1.b.coords), list(l2.a.coords), list(l2.b.coords)])
    if len(ns) != 1:
        return None
    return list(ProjPoint(ns[0]).coords)


def apply_matrix(M, P) -> ProjPoint:
    coords = P.coords if isinstance(P, ProjPoint) else P
    return ProjPoint([sum((M[i][j] * coords[j] for j in range(len(coords))), coords[0] * 0)
                      for i in range(len(M))])


def collinear_triplets(pts) -> tuple[int, list[tuple[int, int, int]]]:
    """All index triples (i<j<k) of collinear points in P^2."""
    pts = [p if isinstance(p, ProjPoint) else ProjPoint(p) for p in pts]
    seen = {}
    for i, p in enumerate(pts):
        if p.key in seen:
            raise DuplicatePoint(f"points {seen[p.key]} and {i} coincide")
        seen[p.key] = i
    triples = [(i, j, k) for i, j, k in combinations(range(len(pts)), 3)
               if not det_scalar([list(pts[i].coords), list(pts[j].coords), list(pts[k].coords)])]
    return len(triples), triples
