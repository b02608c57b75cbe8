"""Random members of the normal-form families, for sweeps and certificate runs.

Coefficients are drawn uniformly from F with a numpy Generator, so a fixed
seed reproduces the same surface.  Defining conditions are imposed by
construction; isolation of O is checked by the caller.
"""
from __future__ import annotations

import numpy as np

from .errors import WrongShape
from .field import FieldSpec
from .geom import ProjLine, ProjPoint
from .linalg import nullspace
from .poly import MultiPoly

FAMILIES = ("Q4", "Q5", "Q6", "Eq18")
XYZW = ("x", "y", "z", "w")


def _mono(F, e, c=None):
    return MultiPoly({tuple(e): F.one if c is None else c}, 4, XYZW, F)


def _rand(F: FieldSpec, rng: np.random.Generator, nonzero: bool = False):
    lo = 1 if nonzero else 0
    return F.decode(int(rng.integers(lo, F.q)))


def h_keys():
    return [(i, j, 4 - i - j) for i in range(5) for j in range(5 - i)]


def normal_form(F: FieldSpec, q: dict, h: dict, cubic: bool) -> MultiPoly:
    """w^2 z^2 + w (y^3 [if cubic] + z Q2) + H4 from coefficient dictionaries.

    ``q`` is keyed by (i, j) for x^i y^j, ``h`` by (i, j, k) for x^i y^j z^k.
    """
    terms = {(0, 0, 2, 2): F.one}
    if cubic:
        terms[(0, 3, 0, 1)] = F.one
    for (i, j), c in q.items():
        if c:
            terms[(i, j, 1, 1)] = c
    for (i, j, k), c in h.items():
        if c:
            terms[(i, j, k, 0)] = c
    return MultiPoly(terms, 4, XYZW, F)


def random_q4(F, rng):
    q = {(i, 2 - i): _rand(F, rng) for i in range(3)}
    h = {k: _rand(F, rng) for k in h_keys()}
    return normal_form(F, q, h, cubic=False)


def random_q5(F, rng, h220: str = "random"):
    """Q5 member; ``h220`` is "one", "zero" or "random"."""
    q = {(2, 0): F.zero, (1, 1): _rand(F, rng), (0, 2): _rand(F, rng)}
    h = {k: _rand(F, rng) for k in h_keys()}
    h[(4, 0, 0)] = F.zero
    h[(3, 1, 0)] = F.zero
    h[(3, 0, 1)] = _rand(F, rng, nonzero=True)
    if h220 == "one":
        h[(2, 2, 0)] = F.one
    elif h220 == "zero":
        h[(2, 2, 0)] = F.zero
    return normal_form(F, q, h, cubic=True)


def q6_coefficients(F, rng):
    q20 = _rand(F, rng, nonzero=True)
    q = {(2, 0): q20, (1, 1): _rand(F, rng), (0, 2): _rand(F, rng)}
    h = {k: _rand(F, rng) for k in h_keys()}
    quarter = F.element(4).inverse()
    h[(4, 0, 0)] = q20 * q20 * quarter
    h[(3, 1, 0)] = q20 * q[(1, 1)] * (2 * quarter)
    h[(3, 0, 1)] = F.zero
    return q, h


def random_q6(F, rng):
    q, h = q6_coefficients(F, rng)
    return normal_form(F, q, h, cubic=True)


def random_eq18(F, rng):
    """Q20 x^2 + Q11 x y + Q02 y^2 with Q02(0, y, z, w) = c (z w - y^2).

    The conic (0 : t : 1 : t^2) then lies on the surface.
    """
    def quad():
        out = MultiPoly({}, 4, XYZW, F)
        for i in range(4):
            for j in range(i, 4):
                e = [0] * 4
                e[i] += 1
                e[j] += 1
                out = out + _mono(F, e, _rand(F, rng))
        return out

    x, y, z, w = (MultiPoly.var(i, 4, XYZW, F) for i in range(4))
    Q20, Q11 = quad(), quad()
    c = _rand(F, rng, nonzero=True)
    L = sum((g * _rand(F, rng) for g in (x, y, z, w)), MultiPoly({}, 4, XYZW, F))
    Q02 = (z * w - y * y) * c + x * L
    return Q20 * x * x + Q11 * x * y + Q02 * y * y


def random_surface(family: str, F: FieldSpec, rng, **kw) -> MultiPoly:
    if family == "Q4":
        return random_q4(F, rng)
    if family == "Q5":
        return random_q5(F, rng, **kw)
    if family == "Q6":
        return random_q6(F, rng)
    if family == "Eq18":
        return random_eq18(F, rng)
    raise WrongShape(f"unknown family {family!r}")


def random_line(F, rng, avoid_cone: bool = True) -> ProjLine:
    while True:
        a = [_rand(F, rng) for _ in range(4)]
        b = [_rand(F, rng) for _ in range(4)]
        try:
            ln = ProjLine(a, b) if any(a) and any(b) else None
        except Exception:
            ln = None
        if ln is None:
            continue
        if avoid_cone and not ln.a.coords[2] and not ln.b.coords[2]:
            continue
        O = ProjPoint((F.zero, F.zero, F.zero, F.one))
        if avoid_cone and ln.contains(O):
            continue
        return ln


def plant_line(family: str, F: FieldSpec, rng, line: ProjLine | None = None):
    """A Q4/Q5/Q6 member containing ``line`` (random if omitted).

    The quadratic coefficients and the constrained quartic coefficients are
    drawn first; the free h_ijk are then solved for linearly.
    Returns (surface, line).
    """
    if line is None:
        for _ in range(200):
            try:
                return plant_line(family, F, rng, random_line(F, rng))
            except WrongShape:
                continue
        raise WrongShape("could not plant a random line")
    if family == "Q6":
        q, h = q6_coefficients(F, rng)
        fixed = {(4, 0, 0), (3, 1, 0), (3, 0, 1)}
        cubic = True
    elif family == "Q5":
        q = {(2, 0): F.zero, (1, 1): _rand(F, rng), (0, 2): _rand(F, rng)}
        h = {k: F.zero for k in h_keys()}
        fixed = {(4, 0, 0), (3, 1, 0)}
        cubic = True
    elif family == "Q4":
        q = {(i, 2 - i): _rand(F, rng) for i in range(3)}
        h = {k: F.zero for k in h_keys()}
        fixed = set()
        cubic = False
    else:
        raise WrongShape("planted lines are supported for Q4, Q5 and Q6")
    free = [k for k in h_keys() if k not in fixed]
    base = {k: (h[k] if k in fixed else F.zero) for k in h_keys()}
    s, t = MultiPoly.var(0, 2, ("s", "t"), F), MultiPoly.var(1, 2, ("s", "t"), F)
    param = [s * a + t * b for a, b in zip(line.a.coords, line.b.coords)]
    const = normal_form(F, q, base, cubic).compose(param, 2, ("s", "t"))
    cols = [_mono(F, (i, j, k, 0)).compose(param, 2, ("s", "t")) for i, j, k in free]
    exps = [(4 - d, d) for d in range(5)]
    # sum_c coef_c * cols[c] = -const, for each binary monomial
    rows = [[col.coefficient(e) for col in cols] + [const.coefficient(e)] for e in exps]
    ns = nullspace(rows, len(free) + 1, F.one)
    if not any(v[-1] for v in ns):
        raise WrongShape("the line cannot lie on a member of this family")
    for _ in range(100):
        # random combination of the solutions, scaled to last coordinate 1
        combo = [F.zero] * (len(free) + 1)
        for v in ns:
            r = _rand(F, rng)
            combo = [a + r * b for a, b in zip(combo, v)]
        if not combo[-1]:
            continue
        inv = combo[-1].inverse()
        hh = dict(base)
        for k, c in zip(free, combo):
            hh[k] = c * inv
        if family == "Q5" and not hh[(3, 0, 1)]:
            continue
        return normal_form(F, q, hh, cubic), line
    raise WrongShape("could not plant the line")
