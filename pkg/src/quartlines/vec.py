"""Vectorised arithmetic on encoded field elements.

Elements are numpy int64 codes ``c0 + c1*p``.  This is the hot path behind
line enumeration, direction scans and evaluation-interpolation determinants;
scalar code elsewhere uses :class:`~quartlines.field.FieldElement`.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .field import FieldElement, FieldSpec


class VecField:
    def __init__(self, F: FieldSpec):
        self.F = F
        self.p = F.p
        self.q = F.q
        self.r = F.nonresidue

    def encode(self, x) -> int:
        return self.F.element(x).code

    def split(self, a):
        return a % self.p, a // self.p

    def join(self, c0, c1):
        return c0 + self.p * c1

    def add(self, a, b):
        p = self.p
        if self.F.k == 1:
            return (a + b) % p
        a0, a1 = self.split(a)
        b0, b1 = self.split(b)
        return self.join((a0 + b0) % p, (a1 + b1) % p)

    def neg(self, a):
        p = self.p
        if self.F.k == 1:
            return (-a) % p
        a0, a1 = self.split(a)
        return self.join((-a0) % p, (-a1) % p)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        p = self.p
        if self.F.k == 1:
            return (a * b) % p
        a0, a1 = self.split(a)
        b0, b1 = self.split(b)
        return self.join((a0 * b0 + self.r * a1 * b1) % p, (a0 * b1 + a1 * b0) % p)

    @cached_property
    def inv_table(self) -> np.ndarray:
        tab = np.zeros(self.q, dtype=np.int64)
        for c in range(1, self.q):
            tab[c] = self.F.decode(c).inverse().code
        return tab

    def inv(self, a):
        return self.inv_table[a]

    def power(self, a, e: int):
        out = np.ones_like(a)
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def scalar_mul(self, c: int, a):
        return self.mul(np.int64(c), a)


class CompiledPoly:
    """A MultiPoly frozen for batch evaluation over one field."""

    def __init__(self, poly, F: FieldSpec):
        self.vf = VecField(F)
        self.nvars = poly.nvars
        items = sorted(poly.terms.items())
        self.exps = [e for e, _ in items]
        self.coefs = [F.element(c).code for _, c in items]
        self.maxdeg = [max((e[i] for e in self.exps), default=0) for i in range(self.nvars)]

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at an (N, nvars) array of codes; returns (N,) codes."""
        vf = self.vf
        pts = np.asarray(pts, dtype=np.int64)
        n = pts.shape[0]
        powers = []
        for i in range(self.nvars):
            col = pts[:, i]
            pw = [np.ones(n, dtype=np.int64), col]
            for _ in range(2, self.maxdeg[i] + 1):
                pw.append(vf.mul(pw[-1], col))
            powers.append(pw)
        acc = np.zeros(n, dtype=np.int64)
        for e, c in zip(self.exps, self.coefs):
            term = np.full(n, c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    term = vf.mul(term, powers[i][k])
            acc = vf.add(acc, term)
        return acc


def batched_det(vf: VecField, mats: np.ndarray) -> np.ndarray:
    """Determinants of a stack (N, n, n) of matrices of codes."""
    mats = np.array(mats, dtype=np.int64, copy=True)
    N, n, _ = mats.shape
    det = np.ones(N, dtype=np.int64)
    alive = np.ones(N, dtype=bool)
    rows = np.arange(N)
    for k in range(n):
        sub = mats[:, k:, k]
        nz = sub != 0
        has = nz.any(axis=1)
        alive &= has
        piv = k + np.argmax(nz, axis=1)
        swap = piv != k
        if swap.any():
            idx = rows[swap]
            tmp = mats[idx, k, :].copy()
            mats[idx, k, :] = mats[idx, piv[swap], :]
            mats[idx, piv[swap], :] = tmp
            det[idx] = vf.neg(det[idx])
        pivot = mats[:, k, k]
        pivot_safe = np.where(pivot == 0, 1, pivot)
        det = vf.mul(det, pivot)
        inv = vf.inv(pivot_safe)
        for i in range(k + 1, n):
            factor = vf.mul(mats[:, i, k], inv)
            mats[:, i, k:] = vf.sub(mats[:, i, k:], vf.mul(factor[:, None], mats[:, k, k:]))
    return np.where(alive, det, 0)


def inverse_vandermonde(F: FieldSpec, nodes: list[int]) -> np.ndarray:
    """Inverse of V[i][j] = node_i^j over F, as codes (scalar Gaussian elimination)."""
    els = [F.decode(c) for c in nodes]
    m = len(els)
    aug = [[e ** j for j in range(m)] + [F.one if i == r else F.zero for r in range(m)]
           for i, e in enumerate(els)]
    for col in range(m):
        piv = next(r for r in range(col, m) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [v * inv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return np.array([[aug[i][m + j].code for j in range(m)] for i in range(m)], dtype=np.int64)


def interpolate_grid(vf: VecField, values: np.ndarray, vinv: np.ndarray) -> np.ndarray:
    """Tensor-product interpolation: values on nodes^d grid -> coefficient array."""
    coeffs = values
    d = values.ndim
    m = vinv.shape[0]
    for axis in range(d):
        moved = np.moveaxis(coeffs, axis, 0)
        out = np.zeros_like(moved)
        for i in range(m):
            acc = np.zeros(moved.shape[1:], dtype=np.int64)
            for j in range(m):
                if vinv[i, j]:
                    acc = vf.add(acc, vf.mul(np.int64(vinv[i, j]), moved[j]))
            out[i] = acc
        coeffs = np.moveaxis(out, 0, axis)
    return coeffs


def decode_array(F: FieldSpec, arr) -> list[FieldElement]:
    return [F.decode(int(c)) for c in np.ravel(arr)]
