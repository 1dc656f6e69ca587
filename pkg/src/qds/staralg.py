"""Finite-dimensional *-algebras given by structure constants.

Conventions: ``b_i b_j = sum_k c[i, j, k] b_k`` and ``b_i^* = sum_k M[k, i] b_k``,
so the involution is the antilinear map ``x -> M @ conj(x)`` on coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg as la
from .linalg import AntilinearMap, InternalConsistencyError


class NonSemisimpleError(ArithmeticError):
    def __init__(self, message: str, witness: np.ndarray | None = None):
        super().__init__(message)
        self.witness = witness


def _dense(entries: dict, shape, exact: bool) -> np.ndarray:
    if exact:
        out = la.exact_zeros(shape)
    else:
        out = np.zeros(shape, dtype=complex)
    for key, v in entries.items():
        out[key] = v
    return out


def sparse_from_dense(arr: np.ndarray, tol: float = 0.0) -> dict:
    out = {}
    if la.is_exact_array(arr):
        for idx in zip(*np.nonzero(np.vectorize(bool, otypes=[bool])(arr))):
            out[tuple(int(i) for i in idx)] = arr[idx]
    else:
        for idx in zip(*np.nonzero(np.abs(arr) > tol)):
            out[tuple(int(i) for i in idx)] = complex(arr[idx])
    return out


@dataclass(eq=False)
class StarAlgebra:
    """Associative unital *-algebra over the complex numbers."""

    mult: dict
    unit: np.ndarray
    star_matrix: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        d = len(self.unit)
        if not self.labels:
            self.labels = tuple(f"b{i}" for i in range(d))
        self.labels = tuple(self.labels)
        if len(self.labels) != d or self.star_matrix.shape != (d, d):
            raise ValueError("inconsistent dimensions")
        for key in self.mult:
            if len(key) != 3 or not all(0 <= i < d for i in key):
                raise ValueError(f"structure constant index out of range: {key}")

    @property
    def dim(self) -> int:
        return len(self.unit)

    @cached_property
    def exact(self) -> bool:
        return (la.is_exact_array(self.unit) and la.is_exact_array(self.star_matrix)
                and all(la.is_exact(v) for v in self.mult.values()))

    @property
    def star(self) -> AntilinearMap:
        return AntilinearMap(self.star_matrix)

    # dense views
    @cached_property
    def c(self) -> np.ndarray:
        return la.promote(_dense(self.mult, (self.dim,) * 3, self.exact))

    @cached_property
    def c_exact(self) -> np.ndarray:
        if not self.exact:
            raise TypeError("algebra is not exact")
        return _dense(self.mult, (self.dim,) * 3, True)

    @cached_property
    def c_gauss(self) -> la.GaussTensor:
        return la.GaussTensor.from_exact(self.c_exact)

    @cached_property
    def m(self) -> np.ndarray:
        return la.promote(self.star_matrix)

    @cached_property
    def _by_pair(self) -> dict:
        out: dict = {}
        for (i, j, k), v in self.mult.items():
            out.setdefault((i, j), []).append((k, v))
        return out

    # arithmetic
    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.asarray(a), np.asarray(b)
        if a.shape != (self.dim,) or b.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: {a.shape}, {b.shape} vs {self.dim}")
        if self.exact and la.is_exact_array(a) and la.is_exact_array(b):
            out = la.exact_zeros(self.dim)
            nza = [(i, x) for i, x in enumerate(a) if x]
            nzb = [(j, y) for j, y in enumerate(b) if y]
            for i, x in nza:
                for j, y in nzb:
                    for k, v in self._by_pair.get((i, j), ()):
                        out[k] += x * y * v
            return out
        return np.einsum("i,j,ijk->k", la.promote(a), la.promote(b), self.c, optimize=True)

    def star_of(self, x: np.ndarray) -> np.ndarray:
        if self.exact and la.is_exact_array(x):
            return self.star(x)
        return self.m @ np.conj(la.promote(x))

    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of ``x -> a x``."""
        return np.einsum("i,ijk->kj", la.promote(a), self.c)

    def right_matrix(self, a: np.ndarray) -> np.ndarray:
        return np.einsum("j,ijk->ki", la.promote(a), self.c)

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[i] = 1
        return v

    def power(self, a: np.ndarray, k: int) -> np.ndarray:
        out = self.unit if la.is_exact_array(a) else la.promote(self.unit)
        for _ in range(k):
            out = self.multiply(out, a)
        return out

    def is_commutative(self, tol: float | None = None) -> tuple[bool, float]:
        if self.exact:
            c = self.c_exact
            res = la.max_abs(c - c.transpose(1, 0, 2))
            return res == 0.0, res
        res = la.max_abs(self.c - self.c.transpose(1, 0, 2))
        return res <= la.resolve_tol(tol), res

    # structure
    def center(self, tol: float | None = None) -> np.ndarray:
        """Basis of the center, as columns."""
        d = self.dim
        a = (self.c - self.c.transpose(1, 0, 2)).transpose(1, 2, 0).reshape(d * d, d)
        return la.nullspace(a, tol)

    def is_central(self, z: np.ndarray, tol: float | None = None) -> tuple[bool, float]:
        res = la.max_abs(self.left_matrix(z) - self.right_matrix(z))
        return res <= la.resolve_tol(tol), res

    @cached_property
    def trace_vector(self) -> np.ndarray:
        """Coefficients of the regular trace ``x -> Tr(L_x)``."""
        return np.einsum("ijj->i", self.c)

    @cached_property
    def trace_gram(self) -> np.ndarray:
        """``G[i, j] = Tr(L_{b_i^* b_j})``, the Gram matrix of the regular trace."""
        return np.einsum("ai,ajk,k->ij", self.m, self.c, self.trace_vector)

    def block_decompose(self, tol: float | None = None, seed: int = 0) -> "BlockDecomposition":
        return _block_decompose(self, la.resolve_tol(tol), seed)


@dataclass
class Block:
    size: int
    unit: np.ndarray                # minimal central idempotent
    units: np.ndarray               # (n, n, dim) *-matrix units
    key: tuple = ()

    def unit_of(self, k: int, l: int) -> np.ndarray:
        return self.units[k, l]


@dataclass
class BlockDecomposition:
    algebra: StarAlgebra
    blocks: list[Block]
    residual: float
    seed: int

    @property
    def sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    def unit_matrix(self) -> np.ndarray:
        """Rows are all matrix units, block by block, row-major inside a block."""
        rows = [b.units[k, l] for b in self.blocks for k in range(b.size) for l in range(b.size)]
        return np.array(rows)

    def block_of(self, x: np.ndarray, tol: float | None = None) -> list[int]:
        """Indices of blocks on which ``x`` has a non-negligible component."""
        tol = la.resolve_tol(tol)
        alg = self.algebra
        return [s for s, b in enumerate(self.blocks)
                if la.max_abs(alg.multiply(b.unit, x)) > tol * max(1.0, la.max_abs(x))]

    def reorder(self, order: list[int]) -> "BlockDecomposition":
        return BlockDecomposition(self.algebra, [self.blocks[i] for i in order],
                                  self.residual, self.seed)


@dataclass
class _Frame:
    """Orthonormal coordinates for the regular-trace inner product."""

    alg: StarAlgebra
    to_on: np.ndarray
    from_on: np.ndarray

    def op(self, a):
        return self.to_on @ self.alg.left_matrix(a) @ self.from_on

    def sa(self, x):
        return (x + self.alg.star_of(x)) / 2


def _block_decompose(alg: StarAlgebra, tol: float, seed: int) -> BlockDecomposition:
    rng = np.random.default_rng(seed)
    g = alg.trace_gram
    g = (g + g.conj().T) / 2
    w, v = np.linalg.eigh(g)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] <= 1e3 * tol * scale:
        raise NonSemisimpleError(
            f"regular trace is not faithful (min eigenvalue {w[0]:.3e})", v[:, 0])
    to_on = np.linalg.cholesky(g).conj().T
    frame = _Frame(alg, to_on, np.linalg.inv(to_on))

    zbasis = alg.center(tol)
    r = zbasis.shape[1]
    q, _ = np.linalg.qr(to_on @ zbasis)
    idems = None
    for _ in range(16):
        z = frame.sa(zbasis @ (rng.standard_normal(r) + 1j * rng.standard_normal(r)))
        t = q.conj().T @ frame.op(z) @ q
        ev, evec = np.linalg.eigh((t + t.conj().T) / 2)
        if r == 1 or np.min(np.diff(ev)) > 1e-6 * max(float(np.max(np.abs(ev))), 1.0):
            idems = [frame.from_on @ q @ evec[:, s] for s in range(r)]
            break
    if idems is None:
        raise InternalConsistencyError("could not separate central idempotents")

    blocks = []
    for p in idems:
        alpha = np.vdot(p, alg.multiply(p, p)) / np.vdot(p, p)
        z = p / alpha
        n2 = float(np.real(np.trace(alg.left_matrix(z))))
        n = int(round(np.sqrt(max(n2, 0.0))))
        if n == 0 or abs(n * n - n2) > 1e-6:
            raise NonSemisimpleError(f"block trace {n2:.6f} is not a square", z)
        blocks.append(_matrix_units(frame, z, n, rng))

    blocks.sort(key=lambda b: b.key)
    res = _decomposition_residual(alg, blocks)
    if res > 1e3 * tol:
        raise NonSemisimpleError(f"matrix-unit relations fail (residual {res:.3e})")
    return BlockDecomposition(alg, blocks, res, seed)


def _canonical_key(z: np.ndarray, n: int) -> tuple:
    rounded = np.round(z, 6) + 0.0
    return (n,) + tuple((float(x.real), float(x.imag)) for x in rounded)


def _matrix_units(frame: _Frame, z, n, rng) -> Block:
    alg = frame.alg
    d = alg.dim
    key = _canonical_key(z, n)
    if n == 1:
        return Block(1, z, z.reshape(1, 1, d), key)
    proj = frame.op(z)
    pw, pv = np.linalg.eigh((proj + proj.conj().T) / 2)
    basis = pv[:, pw > 0.5]
    if basis.shape[1] != n * n:
        raise NonSemisimpleError("block dimension mismatch", z)
    groups = [list(range(k * n, (k + 1) * n)) for k in range(n)]
    for _ in range(32):
        a = frame.sa(alg.multiply(z, rng.standard_normal(d) + 1j * rng.standard_normal(d)))
        h = basis.conj().T @ frame.op(a) @ basis
        ev, evec = np.linalg.eigh((h + h.conj().T) / 2)
        spread = max(np.ptp(ev[gr]) for gr in groups)
        gaps = min(ev[g2[0]] - ev[g1[-1]] for g1, g2 in zip(groups, groups[1:]))
        if spread < 1e-7 * max(1.0, np.max(np.abs(ev))) and gaps > 1e-4 * max(1.0, np.ptp(ev)):
            break
    else:
        raise InternalConsistencyError("could not split block into minimal projections")
    zon = frame.to_on @ z
    ps = []
    for gr in groups:
        vk = basis @ evec[:, gr]
        ps.append(frame.from_on @ (vk @ (vk.conj().T @ zon)))
    units = np.zeros((n, n, d), dtype=complex)
    units[0, 0] = ps[0]
    for k in range(1, n):
        for _ in range(32):
            y = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            x = alg.multiply(alg.multiply(ps[k], y), ps[0])
            xx = alg.multiply(alg.star_of(x), x)
            beta = np.vdot(ps[0], xx) / np.vdot(ps[0], ps[0])
            if beta.real > 1e-6:
                break
        else:
            raise InternalConsistencyError("degenerate matrix-unit seed")
        units[k, 0] = x / np.sqrt(beta.real)
        units[0, k] = alg.star_of(units[k, 0])
    for k in range(1, n):
        for l in range(1, n):
            units[k, l] = alg.multiply(units[k, 0], units[0, l])
    return Block(n, z, units, key)


def _decomposition_residual(alg: StarAlgebra, blocks: list[Block]) -> float:
    res = la.max_abs(sum(b.unit for b in blocks) - la.promote(alg.unit))
    for b in blocks:
        n = b.size
        for i in range(n):
            for j in range(n):
                res = max(res, la.max_abs(alg.star_of(b.units[i, j]) - b.units[j, i]))
                for k in range(n):
                    for l in range(n):
                        prod = alg.multiply(b.units[i, j], b.units[k, l])
                        target = b.units[i, l] if j == k else 0
                        res = max(res, la.max_abs(prod - target))
        res = max(res, la.max_abs(sum(b.units[k, k] for k in range(n)) - b.unit))
    for s, b in enumerate(blocks):
        for t in range(s + 1, len(blocks)):
            res = max(res, la.max_abs(alg.multiply(b.unit, blocks[t].unit)))
    full = np.array([u for b in blocks for u in b.units.reshape(-1, alg.dim)])
    if full.shape[0] != alg.dim:
        return float("inf")
    cond = np.linalg.cond(full)
    if not np.isfinite(cond) or cond > 1e10:
        return float("inf")
    return res


# -- real subalgebras ------------------------------------------------------

@dataclass
class RealAlgebra:
    """Real subalgebra of a complex *-algebra, given by a real basis.

    ``table[i, j, k]`` are the real structure constants in ``basis`` and
    ``unit`` the coordinates of the algebra's identity element.
    """

    ambient: StarAlgebra
    basis: np.ndarray            # (r, dim) complex vectors
    table: np.ndarray            # (r, r, r) real
    unit: np.ndarray             # (r,) real
    residual: float

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def element(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(coords, dtype=float) @ self.basis

    def coords(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        a = _realify(self.basis.T)
        c, *_ = np.linalg.lstsq(a, _realify(x[:, None])[:, 0], rcond=None)
        return c, float(np.linalg.norm(a @ c - _realify(x[:, None])[:, 0]))

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, b, self.table)

    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->kj", a, self.table)

    def center_dim(self, tol: float | None = None) -> int:
        r = self.dim
        a = (self.table - self.table.transpose(1, 0, 2)).transpose(1, 2, 0).reshape(r * r, r)
        return la.nullspace(a, tol).shape[1]

    def trace_form(self) -> np.ndarray:
        """``B(x, y) = Tr(L_{xy})`` on the real basis."""
        tr = np.einsum("ijj->i", self.table)
        return np.einsum("ijk,k->ij", self.table, tr)

    @classmethod
    def from_spanning(cls, ambient: StarAlgebra, vectors, unit: np.ndarray,
                      tol: float | None = None) -> "RealAlgebra":
        tol = la.resolve_tol(tol)
        vecs = np.array([la.promote(v) for v in vectors])
        real = _realify(vecs.T)
        u, s, _ = np.linalg.svd(real, full_matrices=False)
        rank = int(np.sum(s > 1e3 * tol * max(1.0, s[0])))
        on = u[:, :rank]
        d = ambient.dim
        basis = (on[:d] + 1j * on[d:]).T
        r = basis.shape[0]
        table = np.zeros((r, r, r))
        res = 0.0
        for i in range(r):
            for j in range(r):
                prod = ambient.multiply(basis[i], basis[j])
                pr = _realify(prod[:, None])[:, 0]
                coef = on.T @ pr
                res = max(res, float(np.linalg.norm(on @ coef - pr)))
                table[i, j] = coef
        ucoef = on.T @ _realify(la.promote(unit)[:, None])[:, 0]
        return cls(ambient, basis, table, ucoef, res)


def _realify(cols: np.ndarray) -> np.ndarray:
    cols = la.promote(cols)
    return np.vstack([cols.real, cols.imag])


@dataclass
class SpectralSplit:
    idempotents: list[np.ndarray]
    factors: list[np.ndarray]
    multiplicities: list[int]
    residual: float


def spectral_idempotents(r: RealAlgebra, a: np.ndarray, tol: float | None = None) -> SpectralSplit:
    """Idempotents of ``r`` attached to the real-irreducible factors of ``a``'s minimal polynomial.

    Each idempotent is ``g(a)`` for the polynomial ``g`` that is 1 modulo one
    primary factor and 0 modulo the others (Chinese remainders).
    """
    tol = la.resolve_tol(tol)
    la_op = r.left_matrix(a)
    norm = float(np.linalg.norm(la_op, 2)) or 1.0
    scaled = a / norm
    poly = la.minimal_polynomial_real(r.left_matrix(scaled), tol=max(tol, 1e-9))
    factors, mults = _real_factors(poly)
    primaries = [_polypow(f, m) for f, m in zip(factors, mults)]
    idems = []
    for k, fk in enumerate(primaries):
        rest = np.array([1.0])
        for j, fj in enumerate(primaries):
            if j != k:
                rest = np.polymul(rest, fj)
        inv = _poly_inverse_mod(rest, fk)
        g = np.polydiv(np.polymul(inv, rest), poly)[1]
        idems.append(_poly_eval(r, g, scaled))
    res = 0.0
    total = np.zeros(r.dim)
    for i, p in enumerate(idems):
        total = total + p
        res = max(res, float(np.max(np.abs(r.multiply(p, p) - p))))
        for q in idems[i + 1:]:
            res = max(res, float(np.max(np.abs(r.multiply(p, q)))))
    res = max(res, float(np.max(np.abs(total - r.unit))))
    return SpectralSplit(idems, factors, mults, res)


def _real_factors(poly: np.ndarray, cluster: float = 1e-5):
    roots = np.roots(poly)
    used = [False] * len(roots)
    groups = []
    for i, z in enumerate(roots):
        if used[i]:
            continue
        members = [j for j in range(len(roots)) if not used[j] and abs(roots[j] - z) < cluster * max(1, abs(z))]
        for j in members:
            used[j] = True
        groups.append((np.mean(roots[members]), len(members)))
    factors, mults, seen = [], [], []
    for z, m in groups:
        if any(abs(z - w) < cluster * max(1, abs(z)) for w in seen):
            continue
        if abs(z.imag) < cluster * max(1, abs(z)):
            factors.append(np.array([1.0, -z.real]))
        else:
            seen.append(np.conj(z))
            factors.append(np.array([1.0, -2 * z.real, abs(z) ** 2]))
        mults.append(m)
    return factors, mults


def _polypow(f, m):
    out = np.array([1.0])
    for _ in range(m):
        out = np.polymul(out, f)
    return out


def _poly_inverse_mod(q: np.ndarray, f: np.ndarray) -> np.ndarray:
    """``u`` with ``u*q = 1 mod f`` by solving the Bezout system."""
    n = len(f) - 1
    q = np.polydiv(q, f)[1]
    # columns: x^k q mod f for k < n
    cols = []
    for k in range(n):
        shifted = np.polymul(q, np.concatenate([[1.0], np.zeros(k)]))
        rem = np.polydiv(shifted, f)[1]
        cols.append(np.concatenate([np.zeros(n - len(rem)), rem]))
    mat = np.array(cols).T
    target = np.zeros(n)
    target[-1] = 1.0
    coef = np.linalg.solve(mat, target)
    return coef[::-1]


def _poly_eval(r: RealAlgebra, poly: np.ndarray, a: np.ndarray) -> np.ndarray:
    out = np.zeros(r.dim)
    for c in np.atleast_1d(poly):
        out = r.multiply(out, a) + c * r.unit
    return out
