"""Sparse matrix forms of the structure maps, used by the axiom checker.

Exact data are scaled to Gaussian integers; products are formed in complex
double precision together with an entrywise bound on magnitudes.  While every
bound stays below 2**52 each floating-point operation is exact, so a zero
difference certifies an exact identity.
"""

from __future__ import annotations

from math import lcm

import numpy as np
import scipy.sparse as sp

from . import linalg as la

EXACT_LIMIT = 2.0**52


class Lin:
    """A linear map as (integer-valued) sparse matrix over a common denominator."""

    __slots__ = ("m", "bound", "den")

    def __init__(self, m, bound, den: int = 1):
        self.m = sp.csr_matrix(m)
        self.bound = sp.csr_matrix(bound)
        self.den = den

    @classmethod
    def from_entries(cls, entries: dict, shape, exact: bool) -> "Lin":
        rows, cols, vals = [], [], []
        den = 1
        if exact:
            for v in entries.values():
                den = lcm(den, int(la.QQ.denom(v.x)), int(la.QQ.denom(v.y)))
        for (r, c), v in entries.items():
            if exact:
                if not v:
                    continue
                z = complex(int(la.QQ.numer(v.x)) * (den // int(la.QQ.denom(v.x))),
                            int(la.QQ.numer(v.y)) * (den // int(la.QQ.denom(v.y))))
            else:
                z = complex(v)
            rows.append(r)
            cols.append(c)
            vals.append(z)
        m = sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=shape)
        return cls(m, abs(m), den)

    @classmethod
    def from_dense(cls, arr: np.ndarray, exact: bool) -> "Lin":
        arr = np.asarray(arr)
        if arr.ndim == 1:
            arr = arr[:, None]
        entries = {}
        for idx in zip(*np.nonzero(np.vectorize(bool, otypes=[bool])(arr))):
            entries[idx] = arr[idx]
        return cls.from_entries(entries, arr.shape, exact)

    @classmethod
    def identity(cls, n: int) -> "Lin":
        return cls(sp.identity(n, dtype=complex, format="csr"), sp.identity(n, format="csr"))

    @classmethod
    def permutation(cls, perm, n: int) -> "Lin":
        m = sp.csr_matrix((np.ones(n, dtype=complex), (np.asarray(perm), np.arange(n))), shape=(n, n))
        return cls(m, abs(m))

    def __matmul__(self, other: "Lin") -> "Lin":
        return Lin(self.m @ other.m, self.bound @ other.bound, self.den * other.den)

    def kron(self, other: "Lin") -> "Lin":
        return Lin(sp.kron(self.m, other.m, format="csr"), sp.kron(self.bound, other.bound, format="csr"),
                   self.den * other.den)

    def conj(self) -> "Lin":
        return Lin(self.m.conj(), self.bound, self.den)

    def max_bound(self) -> float:
        return float(self.bound.max()) if self.bound.nnz else 0.0


def difference(a: Lin, b: Lin, exact: bool) -> tuple[float, bool]:
    """Max-abs entry of ``a - b`` (true value) and whether the result is certified."""
    if exact:
        fa, fb = b.den, a.den
        g = np.gcd(fa, fb)
        fa, fb = fa // g, fb // g
        ok = a.max_bound() * fa < EXACT_LIMIT and b.max_bound() * fb < EXACT_LIMIT
        diff = a.m * fa - b.m * fb
        den = a.den * fa
    else:
        ok = True
        diff = a.m - b.m
        den = 1
    val = float(abs(diff).max()) / den if diff.nnz else 0.0
    return val, ok


def flip_perm(d: int) -> np.ndarray:
    """Permutation matrix index map for ``x (x) y -> y (x) x``."""
    idx = np.arange(d * d)
    i, j = idx // d, idx % d
    return j * d + i


def middle_swap_perm(d: int) -> np.ndarray:
    """``a (x) b (x) c (x) e -> a (x) c (x) b (x) e`` on indices of length d**4."""
    idx = np.arange(d**4)
    a, b, c, e = idx // d**3, (idx // d**2) % d, (idx // d) % d, idx % d
    return ((a * d + c) * d + b) * d + e
