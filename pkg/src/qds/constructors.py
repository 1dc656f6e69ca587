"""Concrete Hopf *-algebras: finite groups, the graded quaternion function
algebra, crossed products by finite abelian groups and tensor products."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import linalg as la
from .hopf import HopfStarAlgebra, verify_axioms, AxiomError
from .staralg import StarAlgebra, sparse_from_dense

ONE, ZERO, IM = la.ONE, la.ZERO, la.IM


class GroupAxiomError(ValueError):
    pass


@dataclass(frozen=True)
class CayleyTable:
    """Multiplication table of a finite group, 0-based, element 0 the identity."""

    table: tuple
    names: tuple = ()

    def __post_init__(self):
        n = len(self.table)
        if any(len(row) != n for row in self.table):
            raise GroupAxiomError("table must be square and non-empty")
        t = np.asarray(self.table)
        if t.shape != (n, n) or n == 0:
            raise GroupAxiomError("table must be square and non-empty")
        if t.min() < 0 or t.max() >= n:
            raise GroupAxiomError("table entry out of range")
        if not (np.array_equal(t[0], np.arange(n)) and np.array_equal(t[:, 0], np.arange(n))):
            raise GroupAxiomError("element 1 is not the identity")
        for row in t:
            if len(set(row.tolist())) != n:
                raise GroupAxiomError("a row is not a permutation (no unique solutions)")
        for col in t.T:
            if len(set(col.tolist())) != n:
                raise GroupAxiomError("a column is not a permutation (no unique solutions)")
        assoc = t[t[:, :, None], np.arange(n)[None, None, :]]        # (ab)c
        assoc2 = t[np.arange(n)[:, None, None], t[None, :, :]]       # a(bc)
        if not np.array_equal(assoc, assoc2):
            raise GroupAxiomError("table is not associative")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"g{i}" for i in range(n)))
        if len(self.names) != n:
            raise GroupAxiomError("wrong number of element names")

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.table)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a][b])

    def inverse(self, a: int) -> int:
        return int(np.nonzero(self.t[a] == 0)[0][0])

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.t, self.t.T))

    @classmethod
    def from_function(cls, elements, op, names=None) -> "CayleyTable":
        elements = list(elements)
        index = {_key(e): i for i, e in enumerate(elements)}
        t = [[index[_key(op(a, b))] for b in elements] for a in elements]
        return cls(tuple(map(tuple, t)), tuple(names) if names else ())


def _key(x):
    if isinstance(x, np.ndarray):
        return tuple(np.round(x, 9).ravel().tolist())
    return x


# -- standard groups --------------------------------------------------------

def cyclic(n: int) -> CayleyTable:
    return CayleyTable.from_function(range(n), lambda a, b: (a + b) % n,
                                     [f"{k}" for k in range(n)])


def direct_product(g: CayleyTable, h: CayleyTable) -> CayleyTable:
    elems = [(a, b) for a in range(g.order) for b in range(h.order)]
    names = [f"({g.names[a]},{h.names[b]})" for a, b in elems]
    return CayleyTable.from_function(elems, lambda x, y: (g.mul(x[0], y[0]), h.mul(x[1], y[1])), names)


def dihedral(n: int) -> CayleyTable:
    """Symmetries of the n-gon, order 2n; ``(k, f)`` means rotation^k reflection^f."""
    elems = [(k, f) for f in (0, 1) for k in range(n)]

    def op(x, y):
        k1, f1 = x
        k2, f2 = y
        return ((k1 + (-k2 if f1 else k2)) % n, f1 ^ f2)

    names = [f"r{k}" + ("s" if f else "") for k, f in elems]
    return CayleyTable.from_function(elems, op, names)


def symmetric(n: int) -> CayleyTable:
    elems = list(itertools.permutations(range(n)))
    return CayleyTable.from_function(
        elems, lambda p, q: tuple(p[q[i]] for i in range(n)),
        ["".join(str(i + 1) for i in p) for p in elems])


QUAT_NAMES = ("1", "-1", "I", "-I", "J", "-J", "K", "-K")


def quaternion_matrices() -> list[np.ndarray]:
    """The 2x2 matrices of the eight unit quaternions, ordered like ``QUAT_NAMES``."""
    one = np.eye(2, dtype=complex)
    qi = np.array([[0, 1], [-1, 0]], dtype=complex)
    qj = np.array([[0, 1j], [1j, 0]], dtype=complex)
    qk = qi @ qj
    return [one, -one, qi, -qi, qj, -qj, qk, -qk]


def quaternion() -> CayleyTable:
    mats = quaternion_matrices()
    return CayleyTable.from_function(mats, lambda a, b: a @ b, QUAT_NAMES)


def abelian(spec: str) -> CayleyTable:
    """Finite abelian group from cyclic factors, e.g. ``"4"`` or ``"2x4"``."""
    factors = parse_abelian(spec)
    return reduce(direct_product, [cyclic(m) for m in factors])


def parse_abelian(spec) -> list[int]:
    if isinstance(spec, int):
        spec = str(spec)
    try:
        factors = [int(x) for x in str(spec).lower().replace("×", "x").split("x")]
    except ValueError as exc:
        raise ValueError(f"bad abelian group spec {spec!r}") from exc
    if not factors or any(m < 1 for m in factors):
        raise ValueError(f"bad abelian group spec {spec!r}")
    return factors


STANDARD_GROUPS = {
    "Z2": lambda: cyclic(2),
    "Z3": lambda: cyclic(3),
    "Z4": lambda: cyclic(4),
    "Z2xZ2": lambda: direct_product(cyclic(2), cyclic(2)),
    "S3": lambda: symmetric(3),
    "D4": lambda: dihedral(4),
    "H": quaternion,
    "HxZ2": lambda: direct_product(quaternion(), cyclic(2)),
    "HxZ4": lambda: direct_product(quaternion(), cyclic(4)),
}


# -- group Hopf algebras -----------------------------------------------------

def _perm_matrix(n, f):
    m = la.exact_zeros((n, n))
    for i in range(n):
        m[f(i), i] = ONE
    return m


def from_cayley(t: CayleyTable, variant: str = "functions", name: str = "") -> HopfStarAlgebra:
    """``C(G)`` (delta basis) or the group algebra (``variant='group-algebra'``)."""
    n = t.order
    inv = [t.inverse(g) for g in range(n)]
    if variant == "functions":
        mult = {(g, g, g): ONE for g in range(n)}
        comult = {(t.mul(a, b), a, b): ONE for a in range(n) for b in range(n)}
        unit = la.exact_vector([1] * n)
        counit = la.exact_vector([1 if g == 0 else 0 for g in range(n)])
        star = la.exact_identity(n)
        labels = tuple(f"d[{x}]" for x in t.names)
    elif variant == "group-algebra":
        mult = {(a, b, t.mul(a, b)): ONE for a in range(n) for b in range(n)}
        comult = {(g, g, g): ONE for g in range(n)}
        unit = la.exact_vector([1 if g == 0 else 0 for g in range(n)])
        counit = la.exact_vector([1] * n)
        star = _perm_matrix(n, lambda g: inv[g])
        labels = tuple(f"L[{x}]" for x in t.names)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    antipode = _perm_matrix(n, lambda g: inv[g])
    alg = StarAlgebra(mult, unit, star, labels)
    return HopfStarAlgebra(alg, comult, counit, antipode, name or variant)


# -- change of basis -----------------------------------------------------------

def change_basis(h: HopfStarAlgebra, p: np.ndarray, labels=None, name: str = "") -> HopfStarAlgebra:
    """Same Hopf algebra in the basis ``b'_i = sum_k p[k, i] b_k``."""
    exact = h.exact and la.is_exact_array(p)
    if exact:
        ein, pinv = la.exact_einsum, la.exact_inverse(p)
        c, dd, m = h.alg.c_exact, h.d_exact, h.alg.star_matrix
        cj = la.conj_array
        u, e = h.alg.unit, h.counit
        s = h.get_antipode()
    else:
        def ein(spec, *ops):
            return np.einsum(spec, *[la.promote(o) for o in ops], optimize=True)
        p = la.promote(p)
        pinv = np.linalg.inv(p)
        c, dd, m = h.alg.c, h.d, h.alg.m
        cj = np.conj
        u, e = la.promote(h.alg.unit), la.promote(h.counit)
        s = h.s
    c2 = ein("ai,bj,abk,lk->ijl", p, p, c, pinv)
    d2 = ein("ki,kab,ja,lb->ijl", p, dd, pinv, pinv)
    m2 = ein("ik,km,mj->ij", pinv, m, cj(p))
    u2 = ein("ik,k->i", pinv, u)
    e2 = ein("ki,k->i", p, e)
    s2 = ein("ik,km,mj->ij", pinv, s, p)
    labels = tuple(labels) if labels else tuple(f"b{i}" for i in range(h.dim))
    alg = StarAlgebra(sparse_from_dense(c2), u2, m2, labels)
    return HopfStarAlgebra(alg, sparse_from_dense(d2), e2, s2, name or h.name)


# -- graded quaternion function algebra --------------------------------------

CH_LABELS = ("1", "sI", "sJ", "sK", "p11", "p12", "p21", "p22")
CH_DEGREES = (0, 0, 0, 0, 1, 1, 1, 1)


@dataclass
class GradedCH:
    hopf: HopfStarAlgebra
    degree: tuple
    to_delta: np.ndarray        # columns: values of each basis function on the 8 elements
    group: CayleyTable

    def check_grading(self) -> bool:
        """Products, involution and coproduct respect the Z2-grading (exact check)."""
        deg = self.degree
        for (i, j, k), v in self.hopf.alg.mult.items():
            if v and deg[k] != (deg[i] + deg[j]) % 2:
                return False
        m = self.hopf.alg.star_matrix
        for i in range(8):
            for k in range(8):
                if m[k, i] and deg[k] != deg[i]:
                    return False
        for (i, j, k), v in self.hopf.comult.items():
            if v and not (deg[j] == deg[i] == deg[k]):
                return False
        return True


def _exact_value(z: complex):
    return la.gauss(int(round(z.real)), int(round(z.imag)))


def quaternion_values() -> np.ndarray:
    """Values of the homogeneous basis functions on the eight unit quaternions."""
    mats = quaternion_matrices()
    v = la.exact_zeros((8, 8))
    sign = {"sI": {"1", "-1", "I", "-I"}, "sJ": {"1", "-1", "J", "-J"}, "sK": {"1", "-1", "K", "-K"}}
    for g, (name, mat) in enumerate(zip(QUAT_NAMES, mats)):
        v[g, 0] = ONE
        for col, lab in enumerate(("sI", "sJ", "sK"), start=1):
            v[g, col] = ONE if name in sign[lab] else -ONE
        for col, (k, l) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1)), start=4):
            v[g, col] = _exact_value(mat[k, l])
    return v


def quaternion_ch() -> GradedCH:
    group = quaternion()
    delta = from_cayley(group, "functions")
    values = quaternion_values()
    h = change_basis(delta, values, CH_LABELS, "C(H)")
    graded = GradedCH(h, CH_DEGREES, values, group)
    if not graded.check_grading():
        raise AxiomError("quaternion function algebra is not graded as expected")
    return graded


# -- crossed product -------------------------------------------------------------

def crossed_product(gamma="4", ch: GradedCH | None = None) -> HopfStarAlgebra:
    """``C[Gamma] (x) C(H)`` twisted by the grading: odd elements invert Gamma."""
    ch = ch or quaternion_ch()
    grp = abelian(gamma)
    n = grp.order
    hh = ch.hopf
    deg = ch.degree
    nb = hh.dim
    dim = n * nb

    def idx(g, b):
        return g * nb + b

    mult = {}
    for (u, v, w), val in hh.alg.mult.items():
        for g in range(n):
            for g2 in range(n):
                tgt = grp.mul(g, grp.inverse(g2) if deg[u] else g2)
                mult[(idx(g, u), idx(g2, v), idx(tgt, w))] = val
    star = la.exact_zeros((dim, dim))
    hm = hh.alg.star_matrix
    for g in range(n):
        for u in range(nb):
            gt = g if deg[u] else grp.inverse(g)
            for k in range(nb):
                if hm[k, u]:
                    star[idx(gt, k), idx(g, u)] = hm[k, u]
    comult = {}
    for (u, a, b), val in hh.comult.items():
        for g in range(n):
            comult[(idx(g, u), idx(g, a), idx(g, b))] = val
    unit = la.exact_zeros(dim)
    counit = la.exact_zeros(dim)
    for u in range(nb):
        unit[idx(0, u)] = hh.alg.unit[u]
        for g in range(n):
            counit[idx(g, u)] = hh.counit[u]
    labels = tuple(f"{grp.names[g]}.{hh.labels[u]}" for g in range(n) for u in range(nb))
    alg = StarAlgebra(mult, unit, star, labels)
    return HopfStarAlgebra(alg, comult, counit, None, f"C[Z{gamma}]#C(H)")


def crossed_haar_product(gamma="4", ch: GradedCH | None = None) -> np.ndarray:
    """``h_Gamma (x) h_H``: the product of the two Haar states."""
    ch = ch or quaternion_ch()
    n = abelian(gamma).order
    hv = ch.hopf.haar.coeffs
    out = la.exact_zeros(n * ch.hopf.dim)
    out[: ch.hopf.dim] = hv
    return out


# -- tensor product -----------------------------------------------------------------

def tensor_product(a: HopfStarAlgebra, b: HopfStarAlgebra, name: str = "") -> HopfStarAlgebra:
    da, db = a.dim, b.dim
    exact = a.exact and b.exact

    def idx(i, j):
        return i * db + j

    mult = {}
    for (i, k, m), v in a.alg.mult.items():
        for (j, l, n), w in b.alg.mult.items():
            mult[(idx(i, j), idx(k, l), idx(m, n))] = v * w
    comult = {}
    for (i, p, q), v in a.comult.items():
        for (j, r, s), w in b.comult.items():
            comult[(idx(i, j), idx(p, r), idx(q, s))] = v * w
    if exact:
        kron = _exact_kron
        unit = _exact_kron(a.alg.unit[:, None], b.alg.unit[:, None])[:, 0]
        counit = _exact_kron(a.counit[:, None], b.counit[:, None])[:, 0]
        antipode = _exact_kron(a.get_antipode(), b.get_antipode())
    else:
        kron = lambda x, y: np.kron(la.promote(x), la.promote(y))
        unit = np.kron(la.promote(a.alg.unit), la.promote(b.alg.unit))
        counit = np.kron(la.promote(a.counit), la.promote(b.counit))
        antipode = np.kron(a.s, b.s)
    star = kron(a.alg.star_matrix, b.alg.star_matrix)
    labels = tuple(f"{x}*{y}" for x in a.labels for y in b.labels)
    alg = StarAlgebra(mult, unit, star, labels)
    return HopfStarAlgebra(alg, comult, counit, antipode, name or f"{a.name}(x){b.name}")


def _exact_kron(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = la.exact_zeros((x.shape[0] * y.shape[0], x.shape[1] * y.shape[1]))
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            if x[i, j]:
                for k in range(y.shape[0]):
                    for l in range(y.shape[1]):
                        if y[k, l]:
                            out[i * y.shape[0] + k, j * y.shape[1] + l] = x[i, j] * y[k, l]
    return out


def trivial() -> HopfStarAlgebra:
    """The one-dimensional Hopf algebra C1."""
    one = la.exact_vector([1])
    alg = StarAlgebra({(0, 0, 0): ONE}, one, la.exact_identity(1), ("1",))
    return HopfStarAlgebra(alg, {(0, 0, 0): ONE}, one.copy(), la.exact_identity(1), "C1")


def checked(h: HopfStarAlgebra) -> HopfStarAlgebra:
    report = verify_axioms(h)
    if not report.passed:
        raise AxiomError(f"constructed algebra fails axioms: {report.failures}", report)
    return h


def standard_hopf(name: str, variant: str = "functions") -> HopfStarAlgebra:
    """Named test algebras: group names from ``STANDARD_GROUPS`` or ``crossed:<spec>``."""
    if name.startswith("crossed:"):
        return crossed_product(name.split(":", 1)[1])
    return from_cayley(STANDARD_GROUPS[name](), variant,
                       f"C({name})" if variant == "functions" else f"C[{name}]")
