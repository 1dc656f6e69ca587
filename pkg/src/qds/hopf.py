"""Hopf *-algebras by structure constants, functionals and the dual algebra.

Comultiplication convention: ``Delta b_i = sum d[i, j, k] b_j (x) b_k``.
Functionals are covectors ``phi_i = phi(b_i)``; the antipode matrix has
``S(b_i) = sum_k S[k, i] b_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _sparse
from . import linalg as la
from .staralg import StarAlgebra, _dense, sparse_from_dense


class AxiomError(ValueError):
    def __init__(self, message: str, report: "AxiomReport | None" = None):
        super().__init__(message)
        self.report = report


class NotAQuantumGroupError(ValueError):
    pass


class HaarNotFaithfulError(ArithmeticError):
    pass


class UnsupportedNonTracialError(NotImplementedError):
    pass


class NoAntipodeError(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"no antipode solves the antipode equations (residual {residual:.3e})")
        self.residual = residual


@dataclass(eq=False)
class HopfStarAlgebra:
    alg: StarAlgebra
    comult: dict
    counit: np.ndarray
    antipode: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        d = self.alg.dim
        if len(self.counit) != d:
            raise ValueError("counit has wrong length")
        for key in self.comult:
            if len(key) != 3 or not all(0 <= i < d for i in key):
                raise ValueError(f"comultiplication index out of range: {key}")
        if self.antipode is not None and self.antipode.shape != (d, d):
            raise ValueError("antipode has wrong shape")

    @property
    def dim(self) -> int:
        return self.alg.dim

    @property
    def labels(self) -> tuple:
        return self.alg.labels

    @cached_property
    def exact(self) -> bool:
        return (self.alg.exact and la.is_exact_array(self.counit)
                and all(la.is_exact(v) for v in self.comult.values())
                and (self.antipode is None or la.is_exact_array(self.antipode)))

    @cached_property
    def d(self) -> np.ndarray:
        return la.promote(_dense(self.comult, (self.dim,) * 3, self.exact))

    @cached_property
    def d_exact(self) -> np.ndarray:
        return _dense(self.comult, (self.dim,) * 3, True)

    @cached_property
    def d_gauss(self) -> la.GaussTensor:
        return la.GaussTensor.from_exact(self.d_exact)

    @cached_property
    def s(self) -> np.ndarray:
        return la.promote(self.get_antipode())

    def get_antipode(self) -> np.ndarray:
        if self.antipode is None:
            self.antipode = solve_antipode(self)
        return self.antipode

    def with_antipode(self) -> "HopfStarAlgebra":
        self.get_antipode()
        return self

    @cached_property
    def haar(self) -> "HaarState":
        return haar_state(self)

    # functional helpers that pick exact arithmetic when both sides allow it
    def _exact_ok(self, *xs) -> bool:
        return self.exact and all(la.is_exact_array(np.asarray(x)) for x in xs)

    def convolve(self, phi, psi) -> np.ndarray:
        return convolve(self, phi, psi)

    def dagger(self, phi) -> np.ndarray:
        return dagger(self, phi)


# -- functionals -----------------------------------------------------------

def convolve(h: HopfStarAlgebra, phi, psi) -> np.ndarray:
    """``(phi * psi)(b_i) = sum_jk d[i,j,k] phi_j psi_k``."""
    phi, psi = np.asarray(phi), np.asarray(psi)
    if h._exact_ok(phi, psi):
        out = la.exact_zeros(h.dim)
        for (i, j, k), v in h.comult.items():
            if phi[j] and psi[k]:
                out[i] += v * phi[j] * psi[k]
        return out
    return np.einsum("ijk,j,k->i", h.d, la.promote(phi), la.promote(psi), optimize=True)


def dagger(h: HopfStarAlgebra, phi) -> np.ndarray:
    """``phi^dagger(a) = conj(phi(a^*))``; as covectors ``M^H conj(phi)``."""
    phi = np.asarray(phi)
    if h._exact_ok(phi):
        return la.AntilinearMap(la.conj_array(h.alg.star_matrix).T.copy())(phi)
    return h.alg.m.conj().T @ np.conj(la.promote(phi))


def evaluate(phi, x):
    phi, x = np.asarray(phi), np.asarray(x)
    if la.is_exact_array(phi) and la.is_exact_array(x):
        acc = la.ZERO
        for a, b in zip(phi, x):
            if a and b:
                acc += a * b
        return acc
    return complex(la.promote(phi) @ la.promote(x))


def gram(h: HopfStarAlgebra, phi) -> np.ndarray:
    """``G[i, j] = phi(b_i^* b_j)``; positive semidefinite iff ``phi`` is positive."""
    phi = np.asarray(phi)
    if h._exact_ok(phi):
        t = la.exact_einsum("ajk,k->aj", h.alg.c_exact, phi)
        return la.exact_einsum("ai,aj->ij", h.alg.star_matrix, t)
    return np.einsum("ai,ajk,k->ij", h.alg.m, h.alg.c, la.promote(phi), optimize=True)


def is_state(h: HopfStarAlgebra, phi, tol: float | None = None) -> tuple[bool, float]:
    """Normalised and positive; returns the minimal Gram eigenvalue."""
    tol = la.resolve_tol(tol)
    lam = la.min_eigenvalue(gram(h, phi))
    one = evaluate(phi, h.alg.unit)
    return abs(la.to_complex(one) - 1) <= tol and lam >= -tol, lam


# -- axioms ----------------------------------------------------------------

@dataclass
class AxiomReport:
    residuals: dict
    exact: bool
    tol: float

    @property
    def passed(self) -> bool:
        if self.exact:
            return all(r == 0.0 for r in self.residuals.values())
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def failures(self) -> list[str]:
        lim = 0.0 if self.exact else self.tol
        return [k for k, r in self.residuals.items() if r > lim]

    @property
    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)


def verify_axioms(h: HopfStarAlgebra, tol: float | None = None, antipode: bool = True) -> AxiomReport:
    """Residual of every Hopf *-algebra axiom (exactly zero for exact passing input)."""
    tol = la.resolve_tol(tol)
    exact = h.exact
    d = h.dim
    Lin = _sparse.Lin
    mu = Lin.from_entries({(k, i * d + j): v for (i, j, k), v in h.alg.mult.items()}, (d, d * d), exact)
    dl = Lin.from_entries({(j * d + k, i): v for (i, j, k), v in h.comult.items()}, (d * d, d), exact)
    m = Lin.from_dense(h.alg.star_matrix, exact)
    u = Lin.from_dense(h.alg.unit, exact)
    e = Lin.from_dense(np.asarray(h.counit)[None, :], exact)
    eye = Lin.identity(d)
    one = Lin.identity(1)
    flip = Lin.permutation(_sparse.flip_perm(d), d * d)
    swap = Lin.permutation(_sparse.middle_swap_perm(d), d**4)
    checks = {
        "associativity": [(mu @ mu.kron(eye), mu @ eye.kron(mu))],
        "unit": [(mu @ u.kron(eye), eye), (mu @ eye.kron(u), eye)],
        "star_involution": [(m @ m.conj(), eye)],
        "star_antimultiplicative": [(m @ mu.conj(), mu @ m.kron(m) @ flip)],
        "star_unit": [(m @ u.conj(), u)],
        "comult_multiplicative": [(dl @ mu, mu.kron(mu) @ swap @ dl.kron(dl))],
        "comult_unit": [(dl @ u, u.kron(u))],
        "comult_star": [(dl @ m, m.kron(m) @ dl.conj())],
        "coassociativity": [(dl.kron(eye) @ dl, eye.kron(dl) @ dl)],
        "counit": [(e.kron(eye) @ dl, eye), (eye.kron(e) @ dl, eye)],
        "counit_multiplicative": [(e @ mu, e.kron(e)), (e @ u, one)],
    }
    if antipode:
        try:
            sm = Lin.from_dense(h.get_antipode(), exact)
        except NoAntipodeError as exc:
            checks["antipode"] = None
            antipode_res = exc.residual if exc.residual > 0 else float("inf")
        else:
            target = u @ e
            checks["antipode"] = [(mu @ sm.kron(eye) @ dl, target), (mu @ eye.kron(sm) @ dl, target)]
    res = {}
    for name, pairs in checks.items():
        if pairs is None:
            res[name] = antipode_res
            continue
        worst = 0.0
        for a, b in pairs:
            val, certified = _sparse.difference(a, b, exact)
            if not certified:
                return _verify_dense(h, tol, antipode)
            worst = max(worst, val)
        res[name] = worst
    return AxiomReport(res, exact, tol)


def _verify_dense(h: HopfStarAlgebra, tol: float, antipode: bool) -> AxiomReport:
    exact = h.exact
    d = h.dim
    if exact:
        G = la.GaussTensor
        ein = la.gauss_einsum
        c, dd, m = h.alg.c_gauss, h.d_gauss, G.from_exact(h.alg.star_matrix)
        u, e = G.from_exact(h.alg.unit), G.from_exact(h.counit)
        eye = G.from_exact(la.exact_identity(d))

        def cj(x):
            return x.conj()

        def mx(x):
            return x.max_abs()
    else:
        def ein(s, *ops):
            return np.einsum(s, *[la.promote(o) for o in ops], optimize=True)
        c, dd, m = h.alg.c, h.d, h.alg.m
        u, e = la.promote(h.alg.unit), la.promote(h.counit)
        eye = np.eye(d)
        cj = np.conj
        mx = la.max_abs
    res = {}
    res["associativity"] = mx(ein("ijm,mkn->ijkn", c, c) - ein("jkm,imn->ijkn", c, c))
    res["unit"] = max(mx(ein("i,ijk->jk", u, c) - eye), mx(ein("j,ijk->ik", u, c) - eye))
    res["star_involution"] = mx(ein("ij,jk->ik", m, cj(m)) - eye)
    res["star_antimultiplicative"] = mx(
        ein("ijk,nk->ijn", cj(c), m) - ein("aj,bi,abn->ijn", m, m, c))
    res["star_unit"] = mx(ein("ij,j->i", m, cj(u)) - u)
    xs = ein("ipq,prm->iqrm", dd, c)
    rhs = ein("iqrm,jrs,qsn->ijmn", xs, dd, c)
    res["comult_multiplicative"] = mx(ein("ijk,kab->ijab", c, dd) - rhs)
    res["comult_unit"] = mx(ein("i,iab->ab", u, dd) - ein("a,b->ab", u, u))
    res["comult_star"] = mx(
        ein("ki,kab->iab", m, dd) - ein("ipq,ap,bq->iab", cj(dd), m, m))
    res["coassociativity"] = mx(ein("ikc,kab->iabc", dd, dd) - ein("iak,kbc->iabc", dd, dd))
    res["counit"] = max(mx(ein("j,ijk->ik", e, dd) - eye),
                        mx(ein("k,ijk->ij", e, dd) - eye))
    res["counit_multiplicative"] = max(
        mx(ein("ijk,k->ij", c, e) - ein("i,j->ij", e, e)),
        abs(la.to_complex(evaluate(h.counit, h.alg.unit)) - 1))
    if antipode:
        try:
            s = h.get_antipode()
        except NoAntipodeError as exc:
            res["antipode"] = exc.residual if exc.residual > 0 else float("inf")
        else:
            s = la.GaussTensor.from_exact(s) if exact else la.promote(s)
            target = ein("i,n->in", e, u)
            res["antipode"] = max(
                mx(ein("iab,ka,kbn->in", dd, s, c) - target),
                mx(ein("iab,kb,akn->in", dd, s, c) - target))
    return AxiomReport(res, exact, tol)


# -- antipode ---------------------------------------------------------------

def solve_antipode(h: HopfStarAlgebra, tol: float | None = None) -> np.ndarray:
    """Solve ``m(S (x) id) Delta = eta epsilon = m(id (x) S) Delta`` for S.

    Unknown columns ``S(b_a)`` are coupled only when ``b_a`` occurs in a
    common coproduct, so the system splits into independent components.
    Exact input gets an exact answer: small components are solved exactly,
    large ones by least squares followed by rationalisation and an exact check.
    """
    tol = la.resolve_tol(tol)
    d = h.dim
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_row: dict = {}
    for (i, a, b), v in h.comult.items():
        by_row.setdefault(i, []).append((a, b, v))
    for terms in by_row.values():
        cols = {a for a, _, _ in terms} | {b for _, b, _ in terms}
        cols = sorted(cols)
        for x in cols[1:]:
            parent[find(x)] = find(cols[0])
    comps: dict = {}
    for a in range(d):
        comps.setdefault(find(a), []).append(a)

    cpairs = h.alg._by_pair
    exact = h.exact
    s_out = la.exact_zeros((d, d)) if exact else np.zeros((d, d), dtype=complex)
    for members in comps.values():
        idx = {a: n for n, a in enumerate(members)}
        nun = len(members) * d          # unknown S[k, a] -> idx[a]*d + k
        rows_i = [i for i in by_row if any(a in idx for a, _, _ in by_row[i])]
        rows = []
        rhs = []
        for i in rows_i:
            terms = by_row[i]
            eps_i = h.counit[i]
            # left law: sum d[i,a,b] S[k,a] c[k,b,n]
            left: dict = {}
            right: dict = {}
            for a, b, v in terms:
                for k in range(d):
                    for n, cv in cpairs.get((k, b), ()):
                        key = (n, idx[a] * d + k)
                        left[key] = left.get(key, 0) + v * cv
                    for n, cv in cpairs.get((a, k), ()):
                        key = (n, idx[b] * d + k)
                        right[key] = right.get(key, 0) + v * cv
            for eq in (left, right):
                grouped: dict = {}
                for (n, col), val in eq.items():
                    grouped.setdefault(n, {})[col] = val
                for n in range(d):
                    rows.append(grouped.get(n, {}))
                    rhs.append(eps_i * h.alg.unit[n])
        sol = _solve_component(rows, rhs, nun, exact, tol)
        for a, pos in idx.items():
            s_out[:, a] = sol[pos * d:(pos + 1) * d]
    return s_out


def _solve_component(rows, rhs, nun, exact, tol):
    if exact and nun <= 256:
        a_rows = [dict(r) for r in rows]
        for r, b in zip(a_rows, rhs):
            r[nun] = b
        aug = la.domain_matrix(a_rows, nun + 1)
        rref, pivots = aug.rref()
        if nun in pivots:
            raise NoAntipodeError(float("inf"))
        dense = rref.to_dense().to_list()
        x = la.exact_zeros(nun)
        for r, p in enumerate(pivots):
            x[p] = la.QQ_I.convert(dense[r][nun])
        if len(pivots) != nun:
            raise NoAntipodeError(0.0)
        return x
    a = np.zeros((len(rows), nun), dtype=complex)
    for r, row in enumerate(rows):
        for col, v in row.items():
            a[r, col] = la.to_complex(v)
    b = np.array([la.to_complex(v) for v in rhs])
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    res = float(np.linalg.norm(a @ x - b))
    if res > tol * max(1.0, float(np.linalg.norm(b))):
        raise NoAntipodeError(res)
    if not exact:
        return x
    xq = la.exact_vector([la.rationalize(v) for v in x])
    for row, bv in zip(rows, rhs):
        acc = -la.QQ_I.convert(bv)
        for col, v in row.items():
            acc += la.QQ_I.convert(v) * xq[col]
        if acc:
            raise NoAntipodeError(res)
    return xq


# -- Haar state --------------------------------------------------------------

@dataclass
class HaarState:
    coeffs: np.ndarray
    residual: float
    min_eigenvalue: float
    exact: bool


def haar_state(h: HopfStarAlgebra, tol: float | None = None) -> HaarState:
    """Unique normalised bi-invariant functional, certified unique and positive."""
    tol = la.resolve_tol(tol)
    d = h.dim
    if h.exact:
        rows = []
        u = h.alg.unit
        left: dict = {}
        right: dict = {}
        for (i, j, k), v in h.comult.items():
            left.setdefault((i, k), {})[j] = left.get((i, k), {}).get(j, la.ZERO) + v
            right.setdefault((i, j), {})[k] = right.get((i, j), {}).get(k, la.ZERO) + v
        for i in range(d):
            for k in range(d):
                for table in (left, right):
                    row = dict(table.get((i, k), {}))
                    if u[k]:
                        row[i] = row.get(i, la.ZERO) - u[k]
                    rows.append(row)
        rows.append({j: u[j] for j in range(d) if u[j]})
        a = la.exact_zeros((len(rows), d))
        for r, row in enumerate(rows):
            for j, v in row.items():
                a[r, j] = v
        b = la.exact_zeros(len(rows))
        b[-1] = la.ONE
        sol = la.solve_linear(a, b)
        if not sol.consistent:
            raise NotAQuantumGroupError("no normalised invariant functional")
        if sol.kernel:
            raise NotAQuantumGroupError(f"invariant functionals form a {len(sol.kernel) + 1}-dim family")
        coeffs = sol.x
        residual = 0.0
    else:
        dd = h.d
        u = la.promote(h.alg.unit)
        eye = np.eye(d)
        left = np.einsum("ijk->ikj", dd).reshape(d * d, d) - np.einsum("ij,k->ikj", eye, u).reshape(d * d, d)
        right = dd.reshape(d * d, d) - np.einsum("ij,k->ikj", eye, u).reshape(d * d, d)
        a = np.vstack([left, right, u[None, :]])
        b = np.zeros(a.shape[0], dtype=complex)
        b[-1] = 1
        sol = la.solve_linear(a, b, tol)
        if not sol.consistent:
            raise NotAQuantumGroupError(f"no normalised invariant functional (residual {sol.residual:.3e})")
        if len(sol.kernel):
            raise NotAQuantumGroupError(f"invariant functionals form a {len(sol.kernel) + 1}-dim family")
        coeffs = sol.x
        residual = sol.residual
    lam = la.min_eigenvalue(gram(h, coeffs))
    if lam < -tol:
        raise NotAQuantumGroupError(f"invariant functional is not positive (min eigenvalue {lam:.3e})")
    return HaarState(coeffs, residual, lam, h.exact)


# -- flags -----------------------------------------------------------------

@dataclass
class Flag:
    value: bool
    residual: float


def is_commutative(h: HopfStarAlgebra, tol: float | None = None) -> Flag:
    ok, res = h.alg.is_commutative(tol)
    return Flag(ok, res)


def is_cocommutative(h: HopfStarAlgebra, tol: float | None = None) -> Flag:
    if h.exact:
        dd = h.d_exact
        res = la.max_abs(dd - dd.transpose(0, 2, 1))
        return Flag(res == 0.0, res)
    res = la.max_abs(h.d - h.d.transpose(0, 2, 1))
    return Flag(res <= la.resolve_tol(tol), res)


def is_kac(h: HopfStarAlgebra, tol: float | None = None) -> Flag:
    """Tracial Haar state and involutive antipode."""
    hv = h.haar.coeffs
    if h.exact:
        k = la.exact_einsum("ijk,k->ij", h.alg.c_exact, hv)
        s = h.get_antipode()
        res = max(la.max_abs(k - k.T), la.max_abs(la.exact_einsum("ij,jk->ik", s, s) - la.exact_identity(h.dim)))
        return Flag(res == 0.0, res)
    k = np.einsum("ijk,k->ij", h.alg.c, la.promote(hv))
    s = h.s
    res = max(la.max_abs(k - k.T), la.max_abs(s @ s - np.eye(h.dim)))
    return Flag(res <= la.resolve_tol(tol), res)


# -- dual -------------------------------------------------------------------

def dual_algebra(h: HopfStarAlgebra) -> StarAlgebra:
    """The convolution *-algebra of functionals.

    Product is convolution, unit the counit and ``phi^*(a) = conj(phi(S(a)^*))``.
    """
    mult = {(j, k, i): v for (i, j, k), v in h.comult.items()}
    s = h.get_antipode()
    if h.exact:
        mstar = la.exact_einsum("ki,mk->im", s, la.conj_array(h.alg.star_matrix))
    else:
        mstar = la.promote(s).T @ h.alg.m.conj().T
    labels = tuple(f"{lab}^" for lab in h.labels)
    return StarAlgebra(mult, h.counit.copy(), mstar, labels)


# -- densities -------------------------------------------------------------

def haar_matrix(h: HopfStarAlgebra) -> np.ndarray:
    """``K[i, j] = h(b_i b_j)``."""
    if h.exact:
        return la.exact_einsum("ijk,k->ij", h.alg.c_exact, h.haar.coeffs)
    return np.einsum("ijk,k->ij", h.alg.c, la.promote(h.haar.coeffs))


def functional_of(h: HopfStarAlgebra, x) -> np.ndarray:
    """The functional ``h(x .)``."""
    x = np.asarray(x)
    k = haar_matrix(h)
    if h._exact_ok(x):
        return la.exact_einsum("ij,i->j", k, x)
    return la.promote(k).T @ la.promote(x)


def density_of(h: HopfStarAlgebra, phi, tol: float | None = None) -> np.ndarray:
    """The unique ``x`` with ``phi = h(x .)``."""
    phi = np.asarray(phi)
    k = haar_matrix(h)
    if h._exact_ok(phi):
        sol = la.solve_linear(np.ascontiguousarray(k.T), phi)
        if not sol.consistent or sol.kernel:
            raise HaarNotFaithfulError("Haar state is not faithful")
        return sol.x
    kf = la.promote(k)
    if np.linalg.cond(kf) > 1e12:
        raise HaarNotFaithfulError("Haar state is not faithful")
    return np.linalg.solve(kf.T, la.promote(phi))


def gns_frame(h: HopfStarAlgebra) -> np.ndarray:
    """``W`` with ``h(a^* b) = <W a, W b>`` (upper Cholesky factor of the Haar Gram)."""
    g = la.promote(gram(h, h.haar.coeffs))
    g = (g + g.conj().T) / 2
    try:
        return np.linalg.cholesky(g).conj().T
    except np.linalg.LinAlgError as exc:
        raise HaarNotFaithfulError("Haar Gram matrix is singular") from exc


def gns_operator(h: HopfStarAlgebra, x) -> np.ndarray:
    """Left multiplication by ``x`` in GNS-orthonormal coordinates."""
    w = gns_frame(h)
    return w @ h.alg.left_matrix(x) @ np.linalg.inv(w)


def operator_norm(h: HopfStarAlgebra, x) -> float:
    return float(np.linalg.norm(gns_operator(h, x), 2))


# -- expectations and centrality ---------------------------------------------

class NotIdempotentError(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"functional is not an idempotent state (residual {residual:.3e})")
        self.residual = residual


@dataclass
class ConditionalExpectation:
    matrix: np.ndarray
    side: str
    residuals: dict = field(default_factory=dict)

    def __call__(self, a):
        return la.promote(self.matrix) @ la.promote(a)


def conditional_expectation(h: HopfStarAlgebra, omega, side: str = "left",
                            tol: float | None = None) -> ConditionalExpectation:
    """``(id (x) omega) Delta`` for ``side='left'``, ``(omega (x) id) Delta`` otherwise."""
    tol = la.resolve_tol(tol)
    omega = la.promote(omega)
    idem = la.max_abs(convolve(h, omega, omega) - omega)
    ok, _ = is_state(h, omega, tol)
    if idem > tol or not ok:
        raise NotIdempotentError(idem)
    if side == "left":
        e = np.einsum("ijk,k->ji", h.d, omega)
    elif side == "right":
        e = np.einsum("ijk,j->ki", h.d, omega)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    u = la.promote(h.alg.unit)
    hv = la.promote(h.haar.coeffs)
    residuals = {
        "idempotent": la.max_abs(e @ e - e),
        "unital": la.max_abs(e @ u - u),
        "haar": la.max_abs(hv @ e - hv),
    }
    return ConditionalExpectation(e, side, residuals)


def is_central(h: HopfStarAlgebra, phi, tol: float | None = None) -> Flag:
    """Does ``phi`` commute with every functional under convolution?"""
    phi = la.promote(phi)
    left = np.einsum("mji,j->im", h.d, phi)
    right = np.einsum("mik,k->im", h.d, phi)
    res = la.max_abs(left - right)
    return Flag(res <= la.resolve_tol(tol), res)


def sparse_comult(dense: np.ndarray, tol: float = 0.0) -> dict:
    return sparse_from_dense(dense, tol)
