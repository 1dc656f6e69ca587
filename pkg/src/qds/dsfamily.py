"""Hermitian block algebras, their real type, and square roots of the Haar state."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg as la
from .corep import DualDecomposition, extract_irreps
from .hopf import (HopfStarAlgebra, UnsupportedNonTracialError, convolve, dagger, density_of,
                   evaluate, gns_operator, gram, is_cocommutative, is_kac)
from .linalg import InternalConsistencyError
from .staralg import RealAlgebra, StarAlgebra, spectral_idempotents

REAL, COMPLEX, QUATERNION = "RealType", "ComplexType", "QuaternionType"
FIELD = {REAL: "R", COMPLEX: "C", QUATERNION: "H"}


# -- R_s ---------------------------------------------------------------------

@dataclass
class HermitianBlockAlgebra:
    s: int
    partner: int
    n: int
    real: RealAlgebra
    residual: float

    @property
    def dim(self) -> int:
        return self.real.dim

    @property
    def expected_dim(self) -> int:
        return self.n ** 2 if self.s == self.partner else 2 * self.n ** 2


def hermitian_subalgebra(dd: DualDecomposition, s: int, tol: float | None = None) -> HermitianBlockAlgebra:
    """Real algebra of dagger-fixed functionals supported on the blocks ``{s, s^c}``."""
    h = dd.hopf
    ir = dd.irreps[s]
    span = []
    for k in range(ir.dim):
        for l in range(ir.dim):
            e = ir.block.units[k, l]
            span.append(e + dagger(h, e))
            span.append(1j * e + dagger(h, 1j * e))
    r = RealAlgebra.from_spanning(dd.dual, span, dd.pair_unit(s), tol)
    out = HermitianBlockAlgebra(s, ir.partner, ir.dim, r, r.residual)
    if out.dim != out.expected_dim:
        raise InternalConsistencyError(
            f"hermitian block algebra has dimension {out.dim}, expected {out.expected_dim}")
    return out


# -- classification ------------------------------------------------------------

@dataclass
class BlockClassification:
    s: int
    partner: int
    n: int
    kind: str
    m: int
    q: np.ndarray | None = None
    c: float | None = None
    residual: float = 0.0
    signature: tuple = ()
    center_dim: int = 0
    cross_check: bool = True

    @property
    def division(self) -> bool:
        return self.m == 1

    @property
    def field(self) -> str:
        return FIELD[self.kind]

    def describe(self) -> str:
        f = self.field
        return f if self.m == 1 else f"M{self.m}({f})"


def solve_intertwiner(t_mats: dict, n: int) -> tuple[np.ndarray, float, float]:
    """Solve ``T_ij Q = Q E_ij`` for all matrix units; returns ``(Q, c, residual)``.

    ``T_ij`` is the coordinate matrix of the antilinear automorphism applied to
    ``E_ij``, so the automorphism is ``A -> Q conj(A) Q^{-1}``. Q is scaled to ``|det Q| = 1``,
    which makes ``Q conj(Q) = c I`` with ``c = +-1``.
    """
    rows = []
    for (i, j), t in t_mats.items():
        e = np.zeros((n, n))
        e[i, j] = 1
        cols = []
        for a in range(n):
            for b in range(n):
                bq = np.zeros((n, n))
                bq[a, b] = 1
                cols.append((t @ bq - bq @ e).ravel())
        rows.append(np.array(cols).T)
    system = np.vstack(rows)
    _, sv, vh = np.linalg.svd(system)
    small = int(np.sum(sv < 1e-6 * max(1.0, sv[0])))
    kdim = small + n * n - sv.size
    if kdim != 1:
        raise InternalConsistencyError(f"intertwiner space has dimension {kdim}, expected 1")
    q = vh[-1].conj().reshape(n, n)
    det = np.linalg.det(q)
    if abs(det) < 1e-12:
        raise InternalConsistencyError("intertwiner is singular")
    q = q / abs(det) ** (1 / n)
    big = np.argmax(np.abs(q))
    q = q * abs(q.flat[big]) / q.flat[big]
    qq = q @ np.conj(q)
    c = qq[0, 0]
    res = la.max_abs(qq - c * np.eye(n))
    if res > 1e-6 or abs(c.imag) > 1e-6 or abs(c) < 1e-9:
        raise InternalConsistencyError(f"Q conj(Q) is not a non-zero real scalar (residual {res:.3e})")
    return q, float(c.real), res


def _signature(r: RealAlgebra) -> tuple[int, int, int]:
    b = r.trace_form()
    w = np.linalg.eigvalsh((b + b.T) / 2)
    scale = max(1.0, float(np.max(np.abs(w))))
    pos = int(np.sum(w > 1e-8 * scale))
    neg = int(np.sum(w < -1e-8 * scale))
    return pos, neg, len(w) - pos - neg


def _expected_negative(kind: str, n: int) -> int:
    return {REAL: n * (n - 1) // 2, QUATERNION: n * (n + 1) // 2, COMPLEX: n * n}[kind]


def normalize_intertwiner(q: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Scale a known intertwiner to ``|det Q| = 1``; returns ``(Q, c, residual)``."""
    n = q.shape[0]
    q = np.asarray(q, dtype=complex)
    q = q / abs(np.linalg.det(q)) ** (1 / n)
    qq = q @ np.conj(q)
    c = qq[0, 0]
    return q, float(c.real), la.max_abs(qq - c * np.eye(n))


def classify_real_form(s: int, partner: int, n: int, r: RealAlgebra, t_mats: dict | None,
                       known_q: np.ndarray | None = None) -> BlockClassification:
    sig = _signature(r)
    zdim = r.center_dim(1e-8)
    if partner != s:
        kind, m, q, c, res = COMPLEX, n, None, None, 0.0
    else:
        q, c, res = normalize_intertwiner(known_q) if known_q is not None else solve_intertwiner(t_mats, n)
        if c > 0:
            kind, m = REAL, n
        else:
            if n % 2:
                raise InternalConsistencyError("quaternionic block of odd size")
            kind, m = QUATERNION, n // 2
    expected_zdim = 2 if kind == COMPLEX else 1
    cross = sig[1] == _expected_negative(kind, n) and sig[2] == 0 and zdim == expected_zdim
    return BlockClassification(s, partner, n, kind, m, q, c, res, sig, zdim, cross)


def classify_block(dd: DualDecomposition, rb: HermitianBlockAlgebra) -> BlockClassification:
    h = dd.hopf
    ir = dd.irreps[rb.s]
    t_mats = None
    if rb.s == rb.partner:
        t_mats = {}
        n = ir.dim
        coeffs = ir.u.reshape(n * n, h.dim)
        for i in range(n):
            for j in range(n):
                t_mats[(i, j)] = (coeffs @ dagger(h, ir.block.units[i, j])).reshape(n, n)
    cls = classify_real_form(rb.s, rb.partner, rb.n, rb.real, t_mats)
    if not cls.cross_check:
        raise InternalConsistencyError(
            f"block {rb.s}: trace-form signature {cls.signature} disagrees with type {cls.kind}")
    return cls


# -- nilpotents -----------------------------------------------------------------

def _split_nilpotent(r: RealAlgebra, rng, sym=None, attempts: int = 32, tol: float = 1e-9):
    """``p r (1 - p)`` for a non-trivial spectral idempotent ``p`` of a random element."""
    for _ in range(attempts):
        a = rng.standard_normal(r.dim)
        if sym is not None:
            a = sym(a)
        split = spectral_idempotents(r, a)
        if len(split.idempotents) < 2 or split.residual > 1e-6:
            continue
        p = split.idempotents[0]
        x = rng.standard_normal(r.dim)
        psi = r.multiply(r.multiply(p, x), r.unit - p)
        if np.linalg.norm(psi) > 1e-6:
            return psi / np.linalg.norm(psi), p
    return None, None


def _symmetriser(dd: DualDecomposition, r: RealAlgebra):
    """Map coordinates to those of ``a + a^*`` when ``*`` preserves ``r``, else None."""
    alg = dd.dual
    probe = [r.coords(alg.star_of(b)) for b in r.basis]
    if max(res for _, res in probe) > 1e-8:
        return None
    star = np.array([c for c, _ in probe]).T
    return lambda a: a + star @ a


def find_nilpotent_hermitian(dd: DualDecomposition, rb: HermitianBlockAlgebra,
                             cls: BlockClassification, seed: int = 0,
                             attempts: int = 32, tol: float | None = None) -> np.ndarray | None:
    """A non-zero dagger-fixed square-zero functional in ``R_s``, or None for division type."""
    tol = la.resolve_tol(tol)
    if cls.division:
        return None
    h = dd.hopf
    if cls.kind == COMPLEX:
        e = dd.irreps[rb.s].block.units[0, 1]
        psi = e + dagger(h, e)
    else:
        rng = np.random.default_rng(seed)
        coords, _ = _split_nilpotent(rb.real, rng, _symmetriser(dd, rb.real), attempts)
        if coords is None:
            coords, _ = _split_nilpotent(rb.real, rng, None, attempts)
        if coords is None:
            raise InternalConsistencyError(
                f"block {rb.s} has m = {cls.m} but {attempts} attempts found no proper idempotent")
        psi = rb.real.element(coords)
    sq = la.max_abs(convolve(h, psi, psi))
    herm = la.max_abs(dagger(h, psi) - psi)
    if sq > tol or herm > tol:
        raise InternalConsistencyError(f"nilpotent check failed (square {sq:.3e}, hermitian {herm:.3e})")
    return psi


def nilpotent_search(dd: DualDecomposition, rb: HermitianBlockAlgebra, trials: int = 256,
                     seed: int = 0) -> dict:
    """Seeded random search with the idempotent construction; used to back certificates."""
    rng = np.random.default_rng(seed)
    found = 0
    worst = 0.0
    for _ in range(trials):
        a = rng.standard_normal(rb.dim)
        split = spectral_idempotents(rb.real, a)
        if len(split.idempotents) > 1:
            p = split.idempotents[0]
            x = rng.standard_normal(rb.dim)
            psi = rb.real.multiply(rb.real.multiply(p, x), rb.real.unit - p)
            worst = max(worst, float(np.linalg.norm(psi)))
            if np.linalg.norm(psi) > 1e-6:
                found += 1
    return {"trials": trials, "found": found, "max_norm": worst}


def truncate(dd: DualDecomposition, rho: np.ndarray, s: int, tol: float | None = None) -> np.ndarray:
    """Component of ``rho`` on the blocks ``{s, s^c}``."""
    tol = la.resolve_tol(tol)
    h = dd.hopf
    psi = convolve(h, la.promote(rho), dd.pair_unit(s))
    rho = la.promote(rho)
    if (la.max_abs(dagger(h, rho) - rho) <= tol
            and la.max_abs(convolve(h, rho, rho)) <= tol):
        sq = la.max_abs(convolve(h, psi, psi))
        herm = la.max_abs(dagger(h, psi) - psi)
        if sq > 10 * tol or herm > 10 * tol:
            raise InternalConsistencyError("truncation of a hermitian square-zero functional is not square-zero")
    return psi


# -- analysis bundle ------------------------------------------------------------------

@dataclass
class BlockAnalysis:
    dd: DualDecomposition
    algebras: dict            # s -> HermitianBlockAlgebra for each reduced index
    classes: dict             # s -> BlockClassification

    def reduced(self) -> list[int]:
        return sorted(self.algebras)

    @property
    def member(self) -> bool:
        return all(c.division for c in self.classes.values())


def analyze_blocks(h: HopfStarAlgebra, seed: int = 0, tol: float | None = None,
                   dd: DualDecomposition | None = None) -> BlockAnalysis:
    dd = dd or extract_irreps(h, seed, tol)
    algebras, classes = {}, {}
    for s, _ in dd.pairs():
        rb = hermitian_subalgebra(dd, s, tol)
        algebras[s] = rb
        classes[s] = classify_block(dd, rb)
    return BlockAnalysis(dd, algebras, classes)


# -- square roots ---------------------------------------------------------------------------

@dataclass
class SquareRootWitness:
    block: int
    psi: np.ndarray
    density: np.ndarray
    epsilon: float
    phi: np.ndarray
    residuals: dict
    exact: bool
    epsilon_exact: str | None = None
    lambda_min: float = 0.0
    notes: list = field(default_factory=list)


@dataclass
class NoneCertificate:
    classifications: list[BlockClassification]
    searches: dict


class WitnessVerificationError(InternalConsistencyError):
    pass


class NonPositiveEpsilonError(ValueError):
    """A user-chosen epsilon makes ``h + epsilon psi`` fail positivity."""

    def __init__(self, epsilon: float, lambda_min: float):
        super().__init__(f"epsilon={epsilon:g} gives a non-positive functional; "
                         f"lambda_min={lambda_min:.6g}, largest admissible epsilon={1 / abs(lambda_min):.6g}"
                         if lambda_min < 0 else f"epsilon={epsilon:g} gives a non-positive functional")
        self.epsilon, self.lambda_min = epsilon, lambda_min


def _require_kac(h: HopfStarAlgebra, tol):
    flag = is_kac(h, tol)
    if not flag.value:
        raise UnsupportedNonTracialError(
            f"unsupported: non-tracial Haar state (residual {flag.residual:.3e})")


def square_root(h: HopfStarAlgebra, seed: int = 0, tol: float | None = None, mode: str = "auto",
                eps="auto", analysis: BlockAnalysis | None = None):
    """A non-trivial square root of the Haar state, or a certificate that none exists.

    ``mode``: ``"float"``, ``"exact"`` (exact input required) or ``"auto"``
    (exact when the input is exact, with a float fallback noted in the witness).
    """
    tol = la.resolve_tol(tol)
    _require_kac(h, tol)
    ba = analysis or analyze_blocks(h, seed, tol)
    dd = ba.dd
    target = [s for s in ba.reduced() if not ba.classes[s].division]
    if not target:
        searches = {s: nilpotent_search(dd, ba.algebras[s], 256, seed) for s in ba.reduced()}
        if any(v["found"] for v in searches.values()):
            raise InternalConsistencyError("random search found a nilpotent in a division block")
        return NoneCertificate([ba.classes[s] for s in ba.reduced()], searches)
    s = target[0]
    notes = []
    if mode in ("auto", "exact") and h.exact:
        from .exact import exact_square_root

        w = exact_square_root(h, ba, s, seed, eps)
        if w is not None:
            return w
        if mode == "exact":
            raise WitnessVerificationError("no exact witness found")
        notes.append("exact construction unavailable; float witness")
    elif mode == "exact":
        raise ValueError("exact mode requires exact input")
    psi = find_nilpotent_hermitian(dd, ba.algebras[s], ba.classes[s], seed, tol=tol)
    w = witness_from_nilpotent(h, psi, s, eps, tol)
    w.notes.extend(notes)
    return w


def witness_from_nilpotent(h: HopfStarAlgebra, psi: np.ndarray, s: int, eps="auto",
                           tol: float | None = None) -> SquareRootWitness:
    tol = la.resolve_tol(tol)
    hv = la.promote(h.haar.coeffs)
    psi = la.promote(psi)
    res = {
        "psi_square": la.max_abs(convolve(h, psi, psi)),
        "haar_absorbs": max(la.max_abs(convolve(h, hv, psi)), la.max_abs(convolve(h, psi, hv))),
        "psi_unit": abs(evaluate(psi, h.alg.unit)),
    }
    x = density_of(h, psi)
    res["density_selfadjoint"] = la.max_abs(h.alg.star_of(x) - x)
    op = gns_operator(h, x)
    lam = la.min_eigenvalue((op + op.conj().T) / 2)
    if eps == "auto":
        epsilon = 1.0 / abs(lam) if lam < 0 else 1.0
    else:
        epsilon = float(eps)
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
    phi = hv + epsilon * psi
    gmin = la.min_eigenvalue(gram(h, phi))
    res["phi_square_minus_haar"] = la.max_abs(convolve(h, phi, phi) - hv)
    res["gram_min"] = gmin
    res["phi_unit"] = abs(evaluate(phi, h.alg.unit) - 1)
    res["distance_from_haar"] = la.max_abs(phi - hv)
    if eps != "auto" and gmin < -tol:
        raise NonPositiveEpsilonError(epsilon, lam)
    _check_witness(res, tol)
    return SquareRootWitness(s, psi, x, epsilon, phi, res, False, None, lam)


def _check_witness(res: dict, tol: float):
    bad = [k for k in ("psi_square", "haar_absorbs", "psi_unit", "density_selfadjoint",
                       "phi_square_minus_haar", "phi_unit") if res[k] > tol]
    if res["gram_min"] < -tol:
        bad.append("gram_min")
    if res["distance_from_haar"] <= tol:
        bad.append("distance_from_haar")
    if bad:
        raise WitnessVerificationError(f"witness fails {bad}: {res}")


# -- verdicts -------------------------------------------------------------------------------

@dataclass
class DSVerdict:
    member: bool
    classifications: list[BlockClassification]
    result: object            # SquareRootWitness or NoneCertificate
    kac: bool
    analysis: BlockAnalysis


def ds_verdict(h: HopfStarAlgebra, seed: int = 0, tol: float | None = None, mode: str = "auto",
               analysis: BlockAnalysis | None = None) -> DSVerdict:
    tol = la.resolve_tol(tol)
    ba = analysis or analyze_blocks(h, seed, tol)
    member = ba.member
    result = square_root(h, seed, tol, mode, analysis=ba)
    if member != isinstance(result, NoneCertificate):
        raise InternalConsistencyError("classification and square-root routes disagree")
    kac = is_kac(h, tol).value
    if member and not kac:
        raise InternalConsistencyError("member of the family without tracial Haar state")
    return DSVerdict(member, [ba.classes[s] for s in ba.reduced()], result, kac, ba)


# -- hamiltonian and divisibility ------------------------------------------------------------

@dataclass
class HamiltonianReport:
    member: bool
    passed: bool
    checked: int
    max_commutator: float
    idempotent_residual: float
    noncentral: np.ndarray | None = None
    noncentral_commutator: float | None = None
    noncentral_block: int | None = None


def _commutator_norms(dd: DualDecomposition, vecs: np.ndarray) -> np.ndarray:
    """Max-abs entry of ``L_phi - R_phi`` on the dual, for each row ``phi``."""
    c = dd.dual.c
    comm = np.einsum("ijk->ikj", c) - np.einsum("jik->ikj", c)     # comm[i] = L_{b_i} - R_{b_i}
    flat = comm.reshape(comm.shape[0], -1)
    return np.max(np.abs(vecs @ flat), axis=1)


def hamiltonian_certificate(h: HopfStarAlgebra, ba: BlockAnalysis, tol: float | None = None,
                            chunk: int = 4096, seed: int = 0) -> HamiltonianReport:
    tol = la.resolve_tol(tol)
    dd = ba.dd
    if ba.member:
        units = np.array([dd.pair_unit(s) for s in ba.reduced()])
        idem = 0.0
        for z in units:
            idem = max(idem, la.max_abs(convolve(h, z, z) - z), la.max_abs(dagger(h, z) - z))
        r = len(units)
        c = dd.dual.c
        comm = (np.einsum("ijk->ikj", c) - np.einsum("jik->ikj", c)).reshape(h.dim, -1)
        per_unit = units @ comm
        worst = 0.0
        total = 1 << r
        for start in range(0, total, chunk):
            ids = np.arange(start, min(total, start + chunk))
            masks = ((ids[:, None] >> np.arange(r)[None, :]) & 1).astype(float)
            worst = max(worst, float(np.max(np.abs(masks @ per_unit))))
        return HamiltonianReport(True, worst <= tol and idem <= tol, total, worst, idem)
    rng = np.random.default_rng(seed)
    best = (None, -1.0, None)
    for s in ba.reduced():
        cls = ba.classes[s]
        if cls.division:
            continue
        rb = ba.algebras[s]
        for p in _candidate_projections(dd, rb, cls, rng):
            norm = float(_commutator_norms(dd, p[None, :])[0])
            if norm > best[1]:
                best = (p, norm, s)
    p, norm, s = best
    idem = la.max_abs(convolve(h, p, p) - p) if p is not None else float("inf")
    return HamiltonianReport(False, False, 0, 0.0, idem, p, norm, s)


def _candidate_projections(dd, rb, cls, rng, tries: int = 8):
    h = dd.hopf
    if cls.kind == COMPLEX:
        e = dd.irreps[rb.s].block.units[0, 0]
        yield e + dagger(h, e)
        return
    sym = _symmetriser(dd, rb.real)
    for _ in range(tries):
        a = rng.standard_normal(rb.dim)
        if sym is not None:
            a = sym(a)
        split = spectral_idempotents(rb.real, a)
        if len(split.idempotents) > 1 and split.residual < 1e-8:
            for p in split.idempotents:
                yield rb.real.element(p)


@dataclass
class NZReport:
    status: str               # "pass" | "skipped"
    dim: int
    reason: str = ""


def nz_check(h: HopfStarAlgebra, verdict: DSVerdict) -> NZReport:
    cocomm = is_cocommutative(h).value
    if not verdict.member:
        return NZReport("skipped", h.dim, "not a member")
    if cocomm:
        return NZReport("skipped", h.dim, "cocommutative")
    if h.dim % 8:
        raise InternalConsistencyError(f"non-cocommutative member of dimension {h.dim} not divisible by 8")
    return NZReport("pass", h.dim)


# -- SU_q(2) blocks -------------------------------------------------------------------------------

@dataclass
class SUqBlockSpec:
    spin: Fraction
    q: float
    n: int
    Q: np.ndarray


@dataclass
class SUqBlockResult:
    spec: SUqBlockSpec
    classification: BlockClassification
    nilpotent: np.ndarray | None
    residuals: dict


def suq2_spec(spin, q: float) -> SUqBlockSpec:
    spin = Fraction(str(spin))
    if spin < 0 or (2 * spin).denominator != 1:
        raise ValueError("spin must be a non-negative half-integer")
    q = float(q)
    if q == 0:
        raise ValueError("q must be non-zero")
    n = int(2 * spin + 1)
    mat = np.zeros((n, n))
    for k in range(1, n + 1):
        j = n - k + 1
        mat[j - 1, k - 1] = (-1) ** k * q ** (k - 1)
    return SUqBlockSpec(spin, q, n, mat)


def _matrix_algebra(n: int) -> StarAlgebra:
    mult = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                mult[(i * n + j, j * n + l, i * n + l)] = 1.0 + 0j
    unit = np.eye(n, dtype=complex).ravel()
    star = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            star[j * n + i, i * n + j] = 1
    return StarAlgebra(mult, unit, star, tuple(f"E{i}{j}" for i in range(n) for j in range(n)))


def _theta(qm: np.ndarray):
    qinv = np.linalg.inv(qm)
    return lambda a: qm @ np.conj(a) @ qinv


def suq2_block(spin, q: float, seed: int = 0) -> SUqBlockResult:
    """Real form ``{A : Q conj(A) Q^-1 = A}`` of ``M_n(C)`` and its type.

    The work happens in the balanced frame ``A -> D A D^-1`` with ``D = diag(|q|^(k/2))``,
    where ``Q`` becomes a signed antidiagonal permutation; otherwise entries spanning
    ``|q|^(n-1)`` wreck the rank and signature decisions for small or large ``|q|``.
    """
    spec = suq2_spec(spin, q)
    n = spec.n
    qm = spec.Q.astype(complex)
    theta = _theta(qm)
    d = np.abs(spec.q) ** (np.arange(n) / 2)
    balanced = (d[:, None] * qm / d[None, :]) / abs(spec.q) ** ((n - 1) / 2)
    theta_b = _theta(balanced)

    alg = _matrix_algebra(n)
    span = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1
            span.append((e + theta_b(e)).ravel())
            span.append((1j * e + theta_b(1j * e)).ravel())
    r = RealAlgebra.from_spanning(alg, span, alg.unit)
    if r.dim != n * n:
        raise InternalConsistencyError(f"real form has dimension {r.dim}, expected {n * n}")
    cls = classify_real_form(0, 0, n, r, None, known_q=balanced)
    if not cls.cross_check:
        raise InternalConsistencyError(f"trace-form signature {cls.signature} disagrees with type {cls.kind}")
    qq = qm @ np.conj(qm)
    cls.q, cls.c = spec.Q.copy(), float(qq[0, 0].real)
    residuals = {"closure": r.residual, "q_scalar": la.max_abs(qq - qq[0, 0] * np.eye(n)) / abs(qq[0, 0])}
    nil = None
    if not cls.division:
        rng = np.random.default_rng(seed)
        coords, _ = _split_nilpotent(r, rng, None, 64)
        if coords is None:
            raise InternalConsistencyError("no proper idempotent in a non-division real form")
        nb = r.element(coords).reshape(n, n)
        residuals["balanced_square"] = la.max_abs(nb @ nb)
        residuals["balanced_fixed"] = la.max_abs(theta_b(nb) - nb)
        nil = (nb / d[:, None]) * d[None, :]
        nil = nil / np.abs(nil).max()
        residuals["nilpotent_square"] = la.max_abs(nil @ nil)
        residuals["nilpotent_fixed"] = la.max_abs(theta(nil) - nil)
        if n == 2:
            w = suq2_explicit_witness(spec.q)
            residuals["explicit_square"] = la.max_abs(w @ w)
            residuals["explicit_fixed"] = la.max_abs(theta(w) - w)
    return SUqBlockResult(spec, cls, nil, residuals)


def suq2_explicit_witness(q: float) -> np.ndarray:
    """``[[sqrt q, -q], [1, -sqrt q]]`` with ``sqrt q = i sqrt|q|`` for negative ``q``."""
    rq = np.sqrt(q) if q > 0 else 1j * np.sqrt(-q)
    return np.array([[rq, -q], [1, -rq]], dtype=complex)


def suq2_theta(spec: SUqBlockSpec, a: np.ndarray) -> np.ndarray:
    return _theta(spec.Q.astype(complex))(a)
