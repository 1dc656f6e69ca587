"""Irreducible corepresentations, recovered as the basis dual to the
*-matrix units of the convolution algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg as la
from .constructors import CayleyTable
from .hopf import (HopfStarAlgebra, dagger, dual_algebra, is_commutative, verify_axioms,
                   AxiomError)
from .linalg import InternalConsistencyError
from .staralg import Block, BlockDecomposition, StarAlgebra, sparse_from_dense


@dataclass
class Irrep:
    index: int
    dim: int
    u: np.ndarray            # (n, n, dim A) matrix coefficients
    partner: int
    block: Block             # the matching block of the dual algebra

    @property
    def character(self) -> np.ndarray:
        return sum(self.u[k, k] for k in range(self.dim))

    @property
    def self_contragredient(self) -> bool:
        return self.partner == self.index


@dataclass
class DualDecomposition:
    """Block decomposition of the dual together with the irreps it determines."""

    hopf: HopfStarAlgebra
    dual: StarAlgebra
    blocks: BlockDecomposition
    irreps: list[Irrep]
    residuals: dict
    seed: int

    @property
    def sizes(self) -> list[int]:
        return [ir.dim for ir in self.irreps]

    @property
    def partners(self) -> list[int]:
        return [ir.partner for ir in self.irreps]

    def pairs(self) -> list[tuple[int, int]]:
        """Reduced index set: one representative ``(s, s^c)`` per pair, ``s <= s^c``."""
        return [(ir.index, ir.partner) for ir in self.irreps if ir.index <= ir.partner]

    def pair_unit(self, s: int) -> np.ndarray:
        ir = self.irreps[s]
        z = ir.block.unit
        if ir.partner != s:
            z = z + self.irreps[ir.partner].block.unit
        return z

    @cached_property
    def fusion(self) -> "FusionTable":
        return fusion(self)

    @cached_property
    def group_likes(self) -> "GroupLikes":
        return group_likes(self)


def extract_irreps(h: HopfStarAlgebra, seed: int = 0, tol: float | None = None,
                   retries: int = 3) -> DualDecomposition:
    tol = la.resolve_tol(tol)
    dual = dual_algebra(h)
    last = None
    for attempt in range(retries):
        dd = _extract(h, dual, seed + attempt, tol)
        bad = {k: v for k, v in dd.residuals.items() if v > 1e3 * tol}
        if not bad:
            return dd
        last = bad
    raise InternalConsistencyError(f"irreducible corepresentations fail their invariants: {last}")


def _extract(h, dual, seed, tol) -> DualDecomposition:
    bd = dual.block_decompose(tol, seed)
    hv = la.promote(h.haar.coeffs)
    trivial = [s for s, b in enumerate(bd.blocks) if b.size == 1 and la.max_abs(b.unit - hv) < 1e-6]
    if len(trivial) != 1:
        raise InternalConsistencyError("Haar state is not a minimal central idempotent of the dual")
    order = trivial + [s for s in range(len(bd.blocks)) if s != trivial[0]]
    bd = bd.reorder(order)
    units = bd.unit_matrix()
    coeffs = np.linalg.inv(units)          # columns are the matrix coefficients
    irreps = []
    pos = 0
    for s, b in enumerate(bd.blocks):
        n = b.size
        u = coeffs[:, pos:pos + n * n].T.reshape(n, n, h.dim)
        irreps.append(Irrep(s, n, u, -1, b))
        pos += n * n
    res = {"decomposition": bd.residual}
    res["partner"] = _assign_partners(h, irreps)
    res["trivial"] = la.max_abs(irreps[0].u[0, 0] - la.promote(h.alg.unit))
    res["comultiplication"] = max(corep_residual(h, ir) for ir in irreps)
    res["unitarity"] = max(unitarity_residual(h, ir) for ir in irreps)
    return DualDecomposition(h, dual, bd, irreps, res, seed)


def _assign_partners(h, irreps) -> float:
    worst = 0.0
    units = [ir.block.unit for ir in irreps]
    for ir in irreps:
        zd = dagger(h, ir.block.unit)
        dists = [la.max_abs(zd - z) for z in units]
        t = int(np.argmin(dists))
        worst = max(worst, dists[t])
        ir.partner = t
    if sorted(ir.partner for ir in irreps) != list(range(len(irreps))):
        raise InternalConsistencyError("dagger does not permute the dual blocks")
    if any(irreps[ir.partner].partner != ir.index for ir in irreps):
        raise InternalConsistencyError("contragredient map is not an involution")
    return worst


def contragredient_pairing(dd: DualDecomposition) -> list[int]:
    return dd.partners


def corep_residual(h: HopfStarAlgebra, ir: Irrep) -> float:
    """``max |Delta(u_kl) - sum_j u_kj (x) u_jl|``."""
    d = h.d
    lhs = np.einsum("kli,iab->klab", ir.u, d)
    rhs = np.einsum("kja,jlb->klab", ir.u, ir.u)
    return la.max_abs(lhs - rhs)


def unitarity_residual(h: HopfStarAlgebra, ir: Irrep) -> float:
    alg = h.alg
    n = ir.dim
    one = la.promote(alg.unit)
    ustar = np.array([[alg.star_of(ir.u[k, l]) for l in range(n)] for k in range(n)])
    res = 0.0
    for j in range(n):
        for k in range(n):
            a = sum(alg.multiply(ir.u[j, l], ustar[k, l]) for l in range(n))
            b = sum(alg.multiply(ustar[l, j], ir.u[l, k]) for l in range(n))
            target = one if j == k else 0
            res = max(res, la.max_abs(a - target), la.max_abs(b - target))
    return res


def peter_weyl_residual(dd: DualDecomposition) -> float:
    """``max |h(u^s_ij^* u^t_kl) - delta_st delta_ik delta_jl / n_s|`` (Kac form)."""
    h = dd.hopf
    alg = h.alg
    hv = la.promote(h.haar.coeffs)
    coeffs = np.concatenate([ir.u.reshape(-1, h.dim) for ir in dd.irreps])
    labels = [(ir.index, i, j) for ir in dd.irreps for i in range(ir.dim) for j in range(ir.dim)]
    stars = alg.m @ np.conj(coeffs.T)          # columns: u^*
    gram = np.einsum("ai,bj,abk,k->ij", stars, coeffs.T, alg.c, hv, optimize=True)
    expected = np.zeros_like(gram)
    for p, (s, i, j) in enumerate(labels):
        expected[p, p] = 1.0 / dd.irreps[s].dim
    return la.max_abs(gram - expected)


# -- group-likes ---------------------------------------------------------------

@dataclass
class GroupLikes:
    irreps: list[int]           # indices of the one-dimensional irreps
    elements: np.ndarray        # (k, dim) group-like elements
    table: CayleyTable
    residual: float

    @property
    def order(self) -> int:
        return len(self.irreps)


def group_likes(dd: DualDecomposition) -> GroupLikes:
    h = dd.hopf
    idx = [ir.index for ir in dd.irreps if ir.dim == 1]
    elems = np.array([dd.irreps[s].u[0, 0] for s in idx])
    res = 0.0
    table = []
    for a in range(len(idx)):
        row = []
        for b in range(len(idx)):
            prod = h.alg.multiply(elems[a], elems[b])
            dists = np.max(np.abs(elems - prod[None, :]), axis=1)
            c = int(np.argmin(dists))
            res = max(res, float(dists[c]))
            row.append(c)
        table.append(tuple(row))
    for g in elems:
        res = max(res, la.max_abs(np.einsum("iab,i->ab", h.d, g) - np.outer(g, g)))
    names = tuple(f"g{s}" for s in idx)
    return GroupLikes(idx, elems, CayleyTable(tuple(table), names), res)


# -- fusion ------------------------------------------------------------------------

@dataclass
class FusionTable:
    n: np.ndarray               # N[s, t, r]
    raw_residual: float
    dims: list[int]

    def constituents(self, s: int, t: int) -> list[int]:
        return [int(r) for r in np.nonzero(self.n[s, t])[0]]

    def dimension_rule_ok(self) -> bool:
        d = np.array(self.dims)
        return bool(np.all(np.einsum("str,r->st", self.n, d) == np.outer(d, d)))


def fusion(dd: DualDecomposition, tol: float | None = None) -> FusionTable:
    """Multiplicities ``N[s, t, r] = h(chi_s chi_t chi_r^*)``."""
    h = dd.hopf
    alg = h.alg
    chars = np.array([ir.character for ir in dd.irreps])
    stars = np.array([alg.star_of(x) for x in chars])
    hv = la.promote(h.haar.coeffs)
    prod = np.einsum("si,tj,ijk->stk", chars, chars, alg.c, optimize=True)
    raw = np.einsum("stk,rl,klm,m->str", prod, stars, alg.c, hv, optimize=True)
    rounded = np.rint(raw.real)
    res = float(np.max(np.abs(raw - rounded)))
    if res > 1e-6 or rounded.min() < 0:
        raise InternalConsistencyError(f"fusion multiplicities are not non-negative integers ({res:.3e})")
    table = FusionTable(rounded.astype(int), res, dd.sizes)
    if not table.dimension_rule_ok():
        raise InternalConsistencyError("fusion multiplicities violate the dimension rule")
    return table


# -- Irr / group-likes ---------------------------------------------------------------

@dataclass
class IrrModGammaGroup:
    classes: list[list[int]]
    table: list[list[int]] | None
    well_defined: bool
    abelian: bool | None = None
    exponent: int | None = None
    issues: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.classes)

    @property
    def is_elementary_2_group(self) -> bool:
        return bool(self.well_defined and self.abelian and self.exponent is not None and self.exponent <= 2)


def irr_mod_gamma(dd: DualDecomposition, table: FusionTable | None = None) -> IrrModGammaGroup:
    """Irreps modulo tensoring with group-likes, with the induced product if it exists."""
    table = table or dd.fusion
    n = table.n
    k = len(dd.irreps)
    gl = [ir.index for ir in dd.irreps if ir.dim == 1]
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v in range(k):
        for g in gl:
            for u in range(k):
                if n[v, g, u] and dd.irreps[u].dim == dd.irreps[v].dim:
                    parent[find(u)] = find(v)
    groups: dict = {}
    for s in range(k):
        groups.setdefault(find(s), []).append(s)
    classes = sorted(groups.values(), key=lambda c: (min(c) != 0, min(c)))
    cls_of = {s: ci for ci, c in enumerate(classes) for s in c}
    issues = []
    prod = [[-1] * len(classes) for _ in classes]
    for a, ca in enumerate(classes):
        for b, cb in enumerate(classes):
            hit = set()
            for u in ca:
                for v in cb:
                    hit.update(cls_of[w] for w in np.nonzero(n[u, v])[0])
            if len(hit) != 1:
                issues.append(f"[{a}]*[{b}] meets classes {sorted(hit)}")
            else:
                prod[a][b] = hit.pop()
    if issues:
        return IrrModGammaGroup(classes, None, False, None, None, issues)
    abelian = all(prod[a][b] == prod[b][a] for a in range(len(classes)) for b in range(len(classes)))
    if any(prod[0][a] != a for a in range(len(classes))):
        issues.append("class of the trivial irrep is not an identity")
    exponent = 1
    for a in range(len(classes)):
        x, order = a, 1
        while x != 0 and order <= len(classes):
            x = prod[x][a]
            order += 1
        exponent = int(np.lcm(exponent, order))
    return IrrModGammaGroup(classes, prod, True, abelian, exponent, issues)


def gamma_twist_identities(dd: DualDecomposition) -> float:
    """For each irrep u and group-like g, check that g (x) u equals u (x) g' for some group-like g'.

    Returns the number of failures (0 when the identity holds throughout).
    """
    n = dd.fusion.n
    gl = [ir.index for ir in dd.irreps if ir.dim == 1]
    fails = 0
    for ir in dd.irreps:
        if ir.dim < 2:
            continue
        for g in gl:
            left = n[g, ir.index]
            if not any(np.array_equal(left, n[ir.index, g2]) for g2 in gl):
                fails += 1
    return fails


# -- quotient generated by a corepresentation ---------------------------------------------

@dataclass
class GeneratedSubalgebra:
    hopf: HopfStarAlgebra
    irreps: list[int]
    embedding: np.ndarray       # (dim sub, dim A) basis elements in the ambient algebra
    residual: float


def subalgebra_generated(dd: DualDecomposition, s: int, tol: float | None = None) -> GeneratedSubalgebra:
    """The smallest *-subalgebra containing 1 and the coefficients of irrep ``s``."""
    tol = la.resolve_tol(tol)
    h = dd.hopf
    alg = h.alg
    ir = dd.irreps[s]
    gens = [ir.u[k, l] for k in range(ir.dim) for l in range(ir.dim)]
    gens += [alg.star_of(x) for x in gens]
    span = _orth([la.promote(alg.unit)] + gens, tol)
    while True:
        prods = [alg.multiply(a, g) for a in span.T for g in gens]
        new = _orth(list(span.T) + prods, tol)
        if new.shape[1] == span.shape[1]:
            break
        span = new
    members = []
    for t in dd.irreps:
        block = t.u.reshape(-1, h.dim).T
        inside = la.max_abs(span @ (span.conj().T @ block) - block)
        if inside < 1e-6:
            members.append(t.index)
    basis = np.concatenate([dd.irreps[t].u.reshape(-1, h.dim) for t in members])
    if basis.shape[0] != span.shape[1]:
        raise InternalConsistencyError("generated subalgebra is not spanned by coefficient spaces")
    sub = _restrict(dd, members, basis, tol)
    report = verify_axioms(sub, tol=1e-7)
    if not report.passed:
        raise AxiomError(f"restricted structure fails axioms: {report.failures}", report)
    return GeneratedSubalgebra(sub, members, basis, report.worst)


def _orth(vectors, tol) -> np.ndarray:
    m = np.array(vectors).T
    u, sv, _ = np.linalg.svd(m, full_matrices=False)
    rank = int(np.sum(sv > 1e-8 * max(1.0, sv[0])))
    return u[:, :rank]


def _restrict(dd: DualDecomposition, members, basis, tol) -> HopfStarAlgebra:
    h = dd.hopf
    alg = h.alg
    m = basis.shape[0]
    pinv = np.linalg.pinv(basis.T)

    def coords(x):
        c = pinv @ x
        if la.max_abs(basis.T @ c - x) > 1e-6:
            raise InternalConsistencyError("element leaves the generated subalgebra")
        return c

    mult = np.zeros((m, m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            mult[i, j] = coords(alg.multiply(basis[i], basis[j]))
    star = np.array([coords(alg.star_of(b)) for b in basis]).T
    unit = coords(la.promote(alg.unit))
    labels, comult, counit, antipode = [], {}, np.zeros(m, dtype=complex), np.zeros((m, m), dtype=complex)
    offset = {}
    pos = 0
    for t in members:
        offset[t] = pos
        pos += dd.irreps[t].dim ** 2
    for t in members:
        n = dd.irreps[t].dim
        o = offset[t]
        for k in range(n):
            for l in range(n):
                i = o + k * n + l
                labels.append(f"u{t}[{k}{l}]")
                counit[i] = 1.0 if k == l else 0.0
                for j in range(n):
                    comult[(i, o + k * n + j, o + j * n + l)] = 1.0 + 0j
                antipode[:, i] = star[:, o + l * n + k]
    sub_alg = StarAlgebra(sparse_from_dense(mult, 1e-12), unit, star, tuple(labels))
    return HopfStarAlgebra(sub_alg, comult, counit, antipode, f"A(u{members})")


# -- commutative quantum groups ------------------------------------------------------------

def identify_commutative(h: HopfStarAlgebra, tol: float | None = None, seed: int = 0) -> CayleyTable | None:
    """Group of characters of a commutative Hopf *-algebra, identity first."""
    if not is_commutative(h, tol=1e-7).value:
        return None
    bd = h.alg.block_decompose(tol, seed)
    if any(b.size != 1 for b in bd.blocks) or len(bd.blocks) != h.dim:
        raise InternalConsistencyError("character count differs from the dimension")
    idems = np.array([b.unit for b in bd.blocks]).T
    chars = np.linalg.inv(idems)             # rows: characters
    eps = la.promote(h.counit)
    ident = int(np.argmin(np.max(np.abs(chars - eps[None, :]), axis=1)))
    order = [ident] + [i for i in range(h.dim) if i != ident]
    chars = chars[order]
    table = []
    for a in range(h.dim):
        row = []
        for b in range(h.dim):
            conv = np.einsum("ijk,j,k->i", h.d, chars[a], chars[b])
            dists = np.max(np.abs(chars - conv[None, :]), axis=1)
            c = int(np.argmin(dists))
            if dists[c] > 1e-6:
                raise InternalConsistencyError("characters are not closed under convolution")
            row.append(c)
        table.append(tuple(row))
    return CayleyTable(tuple(table))


def order_profile(g: CayleyTable) -> dict:
    out: dict = {}
    for a in range(g.order):
        k = g.element_order(a)
        out[k] = out.get(k, 0) + 1
    return dict(sorted(out.items()))


def is_quaternion_group(g: CayleyTable) -> bool:
    """Order-8 test: one involution, six elements of order 4 all squaring to it."""
    if g.order != 8 or order_profile(g) != {1: 1, 2: 1, 4: 6}:
        return False
    inv = [a for a in range(8) if g.element_order(a) == 2][0]
    return all(g.mul(a, a) == inv for a in range(8) if g.element_order(a) == 4)
