"""Exact square-root witnesses over Gaussian rationals.

The non-division block pair is handled through its rational form: the
rational hermitian functionals supported on the pair form an algebra over QQ.
A proper idempotent (or a nilpotent) is read off from the factorisation of a
minimal polynomial over QQ, so every step of the witness is verified with
exact arithmetic.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from . import linalg as la
from .hopf import HopfStarAlgebra, convolve, dagger, density_of, evaluate, gns_operator, gram

_X = sympy.Symbol("x")


def rational_pair_unit(h: HopfStarAlgebra, z_float: np.ndarray, max_den: int = 10**4):
    """Exact central idempotent close to ``z_float``, or None when it does not certify."""
    z = la.exact_vector([la.rationalize(complex(v), max_den) for v in z_float])
    if la.max_abs(la.promote(z) - z_float) > 1e-8:
        return None
    if not _is_zero(convolve(h, z, z) - z) or not _is_zero(dagger(h, z) - z):
        return None
    left = la.exact_einsum("ijk,j->ik", h.d_exact, z)
    right = la.exact_einsum("ijk,k->ij", h.d_exact, z)
    if not _is_zero(left - right):
        return None
    return z


def _is_zero(x) -> bool:
    return not any(bool(v) for v in np.asarray(x).ravel())


class RationalForm:
    """QQ-algebra of rational hermitian functionals in ``z * A^``."""

    def __init__(self, h: HopfStarAlgebra, z: np.ndarray):
        self.h, self.z = h, z
        d = h.dim
        left = la.exact_einsum("ijk,j->ik", h.d_exact, z)
        span = []
        for i in range(d):
            y = left[:, i].copy()
            if _is_zero(y):
                continue
            iy = y * la.IM
            span.append(y + dagger(h, y))
            span.append(iy + dagger(h, iy))
        rows = [self._realify(v) for v in span]
        mat = DomainMatrix([[QQ.convert(x) for x in r] for r in rows], (len(rows), 2 * d), QQ)
        rref, pivots = mat.rref()
        dense = rref.to_Matrix().tolist()
        self.pivots = list(pivots)
        self.basis = [self._complexify(dense[r]) for r in range(len(pivots))]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _realify(self, v):
        return [x.x for x in v] + [x.y for x in v]

    def _complexify(self, row):
        d = self.h.dim
        return la.exact_vector([la.gauss(Fraction(int(row[k].p), int(row[k].q)),
                                         Fraction(int(row[d + k].p), int(row[d + k].q)))
                                for k in range(d)])

    def coords(self, v) -> list:
        real = self._realify(v)
        return [real[p] for p in self.pivots]

    def mul(self, a, b):
        return convolve(self.h, a, b)

    def combo(self, weights):
        out = la.exact_zeros(self.h.dim)
        for w, b in zip(weights, self.basis):
            if w:
                out = out + b * la.gauss(int(w))
        return out

    def polyval(self, coeffs, b):
        """Horner evaluation of a QQ polynomial (highest degree first) at ``b``."""
        acc = la.exact_zeros(self.h.dim)
        for c in coeffs:
            acc = self.mul(acc, b) + self.z * la.gauss(Fraction(int(c.p), int(c.q)))
        return acc

    def minimal_polynomial(self, b) -> sympy.Poly:
        powers = [self.z]
        cols = [self.coords(self.z)]
        while True:
            powers.append(self.mul(powers[-1], b))
            cols.append(self.coords(powers[-1]))
            k = len(cols)
            m = DomainMatrix([[QQ.convert(cols[j][i]) for j in range(k)] for i in range(self.dim)],
                             (self.dim, k), QQ)
            ns = m.nullspace().to_Matrix()
            if ns.rows:
                v = list(ns.row(0))
                lead = v[-1]
                return sympy.Poly([c / lead for c in reversed(v)], _X, domain="QQ")
            if k > self.dim + 1:
                raise la.InternalConsistencyError("minimal polynomial degree exceeds dimension")


def _square_zero_from(form: RationalForm, b):
    """Square-zero element of the form built from the factorisation of ``b``'s minimal polynomial."""
    mp = form.minimal_polynomial(b)
    _, factors = mp.factor_list()
    if len(factors) == 1:
        f, mult = factors[0]
        if mult < 2:
            return None
        nil = form.polyval((f ** (mult - 1)).all_coeffs(), b)
        return None if _is_zero(nil) else nil
    f, mult = factors[0]
    p1 = f ** mult
    p2 = sympy.Poly(sympy.quo(mp.as_expr(), p1.as_expr(), _X), _X, domain="QQ")
    u = sympy.rem(p2.as_expr() * sympy.invert(p2.as_expr(), p1.as_expr(), _X), mp.as_expr(), _X)
    p = form.polyval(sympy.Poly(u, _X, domain="QQ").all_coeffs(), b)
    q = form.z - p
    for r in form.basis:
        psi = form.mul(form.mul(p, r), q)
        if not _is_zero(psi):
            return psi
    return None


def _candidates(form: RationalForm, rng, extra: int):
    for b in form.basis:
        yield b
    for _ in range(extra):
        w = rng.integers(-2, 3, size=form.dim)
        if np.any(w):
            yield form.combo(w)


def exact_nilpotent(h: HopfStarAlgebra, z_float: np.ndarray, seed: int = 0, extra: int = 24):
    z = rational_pair_unit(h, z_float)
    if z is None:
        return None
    form = RationalForm(h, z)
    rng = np.random.default_rng(seed)
    for b in _candidates(form, rng, extra):
        psi = _square_zero_from(form, b)
        if psi is not None:
            return psi
    return None


def _epsilon_candidates(boundary: float):
    seen = set()
    for max_den in (64, 10**3, 10**6):
        eps = Fraction(boundary).limit_denominator(max_den)
        if eps > 0 and eps not in seen:
            seen.add(eps)
            yield eps
    for shrink in (1 - 1e-9, 1 - 1e-6, 0.999, 0.9, 0.5):
        eps = Fraction(boundary * shrink).limit_denominator(10**6)
        if eps > 0 and eps not in seen:
            seen.add(eps)
            yield eps


def exact_square_root(h: HopfStarAlgebra, ba, s: int, seed: int = 0, eps="auto"):
    """Exactly verified witness on block pair ``s`` or None when the rational route fails."""
    from .dsfamily import NonPositiveEpsilonError, SquareRootWitness, WitnessVerificationError

    psi = exact_nilpotent(h, ba.dd.pair_unit(s), seed)
    if psi is None:
        return None
    hv = h.haar.coeffs
    if not (_is_zero(convolve(h, psi, psi)) and _is_zero(dagger(h, psi) - psi)
            and _is_zero(convolve(h, hv, psi)) and _is_zero(convolve(h, psi, hv))
            and not evaluate(psi, h.alg.unit)):
        raise WitnessVerificationError("exact nilpotent fails its identities")
    x = density_of(h, psi)
    op = gns_operator(h, la.promote(x))
    lam = la.min_eigenvalue((op + op.conj().T) / 2)
    if eps == "auto":
        boundary = 1.0 / abs(lam) if lam < 0 else 1.0
        choices = _epsilon_candidates(boundary)
    else:
        choices = [Fraction(str(eps)).limit_denominator(10**9)]
    for e in choices:
        if not e > 0:
            raise ValueError("epsilon must be positive")
        phi = hv + psi * la.gauss(e)
        if la.is_psd_exact(gram(h, phi)):
            break
        if eps != "auto":
            raise NonPositiveEpsilonError(float(e), lam)
    else:
        return None
    sq = convolve(h, phi, phi) - hv
    res = {
        "psi_square": 0.0,
        "haar_absorbs": 0.0,
        "psi_unit": 0.0,
        "density_selfadjoint": la.max_abs(h.alg.star_of(x) - x),
        "phi_square_minus_haar": la.max_abs(sq),
        "gram_min": la.min_eigenvalue(gram(h, la.promote(phi))),
        "phi_unit": la.absval(evaluate(phi, h.alg.unit) - la.ONE),
        "distance_from_haar": la.max_abs(phi - hv),
    }
    if not _is_zero(sq) or res["phi_unit"] or res["distance_from_haar"] == 0:
        raise WitnessVerificationError(f"exact witness fails verification: {res}")
    eps_str = str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"
    return SquareRootWitness(s, psi, x, float(e), phi, res, True, eps_str, lam)
