"""Scalar and matrix substrate.

Two scalar modes coexist:

* exact Gaussian rationals, i.e. elements of sympy's ``QQ_I`` domain (gmpy2
  rationals underneath).  Exact vectors are numpy arrays of ``dtype=object``
  and exact linear systems go through sympy's sparse ``DomainMatrix``.
* complex doubles, held in ``complex128`` numpy arrays.

Nothing demotes exact data silently: going from exact to float is always an
explicit call to :func:`promote`, and every result that can come out either
way carries an ``exact`` flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix

ZERO = QQ_I.zero
ONE = QQ_I.one
IM = QQ_I(0, 1)

_default_tol = 1e-9


class LinearAlgebraError(ArithmeticError):
    pass


class NotHermitianError(LinearAlgebraError):
    def __init__(self, residual: float):
        super().__init__(f"matrix is not self-adjoint (residual {residual:.3e})")
        self.residual = residual


class InternalConsistencyError(LinearAlgebraError):
    pass


def get_tol() -> float:
    return _default_tol


def set_tol(tol: float) -> None:
    """Override the global default tolerance."""
    global _default_tol
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    _default_tol = float(tol)


def resolve_tol(tol: float | None) -> float:
    return _default_tol if tol is None else float(tol)


# -- scalars ---------------------------------------------------------------

def parse_rational(text) -> "QQ":
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction into an exact rational."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return QQ(text)
    if isinstance(text, Fraction):
        return QQ(text.numerator, text.denominator)
    if isinstance(text, str):
        s = text.strip()
        try:
            f = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {text!r}") from exc
        return QQ(f.numerator, f.denominator)
    raise ValueError(f"not a rational: {text!r}")


def format_rational(q) -> str:
    q = QQ.convert(q)
    num, den = int(QQ.numer(q)), int(QQ.denom(q))
    return str(num) if den == 1 else f"{num}/{den}"


def gauss(re=0, im=0) -> GaussianRational:
    """Exact Gaussian rational ``re + i*im``."""
    if isinstance(re, GaussianRational) and not im:
        return re
    return QQ_I(parse_rational(re) if not _is_qq(re) else re,
                parse_rational(im) if not _is_qq(im) else im)


def _is_qq(x) -> bool:
    return type(x) is type(QQ(1))


def is_exact(x) -> bool:
    return isinstance(x, GaussianRational)


def to_complex(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(float(x.x), float(x.y))
    return complex(x)


def conj(x):
    if isinstance(x, GaussianRational):
        return QQ_I(x.x, -x.y)
    return complex(x).conjugate()


def absval(x) -> float:
    return abs(to_complex(x))


def rationalize(value: complex, max_den: int = 10**6) -> GaussianRational:
    """Nearest Gaussian rational with bounded denominators."""
    re = Fraction(value.real).limit_denominator(max_den)
    im = Fraction(value.imag).limit_denominator(max_den)
    return gauss(re, im)


# -- vectors ---------------------------------------------------------------

def exact_zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def exact_vector(values) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v if isinstance(v, GaussianRational) else gauss(v)
    return out


def is_exact_array(x) -> bool:
    return isinstance(x, np.ndarray) and x.dtype == object


def promote(x) -> np.ndarray:
    """Explicit exact -> float promotion (identity on float arrays)."""
    x = np.asarray(x)
    if x.dtype == object:
        flat = [to_complex(v) for v in x.ravel()]
        return np.array(flat, dtype=complex).reshape(x.shape)
    return x.astype(complex, copy=False)


def conj_array(x: np.ndarray) -> np.ndarray:
    if x.dtype == object:
        out = np.empty(x.shape, dtype=object)
        flat_in, flat_out = x.ravel(), out.ravel()
        for i, v in enumerate(flat_in):
            flat_out[i] = conj(v)
        return out
    return np.conj(x)


def max_abs(x) -> float:
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    if x.dtype == object:
        return max((absval(v) for v in x.ravel()), default=0.0)
    return float(np.max(np.abs(x)))


def is_zero_array(x, tol: float | None = None) -> bool:
    """Exact arrays must vanish identically; float arrays up to ``tol``."""
    if is_exact_array(x):
        return not any(bool(v) for v in x.ravel())
    return max_abs(x) <= resolve_tol(tol)


@dataclass(frozen=True)
class AntilinearMap:
    """The map ``x -> m @ conj(x)`` on coordinate vectors."""

    m: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if is_exact_array(self.m) and is_exact_array(x):
            return _exact_matvec(self.m, conj_array(x))
        return promote(self.m) @ np.conj(promote(x))

    def compose(self, other: "AntilinearMap") -> np.ndarray:
        """Matrix of the *linear* map ``self o other``."""
        if is_exact_array(self.m) and is_exact_array(other.m):
            return _exact_matmul(self.m, conj_array(other.m))
        return promote(self.m) @ np.conj(promote(other.m))


def _exact_matvec(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = exact_zeros(m.shape[0])
    nz = [(j, v) for j, v in enumerate(x) if v]
    for i in range(m.shape[0]):
        acc = ZERO
        for j, v in nz:
            c = m[i, j]
            if c:
                acc += c * v
        out[i] = acc
    return out


def _exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.stack([_exact_matvec(a, b[:, j]) for j in range(b.shape[1])], axis=1)


# -- exact linear systems --------------------------------------------------

def domain_matrix(rows, ncols: int, domain=QQ_I) -> DomainMatrix:
    """Sparse DomainMatrix from a list of ``{col: value}`` dicts."""
    entries = {}
    for r, row in enumerate(rows):
        clean = {c: domain.convert(v) for c, v in row.items() if v}
        if clean:
            entries[r] = clean
    return DomainMatrix(entries, (len(rows), ncols), domain)


def exact_nullspace(rows, ncols: int, domain=QQ_I) -> list[np.ndarray]:
    """Basis of the kernel of a sparse exact system, as exact vectors."""
    if not rows:
        basis = []
        for j in range(ncols):
            v = exact_zeros(ncols)
            v[j] = ONE
            basis.append(v)
        return basis
    ns = domain_matrix(rows, ncols, domain).nullspace().to_dense().to_list()
    return [exact_vector([QQ_I.convert(x) for x in row]) for row in ns]


@dataclass
class LinearSolution:
    x: np.ndarray | None
    kernel: list[np.ndarray]
    residual: float
    consistent: bool
    exact: bool


def solve_linear(a, b, tol: float | None = None) -> LinearSolution:
    """Solve ``a @ x = b``: one representative plus a kernel basis.

    Exact object arrays are solved exactly; anything else by least squares.
    An inconsistent system comes back with ``consistent=False`` and the
    least-squares residual.
    """
    tol = resolve_tol(tol)
    a = np.asarray(a)
    b = np.asarray(b)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b.reshape(-1, 1)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if is_exact_array(a) and is_exact_array(b):
        sol = _solve_exact(a, b)
    else:
        sol = _solve_float(promote(a), promote(b), tol)
    if vector_rhs and sol.x is not None:
        sol.x = sol.x[:, 0]
    return sol


def _solve_exact(a: np.ndarray, b: np.ndarray) -> LinearSolution:
    m, n = a.shape
    k = b.shape[1]
    rows = []
    for i in range(m):
        row = {j: a[i, j] for j in range(n) if a[i, j]}
        row.update({n + j: b[i, j] for j in range(k) if b[i, j]})
        rows.append(row)
    aug = domain_matrix(rows, n + k)
    rref, pivots = aug.rref()
    if any(p >= n for p in pivots):
        lsq = np.linalg.lstsq(promote(a), promote(b), rcond=None)[0]
        res = float(np.linalg.norm(promote(a) @ lsq - promote(b)))
        return LinearSolution(None, [], res, False, True)
    dense = rref.to_dense().to_list()
    x = exact_zeros((n, k))
    for r, p in enumerate(pivots):
        for j in range(k):
            x[p, j] = QQ_I.convert(dense[r][n + j])
    kernel = exact_nullspace([{j: a[i, j] for j in range(n) if a[i, j]} for i in range(m)], n)
    return LinearSolution(x, kernel, 0.0, True, True)


def _solve_float(a: np.ndarray, b: np.ndarray, tol: float) -> LinearSolution:
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    scale = max(1.0, float(np.linalg.norm(b)))
    res = float(np.linalg.norm(a @ x - b))
    kernel = list(nullspace(a, tol).T)
    return LinearSolution(x if res <= tol * scale else None, kernel, res,
                          res <= tol * scale, False)


def nullspace(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal kernel basis (as columns) of a float matrix."""
    tol = resolve_tol(tol)
    a = promote(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol * scale))
    return vh[rank:].conj().T


def column_space(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    tol = resolve_tol(tol)
    u, s, _ = np.linalg.svd(promote(a), full_matrices=False)
    scale = max(1.0, s[0] if s.size else 0.0)
    return u[:, : int(np.sum(s > tol * scale))]


# -- hermitian eigenproblems ------------------------------------------------

def eig_hermitian(m, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a self-adjoint matrix."""
    tol = resolve_tol(tol)
    m = promote(m)
    norm = max(1.0, float(np.linalg.norm(m, 2))) if m.size else 1.0
    asym = float(np.linalg.norm(m - m.conj().T)) if m.size else 0.0
    if asym > tol * norm:
        raise NotHermitianError(asym)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    recon = float(np.linalg.norm(v @ np.diag(w) @ v.conj().T - m)) if m.size else 0.0
    if recon > 10 * tol * norm:
        raise InternalConsistencyError(f"eigendecomposition residual {recon:.3e}")
    return w, v


def min_eigenvalue(m) -> float:
    m = promote(m)
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])


def is_psd_exact(m: np.ndarray) -> bool:
    """Exact positive-semidefiniteness of a hermitian Gaussian-rational matrix.

    Symmetric Gaussian elimination with diagonal pivoting: a hermitian matrix
    is PSD iff every pivot is non-negative and a zero diagonal forces a zero
    row.
    """
    a = [list(row) for row in m]
    n = len(a)
    active = list(range(n))
    while active:
        pivot = None
        for i in active:
            d = a[i][i]
            if d.y:
                return False
            if d.x < 0:
                return False
            if d.x > 0 and pivot is None:
                pivot = i
        if pivot is None:
            return all(not a[i][j] for i in active for j in active)
        active.remove(pivot)
        p = a[pivot][pivot]
        for i in active:
            f = a[i][pivot] / p
            if not f:
                continue
            for j in active:
                a[i][j] -= f * a[pivot][j]
    return True


# -- polynomials -----------------------------------------------------------

def minimal_polynomial_real(mult_op, tol: float | None = None) -> np.ndarray:
    """Monic minimal polynomial of a real square matrix, highest degree first."""
    tol = resolve_tol(tol)
    m = np.asarray(promote(mult_op))
    if np.max(np.abs(m.imag), initial=0.0) > tol:
        raise ValueError("mult_op must be real")
    m = m.real
    n = m.shape[0]
    norm = float(np.linalg.norm(m, 2)) if n else 0.0
    if norm == 0.0:
        return np.array([1.0, 0.0])
    a = m / norm
    powers = [np.eye(n).ravel()]
    cur = np.eye(n)
    for deg in range(1, n + 2):
        if deg > n:
            raise InternalConsistencyError("minimal polynomial degree exceeds matrix size")
        cur = cur @ a
        k = np.stack(powers, axis=1)
        target = cur.ravel()
        coef, *_ = np.linalg.lstsq(k, -target, rcond=None)
        res = float(np.linalg.norm(k @ coef + target))
        if res <= 1e-3 * tol * (1 + float(np.linalg.norm(target))) or res <= tol * 1e-2:
            break
        powers.append(target)
    # p_a(y) = y^deg + sum coef_j y^j ; rescale to p_m(x) = norm^deg p_a(x/norm)
    full = np.concatenate([coef, [1.0]])
    scaled = full * norm ** (deg - np.arange(deg + 1))
    poly = scaled[::-1]
    check = np.zeros_like(m)
    for c in poly:
        check = check @ m + c * np.eye(n)
    if float(np.linalg.norm(check)) > tol * (1 + norm ** deg) * 10:
        raise InternalConsistencyError("minimal polynomial residual too large")
    return poly


# -- exact tensor contractions ---------------------------------------------

_INT64_SAFE = 2**62


class GaussTensor:
    """Gaussian-rational tensor stored as ``(re + i*im) / den`` with integer arrays.

    Keeps bulk exact arithmetic inside numpy; int64 is used whenever a bound
    on the magnitudes guarantees no overflow, Python integers otherwise.
    """

    __slots__ = ("den", "re", "im")

    def __init__(self, den: int, re: np.ndarray, im: np.ndarray):
        self.den, self.re, self.im = int(den), re, im

    @classmethod
    def from_exact(cls, x: np.ndarray) -> "GaussTensor":
        from math import lcm

        x = np.asarray(x, dtype=object)
        flat = x.ravel()
        den = 1
        for v in flat:
            if v:
                den = lcm(den, int(QQ.denom(v.x)), int(QQ.denom(v.y)))
        re = np.zeros(flat.size, dtype=object)
        im = np.zeros(flat.size, dtype=object)
        for i, v in enumerate(flat):
            if v:
                re[i] = int(QQ.numer(v.x)) * (den // int(QQ.denom(v.x)))
                im[i] = int(QQ.numer(v.y)) * (den // int(QQ.denom(v.y)))
        return cls(den, _narrow(re.reshape(x.shape)), _narrow(im.reshape(x.shape)))

    @property
    def shape(self):
        return self.re.shape

    def bound(self) -> int:
        if self.re.size == 0:
            return 0
        return int(max(np.max(np.abs(self.re)), np.max(np.abs(self.im))))

    def conj(self) -> "GaussTensor":
        return GaussTensor(self.den, self.re, -self.im)

    @property
    def T(self) -> "GaussTensor":
        return GaussTensor(self.den, self.re.T, self.im.T)

    def transpose(self, *axes) -> "GaussTensor":
        return GaussTensor(self.den, self.re.transpose(*axes), self.im.transpose(*axes))

    def __sub__(self, other: "GaussTensor") -> "GaussTensor":
        return self._combine(other, -1)

    def __add__(self, other: "GaussTensor") -> "GaussTensor":
        return self._combine(other, 1)

    def _combine(self, other, sign):
        from math import lcm

        den = lcm(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        bound = (self.bound() * fa + other.bound() * fb)
        ra, ia = _widen(self.re, bound), _widen(self.im, bound)
        rb, ib = _widen(other.re, bound), _widen(other.im, bound)
        return GaussTensor(den, _narrow(ra * fa + sign * rb * fb), _narrow(ia * fa + sign * ib * fb))

    def is_zero(self) -> bool:
        return not (np.any(self.re) or np.any(self.im))

    def max_abs(self) -> float:
        if self.re.size == 0 or self.is_zero():
            return 0.0
        re = np.asarray(self.re, dtype=float)
        im = np.asarray(self.im, dtype=float)
        return float(np.max(np.hypot(re, im))) / self.den

    def to_exact(self) -> np.ndarray:
        out = np.empty(self.shape, dtype=object)
        fo, fr, fi = out.ravel(), self.re.ravel(), self.im.ravel()
        for i in range(fo.size):
            fo[i] = QQ_I(QQ(int(fr[i]), self.den), QQ(int(fi[i]), self.den))
        return out

    def to_complex(self) -> np.ndarray:
        return (np.asarray(self.re, dtype=float) + 1j * np.asarray(self.im, dtype=float)) / self.den


def _narrow(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        if a.size == 0 or max(abs(int(np.max(a))), abs(int(np.min(a)))) < _INT64_SAFE:
            return a.astype(np.int64)
    return a


def _widen(a: np.ndarray, bound: int) -> np.ndarray:
    return a.astype(object) if bound >= _INT64_SAFE and a.dtype != object else a


def gauss_einsum(subscripts: str, *operands: GaussTensor) -> GaussTensor:
    import itertools

    inputs, output = subscripts.split("->")
    sizes: dict = {}
    for spec, op in zip(inputs.split(","), operands):
        sizes.update(zip(spec, op.shape))
    bound = 2 ** len(operands)
    for ch, n in sizes.items():
        if ch not in output:
            bound *= n
    for op in operands:
        bound *= max(op.bound(), 1)
    re_total = im_total = 0
    for choice in itertools.product((0, 1), repeat=len(operands)):
        ops = [_widen(op.im if c else op.re, bound) for op, c in zip(operands, choice)]
        term = np.einsum(subscripts, *ops, optimize=True)
        k = sum(choice) % 4
        if k == 0:
            re_total = re_total + term
        elif k == 1:
            im_total = im_total + term
        elif k == 2:
            re_total = re_total - term
        else:
            im_total = im_total - term
    den = 1
    for op in operands:
        den *= op.den
    return _reduce(GaussTensor(den, _narrow(np.asarray(re_total)), _narrow(np.asarray(im_total))))


def _reduce(t: GaussTensor) -> GaussTensor:
    from math import gcd

    if t.den == 1:
        return t
    g = t.den
    for arr in (t.re, t.im):
        if arr.size:
            nz = arr[arr != 0]
            if nz.size:
                if nz.dtype == object:
                    for v in nz.tolist():
                        g = gcd(g, int(v))
                else:
                    g = gcd(g, int(np.gcd.reduce(nz)))
        if g == 1:
            return t
    return GaussTensor(t.den // g, t.re // g, t.im // g)


def exact_einsum(subscripts: str, *operands: np.ndarray) -> np.ndarray:
    """``np.einsum`` over Gaussian rationals, computed with integer arithmetic."""
    return gauss_einsum(subscripts, *[GaussTensor.from_exact(op) for op in operands]).to_exact()


def exact_identity(n: int) -> np.ndarray:
    out = exact_zeros((n, n))
    for i in range(n):
        out[i, i] = ONE
    return out


def exact_inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    rows = [{j: a[i, j] for j in range(n) if a[i, j]} for i in range(n)]
    inv = domain_matrix(rows, n).to_dense().inv().to_list()
    out = exact_zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = QQ_I.convert(inv[i][j])
    return out
