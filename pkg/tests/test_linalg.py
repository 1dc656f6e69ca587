from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qds import linalg as la

small = st.integers(-5, 5)


def hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


@pytest.mark.parametrize("m, expected", [
    (np.eye(2), [1, 1]),
    (np.diag([-3.0, 5.0]), [-3, 5]),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), [-1, 1]),
])
def test_eig_hermitian_examples(m, expected):
    vals, vecs = la.eig_hermitian(m)
    assert np.allclose(vals, expected)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(2))


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(la.NotHermitianError) as info:
        la.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert info.value.residual > 0


@given(st.integers(1, 7), st.integers(0, 10**6))
def test_eig_hermitian_trace_and_reconstruction(n, seed):
    m = hermitian(n, seed)
    vals, vecs = la.eig_hermitian(m)
    assert np.all(np.diff(vals) >= 0)
    assert abs(vals.sum() - np.trace(m).real) <= 1e-9 * max(1, np.abs(m).max()) * n
    recon = vecs @ np.diag(vals) @ vecs.conj().T
    assert np.abs(recon - m).max() <= 10 * 1e-9 * max(1.0, np.linalg.norm(m, 2))


@pytest.mark.parametrize("m, expected", [
    (np.zeros((3, 3)), [1, 0]),
    (np.eye(3), [1, -1]),
    (np.array([[0.0, 1.0], [0.0, 0.0]]), [1, 0, 0]),
])
def test_minimal_polynomial_examples(m, expected):
    assert np.allclose(la.minimal_polynomial_real(m), expected)


@given(st.integers(1, 6), st.integers(0, 10**6), st.integers(1, 3))
def test_minimal_polynomial_divides_characteristic(n, seed, repeat):
    rng = np.random.default_rng(seed)
    base = np.diag(rng.integers(-2, 3, size=n).astype(float))
    p = rng.standard_normal((n, n)) + 3 * np.eye(n)
    m = p @ base @ np.linalg.inv(p)
    m = np.kron(np.eye(repeat), m)
    mp = la.minimal_polynomial_real(m)
    assert mp[0] == pytest.approx(1.0)
    value = sum(c * np.linalg.matrix_power(m, len(mp) - 1 - i) for i, c in enumerate(mp))
    assert np.abs(value).max() <= 1e-6 * (1 + np.linalg.norm(m)) ** len(mp)
    _, rem = np.polydiv(np.poly(m), mp)
    assert np.abs(rem).max() <= 1e-6 * (1 + np.linalg.norm(m)) ** (n * repeat)


def test_solve_linear_examples():
    x = np.array([1.0, 2.0, 3.0])
    assert np.allclose(la.solve_linear(np.eye(3), x).x, x)
    zero = la.solve_linear(np.zeros((2, 2)), np.zeros(2))
    assert len(zero.kernel) == 2
    sol = la.solve_linear(np.array([[1.0, 1.0], [0.0, 0.0]]), np.array([2.0, 0.0]))
    assert np.allclose(np.array([[1, 1], [0, 0]]) @ sol.x, [2, 0])
    assert len(sol.kernel) == 1
    k = sol.kernel[0]
    assert abs(k[0] + k[1]) < 1e-12 and abs(k[0]) > 0.5


def test_solve_linear_exact_example():
    a = la.exact_zeros((2, 2))
    a[0, 0] = a[0, 1] = la.ONE
    b = la.exact_vector([2, 0])
    sol = la.solve_linear(a, b)
    assert sol.exact and sol.consistent
    assert list(sol.x) == [la.gauss(2), la.ZERO]
    assert len(sol.kernel) == 1
    v = sol.kernel[0]
    assert v[0] + v[1] == la.ZERO and v[0]


def test_solve_linear_inconsistent():
    sol = la.solve_linear(np.array([[1.0], [1.0]]), np.array([0.0, 1.0]))
    assert not sol.consistent and sol.residual > 0.5
    a = la.exact_zeros((2, 1))
    a[0, 0] = a[1, 0] = la.ONE
    sol = la.solve_linear(a, la.exact_vector([0, 1]))
    assert not sol.consistent and sol.x is None


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(small, min_size=3, max_size=3))
def test_exact_and_float_solvers_agree(rows, rhs):
    a = np.array(rows, dtype=float)
    if abs(np.linalg.det(a)) < 1e-6:
        return
    ex = la.solve_linear(la.exact_vector(np.ravel(rows).tolist()).reshape(3, 3), la.exact_vector(rhs))
    fl = la.solve_linear(a, np.array(rhs, dtype=float))
    assert np.abs(la.promote(ex.x) - fl.x).max() <= 1e-9


def test_rational_parsing_round_trip():
    assert la.format_rational(la.parse_rational("6/4")) == "3/2"
    assert la.format_rational(la.parse_rational(-7)) == "-7"
    assert la.parse_rational(Fraction(1, 3)) == la.parse_rational("1/3")
    for bad in ("x", "1/0", 1.5, True):
        with pytest.raises(ValueError):
            la.parse_rational(bad)


def test_exact_arithmetic_stays_exact():
    x = la.exact_vector([la.gauss(1, 2), la.gauss("1/3")])
    y = x * la.gauss(0, 1) + x
    assert la.is_exact_array(y)
    assert all(la.is_exact(v) for v in y)
    assert la.promote(y)[0] == pytest.approx((1 + 2j) * (1 + 1j))


def test_antilinear_composition():
    rng = np.random.default_rng(3)
    m1 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    m2 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    f, g = la.AntilinearMap(m1), la.AntilinearMap(m2)
    assert np.allclose(f(g(x)), (m1 @ np.conj(m2)) @ x)
    assert np.allclose(f.compose(g) @ x, f(g(x)))


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_exact_psd_matches_eigenvalues(n, seed):
    rng = np.random.default_rng(seed)
    b = rng.integers(-3, 4, size=(n, n)) + 1j * rng.integers(-3, 4, size=(n, n))
    shift = int(rng.integers(-4, 3))
    m = b @ b.conj().T + shift * np.eye(n)
    ex = la.exact_zeros((n, n))
    for i in range(n):
        for j in range(n):
            ex[i, j] = la.gauss(int(m[i, j].real), int(m[i, j].imag))
    lam = np.linalg.eigvalsh(m)[0]
    if abs(lam) > 1e-9:
        assert la.is_psd_exact(ex) == (lam > 0)


def test_exact_psd_singular_boundary():
    m = la.exact_zeros((2, 2))
    m[0, 0] = m[0, 1] = m[1, 0] = m[1, 1] = la.ONE
    assert la.is_psd_exact(m)
    m[1, 1] = la.ZERO
    assert not la.is_psd_exact(m)


@given(st.integers(0, 10**6))
def test_gauss_einsum_matches_object_einsum(seed):
    rng = np.random.default_rng(seed)

    def rand(shape):
        out = la.exact_zeros(shape)
        for idx in np.ndindex(shape):
            out[idx] = la.gauss(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))),
                                Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))))
        return out

    a, b = rand((3, 4, 2)), rand((4, 2))
    got = la.exact_einsum("ijk,jk->i", a, b)
    want = la.exact_zeros(3)
    for i in range(3):
        for j in range(4):
            for k in range(2):
                want[i] += a[i, j, k] * b[j, k]
    assert all(g == w for g, w in zip(got, want))


def test_tolerance_override():
    old = la.get_tol()
    try:
        la.set_tol(1e-6)
        assert la.resolve_tol(None) == 1e-6
        assert la.resolve_tol(1e-3) == 1e-3
    finally:
        la.set_tol(old)
    assert la.get_tol() == 1e-9
