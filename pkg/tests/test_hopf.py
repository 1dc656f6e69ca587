import numpy as np
import pytest
from hypothesis import given, strategies as st

from qds import linalg as la
from qds.constructors import crossed_haar_product, from_cayley, quaternion, STANDARD_GROUPS
from qds.hopf import (HopfStarAlgebra, NotIdempotentError, conditional_expectation, convolve, dagger,
                      density_of, evaluate, functional_of, gns_operator, gram, haar_state,
                      is_central, is_cocommutative, is_commutative, is_kac, operator_norm,
                      solve_antipode, verify_axioms, _verify_dense)
from qds.staralg import StarAlgebra

from conftest import blocks, dual_decomposition, graded_ch, hopf

NAMES = ["Z2", "Z3", "S3", "D4", "H"]
seeds = st.integers(0, 2**31 - 1)


def random_functional(h, seed, hermitian=False):
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal(h.dim) + 1j * rng.standard_normal(h.dim)
    if hermitian:
        phi = (phi + dagger(h, phi)) / 2
    return phi


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("variant", ["functions", "group-algebra"])
def test_constructor_axioms_exact(name, variant):
    rep = verify_axioms(hopf(name, variant))
    assert rep.exact and rep.passed and rep.worst == 0.0


@pytest.mark.parametrize("name", ["Z3", "S3"])
def test_sparse_axiom_check_matches_dense(name):
    h = hopf(name)
    assert verify_axioms(h).residuals == _verify_dense(h, 1e-9, True).residuals


def corrupted(h: HopfStarAlgebra) -> HopfStarAlgebra:
    mult = dict(h.alg.mult)
    key = next(k for k in sorted(mult) if k[0] == k[1] == 1)
    mult[key] = mult[key] + la.ONE
    alg = StarAlgebra(mult, h.alg.unit, h.alg.star_matrix, h.labels)
    return HopfStarAlgebra(alg, h.comult, h.counit, h.antipode, "corrupted")


def test_fault_injection_flags_homomorphism():
    rep = verify_axioms(corrupted(hopf("S3")))
    assert not rep.passed
    assert rep.residuals["comult_multiplicative"] > 1e-9
    assert "comult_multiplicative" in rep.failures


def test_antipode_examples():
    g = STANDARD_GROUPS["S3"]()
    h = from_cayley(g, "functions")
    s = solve_antipode(h)
    for a in range(g.order):
        col = la.promote(s[:, a])
        assert col[g.inverse(a)] == 1 and np.count_nonzero(col) == 1
    ga = from_cayley(g, "group-algebra")
    s2 = solve_antipode(ga)
    for a in range(g.order):
        assert la.promote(s2[:, a])[g.inverse(a)] == 1


def test_crossed_antipode_involutive():
    h = hopf("crossed:4")
    s = la.promote(h.get_antipode())
    assert np.abs(s @ s - np.eye(h.dim)).max() <= 1e-9
    assert verify_axioms(h).passed


@pytest.mark.parametrize("name", NAMES)
def test_solved_antipode_matches_constructor(name):
    h = hopf(name)
    given_s = h.antipode
    solved = solve_antipode(HopfStarAlgebra(h.alg, h.comult, h.counit, None))
    assert all(a == b for a, b in zip(given_s.ravel(), solved.ravel()))


def test_haar_examples():
    hz2 = hopf("Z2")
    assert [la.to_complex(v) for v in hz2.haar.coeffs] == [0.5, 0.5]
    g = hopf("S3", "group-algebra")
    assert [la.to_complex(v) for v in g.haar.coeffs] == [1, 0, 0, 0, 0, 0]
    cross = hopf("crossed:4")
    assert all(a == b for a, b in zip(cross.haar.coeffs, crossed_haar_product("4")))


@pytest.mark.parametrize("name", NAMES)
def test_haar_state_invariance(name):
    h = hopf(name)
    hv = h.haar.coeffs
    assert h.haar.exact and h.haar.min_eigenvalue >= -1e-12
    one = evaluate(hv, h.alg.unit)
    assert one == la.ONE
    for i in range(h.dim):
        e = la.exact_zeros(h.dim)
        e[i] = la.ONE
        want = hv * evaluate(e, h.alg.unit)
        assert la.max_abs(convolve(h, hv, e) - want) == 0
        assert la.max_abs(convolve(h, e, hv) - want) == 0


def test_convolution_examples():
    h = hopf("H")
    phi = random_functional(h, 1)
    assert np.allclose(convolve(h, h.counit, phi), phi)
    hv = la.promote(h.haar.coeffs)
    assert np.allclose(convolve(h, hv, phi), evaluate(phi, la.promote(h.alg.unit)) * hv)
    dd = dual_decomposition("H")
    e = dd.irreps[-1].block.units
    assert np.allclose(convolve(h, e[0, 1], e[1, 0]), e[0, 0])
    assert np.allclose(convolve(h, e[0, 1], e[0, 1]), 0)


def test_dagger_examples():
    h = hopf("Z2")
    assert la.max_abs(dagger(h, h.haar.coeffs) - h.haar.coeffs) == 0
    assert la.max_abs(dagger(h, h.counit) - h.counit) == 0
    phi = la.exact_vector([la.gauss(0, 1), 0])
    assert list(dagger(h, phi)) == [la.gauss(0, -1), la.ZERO]


@pytest.mark.parametrize("name", ["S3", "H", "crossed:4"])
@given(seed=seeds)
def test_convolution_properties(name, seed):
    h = hopf(name)
    a, b, c = (random_functional(h, seed + k) for k in range(3))
    assert la.max_abs(convolve(h, convolve(h, a, b), c) - convolve(h, a, convolve(h, b, c))) <= 1e-9 * 100
    hv = la.promote(h.haar.coeffs)
    one = evaluate(a, la.promote(h.alg.unit))
    assert la.max_abs(convolve(h, hv, a) - one * hv) <= 1e-9
    assert la.max_abs(convolve(h, a, hv) - one * hv) <= 1e-9
    assert la.max_abs(dagger(h, convolve(h, a, b)) - convolve(h, dagger(h, a), dagger(h, b))) <= 1e-9 * 100
    assert la.max_abs(dagger(h, dagger(h, a)) - a) <= 1e-12


def test_dual_algebra_examples():
    from qds.hopf import dual_algebra
    d = dual_algebra(hopf("Z2", "group-algebra"))
    assert d.dim == 2 and d.is_commutative()[0]
    assert sorted(dual_algebra(hopf("H")).block_decompose().sizes) == [1, 1, 1, 1, 2]
    assert sorted(dual_algebra(hopf("S3")).block_decompose().sizes) == [1, 1, 2]


@pytest.mark.parametrize("name, variant, comm, cocomm", [
    ("H", "functions", True, False),
    ("Z3", "functions", True, True),
    ("S3", "group-algebra", False, True),
    ("crossed:4", "functions", False, False),
])
def test_flags(name, variant, comm, cocomm):
    h = hopf(name, variant)
    assert is_commutative(h).value == comm
    assert is_cocommutative(h).value == cocomm
    assert is_kac(h).value


def test_density_examples():
    h = hopf("Z2")
    one = density_of(h, h.haar.coeffs)
    assert all(a == b for a, b in zip(one, h.alg.unit))
    x = density_of(h, h.counit)
    assert list(x) == [la.gauss(2), la.ZERO]


def test_density_of_matrix_unit_kac_formula():
    h = hopf("H")
    dd = dual_decomposition("H")
    for ir in dd.irreps:
        n = ir.dim
        for k in range(n):
            for l in range(n):
                x = density_of(h, ir.block.units[k, l])
                assert np.abs(x - n * h.alg.star_of(ir.u[k, l])).max() <= 1e-9
                assert np.abs(x - n * la.promote(h.get_antipode()) @ la.promote(ir.u[l, k])).max() <= 1e-9


@pytest.mark.parametrize("name", ["S3", "crossed:4"])
@given(seed=seeds)
def test_density_round_trip(name, seed):
    h = hopf(name)
    x = random_functional(h, seed)
    assert np.abs(density_of(h, functional_of(h, x)) - x).max() <= 1e-9


def test_density_round_trip_exact():
    h = hopf("D4")
    x = la.exact_vector([1, "1/2", 0, -3, la.gauss(0, 1), 0, 2, "5/7"])
    back = density_of(h, functional_of(h, x))
    assert all(a == b for a, b in zip(back, x))


@given(seed=seeds)
def test_hermitian_functional_has_selfadjoint_density(seed):
    h = hopf("D4")
    phi = random_functional(h, seed, hermitian=True)
    x = density_of(h, phi)
    assert np.abs(h.alg.star_of(x) - x).max() <= 1e-9


@pytest.mark.parametrize("name", ["D4", "crossed:4"])
@given(seed=seeds)
def test_tracial_boundedness(name, seed):
    h = hopf(name)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(h.dim) + 1j * rng.standard_normal(h.dim)
    x = x + h.alg.star_of(x)
    b = rng.standard_normal(h.dim) + 1j * rng.standard_normal(h.dim)
    a = h.alg.multiply(h.alg.star_of(b), b)
    hv = la.promote(h.haar.coeffs)
    lhs = abs(evaluate(hv, h.alg.multiply(x, a)))
    rhs = operator_norm(h, x) * evaluate(hv, a).real
    assert lhs <= rhs * (1 + 1e-9) + 1e-9


def test_gram_detects_positivity():
    h = hopf("S3")
    hv = la.promote(h.haar.coeffs)
    assert la.min_eigenvalue(gram(h, hv)) > 0
    bad = hv.copy()
    bad[1] -= 1.0
    assert la.min_eigenvalue(gram(h, bad)) < 0


def test_conditional_expectation_examples():
    h = hopf("S3")
    hv = la.promote(h.haar.coeffs)
    e = conditional_expectation(h, hv)
    a = random_functional(h, 5)
    assert np.allclose(e(a), evaluate(hv, a) * la.promote(h.alg.unit))
    ident = conditional_expectation(h, la.promote(h.counit), "right")
    assert np.allclose(ident.matrix, np.eye(h.dim))
    with pytest.raises(NotIdempotentError):
        conditional_expectation(h, 2 * hv)


def test_conditional_expectation_crossed_sides_agree():
    h = hopf("crossed:4")
    # basis g * 8 + b over the graded basis of C(H): a (x) u -> eps(a) h(u)
    omega = np.tile(la.promote(graded_ch().hopf.haar.coeffs), 4)
    left = conditional_expectation(h, omega, "left")
    right = conditional_expectation(h, omega, "right")
    assert max(left.residuals.values()) <= 1e-9
    assert np.abs(left.matrix - right.matrix).max() <= 1e-9
    assert is_central(h, omega).value


def test_centrality_examples():
    h = hopf("D4")
    assert is_central(h, h.haar.coeffs).value
    assert is_central(h, h.counit).value
    ba = blocks("D4")
    s = next(s for s, c in ba.classes.items() if c.n == 2)
    e = ba.dd.irreps[s].block.units
    flag = is_central(h, e[0, 0] + dagger(h, e[0, 0]))
    assert not flag.value and flag.residual > 0.1


def test_gns_operator_is_left_multiplication():
    h = hopf("S3")
    x = random_functional(h, 9)
    op = gns_operator(h, x)
    y = h.alg.multiply(h.alg.star_of(x), x)
    assert la.min_eigenvalue(gns_operator(h, y)) >= -1e-9
    assert op.shape == (h.dim, h.dim)


def test_haar_rejects_non_quantum_group():
    h = hopf("Z2")
    broken = HopfStarAlgebra(h.alg, {(0, 0, 0): la.ONE, (1, 1, 1): la.ONE}, h.counit, None)
    from qds.hopf import NotAQuantumGroupError
    with pytest.raises((NotAQuantumGroupError, Exception)):
        haar_state(broken)


def test_quaternion_group_functions_dim():
    assert from_cayley(quaternion()).dim == 8
