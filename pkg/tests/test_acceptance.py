"""The ten acceptance criteria, each printing one PASS/FAIL line."""

import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from qds import io
from qds import linalg as la
from qds.constructors import crossed_haar_product, crossed_product, from_cayley, standard_hopf, tensor_product
from qds.corep import (extract_irreps, identify_commutative, irr_mod_gamma, is_quaternion_group,
                       order_profile, peter_weyl_residual, subalgebra_generated)
from qds.dsfamily import (COMPLEX, QUATERNION, REAL, NoneCertificate, analyze_blocks, ds_verdict,
                          hamiltonian_certificate, square_root, suq2_block)
from qds.hopf import convolve, gram, is_cocommutative, is_commutative, is_kac, verify_axioms

from oracles import character_table, frobenius_schur, pointwise_average, quaternion_pi

DATA = Path(__file__).resolve().parents[1] / "data" / "cayley"
MEMBERS = ["Z2", "Z3", "Z4", "Z2xZ2", "H", "HxZ2"]
NON_MEMBERS = ["D4", "S3", "HxZ4"]
CLASSICAL = MEMBERS + NON_MEMBERS


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def from_file(name, variant="functions"):
    h = from_cayley(io.load_cayley(DATA / f"{name}.txt"), variant, name)
    h.get_antipode()
    return h


_SUITE = {}


def suite():
    """Every test algebra with its verdict, dims 2..32."""
    if not _SUITE:
        for name in CLASSICAL:
            _SUITE[f"C({name})"] = from_file(name)
        for name in ("S3", "D4", "H"):
            _SUITE[f"C[{name}]"] = from_file(name, "group-algebra")
        for gamma in ("1", "2", "4"):
            _SUITE[f"crossed {gamma}"] = crossed_product(gamma)
        _SUITE["C(Z2) x C[S3]"] = tensor_product(from_file("Z2"), from_file("S3", "group-algebra"))
        for key, h in _SUITE.items():
            h.get_antipode()
            ba = analyze_blocks(h)
            _SUITE[key] = (h, ba, ds_verdict(h, analysis=ba))
    return _SUITE


def witness_residuals(h, w):
    hv = la.promote(h.haar.coeffs)
    phi = w.phi
    if la.is_exact_array(phi):
        sq = la.max_abs(convolve(h, phi, phi) - h.haar.coeffs)
    else:
        sq = la.max_abs(convolve(h, phi, phi) - hv)
    lam = la.min_eigenvalue(gram(h, la.promote(phi)))
    dist = la.max_abs(la.promote(phi) - hv)
    return sq, lam, dist


def test_criterion_01_classical_concordance(capsys):
    problems, times = [], {}
    for name in CLASSICAL:
        t0 = time.perf_counter()
        h = from_file(name)
        exact = ds_verdict(h, mode="auto")
        flt = square_root(h, mode="float", analysis=exact.analysis)
        times[name] = time.perf_counter() - t0
        want = name in MEMBERS
        if exact.member != want:
            problems.append(f"{name}: member={exact.member}")
        if not want:
            w = exact.result
            sq, lam, dist = witness_residuals(h, w)
            if not w.exact or sq != 0 or lam < -1e-9 or dist <= 1e-9:
                problems.append(f"{name}: exact witness {sq} {lam} {dist}")
            sq, lam, dist = witness_residuals(h, flt)
            if sq > 1e-9 or lam < -1e-9 or dist <= 1e-9:
                problems.append(f"{name}: float witness {sq:.2e} {lam:.2e} {dist:.2e}")
        if times[name] >= 5:
            problems.append(f"{name}: {times[name]:.2f} s")
    slowest = max(times, key=times.get)
    report(capsys, 1, not problems,
           f"{len(CLASSICAL)} groups, slowest {slowest} {times[slowest]:.2f} s {problems or ''}")


def test_criterion_02_cocommutative(capsys):
    problems = []
    for name in ("S3", "D4", "H"):
        h, ba, v = suite()[f"C[{name}]"]
        kinds = {c.kind for c in v.classifications}
        if not v.member or not kinds <= {REAL, COMPLEX}:
            problems.append(f"C[{name}] member={v.member} kinds={kinds}")
    report(capsys, 2, not problems, f"C[S3], C[D4], C[H] members with R/C blocks {problems or ''}")


def test_criterion_03_crossed_product(capsys):
    t0 = time.perf_counter()
    h = crossed_product("4")
    ax = verify_axioms(h)
    dd = extract_irreps(h)
    ba = analyze_blocks(h, dd=dd)
    v = ds_verdict(h, analysis=ba)
    elapsed = time.perf_counter() - t0
    haar_ok = all(a == b for a, b in zip(h.haar.coeffs, crossed_haar_product("4")))
    checks = {
        "axioms exact": ax.passed and ax.exact and ax.worst == 0,
        "noncommutative": not is_commutative(h).value,
        "noncocommutative": not is_cocommutative(h).value,
        "kac": is_kac(h).value,
        "member": v.member,
        "dim 0 mod 8": h.dim == 32 and h.dim % 8 == 0,
        "haar exact": haar_ok,
        "irreps 16x1 + 4x2": sorted(dd.sizes) == [1] * 16 + [2] * 4,
        "runtime": elapsed < 60,
    }
    bad = [k for k, ok in checks.items() if not ok]
    report(capsys, 3, not bad, f"dim 32, {elapsed:.2f} s {bad or ''}")


def test_criterion_04_suq2(capsys):
    problems = []
    for q in (0.25, 0.5, 1.0):
        c = suq2_block(Fraction(1, 2), q).classification
        if c.kind != QUATERNION or not c.division:
            problems.append(f"1/2 q={q}: {c.describe()}")
    for q in (-0.25, -0.5, -1.0):
        res = suq2_block(Fraction(1, 2), q)
        c = res.classification
        if c.kind != REAL or c.describe() != "M2(R)":
            problems.append(f"1/2 q={q}: {c.describe()}")
        if res.residuals["explicit_square"] > 1e-12 or res.residuals["explicit_fixed"] > 1e-12:
            problems.append(f"1/2 q={q}: explicit witness {res.residuals}")
    for spin in (Fraction(1), Fraction(3, 2)):
        for q in (0.25, 0.5, 1.0, -0.25, -0.5, -1.0):
            res = suq2_block(spin, q)
            c = res.classification
            if c.division or res.nilpotent is None or res.residuals["nilpotent_square"] > 1e-9:
                problems.append(f"{spin} q={q}: {c.describe()}")
    report(capsys, 4, not problems, f"spins 1/2, 1, 3/2 at six q values {problems or ''}")


def test_criterion_05_route_equivalence(capsys):
    s = suite()
    dims = sorted({h.dim for h, _, _ in s.values()})
    problems = []
    for key, (h, ba, v) in s.items():
        independent = square_root(h, seed=1, mode="float")
        if v.member != isinstance(independent, NoneCertificate):
            problems.append(key)
    ok = not problems and len(s) >= 12 and dims[0] == 2 and dims[-1] == 32
    report(capsys, 5, ok, f"{len(s)} algebras, dims {dims[0]}..{dims[-1]} {problems or ''}")


def test_criterion_06_peter_weyl(capsys):
    res = {}
    for key in ("C(H)", "crossed 4"):
        h, ba, _ = suite()[key]
        res[key] = peter_weyl_residual(ba.dd)
    # independent check on C(H): plain group averages of |pi_ij|^2 and of the extracted coefficients
    pi = quaternion_pi()
    oracle = [pointwise_average([abs(m[i, j]) ** 2 for m in pi.values()]) for i in range(2) for j in range(2)]
    h, ba, _ = suite()["C(H)"]
    two = next(ir for ir in ba.dd.irreps if ir.dim == 2)
    ours = [pointwise_average(np.abs(two.u[i, j]) ** 2) for i in range(2) for j in range(2)]
    hv = la.promote(h.haar.coeffs)
    solver = [np.conj(two.u[i, j]) * two.u[i, j] @ hv for i in range(2) for j in range(2)]
    ok = (max(res.values()) <= 1e-9 and np.allclose(oracle, 0.5, atol=1e-12)
          and np.allclose(ours, 0.5, atol=1e-9) and np.allclose(solver, 0.5, atol=1e-9))
    report(capsys, 6, ok, "residuals " + ", ".join(f"{k} {v:.1e}" for k, v in res.items())
           + f"; averaging oracle {oracle[0].real:g}")


def test_criterion_07_two_dim_irreps(capsys):
    problems, count = [], 0
    for key, (h, ba, v) in suite().items():
        if not v.member:
            continue
        for ir in ba.dd.irreps:
            if ir.dim != 2:
                continue
            count += 1
            sub = subalgebra_generated(ba.dd, ir.index)
            g = identify_commutative(sub.hopf)
            comm = is_commutative(sub.hopf, tol=1e-7).value
            if sub.hopf.dim != 8 or not comm or g is None or not is_quaternion_group(g):
                problems.append(f"{key} irrep {ir.index}")
            elif order_profile(g) != {1: 1, 2: 1, 4: 6}:
                problems.append(f"{key} irrep {ir.index} profile")
    report(capsys, 7, not problems and count > 0, f"{count} two-dimensional irreps {problems or ''}")


def test_criterion_08_irr_mod_gamma(capsys):
    s = suite()
    problems = []
    if irr_mod_gamma(s["C[S3]"][1].dd).order != 1:
        problems.append("C[S3] not trivial")
    for key in ("C(H)", "crossed 4"):
        g = irr_mod_gamma(s[key][1].dd)
        if g.order != 2 or not g.is_elementary_2_group:
            problems.append(f"{key} order {g.order}")
    members = [k for k, (_, _, v) in s.items() if v.member]
    for key in members:
        g = irr_mod_gamma(s[key][1].dd)
        if not (g.well_defined and g.abelian and g.exponent <= 2):
            problems.append(f"{key}: {g.issues}")
    report(capsys, 8, not problems, f"{len(members)} members checked {problems or ''}")


def test_criterion_09_hamiltonian(capsys):
    problems = []
    members = 0
    for key, (h, ba, v) in suite().items():
        if not v.member:
            continue
        members += 1
        rep = hamiltonian_certificate(h, ba)
        if not rep.passed or rep.max_commutator > 1e-9:
            problems.append(key)
    h, ba, _ = suite()["C(D4)"]
    d4 = hamiltonian_certificate(h, ba)
    p = d4.noncentral
    idem = la.max_abs(convolve(h, p, p) - p)
    if d4.noncentral_commutator < 0.1 or idem > 1e-8:
        problems.append(f"C(D4) commutator {d4.noncentral_commutator}")
    report(capsys, 9, not problems,
           f"{members} members pass; C(D4) commutator {d4.noncentral_commutator:.3f} {problems or ''}")


def test_criterion_10_frobenius_schur(capsys):
    want = {1: REAL, -1: QUATERNION, 0: COMPLEX}
    problems, blocks = [], 0
    for name in CLASSICAL:
        table = np.array(io.load_cayley(DATA / f"{name}.txt").table)
        oracle = character_table(table)
        h, ba, _ = suite()[f"C({name})"]
        for s in ba.reduced():
            chi = ba.dd.irreps[s].character
            o = [o for o in oracle if np.abs(chi - o).max() < 1e-8]
            blocks += 1
            if len(o) != 1 or ba.classes[s].kind != want[round(frobenius_schur(table, o[0]))]:
                problems.append(f"C({name}) block {s}")
    for name in ("S3", "D4", "H"):
        t = io.load_cayley(DATA / f"{name}.txt")
        h, ba, _ = suite()[f"C[{name}]"]
        for s in ba.reduced():
            g = int(np.argmax(np.abs(la.promote(ba.dd.irreps[s].u[0, 0]))))
            blocks += 1
            if ba.classes[s].kind != (REAL if t.mul(g, g) == 0 else COMPLEX):
                problems.append(f"C[{name}] block {s}")
    report(capsys, 10, not problems, f"{blocks} blocks agree with the indicator {problems or ''}")


@pytest.mark.parametrize("name", ["Z2", "S3", "H"])
def test_standard_and_file_inputs_agree(name):
    a, b = from_file(name), standard_hopf(name)
    assert a.alg.mult == b.alg.mult and a.comult == b.comult
