"""Full analysis of a finite quantum group as a JSON-ready report."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .corep import extract_irreps, irr_mod_gamma, peter_weyl_residual
from .dsfamily import (NoneCertificate, SquareRootWitness, analyze_blocks, ds_verdict,
                       hamiltonian_certificate, nz_check, FIELD)
from .hopf import AxiomError, HopfStarAlgebra, is_cocommutative, is_commutative, is_kac, verify_axioms
from .io import EXACT, FLOAT, encode_scalar

SCHEMA_VERSION = "1.0"


@dataclass
class AnalysisConfig:
    tol: float = 1e-9
    seed: int = 0
    mode: str = "auto"          # square-root arithmetic: auto | exact | float
    timings: bool = True


class _Clock:
    def __init__(self):
        self.stages = {}

    @contextmanager
    def stage(self, name):
        t = time.perf_counter()
        yield
        self.stages[name] = round(time.perf_counter() - t, 6)


def _vector(v) -> list:
    v = np.asarray(v)
    mode = EXACT if la.is_exact_array(v) else FLOAT
    return [encode_scalar(x, mode) for x in v]


def _num(x) -> float:
    return float(x)


def classification_dict(c) -> dict:
    return {
        "block": c.s,
        "partner": c.partner,
        "size": c.n,
        "kind": c.kind,
        "field": c.field,
        "m": c.m,
        "division": c.division,
        "c": None if c.c is None else _num(c.c),
        "qq_residual": _num(c.residual),
        "trace_signature": list(c.signature),
        "describe": c.describe(),
    }


def witness_dict(w: SquareRootWitness) -> dict:
    return {
        "block": w.block,
        "exact": w.exact,
        "epsilon": _num(w.epsilon),
        "epsilon_exact": w.epsilon_exact,
        "lambda_min": _num(w.lambda_min),
        "residuals": {k: _num(v) for k, v in w.residuals.items()},
        "psi": _vector(w.psi),
        "density": _vector(w.density),
        "phi": _vector(w.phi),
        "notes": list(w.notes),
    }


def certificate_dict(cert: NoneCertificate) -> dict:
    return {
        "classifications": [classification_dict(c) for c in cert.classifications],
        "searches": [{"block": s, **v} for s, v in sorted(cert.searches.items())],
    }


def sqrt_dict(result) -> dict:
    if isinstance(result, SquareRootWitness):
        return {"kind": "witness", "witness": witness_dict(result)}
    return {"kind": "certificate", "certificate": certificate_dict(result)}


def analyze(h: HopfStarAlgebra, config: AnalysisConfig | None = None) -> dict:
    """Run every check and return the report; raises ``AxiomError`` on failing axioms."""
    cfg = config or AnalysisConfig()
    tol, seed = cfg.tol, cfg.seed
    clock = _Clock()
    with clock.stage("axioms"):
        axioms = verify_axioms(h, tol)
    axiom_part = {
        "passed": axioms.passed,
        "exact": axioms.exact,
        "worst": _num(axioms.worst),
        "residuals": {k: _num(v) for k, v in axioms.residuals.items()},
        "failures": axioms.failures,
    }
    if not axioms.passed:
        raise AxiomError(f"Hopf axioms fail: {', '.join(axioms.failures)}", axiom_part)
    with clock.stage("haar"):
        haar = h.haar
    with clock.stage("flags"):
        flags = {name: f(h, tol) for name, f in
                 (("commutative", is_commutative), ("cocommutative", is_cocommutative), ("kac", is_kac))}
    with clock.stage("blocks"):
        dd = extract_irreps(h, seed, tol)
        ba = analyze_blocks(h, seed, tol, dd)
    with clock.stage("ds"):
        verdict = ds_verdict(h, seed, tol, cfg.mode, ba)
    with clock.stage("irreps"):
        pw = peter_weyl_residual(dd)
        fus = dd.fusion
        gl = dd.group_likes
        img = irr_mod_gamma(dd, fus)
    with clock.stage("hamiltonian"):
        ham = hamiltonian_certificate(h, ba, tol, seed=seed)
    nz = nz_check(h, verdict)

    def block_entry(ir):
        rep = min(ir.index, ir.partner)
        c = ba.classes[rep]
        return {"index": ir.index, "size": ir.dim, "partner": ir.partner, "kind": c.kind,
                "field": FIELD[c.kind], "m": c.m, "c": None if c.c is None else _num(c.c)}

    report = {
        "schema_version": SCHEMA_VERSION,
        "name": h.name,
        "dim": h.dim,
        "scalars": EXACT if h.exact else FLOAT,
        "seed": seed,
        "tolerance": tol,
        "axioms": axiom_part,
        "haar": {"coeffs": _vector(haar.coeffs), "exact": haar.exact,
                 "residual": _num(haar.residual), "min_eigenvalue": _num(haar.min_eigenvalue)},
        "flags": {k: {"value": bool(f.value), "residual": _num(f.residual)} for k, f in flags.items()},
        "blocks": [block_entry(ir) for ir in dd.irreps],
        "irreps": {"count": len(dd.irreps), "sizes": dd.sizes,
                   "peter_weyl_residual": _num(pw),
                   "residuals": {k: _num(v) for k, v in dd.residuals.items()},
                   "fusion_residual": _num(fus.raw_residual), "group_likes": gl.table.order},
        "ds": {"member": verdict.member,
               "classifications": [classification_dict(c) for c in verdict.classifications],
               **sqrt_dict(verdict.result)},
        "irr_mod_gamma": {"order": img.order, "classes": img.classes, "well_defined": img.well_defined,
                          "abelian": img.abelian, "exponent": img.exponent,
                          "elementary_2_group": img.is_elementary_2_group, "issues": list(img.issues)},
        "nz_check": {"status": nz.status, "dim": nz.dim, "reason": nz.reason},
        "hamiltonian": hamiltonian_dict(ham),
        "timings": clock.stages if cfg.timings else {},
    }
    return report


def hamiltonian_dict(ham) -> dict:
    out = {"member": ham.member, "passed": ham.passed, "sums_checked": ham.checked,
           "max_commutator": _num(ham.max_commutator), "idempotent_residual": _num(ham.idempotent_residual)}
    if not ham.member:
        out["noncentral_idempotent"] = {
            "block": ham.noncentral_block,
            "commutator": None if ham.noncentral_commutator is None else _num(ham.noncentral_commutator),
            "coeffs": None if ham.noncentral is None else _vector(ham.noncentral),
        }
    return out


def suq2_dict(res) -> dict:
    spec = res.spec
    out = {
        "spin": str(spec.spin),
        "q": spec.q,
        "n": spec.n,
        "Q": [[float(v) for v in row] for row in spec.Q],
        "classification": classification_dict(res.classification),
        "residuals": {k: _num(v) for k, v in res.residuals.items()},
        "nilpotent": None,
    }
    if res.nilpotent is not None:
        out["nilpotent"] = [[encode_scalar(v, FLOAT) for v in row] for row in res.nilpotent]
    return out


def text_summary(report: dict) -> str:
    ds = report["ds"]
    flags = report["flags"]
    lines = [
        f"{report['name'] or 'quantum group'}: dim {report['dim']} ({report['scalars']})",
        f"axioms: {'pass' if report['axioms']['passed'] else 'FAIL'} (worst residual {report['axioms']['worst']:.3g})",
        "flags: " + ", ".join(f"{k}={'yes' if v['value'] else 'no'}" for k, v in flags.items()),
        "irreps: " + " ".join(str(n) for n in report["irreps"]["sizes"]),
        "blocks: " + ", ".join(c["describe"] for c in ds["classifications"]),
        f"DS member: {'yes' if ds['member'] else 'no'}",
    ]
    if ds["kind"] == "witness":
        w = ds["witness"]
        eps = w["epsilon_exact"] or f"{w['epsilon']:.6g}"
        lines.append(f"square root: h + {eps} psi on block {w['block']} "
                     f"({'exact' if w['exact'] else 'float'}, |phi*phi - h| = {w['residuals']['phi_square_minus_haar']:.3g})")
    img = report["irr_mod_gamma"]
    lines.append(f"Irr/Gamma: order {img['order']}, well defined {img['well_defined']}, exponent {img['exponent']}")
    lines.append(f"hamiltonian: {'pass' if report['hamiltonian']['passed'] else 'no'}")
    lines.append(f"dimension divisible by 8 check: {report['nz_check']['status']}")
    return "\n".join(lines) + "\n"
