"""Verdict table over the built-in test algebras.

    python3 scripts/ds_survey.py [--mode auto|exact|float] [--seed N] [--json out.json]
"""

import argparse
import json
import time

from qds.constructors import STANDARD_GROUPS, crossed_product, from_cayley, parse_abelian
from qds.corep import irr_mod_gamma
from qds.dsfamily import NoneCertificate, analyze_blocks, ds_verdict, hamiltonian_certificate
from qds.hopf import is_cocommutative, is_commutative


def algebras():
    for name, make in STANDARD_GROUPS.items():
        yield f"C({name})", from_cayley(make(), "functions", f"C({name})")
    for name in ("S3", "D4", "H"):
        yield f"C[{name}]", from_cayley(STANDARD_GROUPS[name](), "group-algebra", f"C[{name}]")
    for gamma in ("1", "2", "4", "2x2"):
        label = "x".join(f"Z{m}" for m in parse_abelian(gamma))
        yield f"C[{label}]#C(H)", crossed_product(gamma)


def survey(mode: str, seed: int):
    rows = []
    for label, h in algebras():
        t0 = time.perf_counter()
        h.get_antipode()
        ba = analyze_blocks(h, seed)
        v = ds_verdict(h, seed, mode=mode, analysis=ba)
        ham = hamiltonian_certificate(h, ba, seed=seed)
        row = {
            "algebra": label,
            "dim": h.dim,
            "commutative": is_commutative(h).value,
            "cocommutative": is_cocommutative(h).value,
            "blocks": " ".join(c.describe() for c in v.classifications),
            "member": v.member,
            "irr_mod_gamma": irr_mod_gamma(ba.dd).order,
            "hamiltonian": ham.passed if v.member else round(ham.noncentral_commutator, 4),
        }
        if not isinstance(v.result, NoneCertificate):
            w = v.result
            row["epsilon"] = w.epsilon_exact or f"{w.epsilon:.6g}"
            row["exact"] = w.exact
        row["seconds"] = round(time.perf_counter() - t0, 2)
        rows.append(row)
        print(f"{label:16s} dim {h.dim:3d}  {'member' if v.member else 'root  '}  "
              f"eps {row.get('epsilon', '-'):>8s}  {row['seconds']:5.2f}s  {row['blocks']}")
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--mode", default="auto", choices=("auto", "exact", "float"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json")
    args = p.parse_args()
    rows = survey(args.mode, args.seed)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
