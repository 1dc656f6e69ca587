"""``qds`` command line: build, analyze, sqrt, suq2."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import io
from .constructors import STANDARD_GROUPS, GroupAxiomError, crossed_product, from_cayley, tensor_product
from .dsfamily import NonPositiveEpsilonError, square_root, suq2_block
from .hopf import (AxiomError, HaarNotFaithfulError, NoAntipodeError, NotAQuantumGroupError,
                   UnsupportedNonTracialError, verify_axioms)
from .linalg import InternalConsistencyError
from .report import AnalysisConfig, analyze, sqrt_dict, suq2_dict, text_summary
from .staralg import NonSemisimpleError

OK, USAGE, AXIOMS, PARSE, INCONSISTENT = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(PARSE)


def _seed(args) -> int:
    env = os.environ.get("QDS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise io.ParseError(f"QDS_SEED must be an integer, got {env!r}", "QDS_SEED") from exc
    return args.seed


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_group(h, out) -> None:
    text = io.dumps(io.to_document(h))
    back = io.loads(text)
    rep = verify_axioms(back)
    if not rep.passed:
        raise AxiomError(f"constructed algebra fails {rep.failures}", rep)
    _emit(text, out)


def cmd_build(args) -> int:
    if args.kind == "group":
        if bool(args.cayley) == bool(args.group):
            raise io.ParseError("give exactly one of --cayley or --group", "build group")
        if args.cayley:
            table = io.load_cayley(args.cayley)
            name = args.name or os.path.splitext(os.path.basename(args.cayley))[0]
        else:
            table = STANDARD_GROUPS[args.group]()
            name = args.name or args.group
        label = f"C({name})" if args.variant == "functions" else f"C[{name}]"
        h = from_cayley(table, args.variant, label)
    elif args.kind == "crossed":
        h = crossed_product(args.gamma)
    else:
        a, b = io.load(args.first), io.load(args.second)
        for part in (a, b):
            rep = verify_axioms(part)
            if not rep.passed:
                raise AxiomError(f"{part.name or 'input'} fails {rep.failures}", rep)
        h = tensor_product(a, b)
    h.get_antipode()
    _write_group(h, args.output)
    return OK


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(tol=args.tol, seed=_seed(args), mode=args.mode,
                          timings=not getattr(args, "no_timings", False))


def cmd_analyze(args) -> int:
    h = io.load(args.file)
    report = analyze(h, _config(args))
    _emit(text_summary(report) if args.format == "text" else _dump(report), args.output)
    return OK


def cmd_sqrt(args) -> int:
    h = io.load(args.file)
    rep = verify_axioms(h, args.tol)
    if not rep.passed:
        raise AxiomError(f"Hopf axioms fail: {', '.join(rep.failures)}", rep)
    eps = args.eps if args.eps == "auto" else float(args.eps)
    result = square_root(h, _seed(args), args.tol, args.mode, eps)
    _emit(_dump({"name": h.name, "dim": h.dim, **sqrt_dict(result)}), args.output)
    return OK


def cmd_suq2(args) -> int:
    res = suq2_block(args.spin, args.q, _seed(args))
    _emit(_dump(suq2_dict(res)), args.output)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qds", description="Finite quantum groups and square roots of the Haar state.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="write a quantum-group file")
    bsub = b.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    g = bsub.add_parser("group", help="C(G) or CG from a Cayley table")
    g.add_argument("--cayley", help="Cayley-table file")
    g.add_argument("--group", choices=sorted(STANDARD_GROUPS), help="built-in group")
    g.add_argument("--variant", choices=("functions", "group-algebra"), default="functions")
    g.add_argument("--name", default="")
    c = bsub.add_parser("crossed", help="crossed product CGamma x| C(H)")
    c.add_argument("--gamma", default="4", help='finite abelian group, e.g. "4" or "2x4"')
    t = bsub.add_parser("product", help="tensor product of two files")
    t.add_argument("first")
    t.add_argument("second")
    for q in (g, c, t):
        q.add_argument("-o", "--output")
    b.set_defaults(func=cmd_build)

    def common(q):
        q.add_argument("--tol", type=float, default=1e-9)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--mode", choices=("auto", "exact", "float"), default="auto",
                       help="arithmetic for the square-root witness")
        q.add_argument("-o", "--output")

    a = sub.add_parser("analyze", help="full report")
    a.add_argument("file")
    fmt = a.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--text", dest="format", action="store_const", const="text")
    a.add_argument("--no-timings", action="store_true", help="omit wall-clock timings")
    a.set_defaults(format="json", func=cmd_analyze)
    common(a)

    s = sub.add_parser("sqrt", help="square root of the Haar state or a certificate")
    s.add_argument("file")
    s.add_argument("--eps", default="auto", type=_eps)
    s.set_defaults(func=cmd_sqrt)
    common(s)

    u = sub.add_parser("suq2", help="real form of an SU_q(2) dual block")
    u.add_argument("--spin", required=True, type=_spin)
    u.add_argument("--q", required=True, type=_nonzero)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("-o", "--output")
    u.set_defaults(func=cmd_suq2)
    return p


def _eps(text: str) -> str:
    if text == "auto":
        return text
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("epsilon must be 'auto' or a positive number") from exc
    if not v > 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return text


def _spin(text: str) -> str:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("spin must be a non-negative half-integer") from exc
    if v < 0 or not float(2 * v).is_integer():
        raise argparse.ArgumentTypeError("spin must be a non-negative half-integer")
    return text


def _nonzero(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("q must be a real number") from exc
    if v == 0:
        raise argparse.ArgumentTypeError("q must be non-zero")
    return v


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except io.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE
    except GroupAxiomError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE
    except (AxiomError, NoAntipodeError) as exc:
        print(f"axiom failure: {exc}", file=sys.stderr)
        return AXIOMS
    except (InternalConsistencyError, NonSemisimpleError, NotAQuantumGroupError, HaarNotFaithfulError,
            UnsupportedNonTracialError) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return INCONSISTENT
    except (NonPositiveEpsilonError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
