"""Quantum-group JSON files and Cayley-table text files."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import linalg as la
from .constructors import CayleyTable, GroupAxiomError
from .hopf import HopfStarAlgebra
from .staralg import StarAlgebra

EXACT, FLOAT = "gaussian-rational", "complex-float"
FORMAT_VERSION = 1


class ParseError(ValueError):
    """Malformed input; ``where`` names the line or JSON field."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def load_schema(name: str) -> dict:
    return json.loads(resources.files("qds").joinpath("schema", name).read_text())


# -- scalars ----------------------------------------------------------------------

def encode_scalar(v, mode: str) -> list:
    if mode == EXACT:
        return [la.format_rational(v.x), la.format_rational(v.y)]
    z = complex(v)
    return [float(z.real), float(z.imag)]


def decode_scalar(pair, mode: str, where: str):
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ParseError("expected [re, im]", where)
    re, im = pair
    if mode == EXACT:
        if not all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in (re, im)):
            raise ParseError("exact scalars must be integers or \"p/q\" strings", where)
        try:
            return la.gauss(la.parse_rational(re), la.parse_rational(im))
        except ValueError as exc:
            raise ParseError(str(exc), where) from exc
    try:
        return complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise ParseError("float scalars must be numbers", where) from exc


def _zero(mode):
    return la.ZERO if mode == EXACT else 0j


# -- quantum groups ---------------------------------------------------------------

def to_document(h: HopfStarAlgebra, include_antipode: bool = True) -> dict:
    mode = EXACT if h.exact else FLOAT
    enc = lambda v: encode_scalar(v, mode)  # noqa: E731
    nz = (lambda v: bool(v)) if mode == EXACT else (lambda v: v != 0)
    doc = {
        "format": FORMAT_VERSION,
        "name": h.name,
        "dim": h.dim,
        "basis": list(h.labels),
        "scalars": mode,
        "mult": [[i, j, k, *enc(v)] for (i, j, k), v in sorted(h.alg.mult.items()) if nz(v)],
        "comult": [[i, j, k, *enc(v)] for (i, j, k), v in sorted(h.comult.items()) if nz(v)],
        "unit": [enc(v) for v in h.alg.unit],
        "counit": [enc(v) for v in h.counit],
        "star": [[i, j, *enc(v)] for (i, j), v in np.ndenumerate(h.alg.star_matrix) if nz(v)],
    }
    if include_antipode and h.antipode is not None:
        doc["antipode"] = [[enc(v) for v in row] for row in h.antipode]
    return doc


def dumps(doc: dict) -> str:
    """Canonical text: one key per line, one sparse entry per line."""
    lines = ["{"]
    keys = list(doc)
    for n, key in enumerate(keys):
        val = doc[key]
        tail = "," if n < len(keys) - 1 else ""
        if isinstance(val, list) and val and isinstance(val[0], list):
            body = ",\n".join("    " + json.dumps(x, separators=(", ", ": ")) for x in val)
            lines.append(f"  {json.dumps(key)}: [\n{body}\n  ]{tail}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val, separators=(', ', ': '))}{tail}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save(h: HopfStarAlgebra, path, include_antipode: bool = True) -> None:
    Path(path).write_text(dumps(to_document(h, include_antipode)))


def loads(text: str) -> HopfStarAlgebra:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from exc
    return from_document(doc)


def load(path) -> HopfStarAlgebra:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc), str(path)) from exc
    return loads(text)


def from_document(doc) -> HopfStarAlgebra:
    try:
        jsonschema.validate(doc, load_schema("qgroup.schema.json"))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ParseError(exc.message, where) from exc
    mode, d = doc["scalars"], doc["dim"]
    if len(doc["basis"]) != d:
        raise ParseError(f"expected {d} labels", "basis")

    def index(i, field):
        if not 0 <= i < d:
            raise ParseError(f"index {i} out of range 0..{d - 1}", field)
        return i

    def tensor(field):
        out = {}
        for n, entry in enumerate(doc[field]):
            where = f"{field}/{n}"
            key = tuple(index(i, where) for i in entry[:3])
            if key in out:
                raise ParseError(f"duplicate entry {list(key)}", where)
            out[key] = decode_scalar(entry[3:], mode, where)
        return out

    def vector(field):
        vals = doc[field]
        if len(vals) != d:
            raise ParseError(f"expected {d} entries", field)
        return _array([decode_scalar(v, mode, f"{field}/{n}") for n, v in enumerate(vals)], mode)

    star = _filled((d, d), mode)
    for n, entry in enumerate(doc["star"]):
        where = f"star/{n}"
        star[index(entry[0], where), index(entry[1], where)] = decode_scalar(entry[2:], mode, where)
    antipode = None
    if "antipode" in doc:
        rows = doc["antipode"]
        if len(rows) != d or any(len(r) != d for r in rows):
            raise ParseError(f"expected a {d}x{d} matrix", "antipode")
        antipode = _filled((d, d), mode)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                antipode[i, j] = decode_scalar(v, mode, f"antipode/{i}/{j}")
    alg = StarAlgebra(tensor("mult"), vector("unit"), star, tuple(doc["basis"]))
    return HopfStarAlgebra(alg, tensor("comult"), vector("counit"), antipode, doc.get("name", ""))


def _array(values, mode):
    if mode == EXACT:
        return la.exact_vector(values)
    return np.array(values, dtype=complex)


def _filled(shape, mode):
    if mode == EXACT:
        return la.exact_zeros(shape)
    return np.zeros(shape, dtype=complex)


# -- Cayley tables -------------------------------------------------------------------

def parse_cayley(text: str) -> CayleyTable:
    """``n``; optional line of names; ``n`` rows of 1-based indices. ``#`` starts a comment."""
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((no, body.split()))
    if not lines:
        raise ParseError("empty file", "line 1")
    no, first = lines[0]
    if len(first) != 1 or not first[0].isdigit() or int(first[0]) < 1:
        raise ParseError("first line must be the group order", f"line {no}")
    n = int(first[0])
    rest = lines[1:]
    names = None
    if len(rest) == n + 1:
        names = tuple(rest[0][1])
        if len(names) != n or len(set(names)) != n:
            raise ParseError(f"expected {n} distinct names", f"line {rest[0][0]}")
        rest = rest[1:]
    if len(rest) != n:
        raise ParseError(f"expected {n} table rows, found {len(rest)}", f"line {no}")
    rows = []
    for no, toks in rest:
        if len(toks) != n:
            raise ParseError(f"expected {n} entries, found {len(toks)}", f"line {no}")
        try:
            vals = [int(t) for t in toks]
        except ValueError as exc:
            raise ParseError("entries must be integers", f"line {no}") from exc
        if not all(1 <= v <= n for v in vals):
            raise ParseError(f"entries must lie in 1..{n}", f"line {no}")
        rows.append(tuple(v - 1 for v in vals))
    try:
        return CayleyTable(tuple(rows), names)
    except GroupAxiomError as exc:
        raise ParseError(str(exc), "table") from exc


def load_cayley(path) -> CayleyTable:
    try:
        return parse_cayley(Path(path).read_text())
    except OSError as exc:
        raise ParseError(str(exc), str(path)) from exc


def format_cayley(t: CayleyTable) -> str:
    out = [str(t.order)]
    if t.names:
        out.append(" ".join(t.names))
    out.extend(" ".join(str(v + 1) for v in row) for row in t.table)
    return "\n".join(out) + "\n"
