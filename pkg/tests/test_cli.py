import json
from pathlib import Path

import jsonschema
import pytest

from qds import io
from qds.cli import AXIOMS, INCONSISTENT, OK, PARSE, USAGE, main
from qds.constructors import STANDARD_GROUPS
from qds.hopf import verify_axioms

DATA = Path(__file__).resolve().parents[1] / "data" / "cayley"


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("qg")
    out = {}
    for name in ("Z3", "D4", "H"):
        out[name] = d / f"{name}.json"
        assert main(["build", "group", "--cayley", str(DATA / f"{name}.txt"), "-o", str(out[name])]) == OK
    out["crossed"] = d / "crossed.json"
    assert main(["build", "crossed", "--gamma", "4", "-o", str(out["crossed"])]) == OK
    return out


def run(capsys, argv):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_build_group_dimensions(tmp_path, capsys):
    code, out, _ = run(capsys, ["build", "group", "--cayley", str(DATA / "Z2.txt")])
    assert code == OK
    h = io.loads(out)
    assert h.dim == 2 and h.name == "C(Z2)" and verify_axioms(h).passed
    code, out, _ = run(capsys, ["build", "group", "--group", "S3", "--variant", "group-algebra"])
    assert code == OK and io.loads(out).dim == 6


@pytest.mark.parametrize("gamma, dim", [("1", 8), ("4", 32)])
def test_build_crossed(capsys, gamma, dim):
    code, out, _ = run(capsys, ["build", "crossed", "--gamma", gamma])
    assert code == OK and json.loads(out)["dim"] == dim


def test_build_product(files, capsys):
    code, out, _ = run(capsys, ["build", "product", str(files["Z3"]), str(files["H"])])
    assert code == OK
    h = io.loads(out)
    assert h.dim == 24 and verify_axioms(h).passed


@pytest.mark.parametrize("name", ["Z3", "D4", "crossed"])
def test_round_trip_is_byte_identical(files, name):
    text = files[name].read_text()
    assert io.dumps(io.to_document(io.loads(text))) == text


def test_cayley_files_round_trip():
    for name, make in STANDARD_GROUPS.items():
        text = (DATA / f"{name}.txt").read_text()
        assert io.parse_cayley(text).table == make().table
        assert io.format_cayley(io.parse_cayley(text)) == text


def test_cayley_parser_accepts_comments_and_no_names():
    t = io.parse_cayley("# Z2\n2\n1 2\n2 1  # last row\n")
    assert t.order == 2 and t.names == ("g0", "g1")


@pytest.mark.parametrize("text, where", [
    ("", "line 1"),
    ("x\n", "line 1"),
    ("2\n1 2\n", "line"),
    ("2\n1 2\n2\n", "line 3"),
    ("2\n1 2\n2 x\n", "line 3"),
    ("2\n1 3\n2 1\n", "line 2"),
    ("2\n2 1\n1 2\n", "table"),
])
def test_cayley_parse_errors(text, where):
    with pytest.raises(io.ParseError) as info:
        io.parse_cayley(text)
    assert where in str(info.value)


def test_build_bad_cayley_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n1 2 3\n2 3 1\n3 1 1\n")
    code, _, err = run(capsys, ["build", "group", "--cayley", str(bad)])
    assert code == PARSE and "permutation" in err


def test_analyze_json_report(files, capsys):
    code, out, _ = run(capsys, ["analyze", str(files["H"]), "--json"])
    assert code == OK
    rep = json.loads(out)
    jsonschema.validate(rep, io.load_schema("report.schema.json"))
    assert rep["ds"]["member"] and rep["ds"]["kind"] == "certificate"
    assert rep["irr_mod_gamma"]["order"] == 2 and rep["irr_mod_gamma"]["exponent"] == 2
    assert rep["nz_check"]["status"] == "pass"
    assert rep["flags"]["kac"]["value"] and "timings" in rep


def test_analyze_non_member_has_witness(files, capsys):
    code, out, _ = run(capsys, ["analyze", str(files["D4"])])
    assert code == OK
    rep = json.loads(out)
    jsonschema.validate(rep, io.load_schema("report.schema.json"))
    assert not rep["ds"]["member"] and rep["ds"]["kind"] == "witness"
    w = rep["ds"]["witness"]
    assert w["residuals"]["phi_square_minus_haar"] <= 1e-9 and w["residuals"]["gram_min"] >= -1e-9
    assert rep["hamiltonian"]["noncentral_idempotent"]["commutator"] >= 0.1


def test_analyze_crossed_flags(files, capsys):
    code, out, _ = run(capsys, ["analyze", str(files["crossed"]), "--no-timings"])
    assert code == OK
    rep = json.loads(out)
    assert rep["ds"]["member"]
    assert not rep["flags"]["commutative"]["value"] and not rep["flags"]["cocommutative"]["value"]
    assert rep["irreps"]["sizes"] == [1] * 16 + [2] * 4


def test_analyze_text(files, capsys):
    code, out, _ = run(capsys, ["analyze", str(files["D4"]), "--text"])
    assert code == OK
    assert "DS member: no" in out and "square root" in out


def test_analyze_is_deterministic(files, capsys, monkeypatch):
    a = run(capsys, ["analyze", str(files["D4"]), "--no-timings"])[1]
    b = run(capsys, ["analyze", str(files["D4"]), "--no-timings"])[1]
    assert a == b
    monkeypatch.setenv("QDS_SEED", "7")
    c = json.loads(run(capsys, ["analyze", str(files["D4"]), "--no-timings", "--mode", "float"])[1])
    assert c["seed"] == 7


def test_bad_seed_env(files, capsys, monkeypatch):
    monkeypatch.setenv("QDS_SEED", "abc")
    assert run(capsys, ["analyze", str(files["Z3"])])[0] == PARSE


def test_analyze_axiom_failure(files, tmp_path, capsys):
    doc = json.loads(files["Z3"].read_text())
    doc["mult"][0][3] = "2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, ["analyze", str(bad)])
    assert code == AXIOMS and "axiom" in err


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.pop("unit"), "unit"),
    (lambda d: d["mult"].append([0, 0, 9, "1", "0"]), "out of range"),
    (lambda d: d["mult"].append(list(d["mult"][0])), "duplicate"),
    (lambda d: d.update(scalars="quaternion"), "scalars"),
])
def test_malformed_files(files, tmp_path, capsys, mutate, where):
    doc = json.loads(files["Z3"].read_text())
    mutate(doc)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, ["analyze", str(bad)])
    assert code == PARSE and where in err


def test_invalid_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2,\n  "name": }')
    code, _, err = run(capsys, ["analyze", str(bad)])
    assert code == PARSE and "line 2" in err


def test_missing_file(capsys):
    assert run(capsys, ["analyze", "/nonexistent/file.json"])[0] == PARSE


def test_sqrt(files, capsys):
    code, out, _ = run(capsys, ["sqrt", str(files["Z3"])])
    assert code == OK and json.loads(out)["kind"] == "certificate"
    code, out, _ = run(capsys, ["sqrt", str(files["D4"])])
    w = json.loads(out)
    assert code == OK and w["kind"] == "witness"
    assert w["witness"]["residuals"]["phi_square_minus_haar"] == 0
    assert w["witness"]["epsilon_exact"] == "1/4"
    code, out, _ = run(capsys, ["sqrt", str(files["crossed"])])
    assert code == OK and json.loads(out)["kind"] == "certificate"


def test_sqrt_user_epsilon(files, capsys):
    code, out, _ = run(capsys, ["sqrt", str(files["D4"]), "--eps", "0.125"])
    assert code == OK and json.loads(out)["witness"]["epsilon"] == 0.125
    code, _, err = run(capsys, ["sqrt", str(files["D4"]), "--eps", "0.5"])
    assert code == USAGE and "lambda_min" in err
    with pytest.raises(SystemExit) as info:
        main(["sqrt", str(files["D4"]), "--eps", "-1"])
    assert info.value.code == PARSE


@pytest.mark.parametrize("spin, q, kind, nil", [
    ("0.5", "0.5", "QuaternionType", False),
    ("0.5", "-0.5", "RealType", True),
    ("1", "1", "RealType", True),
])
def test_suq2(capsys, spin, q, kind, nil):
    code, out, _ = run(capsys, ["suq2", "--spin", spin, "--q", q])
    rep = json.loads(out)
    assert code == OK and rep["classification"]["kind"] == kind
    assert (rep["nilpotent"] is not None) == nil
    if nil:
        assert rep["residuals"]["nilpotent_square"] <= 1e-9


def test_suq2_m3_description(capsys):
    rep = json.loads(run(capsys, ["suq2", "--spin", "1", "--q", "1"])[1])
    assert rep["classification"]["describe"] == "M3(R)"


@pytest.mark.parametrize("argv", [
    ["suq2", "--spin", "0.5", "--q", "0"],
    ["suq2", "--spin", "0.3", "--q", "1"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == PARSE


def test_build_needs_one_source(capsys):
    assert run(capsys, ["build", "group"])[0] == PARSE
    assert run(capsys, ["build", "group", "--group", "Z2", "--cayley", str(DATA / "Z2.txt")])[0] == PARSE


def test_exit_code_values():
    assert (OK, USAGE, AXIOMS, PARSE, INCONSISTENT) == (0, 1, 2, 3, 4)


def test_output_file(files, tmp_path):
    out = tmp_path / "rep.json"
    assert main(["analyze", str(files["Z3"]), "-o", str(out)]) == OK
    assert json.loads(out.read_text())["ds"]["member"]
