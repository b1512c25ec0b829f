import io
import json

import pytest

from flatleaves.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, run
from flatleaves.corpus import minus_identity
from flatleaves.crystal import dumps_document


def call(argv, stdin_text=""):
    out = io.StringIO()
    code = run(argv, stdin=io.StringIO(stdin_text), stdout=out)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def klein3_doc():
    code, text = call(["klein", "--n", "3"])
    assert code == EXIT_OK
    return text


def test_klein_command(klein3_doc):
    doc = json.loads(klein3_doc)
    assert doc["predictions"]["leaf_count"] == 3
    assert doc["group"]["dim"] == 3


def test_verify_accepts_klein_output(klein3_doc):
    code, text = call(["verify"], klein3_doc)
    rep = json.loads(text)
    assert code == EXIT_OK
    assert rep["bieberbach"] and rep["torsion_free"] and rep["orientable"]


def test_verify_fails_on_torsion(tmp_path):
    path = tmp_path / "pm.json"
    path.write_text(dumps_document(minus_identity(2).to_document()))
    code, text = call(["verify", str(path)])
    rep = json.loads(text)
    assert code == EXIT_FAILED
    assert rep["passed"] and not rep["torsion_free"]
    assert rep["torsion_witness"]["matrix"] == [[-1, 0], [0, -1]]


@pytest.mark.parametrize(
    "argv,key",
    [
        (["reduce"], "subspace"),
        (["complement", "--subspace", "0"], "complement"),
        (["decompose"], "dims"),
        (["stabilizer", "--subspace", "0", "--coset", "0,0,0"], "stabilizer"),
        (["leaf", "--subspace", "0", "--coset", "0,0,0"], "covering_degree"),
        (["generic-coset", "--subspace", "1", "--seed", "4"], "leaf"),
        (["intersect"], "leaf_count"),
        (["orbifold", "--subspace", "1"], "quotient_dim"),
    ],
)
def test_commands_succeed(klein3_doc, argv, key):
    code, text = call(argv, klein3_doc)
    assert code == EXIT_OK, text
    assert key in json.loads(text)


def test_leaf_command_values(klein3_doc):
    _, text = call(["leaf", "--subspace", "1,0,0", "--coset", "0,0,0"], klein3_doc)
    rep = json.loads(text)
    assert rep["covering_degree"] == 3 and rep["leaf_lattice"] == [["1/3"]]
    assert not rep["generic"]


def test_intersect_values(klein3_doc):
    _, text = call(["intersect", "--seed", "2"], klein3_doc)
    rep = json.loads(text)
    assert rep["leaf_count"] == rep["oracle_count"] == 3
    assert rep["inclusion_map"]["passed"]


def test_intersect_invalid_pair(klein3_doc):
    code, text = call(["intersect", "--subspace", "1,0,0", "--second", "1,0,0"], klein3_doc)
    assert code == EXIT_FAILED
    assert not json.loads(text)["validation"]["passed"]


def test_output_is_byte_stable(klein3_doc):
    a = call(["intersect", "--seed", "7"], klein3_doc)
    b = call(["intersect", "--seed", "7"], klein3_doc)
    assert a == b


@pytest.mark.parametrize(
    "argv,stdin,code",
    [
        (["verify"], "not json", "schema_error"),
        (["verify"], '{"dim": 2}', "schema_error"),
        (["frobnicate"], "", "usage"),
        ([], "", "usage"),
        (["verify", "/nonexistent/file.json"], "", "usage"),
        (["stabilizer", "--coset", "1/0,0,0"], None, "malformed_rational"),
        (["stabilizer", "--coset", "0,0"], None, "usage"),
        (["leaf", "--subspace", "0,1,0"], None, "not_invariant"),
        (["reduce", "--bound", "-1"], None, "usage"),
        (["verify"], '{"dim": 1, "generators": [{"matrix": [["2"]]}]}', "non_unimodular"),
    ],
)
def test_errors(klein3_doc, argv, stdin, code):
    status, text = call(argv, klein3_doc if stdin is None else stdin)
    assert status == EXIT_USAGE
    assert json.loads(text)["error"]["code"] == code


def test_module_entry_point(klein3_doc):
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "flatleaves", "verify"], input=klein3_doc, capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["bieberbach"]
