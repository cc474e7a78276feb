import json
import math
from pathlib import Path

import pytest

from popp import structfile
from popp.builtins import BUILTINS, builtin
from popp.cli import main
from popp.errors import PolyParseError, ValidationError
from popp.report import PoppReport

DEMOS = Path(__file__).resolve().parent.parent / "demos" / "structures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_growth_martinet_strata(capsys):
    code, out, _ = run(capsys, "growth", str(DEMOS / "martinet.toml"),
                       "--grid", "-1:1:5,-1:1:5,-1:1:5", "--json")
    assert code == 0
    summary = json_lines(out)[-1]
    assert not summary["equiregular"]
    got = {tuple(s["growth_vector"]): s["count"] for s in summary["strata"]}
    assert got == {(2, 3): 100, (2, 2, 3): 25}


def test_growth_builtin(capsys):
    code, out, _ = run(capsys, "growth", "--builtin", "heisenberg", "-p", "0,0,0")
    assert code == 0 and "(2, 3)" in out and "equiregular: yes" in out


def test_negative_point_values(capsys):
    code, out, _ = run(capsys, "growth", "--builtin", "martinet", "-p", "-1,-0.5,0", "--json")
    assert code == 0 and json_lines(out)[0]["growth_vector"] == [2, 3]


def test_volume_examples(capsys):
    code, out, _ = run(capsys, "volume", "--builtin", "martinet", "-p", "0,1,0", "--json")
    rep = json_lines(out)[0]
    assert code == 0
    assert rep["popp_density_coordinates"] == pytest.approx(1 / (2 * math.sqrt(2)))
    code, out, _ = run(capsys, "volume", "--builtin", "heisenberg", "-p", "1,2,3")
    assert code == 0 and "0.707106781187" in out
    code, out, _ = run(capsys, "volume", "--builtin", "engel", "-p", "0,0,0,0", "--oracle", "--json")
    rep = json_lines(out)[0]
    assert rep["det_B"][1:] == pytest.approx([2, 2])
    assert rep["popp_density_coordinates"] == pytest.approx(0.5)
    assert rep["oracle_max_deviation"] < 1e-9


def test_json_has_every_report_field(capsys):
    code, out, _ = run(capsys, "volume", "--builtin", "carnot-k3", "-p", "0.1,0.2,0.3,0.4,0.5,0.6",
                       "-p", "1,1,1,1,1,1", "--json", "--oracle", "--jobs", "2")
    assert code == 0
    reps = json_lines(out)
    assert [r["point"][0] for r in reps] == [0.1, 1.0]
    for rep in reps:
        assert set(rep) == set(PoppReport.__dataclass_fields__)
        for key in ("popp_density_adapted", "popp_density_coordinates", "oracle_max_deviation"):
            assert math.isfinite(rep[key])
        assert all(math.isfinite(v) for v in rep["det_B"] + rep["sublaplacian_coefficients"])


def test_sublap_examples(capsys):
    code, out, _ = run(capsys, "sublap", "--builtin", "heisenberg", "-p", "0.3,0.1,0", "--json")
    assert code == 0 and json_lines(out)[0]["sublaplacian_coefficients"] == pytest.approx([0, 0], abs=1e-10)
    code, out, _ = run(capsys, "sublap", "--builtin", "martinet", "-p", "0,1,0", "--json")
    assert json_lines(out)[0]["sublaplacian_coefficients"] == pytest.approx([0, -1], abs=1e-8)


def test_singular_point_exit_code(capsys):
    code, out, _ = run(capsys, "sublap", "--builtin", "martinet", "-p", "0.5,0,0")
    assert code == 3 and "error" in out


def test_verify_examples(capsys):
    code, out, _ = run(capsys, "verify", str(DEMOS / "heisenberg.toml"))
    assert code == 0 and out.count("PASS") == 3
    code, out, _ = run(capsys, "verify", str(DEMOS / "heisenberg_dilation.toml"), "--json")
    assert code == 1
    rep = json_lines(out)[0]
    assert rep["preserves_distribution"] and not rep["preserves_metric"]
    assert rep["mean_gram_scale"] == pytest.approx(4)
    assert rep["mean_volume_ratio"] == pytest.approx(16)
    code, out, _ = run(capsys, "verify", str(DEMOS / "martinet.toml"))
    assert code == 0 and "PASS" in out


def test_verify_without_maps(tmp_path, capsys):
    p = tmp_path / "plain.toml"
    p.write_text('dimension = 3\nfields = [["1", "0", "-1/2*y"], ["0", "1", "1/2*x"]]\n')
    code, out, _ = run(capsys, "verify", str(p))
    assert code == 0 and "PASS" in out and "warning" in out


def test_malformed_polynomial(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text('dimension = 3\nfields = [\n  ["1", "0", "y^"],\n  ["0", "1", "0"],\n]\n')
    with pytest.raises(PolyParseError) as info:
        structfile.load(p)
    assert "field 1, component 3" in str(info.value) and "line 3" in str(info.value)
    code, _, err = run(capsys, "growth", str(p), "-p", "0,0,0")
    assert code == 2 and "field 1" in err


@pytest.mark.parametrize("argv", [
    ["growth", "--builtin", "heisenberg"],
    ["growth", "--builtin", "heisenberg", "-p", "1,2"],
    ["growth", "--builtin", "heisenberg", "-p", "a,b,c"],
    ["growth", "--builtin", "heisenberg", "--grid", "0:1:2"],
    ["growth"],
    ["growth", "/nonexistent/file.toml", "-p", "0,0,0"],
])
def test_validation_exit_code(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_schema_errors():
    with pytest.raises(ValidationError):
        structfile.loads('fields = [["1", "0", "0"]]')
    with pytest.raises(ValidationError):
        structfile.loads('dimension = 3\nfields = [["1", "0"], ["0", "1", "0"]]')
    with pytest.raises(ValidationError):
        structfile.loads('dimension = 3\nfields = [["1","0","0"],["0","1","x"]]\ncompletion = []')


def test_grid_parsing():
    g = structfile.parse_grid("-1:1:3,0:0:1", 2)
    assert g.tolist() == [[-1, 0], [0, 0], [1, 0]]


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_round_trip_builtins(name):
    sf = structfile.StructureFile(builtin(name))
    again = structfile.loads(structfile.dumps(sf))
    assert again.structure.fields == sf.structure.fields


@pytest.mark.parametrize("path", sorted(DEMOS.glob("*.toml")))
def test_round_trip_files(path):
    sf = structfile.load(path)
    again = structfile.loads(structfile.dumps(sf))
    assert again.structure.fields == sf.structure.fields
    assert again.completion == sf.completion
    assert again.points == sf.points and again.grid == sf.grid
    assert [(m.name, m.forward, m.inverse) for m in again.maps] == \
        [(m.name, m.forward, m.inverse) for m in sf.maps]


def test_internal_error_exit_code(monkeypatch, capsys):
    from popp import cli
    from popp.errors import InternalInconsistency

    def boom(*args, **kwargs):
        raise InternalInconsistency("B_2 is not positive definite")

    monkeypatch.setattr(cli, "analyze_point", boom)
    assert run(capsys, "volume", "--builtin", "heisenberg", "-p", "0,0,0")[0] == 4
