"""Tests for main.py and commands/ — output formats, exit codes, README examples."""

import json
import re
import shlex
from pathlib import Path

import pytest

import main
from commands.common import factor_expression, factor_name, table
from services import catalog, poset_io
from services.products import ProductKind, pri
from tests.conftest import make_two_triangles

README = Path(__file__).parent.parent / "README.md"


def run(capsys, *argv):
    code = main.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _readme_examples():
    text = README.read_text(encoding="utf-8")
    for block in re.findall(r"```\n(\$ python main\.py .*?)\n```", text, flags=re.S):
        command, _, expected = block.partition("\n")
        argv = shlex.split(command)[3:]
        yield pytest.param(argv, expected + "\n", id=" ".join(argv))


class TestReadme:
    @pytest.mark.parametrize("argv,expected", list(_readme_examples()))
    def test_example_output(self, capsys, argv, expected):
        code, out, _ = run(capsys, *argv)
        assert code == 0
        assert out == expected

    def test_readme_has_examples(self):
        assert len(list(_readme_examples())) >= 5


class TestInfo:
    def test_json(self, capsys):
        code, out, _ = run(capsys, "info", "gon(6)", "--json")
        data = json.loads(out)
        assert code == 0
        assert data["rank"] == 2
        assert data["f_vector"] == [6, 6]
        assert data["flags"] == 12
        assert data["valid"] is True

    def test_invalid_file_exits_2(self, capsys, tmp_data_dir):
        path = poset_io.save("two_triangles.json", make_two_triangles())
        code, out, _ = run(capsys, "info", "--file", str(path))
        assert code == 2
        assert "valid: no" in out
        assert "violation: SectionDisconnected(0, 13)" in out

    def test_valid_file(self, capsys, tmp_data_dir):
        path = poset_io.save("cube.json", catalog.cube(3).poset)
        code, out, _ = run(capsys, "info", "--file", str(path))
        assert code == 0
        assert f"source: file {path}" in out
        assert "f-vector: 8 12 6" in out

    def test_expression_and_file_together(self, capsys, tmp_data_dir):
        path = poset_io.save("cube.json", catalog.cube(3).poset)
        code, _, err = run(capsys, "info", "cube(3)", "--file", str(path))
        assert code == 1
        assert "not both" in err

    def test_no_source(self, capsys):
        code, _, err = run(capsys, "info")
        assert code == 1
        assert "required" in err


class TestExport:
    def test_json_to_stdout(self, capsys):
        code, out, _ = run(capsys, "export", "edge")
        assert code == 0
        assert json.loads(out) == poset_io.to_json(catalog.edge().poset)

    def test_dot_to_file(self, capsys, tmp_data_dir):
        code, out, _ = run(capsys, "export", "gon(3)", "--format", "dot", "--out", "tri.dot")
        assert code == 0
        assert out.strip() == f"wrote {tmp_data_dir / 'tri.dot'}"
        assert (tmp_data_dir / "tri.dot").read_text(encoding="utf-8").startswith('digraph "gon(3)" {')

    def test_round_trip_through_file(self, capsys, tmp_data_dir):
        run(capsys, "export", "prism(gon(5))", "--out", "prism.json")
        code, out, _ = run(capsys, "factor", "--op", "cart", "--file", str(tmp_data_dir / "prism.json"))
        assert code == 0
        assert out.splitlines() == ["edge ^ 1", "gon(5) ^ 1"]


class TestFactor:
    def test_json(self, capsys):
        code, out, _ = run(capsys, "factor", "--op", "dsum", "cross(3)", "--json")
        data = json.loads(out)
        assert code == 0
        assert data["kind"] == "DirectSum"
        assert data["expression"] == "edge ^ 3"
        assert data["prime"] is False
        assert data["factors"] == [{"name": "edge", "multiplicity": 3, "rank": 1, "faces": 4}]

    def test_json_carries_coordinates(self, capsys):
        code, out, _ = run(capsys, "factor", "--op", "cart", "prism(gon(5))", "--json")
        data = json.loads(out)
        p = pri(catalog.gon(5))
        assert code == 0
        assert len(data["coordinates"]) == p.face_count
        assert all(len(c) == 2 for c in data["coordinates"])
        assert len({tuple(c) for c in data["coordinates"]}) == p.face_count

    def test_one_line_per_factor(self, capsys):
        code, out, _ = run(capsys, "factor", "--op", "join", "pyr(gon(5))")
        assert code == 0
        assert out.splitlines() == ["point ^ 1", "gon(5) ^ 1"]

    def test_prime(self, capsys):
        code, out, _ = run(capsys, "factor", "--op", "cart", "gon(7)")
        assert code == 0
        assert out.strip() == "gon(7) ^ 1"

    def test_power_follows_op(self, capsys):
        code, out, _ = run(capsys, "factor", "--op", "join", "point^4")
        assert code == 0
        assert out.strip() == "point ^ 4"

    def test_op_is_required(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main.main(["factor", "cube(3)"])
        assert exc.value.code == 1

    def test_unknown_op(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main.main(["factor", "--op", "tensor", "cube(3)"])
        assert exc.value.code == 1


class TestOrbits:
    def test_aut_json(self, capsys):
        code, out, _ = run(capsys, "aut", "pyr(gon(4))", "--json")
        data = json.loads(out)
        assert code == 0
        assert data["order"] == 8
        assert data["orbits"] == 4
        assert data["regular"] is False

    def test_orbits_topological(self, capsys):
        code, out, _ = run(capsys, "orbits", "--op", "topo", "gon(3) topo gon(4)", "--json")
        data = json.loads(out)
        assert code == 0
        assert data["orbits"] == data["predicted"] == 2
        assert data["agrees"] is True


class TestMono:
    def test_plain_mono_uses_the_root_product(self, capsys):
        code, out, _ = run(capsys, "mono", "pyr(gon(4))", "--json")
        data = json.loads(out)
        assert code == 0
        assert data["op"] == "join"
        assert data["n"] == 4
        assert data["monodromy_order"] == 6144
        assert data["subgroups"]["K"] == 256

    def test_plain_mono_of_a_prime_atom(self, capsys):
        code, out, _ = run(capsys, "mono", "gon(6)", "--json")
        assert code == 0
        assert json.loads(out) == {"rank": 2, "flags": 12, "monodromy_order": 12}

    def test_projection_json(self, capsys):
        code, out, _ = run(capsys, "mono", "--op", "join", "pyr(gon(4))", "--json")
        data = json.loads(out)
        assert code == 0
        assert data["monodromy_order"] == 6144
        assert data["subgroups"]["K"] == 256

    def test_structure_topological(self, capsys):
        code, out, _ = run(capsys, "mono", "--structure", "gon(4) topo gon(4)")
        assert code == 0
        assert "|M|: 128" in out
        assert "FAILED" not in out

    def test_structure_needs_known_shape(self, capsys):
        code, _, err = run(capsys, "mono", "--structure", "cube(3)")
        assert code == 1
        assert "--structure needs" in err

    def test_op_and_structure_exclusive(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main.main(["mono", "--op", "cart", "--structure", "prism(gon(5))"])
        assert exc.value.code == 1


class TestErrors:
    def test_syntax_error(self, capsys):
        code, _, err = run(capsys, "info", "gon(5")
        assert code == 1
        assert err.startswith("error: expected ')'")
        assert "position 5" in err

    def test_range_error(self, capsys):
        code, _, err = run(capsys, "info", "gon(1)")
        assert code == 1
        assert "must be >= 2" in err

    def test_rank_error(self, capsys):
        code, _, err = run(capsys, "info", "edge topo gon(4)")
        assert code == 1
        assert "rank >= 2" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "info", "--file", str(tmp_path / "nope.json"))
        assert code == 1
        assert "could not read" in err

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main.main(["frobnicate"])
        assert exc.value.code == 1


class TestNames:
    @pytest.mark.parametrize("make,name", [
        (catalog.point, "point"),
        (catalog.edge, "edge"),
        (lambda: catalog.gon(5), "gon(5)"),
        (lambda: catalog.gon(4), "gon(4)"),
        (lambda: catalog.simplex(3), "simplex(3)"),
        (lambda: catalog.cube(3), "cube(3)"),
        (lambda: catalog.cross(3), "cross(3)"),
        (lambda: catalog.torus(3, 2), "torus(3,2)"),
    ])
    def test_catalog_names(self, make, name):
        assert factor_name(make()) == name

    def test_unnamed_factor(self):
        assert factor_name(pri(catalog.gon(5))).startswith("rank3:")

    def test_expression(self):
        factors = [(catalog.edge(), 1), (catalog.gon(5), 2)]
        assert factor_expression(factors, ProductKind.CARTESIAN) == "edge cart gon(5) ^ 2"
        assert factor_expression([], ProductKind.JOIN) == "(no factors)"

    def test_table(self):
        assert table([["a", "bb"], ["ccc", "d"]], indent="") == ["a    bb", "ccc  d"]
