"""Tests for the forest-color command line."""

import json

import pytest

from forest_color.cli import EXIT_NOT_COLORABLE, EXIT_OK, EXIT_USAGE, main
from forest_color.cli.dimacs import write_dimacs
from forest_color.cli.generators import petersen, wheel
from tests.conftest import complete


@pytest.fixture
def k4_file(tmp_path):
    path = tmp_path / "k4.col"
    path.write_text(write_dimacs(complete(4)))
    return path


@pytest.fixture
def petersen_file(tmp_path):
    path = tmp_path / "petersen.col"
    path.write_text(write_dimacs(petersen()))
    return path


class TestSolve:
    def test_not_colorable(self, k4_file, capsys):
        """Test K4 exits 1 and says so."""
        assert main(["solve", str(k4_file)]) == EXIT_NOT_COLORABLE
        assert capsys.readouterr().out.strip() == "not colorable"

    def test_colorable_writes_coloring(self, petersen_file, tmp_path, capsys):
        """Test a colorable graph writes a coloring that verify accepts."""
        out = tmp_path / "petersen.coloring"
        assert main(["solve", str(petersen_file), "-o", str(out)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "colorable"
        assert main(["verify", str(petersen_file), str(out)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "ok"

    def test_default_prints_coloring(self, petersen_file, capsys):
        """Test a colorable graph prints one label-color line per vertex by default."""
        assert main(["solve", str(petersen_file)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "colorable"
        assert [int(line.split()[0]) for line in lines[1:]] == list(range(1, 11))
        assert {int(line.split()[1]) for line in lines[1:]} <= {0, 1, 2}

    def test_print_coloring_with_output(self, petersen_file, tmp_path, capsys):
        """Test --print-coloring also prints when the coloring goes to a file."""
        out = tmp_path / "petersen.coloring"
        args = ["solve", str(petersen_file), "-o", str(out), "--print-coloring"]
        assert main(args) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 1 + 10
        assert "".join(f"{line}\n" for line in lines[1:]) == out.read_text()

    def test_stats_file(self, k4_file, tmp_path):
        """Test the stats file records the status and the schema version."""
        stats = tmp_path / "stats.json"
        main(["solve", str(k4_file), "--stats", str(stats)])
        doc = json.loads(stats.read_text())
        assert doc["status"] == "not-colorable"
        assert doc["schema_version"] == 1
        assert "partition.bound" in doc

    def test_missing_file(self, tmp_path, capsys):
        """Test a missing input file exits 2 with an error on stderr."""
        assert main(["solve", str(tmp_path / "nope.col")]) == EXIT_USAGE
        assert "forest-color: error:" in capsys.readouterr().err

    def test_parse_error(self, tmp_path, capsys):
        """Test a malformed DIMACS file exits 2 and names the line."""
        bad = tmp_path / "loop.col"
        bad.write_text("p edge 2 1\ne 1 1\n")
        assert main(["solve", str(bad)]) == EXIT_USAGE
        assert "line 2" in capsys.readouterr().err

    def test_bad_jobs(self, k4_file):
        """Test zero workers is a usage error."""
        assert main(["solve", str(k4_file), "--jobs", "0"]) == EXIT_USAGE


class TestVerify:
    def test_monochromatic_edge(self, k4_file, tmp_path, capsys):
        """Test an improper coloring names the edge with 1-based labels."""
        coloring = tmp_path / "bad.coloring"
        coloring.write_text("1 0\n2 0\n3 1\n4 2\n")
        assert main(["verify", str(k4_file), str(coloring)]) == EXIT_NOT_COLORABLE
        assert capsys.readouterr().out.strip() == "invalid: edge 1-2 is monochromatic"

    def test_uncolored_vertex(self, k4_file, tmp_path, capsys):
        """Test a missing vertex is reported."""
        coloring = tmp_path / "short.coloring"
        coloring.write_text("1 0\n2 1\n3 2\n")
        assert main(["verify", str(k4_file), str(coloring)]) == EXIT_NOT_COLORABLE
        assert capsys.readouterr().out.strip() == "invalid: vertex 4 is uncolored"

    def test_unknown_label(self, k4_file, tmp_path, capsys):
        """Test a label outside the graph is reported."""
        coloring = tmp_path / "extra.coloring"
        coloring.write_text("9 0\n")
        assert main(["verify", str(k4_file), str(coloring)]) == EXIT_NOT_COLORABLE
        assert "label 9 is not a vertex" in capsys.readouterr().out


class TestGen:
    def test_to_stdout(self, capsys):
        """Test a fixture is written as DIMACS with a provenance comment."""
        assert main(["gen", "figure-fixture:name=odd-wheel"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("c generated by forest-color gen figure-fixture:name=odd-wheel\n")
        assert "p edge 6 10" in out

    def test_to_file_then_solve(self, tmp_path, capsys):
        """Test a generated file feeds straight into solve."""
        path = tmp_path / "gen" / "wheel.col"
        assert main(["gen", "figure-fixture:name=even-wheel", "-o", str(path)]) == EXIT_OK
        assert path.read_text().count("\ne ") == wheel(4).m
        assert main(["solve", str(path)]) == EXIT_OK

    def test_bad_spec(self, capsys):
        """Test an invalid spec exits 2."""
        assert main(["gen", "random-min-degree-3:size=1"]) == EXIT_USAGE


class TestAnalyze:
    def test_work_factor(self, capsys):
        """Test the work factor calculator."""
        assert main(["analyze", "--work-factor", "2,6,6"]) == EXIT_OK
        assert "1.3022" in capsys.readouterr().out

    def test_rate(self, capsys):
        """Test the rate calculator."""
        assert main(["analyze", "--rate", "3*1.36443^4", "--vertices", "8"]) == EXIT_OK
        assert "rate: 1.3400" in capsys.readouterr().out

    def test_rate_needs_vertices(self, capsys):
        """Test --rate alone is a usage error."""
        assert main(["analyze", "--rate", "3*1.36443^4"]) == EXIT_USAGE
        assert "--rate needs --vertices" in capsys.readouterr().err

    def test_bad_vector(self, capsys):
        """Test a non-numeric branching vector is a usage error."""
        assert main(["analyze", "--work-factor", "2,x"]) == EXIT_USAGE

    def test_lp_by_default(self, capsys):
        """Test the LP table is printed when no calculator is chosen."""
        assert main(["analyze"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "|U_prime|" in out
        assert "1.3217" in out

    def test_literal_lp(self, capsys):
        """Test the literal LP reports its larger base."""
        assert main(["analyze", "--lp", "--literal-lp"]) == EXIT_OK
        assert "1.32702" in capsys.readouterr().out

    def test_schedules(self, capsys):
        """Test the schedule rates cover zero to five grandchildren."""
        assert main(["analyze", "--schedules"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("schedule rate") == 6
        assert "per-root base" in out


class TestBench:
    def test_corpus(self, k4_file, petersen_file, capsys):
        """Test the bench table has a row per file and agrees with the oracle."""
        assert main(["bench", str(k4_file.parent)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("instance\tn\tm")
        assert [line.split("\t")[0] for line in lines[1:]] == ["k4.col", "petersen.col"]
        assert all(line.split("\t")[4] == "agree" for line in lines[1:])

    def test_empty_corpus(self, tmp_path):
        """Test an empty directory is a usage error."""
        assert main(["bench", str(tmp_path)]) == EXIT_USAGE


def test_no_command():
    """Test a missing subcommand exits 2."""
    assert main([]) == EXIT_USAGE
