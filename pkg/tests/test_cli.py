import json
import subprocess
import sys
from pathlib import Path

import pytest

from gaugegrav import spinor as sp
from gaugegrav.cli import ScenarioError, main, parse_scenario, run, run_scenario, selfcheck

SCENARIOS = Path(__file__).resolve().parents[1] / "demos" / "scenarios"

SMALL = """\
[chart]
dim = 2

[metric g]
diag = 1, -x0^2

[lagrangian L]
builtin = hilbert_einstein

[task]
op = christoffel
args = g
as = G

[task]
op = torsion
args = G
expect = zero

[task]
op = noether_identities
args = L
"""


class TestParsing:
    def test_objects_and_tasks(self):
        sc = parse_scenario(SMALL)
        assert sc.chart.dim == 2
        assert [t.op for t in sc.tasks] == ["christoffel", "torsion", "noether_identities"]
        assert sc.tasks[1].options["expect"] == "zero"

    def test_expression_error_location(self):
        with pytest.raises(ScenarioError) as info:
            parse_scenario("[chart]\ndim = 2\n\n[metric g]\n00 = 1 + * x0\n11 = -1\n")
        assert (info.value.line, info.value.column) == (5, 10)
        assert str(info.value).startswith("line 5, column 10:")

    def test_unknown_section(self):
        with pytest.raises(ScenarioError) as info:
            parse_scenario("[chart]\ndim = 2\n[bogus]\n")
        assert info.value.line == 3

    def test_unknown_object(self):
        with pytest.raises(ScenarioError, match="unknown object 'nope'"):
            parse_scenario("[chart]\ndim = 2\n[task]\nop = christoffel\nargs = nope\n")

    def test_duplicate_name(self):
        with pytest.raises(ScenarioError, match="already defined"):
            parse_scenario("[chart]\ndim = 2\n[metric g]\ndiag = 1, -1\n[task]\nop = christoffel\nargs = g\nas = g\n")

    def test_missing_key_value(self):
        with pytest.raises(ScenarioError) as info:
            parse_scenario("no header\n")
        assert info.value.line == 1


class TestRun:
    def test_minkowski(self):
        rep = run(str(SCENARIOS / "minkowski.scn"))
        assert rep.exit_code == 0
        assert "christoffel(eta) [ok]" in rep.text()

    def test_schwarzschild(self):
        rep = run(str(SCENARIOS / "schwarzschild.scn"))
        assert rep.exit_code == 0
        assert [r.status for r in rep.records] == ["ok"] * 5
        assert rep.records[0].value["kind"] == "connection"
        comps = rep.records[0].value["components"]
        # textbook symbols with the leading minus, e.g. Gamma^r_tt = (m/r^2)(1 - 2m/r)
        assert comps["0,1,0"] == "-m/r^2 + 2*m^2/r^3"
        assert comps["1,2,2"] == "-1/r"
        assert comps["3,2,3"] == "cos(th)*sin(th)"
        assert len(comps) == 13

    def test_broken_lagrangian(self):
        rep = run(str(SCENARIOS / "broken_lagrangian.scn"))
        assert rep.exit_code == 1
        assert rep.records[0].status == "failed"
        assert "nonzero" in rep.text()

    def test_unknown_op_and_type_mismatch(self):
        sc = parse_scenario("[chart]\ndim = 2\n[metric g]\ndiag = 1, -1\n"
                            "[task]\nop = frobnicate\nargs = g\n[task]\nop = torsion\nargs = g\n")
        rep = run_scenario(sc)
        assert [r.status for r in rep.records] == ["error", "error"]
        assert "unknown operation" in rep.records[0].error
        assert "object type mismatch" in rep.records[1].error
        assert rep.exit_code == 1

    def test_dependency_chain(self):
        rep = run_scenario(parse_scenario(SMALL))
        assert [r.status for r in rep.records] == ["ok", "ok", "ok"]

    def test_empty_scenario(self):
        rep = run_scenario(parse_scenario("[chart]\ndim = 2\n"))
        assert rep.exit_code == 0 and rep.records == []


class TestDeterminism:
    def test_text_and_json_byte_identical(self):
        sc = parse_scenario(SMALL)
        a, b = run_scenario(sc, seed=5), run_scenario(parse_scenario(SMALL), seed=5)
        assert a.text() == b.text()
        assert a.json() == b.json()

    def test_serial_matches_parallel(self):
        assert run_scenario(parse_scenario(SMALL), serial=True).json() == run_scenario(parse_scenario(SMALL)).json()

    def test_main_out_files_identical(self, tmp_path, capsys):
        path = tmp_path / "s.scn"
        path.write_text(SMALL)
        outs = []
        for i in range(2):
            out = tmp_path / f"r{i}.json"
            assert main(["run", str(path), "--json", "--out", str(out), "--seed", "11"]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        data = json.loads(outs[0])
        assert data["seed"] == 11 and data["ok"] and len(data["tasks"]) == 3


class TestSelfcheck:
    def test_passes(self):
        rep = selfcheck()
        assert rep.ok
        names = [c.name for c in rep.checks]
        assert "Clifford: anticommutators" in names

    def test_tampered_gamma_fails(self):
        g = sp.gamma_basis()
        tampered = sp.GammaRep([g[0], g[1], g[2], sp.mscale(g[2], -1)])
        rep = selfcheck(gamma=tampered)
        bad = {c.name for c in rep.checks if not c.ok}
        assert "Clifford: anticommutators" in bad


class TestMain:
    def test_selfcheck_exit_code(self, capsys):
        assert main(["selfcheck"]) == 0
        assert "passed" in capsys.readouterr().out

    def test_missing_file(self, capsys):
        assert main(["run", "/nonexistent/file.scn"]) == 1
        assert "cannot read" in capsys.readouterr().err

    def test_parse_error_reported(self, tmp_path, capsys):
        path = tmp_path / "bad.scn"
        path.write_text("[chart]\ndim = 2\n[metric g]\n00 = 1 + * x0\n")
        assert main(["run", str(path)]) == 1
        assert "line 4, column 10" in capsys.readouterr().err

    def test_failed_task_exit_code(self, capsys):
        assert main(["run", str(SCENARIOS / "broken_lagrangian.scn")]) == 1

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "gaugegrav", "run", str(SCENARIOS / "minkowski.scn")],
                              capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0
        assert "1/1 task(s) ok" in proc.stdout
