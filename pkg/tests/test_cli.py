from __future__ import annotations

import json
import shutil

import pytest

from hobocirc.bench import bench_instance, run_bench, to_csv, to_markdown
from hobocirc.circuit import CNOT, Circuit
from hobocirc.cli import EXIT_INPUT, EXIT_OK, EXIT_SOLVER, EXIT_VERIFY, main
from hobocirc.instances import catalogue, data_dir, load, monomial, write_instances
from hobocirc.milp import SolverSpec, find_cbc


@pytest.fixture
def inst():
    return data_dir()


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_shipped_instances_match_generators(inst, tmp_path):
    write_instances(tmp_path)
    for name in catalogue():
        assert (inst / f"{name}.hobo").read_text() == (tmp_path / f"{name}.hobo").read_text()
    assert load("monomial3") == monomial(3)


@pytest.mark.parametrize("method, depth", [("template", 8), ("gray", 15)])
def test_compile_monomial3(capsys, inst, tmp_path, method, depth):
    code, _, err = run(capsys, "compile", inst / "monomial3.hobo", "--method", method, "--out-dir", tmp_path)
    assert code == EXIT_OK
    assert f"depth={depth}" in err and "verified=yes" in err
    report = json.loads((tmp_path / f"monomial3.{method}.report.json").read_text())
    assert report["depth"] == depth and report["verified"]
    assert (tmp_path / f"monomial3.{method}.qasm").read_text().startswith("OPENQASM 2.0;")
    Circuit.from_json((tmp_path / f"monomial3.{method}.json").read_text())


def test_compile_qasm_to_stdout(capsys, inst):
    code, out, _ = run(capsys, "compile", inst / "poly3-1.hobo", "--format", "qasm")
    assert code == EXIT_OK and out.count("cx ") > 0


def test_compile_empty(capsys, inst):
    code, _, err = run(capsys, "compile", inst / "empty.hobo")
    assert code == EXIT_INPUT and "no non-constant terms" in err


def test_compile_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.hobo"
    bad.write_text("x1 + x0")
    code, _, err = run(capsys, "compile", bad)
    assert code == EXIT_INPUT and "byte 5" in err


def test_compile_missing_file(capsys, tmp_path):
    assert run(capsys, "compile", tmp_path / "nope.hobo")[0] == EXIT_INPUT


def test_compile_bad_flags(capsys, inst):
    assert run(capsys, "compile", inst / "monomial3.hobo", "--format", "pdf")[0] == EXIT_INPUT
    assert run(capsys, "compile", inst / "monomial3.hobo", "--format", "lp")[0] == EXIT_INPUT
    assert run(capsys, "compile", inst / "monomial3.hobo", "--method", "milp", "--qubits", "2")[0] == EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        main(["compile", str(inst / "monomial3.hobo"), "--method", "magic"])
    assert exc.value.code == 2


def test_compile_milp_with_lp(capsys, inst, tmp_path):
    code, _, err = run(
        capsys, "compile", inst / "monomial3.hobo", "--method", "milp-down", "--solver", "highs",
        "--format", "json,lp", "--out-dir", tmp_path, "--time-limit", "60",
    )
    assert code == EXIT_OK and "depth=8" in err
    assert (tmp_path / "monomial3.milp-down.lp").read_text().startswith("\\ CDP model")


def test_compile_milp_infeasible(capsys, inst):
    code, _, err = run(capsys, "compile", inst / "monomial3.hobo", "--method", "milp-down", "--layers", "3", "--solver", "highs")
    assert code == EXIT_SOLVER and "infeasible" in err


def test_compile_solver_missing(capsys, inst):
    code, _, err = run(capsys, "compile", inst / "monomial3.hobo", "--method", "milp", "--solver-cmd", "/no/such/solver {lp} {timelimit} {solout}")
    assert code == EXIT_SOLVER and "SolverNotFound" in err


@pytest.mark.skipif(find_cbc() is None, reason="CBC not available")
def test_time_limit_one_second_never_crashes(capsys, inst):
    code, _, err = run(capsys, "compile", inst / "monomial4.hobo", "--method", "milp", "--time-limit", "1", "--solver", "cbc")
    assert code in (EXIT_OK, EXIT_SOLVER)
    if code == EXIT_OK:
        assert "status=feasible" in err or "status=optimal" in err


def test_verify_roundtrip_and_mutation(capsys, inst, tmp_path):
    run(capsys, "compile", inst / "poly3-1.hobo", "--out-dir", tmp_path, "--format", "json")
    cj = tmp_path / "poly3-1.template.json"
    code, out, _ = run(capsys, "verify", cj, inst / "poly3-1.hobo")
    assert code == EXIT_OK and json.loads(out)["passed"]

    data = json.loads(cj.read_text())
    for layer in data["layers"]:
        cx = [g for g in layer if g["op"] == "cx"]
        if cx:
            layer.remove(cx[0])
            break
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", bad, inst / "poly3-1.hobo")
    assert code == EXIT_VERIFY and not json.loads(out)["passed"]


def test_verify_empty_against_zero(capsys, inst, tmp_path):
    cj = tmp_path / "empty.json"
    cj.write_text(Circuit(2, 2, []).to_json())
    code, out, _ = run(capsys, "verify", cj, inst / "empty.hobo")
    assert code == EXIT_OK


def test_verify_bad_circuit_file(capsys, inst, tmp_path):
    cj = tmp_path / "c.json"
    cj.write_text(json.dumps({"q": 2, "n": 2, "layers": [[{"op": "cx", "ctrl": 1, "tgt": 1}]]}))
    assert run(capsys, "verify", cj, inst / "monomial3.hobo")[0] == EXIT_INPUT


def test_bench_table(capsys, inst):
    code, out, _ = run(capsys, "bench", inst, "--no-timing")
    assert code == EXIT_OK
    rows = {line.split(" | ")[0].strip("| "): line for line in out.splitlines() if line.startswith("| ")}
    assert rows["monomial3"].endswith("| 15 | 8 |")
    assert rows["poly6-2"].endswith("| 508 | 256 |")
    code2, out2, _ = run(capsys, "bench", inst, "--no-timing")
    assert out == out2


def test_bench_csv_and_out_dir(capsys, inst, tmp_path):
    code, out, _ = run(capsys, "bench", inst, "--format", "csv", "--method", "template", "--out-dir", tmp_path)
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("instance,n,monomials,degree,method,depth")
    assert (tmp_path / "bench.csv").read_text() == out


def test_bench_bad_dir(capsys, tmp_path):
    assert run(capsys, "bench", tmp_path / "missing")[0] == EXIT_INPUT
    assert run(capsys, "bench", tmp_path)[0] == EXIT_INPUT


def test_bench_records_dash_on_failure():
    rec = bench_instance("m3", monomial(3), "milp", solver=SolverSpec("command", cmd="/no/such {lp} {timelimit} {solout}"))
    assert rec.cell == "-" and not rec.verified
    md = to_markdown([rec], timings=True)
    assert "| m3 | 3 | 1 | 3 | - | - |" in md


def test_run_bench_milp_down(inst, tmp_path):
    shutil.copy(inst / "monomial3.hobo", tmp_path)
    recs = run_bench(tmp_path, ("milp-down",), time_limit=30, solver=SolverSpec("highs"))
    assert recs[0].depth == 8 and recs[0].verified
    assert "monomial3" in to_csv(recs)
