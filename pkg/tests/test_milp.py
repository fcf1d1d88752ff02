from __future__ import annotations

import itertools
import stat
import sys
import textwrap

import pytest

from hobocirc.circuit import Circuit
from hobocirc.instances import monomial, qubo1
from hobocirc.milp import (
    BINARY,
    CONTINUOUS,
    ERROR,
    FEASIBLE,
    INFEASIBLE,
    OPTIMAL,
    CdpConfig,
    DecodeError,
    ModelError,
    SearchLimitError,
    SolutionParseError,
    SolverCrashed,
    SolverNotFound,
    SolverSpec,
    build_model,
    decode_solution,
    emit_lp,
    encode_circuit,
    exact_search,
    expected_column_count,
    find_cbc,
    read_lp,
    read_start,
    solve,
    write_start,
)
from hobocirc.milp.solvers import parse_cbc_solution, parse_value_lines
from hobocirc.polynomial import IsingPolynomial, expand_to_ising, parse_polynomial
from hobocirc.template import base_template, compile_greedy, merge_duplicates, monomial_circuit
from hobocirc.verify import EXACTLY_ONCE, check_statevector, check_symbolic

needs_cbc = pytest.mark.skipif(find_cbc() is None, reason="CBC not available")


@pytest.fixture
def quad():
    h = expand_to_ising(parse_polynomial("x1 x2"))
    return h, monomial_circuit((0, 1), 1.0, 2, 2)


def count(m, prefix):
    return sum(1 for v in m.columns if v.startswith(prefix + "_"))


def test_dimensions_quadratic(quad):
    h, _ = quad
    cfg = CdpConfig(2, 4)
    m = build_model(h, cfg)
    assert count(m, "c") == 2 * 2 * 4 == 16
    assert count(m, "r") == 2 * 3 * 4 == 24
    assert count(m, "a") == 4 and count(m, "d") == 24 and count(m, "b") == 2 * 2 * 4
    assert len(m.columns) == expected_column_count(h, cfg)
    fam = m.families()
    for name in ("activity", "no-self-control", "exactly-once", "monomial-check", "rotation-validity", "propagation", "linearization", "final", "symmetry"):
        assert fam[name] > 0
    assert "downward" not in fam


@pytest.mark.parametrize("q, T", [(3, 2), (3, 5), (4, 3)])
def test_column_count_formula(q, T):
    h = expand_to_ising(parse_polynomial("x1 x2 x3"))
    for down in (False, True):
        cfg = CdpConfig(q, T, downward_only=down)
        assert len(build_model(h, cfg).columns) == expected_column_count(h, cfg)


def test_downward_rows():
    h = expand_to_ising(monomial(3))
    m = build_model(h, CdpConfig(3, 4, downward_only=True))
    down = [r for r in m.rows if r.family == "downward"]
    assert len(down) == 4 * 3
    assert all(r.coeffs[0][0].startswith("c_") and r.rhs == 0 and r.sense == "=" for r in down)


def test_hand_checked_rows(quad):
    h, _ = quad
    m = build_model(h, CdpConfig(2, 4))
    rows = {r.name: r for r in m.rows}
    # v3 = Z1 Z2; at layer 0 qubit 1 holds Z1, so d_0_1_v3 <= b_0_1_2 = 0
    assert rows["din_0_1_v3_2"].coeffs == (("d_0_1_v3", 1.0),) and rows["din_0_1_v3_2"].rhs == 0
    # propagation at layer 1 with b^0 constant: b_1_2_1 = 0 + c_1_1_2 - 0
    assert dict(rows["prop_1_2_1"].coeffs) == {"b_1_2_1": 1.0, "c_1_1_2": -1.0}
    assert rows["fin_2_2"].rhs == 1 and rows["fin_2_1"].rhs == 0


def test_model_preconditions():
    with pytest.raises(ModelError):
        build_model(IsingPolynomial(2, []), CdpConfig(2, 4))
    with pytest.raises(ModelError):
        build_model(expand_to_ising(monomial(3)), CdpConfig(2, 4))
    with pytest.raises(ModelError):
        CdpConfig(2, 0)


def test_warm_start_roundtrip(quad):
    h, c = quad
    m = build_model(h, CdpConfig(2, 4, warm_start=c))
    assert m.start is not None and m.violated(m.start) == []
    assert m.start["c_2_1_2"] == 1 and m.start["r_3_2_v3"] == 1 and m.start["a_4"] == 1
    assert decode_solution(m, m.start) == c


def test_warm_start_must_fit(quad):
    h, c = quad
    with pytest.raises(ModelError):
        build_model(h, CdpConfig(2, 3, warm_start=c))
    dup = compile_greedy(parse_polynomial("x1 x2 + x1 x2 x3"))
    with pytest.raises(ModelError):
        build_model(expand_to_ising(parse_polynomial("x1 x2 + x1 x2 x3")), CdpConfig(3, 12, warm_start=dup))


def test_decode_rounds_and_rejects(quad):
    h, c = quad
    m = build_model(h, CdpConfig(2, 4, relax_abd=True))
    vals = encode_circuit(m, c)
    fuzzy = {v: (0.9999999 if x else 1e-7) for v, x in vals.items()}
    assert decode_solution(m, fuzzy) == c
    broken = dict(vals, c_4_1_2=0.0)
    with pytest.raises(DecodeError):
        decode_solution(m, broken)


def test_relaxed_binaries_are_c_and_r_only(quad):
    h, _ = quad
    lp = emit_lp(build_model(h, CdpConfig(2, 4, relax_abd=True)))
    names = lp.split("Binaries\n", 1)[1].split("End")[0].split()
    assert names and all(v.split("_")[0] in ("c", "r") for v in names)
    assert len(names) == 16 + 24


def test_lp_deterministic_and_sections(quad):
    h, _ = quad
    cfg = CdpConfig(2, 4)
    a, b = emit_lp(build_model(h, cfg)), emit_lp(build_model(h, cfg))
    assert a == b
    for head in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
        assert f"\n{head}\n" in a
    assert max(len(line) for line in a.splitlines()) <= 210


@pytest.mark.parametrize("cfg", [CdpConfig(2, 4), CdpConfig(3, 5, downward_only=True, relax_abd=True), CdpConfig(3, 3, symmetry_break=False)])
def test_lp_reader_roundtrip(quad, cfg):
    h, _ = quad
    if cfg.q == 3:
        h = expand_to_ising(parse_polynomial("x1 x2 - 2 x2 x3"))
    m = build_model(h, cfg)
    p = read_lp(emit_lp(m))
    assert len(p.columns) == len(m.columns)
    assert len(p.rows) == len(m.rows)
    assert p.binaries == set(m.binaries())
    assert all(p.bounds[v] == (0.0, 1.0) for v, k in m.columns.items() if k == CONTINUOUS)
    first = p.rows[0]
    assert first.coeffs == dict(m.rows[0].coeffs) and first.rhs == m.rows[0].rhs


def test_lp_reader_wrapped_lines():
    text = "Minimize\n obj: x + 2 y\nSubject To\n c1: x\n   + y\n   >= 1\nBounds\n 0 <= x <= 1\nBinaries\n y\nEnd\n"
    p = read_lp(text)
    assert p.rows[0].coeffs == {"x": 1.0, "y": 1.0} and p.rows[0].sense == ">="
    assert p.objective == {"x": 1.0, "y": 2.0}


def test_start_sidecar(tmp_path, quad):
    h, c = quad
    m = build_model(h, CdpConfig(2, 4, warm_start=c))
    path = write_start(m.start, tmp_path / "s.txt")
    assert read_start(path) == m.start
    assert path.read_text().splitlines()[0] == "a_1 1"


# -- solution parsing ------------------------------------------------------------------


def test_parse_cbc_solution():
    text = "Optimal - objective value 8.00000000\n      0 a_1   1   1\n      1 c_1_1_2  0  0\n"
    s = parse_cbc_solution(text)
    assert s.status == OPTIMAL and s.objective == 8 and s.values == {"a_1": 1.0, "c_1_1_2": 0.0}
    assert parse_cbc_solution("Infeasible - objective value 3\n").status == INFEASIBLE
    assert parse_cbc_solution("Stopped on time - objective value 16\n 0 a_1 1 0\n").status == FEASIBLE
    with pytest.raises(SolutionParseError):
        parse_cbc_solution("")
    with pytest.raises(SolutionParseError):
        parse_cbc_solution("Who knows\n")
    with pytest.raises(SolutionParseError):
        parse_cbc_solution("Optimal - objective value 1\n 0 a_1 x 0\n")


def test_parse_value_lines():
    s = parse_value_lines("# status optimal\na_1 1\nc_1_1_2 0\n")
    assert s.status == OPTIMAL and s.values["a_1"] == 1
    assert parse_value_lines("a_1 1\n").status == FEASIBLE
    assert parse_value_lines("# status infeasible\n").status == INFEASIBLE
    assert parse_value_lines("").status == ERROR
    with pytest.raises(SolutionParseError):
        parse_value_lines("a_1 1 2\n")
    with pytest.raises(SolutionParseError):
        parse_value_lines("# status great\n")


# -- backends --------------------------------------------------------------------------


def _script(tmp_path, body: str):
    path = tmp_path / "fake_solver.py"
    path.write_text(textwrap.dedent(body))
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return f"{sys.executable} {path}"


def test_command_backend_replays_start(tmp_path, quad):
    h, c = quad
    cmd = _script(
        tmp_path,
        """
        import sys
        lp, limit, out, start = sys.argv[1:5]
        assert open(lp).read().startswith("\\\\ CDP model")
        with open(out, "w") as f:
            f.write("# status feasible\\n")
            f.write(open(start).read())
        """,
    )
    m = build_model(h, CdpConfig(2, 4, warm_start=c))
    sol = solve(m, SolverSpec("command", cmd=cmd + " {lp} {timelimit} {solout} {start}", time_limit=5))
    assert sol.status == FEASIBLE and sol.objective == 4 and not sol.from_start
    assert decode_solution(m, sol) == c


def test_command_backend_errors(tmp_path, quad):
    h, _ = quad
    m = build_model(h, CdpConfig(2, 4))
    crash = _script(tmp_path, "import sys\nsys.exit(3)\n")
    with pytest.raises(SolverCrashed):
        solve(m, SolverSpec("command", cmd=crash + " {lp} {timelimit} {solout}"))
    silent = _script(tmp_path, "pass\n")
    with pytest.raises(SolutionParseError):
        solve(m, SolverSpec("command", cmd=silent + " {lp} {timelimit} {solout}"))
    with pytest.raises(SolverNotFound):
        solve(m, SolverSpec("command", cmd="/nonexistent/solver {lp} {timelimit} {solout}"))


def test_env_overrides(monkeypatch, tmp_path, quad):
    h, _ = quad
    m = build_model(h, CdpConfig(2, 4))
    monkeypatch.setenv("HOBOCIRC_CBC", str(tmp_path / "no-cbc"))
    with pytest.raises(SolverNotFound):
        solve(m, SolverSpec("cbc"))
    seen = tmp_path / "limit.txt"
    cmd = _script(tmp_path, f"import sys\nopen({str(seen)!r}, 'w').write(sys.argv[2])\nopen(sys.argv[3], 'w').write('# status infeasible\\n')\n")
    monkeypatch.setenv("HOBOCIRC_SOLVER_CMD", cmd + " {lp} {timelimit} {solout}")
    monkeypatch.setenv("HOBOCIRC_TIME_LIMIT", "7")
    sol = solve(m, SolverSpec("auto", time_limit=100))
    assert sol.status == INFEASIBLE and seen.read_text() == "7"


def test_fractional_output_falls_back_to_start(tmp_path, quad):
    h, c = quad
    m = build_model(h, CdpConfig(2, 4, warm_start=c))
    cmd = _script(tmp_path, "import sys\nopen(sys.argv[3], 'w').write('# status feasible\\na_1 0.3\\n')\n")
    sol = solve(m, SolverSpec("command", cmd=cmd + " {lp} {timelimit} {solout}"))
    assert sol.status == FEASIBLE and sol.from_start and sol.objective == 4
    m2 = build_model(h, CdpConfig(2, 4))
    assert solve(m2, SolverSpec("command", cmd=cmd + " {lp} {timelimit} {solout}")).status == ERROR


def test_highs_limit_without_incumbent_falls_back(monkeypatch, quad):
    import types

    import scipy.optimize

    stopped = types.SimpleNamespace(status=1, x=None, fun=None, message="Time limit reached.")
    monkeypatch.setattr(scipy.optimize, "milp", lambda *a, **k: stopped)
    h, c = quad
    sol = solve(build_model(h, CdpConfig(2, 4, warm_start=c)), SolverSpec("highs", time_limit=1))
    assert sol.status == FEASIBLE and sol.from_start and sol.objective == 4
    assert solve(build_model(h, CdpConfig(2, 4)), SolverSpec("highs", time_limit=1)).status == ERROR


@pytest.mark.parametrize("backend", ["highs", pytest.param("cbc", marks=needs_cbc)])
def test_degree3_optimum(backend):
    h = expand_to_ising(monomial(3))
    m = build_model(h, CdpConfig(3, 8, downward_only=True))
    sol = solve(m, SolverSpec(backend, time_limit=120))
    assert sol.status == OPTIMAL and sol.objective == pytest.approx(8)
    c = decode_solution(m, sol)
    assert c.depth == 8 and all(g.control < g.target for g in c.cnots())
    assert m.violated(sol.values) == []
    assert check_statevector(c, h, 0.8)


@pytest.mark.parametrize("backend", ["highs", pytest.param("cbc", marks=needs_cbc)])
def test_infeasible_budget(backend):
    m = build_model(expand_to_ising(monomial(3)), CdpConfig(3, 2, downward_only=True))
    assert solve(m, SolverSpec(backend, time_limit=60)).status == INFEASIBLE


@needs_cbc
def test_qubo1_simplified_at_most_eight():
    f = qubo1()
    h = expand_to_ising(f)
    warm = merge_duplicates(compile_greedy(f), h)
    m = build_model(h, CdpConfig(4, warm.depth, downward_only=True, warm_start=warm))
    sol = solve(m, SolverSpec("cbc", time_limit=120))
    assert sol.usable and sol.objective <= 8
    c = decode_solution(m, sol)
    assert c.depth == sol.objective == pytest.approx(c.depth)


def test_objective_equals_depth_with_symmetry(quad):
    h, c = quad
    m = build_model(h, CdpConfig(2, 6, warm_start=c))
    assert m.objective_value(m.start) == c.depth


def test_symmetry_forbids_gaps(quad):
    h, c = quad
    gappy = Circuit(2, 2, (c.layers[0], (), *c.layers[1:]))
    m = build_model(h, CdpConfig(2, 6))
    vals = encode_circuit(m, gappy)  # encoding drops the gap
    assert m.violated(vals) == []
    vals["a_2"], vals["a_5"] = 0.0, 1.0
    assert any(v.startswith("sym_") for v in m.violated(vals))


# -- exact search ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, q, depth",
    [("x1 x2", 2, 4), ("x1 x2 x3", 3, 8), ("x1", 1, 1), ("2 x1 - x2", 2, 1)],
)
def test_exact_search_depths(text, q, depth):
    h = expand_to_ising(parse_polynomial(text))
    c = exact_search(h, CdpConfig(q, 8, downward_only=True))
    assert c is not None and c.depth == depth
    assert check_symbolic(c, h, EXACTLY_ONCE) and check_statevector(c, h, 0.5)


def test_exact_search_infeasible_and_limits():
    h = expand_to_ising(monomial(3))
    assert exact_search(h, CdpConfig(3, 7)) is None
    with pytest.raises(SearchLimitError):
        exact_search(expand_to_ising(monomial(4)), CdpConfig(4, 16))


def test_exact_search_agrees_with_solver():
    for text in ("x1 x2", "x1 x2 - x2 x3", "x1 x2 + x2 x3 + x1 x3"):
        h = expand_to_ising(parse_polynomial(text))
        n = h.n
        ref = exact_search(h, CdpConfig(n, 8, downward_only=True))
        m = build_model(h, CdpConfig(n, 8, downward_only=True))
        sol = solve(m, SolverSpec("highs", time_limit=120))
        assert sol.status == OPTIMAL and sol.objective == pytest.approx(ref.depth)


def test_exact_search_uses_ancilla():
    h = expand_to_ising(parse_polynomial("x1 x2"))
    c = exact_search(h, CdpConfig(3, 8))
    assert c.depth == 4


def test_linearization_single_layer_exhaustive_small():
    # every binary (c, b_prev, b_next) on q=2: rows hold iff b_next = b_prev xor (c b_prev)
    h = IsingPolynomial(1, [((0,), 1.0)])
    m = build_model(h, CdpConfig(2, 2, symmetry_break=False))
    rows = [r for r in m.rows if r.name.split("_")[0] in ("wc", "wb", "wl", "ub", "ux", "ul", "prop") and r.name.split("_")[1] == "2"]
    for c12, c21, b1, b2, n1, n2 in itertools.product((0, 1), repeat=6):
        if c12 and c21:
            continue
        prev = {0: b1, 1: b2}
        cv = {(0, 1): c12, (1, 0): c21}
        vals = {"c_2_1_2": c12, "c_2_2_1": c21, "b_1_1_1": b1, "b_1_2_1": b2, "b_2_1_1": n1, "b_2_2_1": n2}
        ok = True
        for i in range(2):
            j = 1 - i
            x = cv[(j, i)] * prev[j]
            vals[f"w_2_{j + 1}_{i + 1}_1"] = x
            vals[f"u_2_{i + 1}_1"] = prev[i] * x
            ok &= (prev[i] ^ x) == (n1, n2)[i]
        assert all(r.holds(vals) for r in rows) == bool(ok)
