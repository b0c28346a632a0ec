import random

import pytest
from hypothesis import given, settings, strategies as st
from pysat.formula import CNF

from vtsearch.cdcl import CdclSolver, luby
from vtsearch.encoder import Cnf, encode_problem
from vtsearch.model import SearchConfig
from vtsearch.solver import (SolverInternalError, SolverOutputError, Status, export_dimacs,
                             import_assignment, parse_solver_output, self_check, solve)


@pytest.mark.parametrize("backend", ["cadical195", "kissat404+glucose4", "cdcl"])
def test_trivial_formulas(backend):
    res = solve(Cnf(0, []), backend=backend)
    assert res.status is Status.SAT and res.assignment == [False]
    assert solve(Cnf(1, [[1], [-1]]), backend=backend).status is Status.UNSAT
    res = solve(Cnf(3, [[1, 2], [-1], [-2, 3]]), backend=backend)
    assert res.assignment[1:] == [False, True, True]


def test_malformed_cnf_rejected():
    with pytest.raises(ValueError):
        solve(Cnf(2, [[1, 3]]))
    with pytest.raises(ValueError):
        solve(Cnf(2, [[1, 0]]))


def test_self_check_catches_bad_model():
    with pytest.raises(SolverInternalError):
        self_check(Cnf(2, [[1, 2]]), [False, False, False])


def test_luby_sequence():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]
    with pytest.raises(ValueError):
        luby(0)


def _random_cnf(rng, n, ratio=4.2, width=3):
    m = int(ratio * n)
    return Cnf(n, [[rng.choice((-1, 1)) * rng.randint(1, n) for _ in range(width)]
                   for _ in range(m)])


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 40))
def test_cdcl_agrees_with_cadical(seed, n):
    cnf = _random_cnf(random.Random(seed), n)
    a = solve(cnf, backend="cdcl", seed=seed % 5)
    b = solve(cnf, backend="cadical195")
    assert a.status is b.status


def test_cdcl_on_pigeonhole():
    # 5 pigeons, 4 holes
    var = lambda p, h: p * 4 + h + 1
    clauses = [[var(p, h) for h in range(4)] for p in range(5)]
    clauses += [[-var(p, h), -var(q, h)] for h in range(4) for p in range(5) for q in range(p)]
    assert solve(Cnf(20, clauses), backend="cdcl").status is Status.UNSAT


def test_cdcl_on_real_encoding():
    enc = encode_problem(SearchConfig.default("F", 2, drop=1))
    assert solve(enc.cnf, backend="cdcl", time_limit=120).status is solve(enc.cnf).status


def test_time_limit_gives_unknown():
    # a hard instance for the built-in solver, with a tiny budget
    enc = encode_problem(SearchConfig.default("C", 4, drop=2))
    res = solve(enc.cnf, backend="cdcl", time_limit=0.5)
    assert res.status is Status.UNKNOWN
    res = solve(enc.cnf, time_limit=0.01)
    assert res.status in (Status.UNKNOWN, Status.UNSAT)


def test_seed_keeps_status():
    enc = encode_problem(SearchConfig.default("F", 3, drop=4))
    assert {solve(enc.cnf, seed=s).status for s in range(4)} == {Status.SAT}


def test_dimacs_export_round_trip(tmp_path):
    enc = encode_problem(SearchConfig.default("D", 2, drop=1))
    header = enc.dimacs_header()
    path = export_dimacs(enc.cnf, tmp_path / "f.cnf", header)
    lines = path.read_text().splitlines()
    assert len(lines) == len(enc.cnf.clauses) + 1 + len(header)
    back = CNF(from_file=str(path))
    assert back.nv == enc.cnf.num_vars
    assert back.clauses == enc.cnf.clauses


def test_import_external_model(tmp_path):
    enc = encode_problem(SearchConfig.default("F", 3, drop=4))
    res = solve(enc.cnf)
    lits = [v if res.assignment[v] else -v for v in range(1, enc.cnf.num_vars + 1)]
    body = "\n".join("v " + " ".join(map(str, lits[k:k + 10])) for k in range(0, len(lits), 10))
    out = tmp_path / "out.txt"
    out.write_text(f"c from elsewhere\ns SATISFIABLE\n{body}\nv 0\n")
    got = import_assignment(out, enc.cnf)
    assert got.status is Status.SAT and got.assignment == res.assignment
    out.write_text("s UNSATISFIABLE\n")
    assert import_assignment(out, enc.cnf).status is Status.UNSAT


def test_import_rejects_wrong_model(tmp_path):
    out = tmp_path / "out.txt"
    out.write_text("s SATISFIABLE\nv -1 -2 0\n")
    with pytest.raises(SolverInternalError):
        import_assignment(out, Cnf(2, [[1, 2]]))


@pytest.mark.parametrize("text", ["", "v 1 2 0", "s MAYBE", "s SATISFIABLE\nv 1 x 0"])
def test_bad_solver_output(text):
    with pytest.raises(SolverOutputError):
        parse_solver_output(text, 2)
