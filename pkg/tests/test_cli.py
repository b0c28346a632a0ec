import json

import pytest

from vtsearch.bench import DEFAULT_DROPS, bench, to_csv
from vtsearch.cli import main
from vtsearch.decoder import Witness
from vtsearch.dot import to_dot
from vtsearch.model import EdgeSlot, emit_vts, reference_fixture, vts_to_dict
from vtsearch.search import Outcome, min_connectivity
from vtsearch.model import SearchConfig


@pytest.fixture
def fixture_file(tmp_path):
    path = tmp_path / "fig1.json"
    path.write_text(emit_vts(reference_fixture()))
    return path


def test_search_sat_writes_artifacts(tmp_path, capsys):
    out, dot, cnf = tmp_path / "w.json", tmp_path / "w.dot", tmp_path / "w.cnf"
    code = main(["search", "--variant", "F", "--nodes", "3", "--drop", "4",
                 "--out", str(out), "--dot", str(dot), "--dimacs", str(cnf)])
    assert code == 10
    doc = json.loads(out.read_text())
    assert len(doc["witness"]["dropped"]) == 4
    assert dot.read_text().count("style=dashed") == 4
    assert cnf.read_text().startswith("c vts search variant=F")
    assert main(["verify", str(out), "--variant", "F"]) == 0


def test_search_unsat_exit_codes(capsys):
    assert main(["search", "--variant", "A", "--nodes", "3", "--no-connectivity-query"]) == 20
    assert main(["search", "--variant", "C", "--nodes", "4", "--drop", "2"]) == 20


def test_symmetry_flag_reaches_the_encoding(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    args = ["search", "--variant", "C", "--nodes", "3", "--no-connectivity-query",
            "--dimacs", str(cnf)]
    assert main(args) == 20
    assert "symmetry=1" in cnf.read_text().splitlines()[0]
    assert main(args + ["--no-symmetry-breaking"]) == 20
    assert "symmetry=0" in cnf.read_text().splitlines()[0]


def test_machine_format(capsys):
    code = main(["search", "--variant", "A", "--nodes", "2", "--no-connectivity-query",
                 "--format", "machine"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 20 and doc["status"] == "Unsat" and doc["molecules"] == 5


def test_timeout_exit_code(capsys):
    code = main(["search", "--variant", "D", "--nodes", "4", "--drop", "2",
                 "--backend", "cdcl", "--timeout", "0.2"])
    assert code == 30


def test_bad_flags(capsys):
    assert main(["search", "--variant", "Z", "--nodes", "3"]) == 2
    assert main(["search", "--variant", "A"]) == 2
    assert main(["search", "--variant", "A", "--nodes", "1"]) == 2
    assert main([]) == 2


def test_verify_fixture(fixture_file, capsys):
    assert main(["verify", str(fixture_file), "--variant", "C"]) == 0
    assert "overall: PASS" in capsys.readouterr().out
    assert main(["verify", str(fixture_file), "--variant", "A", "--format", "machine"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["checks"]["activity_rules"]["status"] == "fail"


def test_verify_modified_fixture(tmp_path, capsys):
    doc = vts_to_dict(reference_fixture())
    doc["pairing"].remove([1, 6])
    path = tmp_path / "mod.json"
    path.write_text(json.dumps(doc))
    assert main(["verify", str(path), "--variant", "C", "--format", "machine"]) == 1
    report = json.loads(capsys.readouterr().out)
    fused = report["checks"]["well_fused"]
    assert fused["status"] == "fail" and len(fused["failures"]) == 3


def test_verify_parse_errors(tmp_path, fixture_file, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(fixture_file.read_text()[:40])
    assert main(["verify", str(bad), "--variant", "C"]) == 2
    assert main(["verify", str(tmp_path / "missing.json"), "--variant", "C"]) == 2
    loop = vts_to_dict(reference_fixture())
    loop["edges"].append({"src": 0, "dst": 0, "slot": 0, "molecules": [1], "active": [1]})
    bad.write_text(json.dumps(loop))
    assert main(["verify", str(bad), "--variant", "C"]) == 2
    assert "V5" in capsys.readouterr().err


def test_dot_command(fixture_file, tmp_path, capsys):
    assert main(["dot", str(fixture_file)]) == 0
    text = capsys.readouterr().out
    assert text.count(" -> ") == 6
    assert sum(1 for line in text.splitlines() if line.strip().startswith("n") and "[label" in line
               and "->" not in line) == 3
    assert 'n0 [label="n0: 0* 1* 2* 3* 4*"]' in text


def test_dot_is_deterministic():
    v = reference_fixture()
    gone = {EdgeSlot(1, 2, 0), EdgeSlot(2, 1, 0), EdgeSlot(2, 0, 0)}
    a, b = to_dot(v, gone), to_dot(v, set(gone))
    assert a == b and a.count("style=dashed") == 3
    assert 'n0 -> n1 [label="0 1*"];' in a


def test_min_connectivity_command(capsys):
    code = main(["min-connectivity", "--variant", "F", "--nodes", "3", "--format", "machine"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc["outcome"] == "MinConnectivity" and doc["value"] == 4
    assert [s["status"] for s in doc["steps"]] == ["Sat", "Unsat", "Unsat", "Unsat", "Sat"]


def test_sweep_no_graph():
    res = min_connectivity(SearchConfig.default("A", 3))
    assert res.outcome is Outcome.NO_GRAPH and str(res) == "NoGraph"
    assert len(res.steps) == 1


def test_sweep_stops_on_unknown():
    cfg = SearchConfig.default("C", 4, time_limit=0.05)
    res = min_connectivity(cfg, backend="cdcl")
    assert res.outcome is Outcome.INCONCLUSIVE


def test_sweep_bound():
    res = min_connectivity(SearchConfig.default("F", 3), max_drop=2)
    assert res.outcome is Outcome.INCONCLUSIVE and res.value is None


def test_sweep_witness_stays_sat_for_larger_drops():
    res = min_connectivity(SearchConfig.default("F", 3))
    w = res.witness
    assert res.value == 4 and len(w.dropped) == 4
    # dropping further existing edges keeps the graph split
    from vtsearch.verifier import check_drop_disconnects
    extra = sorted(set(w.vts.edges) - w.dropped)
    for k in range(len(extra) + 1):
        assert check_drop_disconnects(w.vts, w.dropped | set(extra[:k])).passed


def test_bench_rows_and_csv():
    rows = bench(sizes=range(2, 3), time_limit=120)
    assert [(r.variant, r.nodes, r.drop) for r in rows] == [
        ("A", 2, 2), ("C", 2, 3), ("D", 2, 2), ("F", 2, 4)]
    text = to_csv(rows)
    lines = text.splitlines()
    assert lines[0].startswith("# drop = ")
    assert lines[1] == "variant,nodes,molecules,max_parallel,drop,status,wall_seconds"
    assert len(lines) == 6
    again = bench(sizes=range(2, 3), time_limit=120)
    assert [r.status for r in again] == [r.status for r in rows]


def test_bench_command(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert main(["bench", "--variants", "A,F", "--sizes", "2", "--out", str(out)]) == 0
    assert out.read_text().count("\n") == 4
    assert main(["bench", "--variants", "E", "--sizes", "2"]) == 2
    assert main(["bench", "--variants", "E", "--sizes", "2", "--drop", "E=1"]) == 0


def test_default_drop_mapping():
    assert DEFAULT_DROPS == {"A": 2, "C": 3, "D": 2, "F": 4}
