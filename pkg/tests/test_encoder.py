import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import event, given, settings, strategies as st

from helpers import extends_to_model, projected_models
from vtsearch.decoder import decode_witness
from vtsearch.encoder import (Cnf, EncodingError, VarMap, allocate_variables, encode_drop,
                              encode_exactly, encode_fusion, encode_problem, encode_structure)
from vtsearch.model import EdgeSlot, SearchConfig, reference_fixture
from vtsearch.solver import Status, solve
from vtsearch.verifier import check_stability


def test_named_variable_counts():
    vm = allocate_variables(SearchConfig(3, 6, 2))
    sizes = {k: v.size for k, v in vm.blocks.items()}
    assert sizes == dict(n=18, e=18, el=108, p=36, a=18, b=108, r=162, d=18, rp=9)
    assert vm.num_named == 495
    vm = allocate_variables(SearchConfig(2, 2, 1))
    assert [vm.blocks[k].size for k in VarMap.BLOCKS] == [4, 4, 8, 4, 4, 8, 16, 4, 4]
    assert vm.num_named == 56


def test_allocation_is_contiguous():
    vm = VarMap(3, 4, 2)
    flat = np.concatenate([vm.blocks[k].ravel() for k in VarMap.BLOCKS])
    assert np.array_equal(flat, np.arange(1, vm.num_named + 1))
    assert vm.name(vm.n[0][0]) == "n[0][0]"
    assert vm.name(vm.r[1][2][3][0]) == "r[1][2][3][1]"
    aux = vm.new_vars(3, "t")
    assert aux == [vm.num_named + 1, vm.num_named + 2, vm.num_named + 3]
    assert vm.name(aux[1]) == "t#1"


def test_structure_units():
    cfg = SearchConfig(2, 4, 1)
    vm = allocate_variables(cfg)
    clauses = encode_structure(cfg, vm)
    units = {c[0] for c in clauses if len(c) == 1}
    assert {-vm.e[0][0][0], -vm.e[1][1][0]} <= units
    same = [-vm.p[x][y] for x in range(4) for y in range(4) if (x < 2) == (y < 2)]
    assert len(same) == 8 and set(same) <= units


def test_fusion_forbids_foreign_partner():
    cfg = SearchConfig(3, 4, 1)
    vm = allocate_variables(cfg)
    clauses = {tuple(sorted(c)) for c in encode_fusion(cfg, vm)}
    assert tuple(sorted([-vm.b[0][1][0][0], -vm.a[2][3], -vm.p[0][3]])) in clauses


def test_encoding_is_deterministic():
    cfg = SearchConfig.default("F", 3, drop=2)
    assert encode_problem(cfg).to_dimacs() == encode_problem(cfg).to_dimacs()


def test_dimacs_header_maps_names():
    enc = encode_problem(SearchConfig(2, 2, 1))
    text = enc.to_dimacs()
    assert "c var n[0][0] = 1\n" in text
    assert text.count("\nc var ") == 56
    p_line = next(l for l in text.splitlines() if l.startswith("p cnf"))
    assert p_line == f"p cnf {enc.cnf.num_vars} {len(enc.cnf.clauses)}"


def test_family_counts_add_up():
    enc = encode_problem(SearchConfig.default("D", 3, drop=2))
    assert sum(enc.family_counts.values()) == len(enc.cnf.clauses)
    assert set(enc.family_counts) >= {"structure", "fusion", "activity", "stability", "drop"}


def test_drop_needs_positive_count():
    with pytest.raises(ValueError):
        SearchConfig(3, 6, 2, drop=0, connectivity_query=True)
    cfg = SearchConfig(2, 2, 1, drop=5, connectivity_query=True)
    with pytest.raises(EncodingError):
        encode_drop(cfg, allocate_variables(cfg))


@pytest.mark.parametrize("n,c", [(1, 1), (2, 1), (3, 0), (4, 2), (5, 5)])
def test_exactly_small(n, c):
    vm = VarMap(2, 2, 1)
    lits = vm.new_vars(n, "x")
    cnf = Cnf(vm.top, encode_exactly(lits, c, vm))
    models = projected_models(cnf, lits)
    assert len(models) == comb(n, c)
    assert all(sum(m) == c for m in models)


def test_exactly_single_literal_is_unit():
    vm = VarMap(2, 2, 1)
    (x,) = vm.new_vars(1, "x")
    assert encode_exactly([x], 1, vm) == [[x]]


def test_exactly_rejects_bad_count():
    vm = VarMap(2, 2, 1)
    with pytest.raises(EncodingError):
        encode_exactly(vm.new_vars(2, "x"), 3, vm)


def test_fixture_extends_under_boolean_edge_rules():
    v = reference_fixture()
    for name in "CD":
        enc = encode_problem(SearchConfig(3, 8, 2, variant=name))
        assert extends_to_model(enc, v) is Status.SAT
    for name in "AB":
        enc = encode_problem(SearchConfig(3, 8, 2, variant=name))
        assert extends_to_model(enc, v) is Status.UNSAT


def test_fixture_extends_with_drop_query():
    v = reference_fixture()
    # node 2 touches exactly three edges
    cut = {EdgeSlot(1, 2, 0), EdgeSlot(2, 1, 0), EdgeSlot(2, 0, 0)}
    enc = encode_problem(SearchConfig(3, 8, 2, drop=3, variant="C", connectivity_query=True))
    assert extends_to_model(enc, v, cut) is Status.SAT
    # n2 -> n0 keeps node 0 attached
    gone = {EdgeSlot(0, 1, 0), EdgeSlot(0, 1, 1), EdgeSlot(1, 0, 0)}
    assert extends_to_model(enc, v, gone) is Status.UNSAT
    enc = encode_problem(SearchConfig(3, 8, 2, drop=2, variant="C", connectivity_query=True))
    for pair in itertools.combinations(sorted(v.edges), 2):
        assert extends_to_model(enc, v, pair) is Status.UNSAT


def test_reachability_bits_are_sound():
    cfg = SearchConfig.default("F", 3)
    enc = encode_problem(cfg)
    res = solve(enc.cnf)
    assert res.status is Status.SAT
    w = decode_witness(res.assignment, enc.varmap, cfg)
    assert check_stability(w.vts).passed
    r = np.asarray(res.assignment)[enc.varmap.blocks["r"]]
    for i, j, m, ell in zip(*np.nonzero(r)):
        if i == j:
            continue
        # a true r bit needs an m-path of length <= ell + 1
        frontier, seen = {int(i)}, {int(i)}
        for _ in range(int(ell) + 1):
            frontier = {s.dst for s, e in w.vts.edges.items() if s.src in frontier and m in e.molecules}
            seen |= frontier
        assert j in seen, (i, j, m, ell)


@settings(max_examples=12, deadline=None)
@given(st.sampled_from("ABCDEF"), st.integers(2, 3), st.integers(2, 5), st.integers(1, 2),
       st.booleans())
def test_solutions_decode_and_verify(var, nu, mu, pi, query):
    from vtsearch.verifier import verify_witness

    drop = 1 if query else 0
    cfg = SearchConfig(nu, mu, pi, drop, var, connectivity_query=query)
    enc = encode_problem(cfg)
    res = solve(enc.cnf, time_limit=60)
    if res.status is Status.SAT:
        w = decode_witness(res.assignment, enc.varmap, cfg)
        assert verify_witness(w, cfg).passed


@settings(max_examples=60, deadline=None)
@given(st.sampled_from("ABCDEF"), st.integers(2, 4), st.integers(2, 7), st.integers(1, 2),
       st.integers(0, 4))
def test_symmetry_breaking_keeps_status(var, nu, mu, pi, drop):
    from vtsearch.search import run_search

    if drop > nu * (nu - 1) * pi:
        drop = 0
    cfg = SearchConfig(nu, mu, pi, drop, var, connectivity_query=drop > 0, time_limit=120)
    plain = SearchConfig(nu, mu, pi, drop, var, connectivity_query=drop > 0,
                         symmetry_breaking=False)
    # run_search also splits drop queries by cut side
    a = run_search(cfg).status
    b = solve(encode_problem(plain).cnf, time_limit=120).status
    event(f"{a.value} drop={drop > 0}")
    assert Status.UNKNOWN not in (a, b)
    assert a is b


def test_symmetry_breaking_orders_labels():
    cfg = SearchConfig.default("C", 4, drop=3)
    enc = encode_problem(cfg)
    res = solve(enc.cnf)
    w = decode_witness(res.assignment, enc.varmap, cfg)
    rows = [[m in lab for m in range(cfg.num_molecules)] for lab in w.vts.node_labels]
    assert rows == sorted(rows, reverse=True)
    half = (cfg.num_molecules + 1) // 2
    cols = [[row[m] for row in rows] for m in range(cfg.num_molecules)]
    assert cols[:half] == sorted(cols[:half], reverse=True)
    assert cols[half:] == sorted(cols[half:], reverse=True)
    assert "symmetry" in enc.family_counts


def _drop_family_sat(slots, nu, pi, drop, mode, cut_side=None):
    cfg = SearchConfig(nu, 2, pi, drop, "A", mode, True, cut_side=cut_side)
    vm = allocate_variables(cfg)
    clauses = encode_drop(cfg, vm)
    for i in range(nu):
        for j in range(nu):
            for q in range(pi):
                on = (i, j, q) in slots
                clauses.append([vm.e[i][j][q] if on else -vm.e[i][j][q]])
    return solve(Cnf(vm.top, clauses)).status is Status.SAT


def _brute_split(slots, nu, drop, mode, cut_side=None):
    from vtsearch.verifier import _adjacency, _reachable

    for gone in itertools.combinations(sorted(slots), drop):
        rest = [EdgeSlot(*s) for s in slots if s not in gone]
        adj = _adjacency(rest, undirected=mode == "undirected")
        reach = [_reachable(nu, adj, i) for i in range(nu)]
        if cut_side is not None:
            side = set(range(cut_side))
            if all(reach[i] <= side for i in side):
                return True
            continue
        if any(j not in reach[i] and i not in reach[j]
               for i in range(nu) for j in range(i + 1, nu)):
            return True
    return False


@st.composite
def edge_sets(draw):
    nu, pi = draw(st.integers(2, 5)), draw(st.integers(1, 2))
    all_slots = [(i, j, q) for i in range(nu) for j in range(nu) if i != j for q in range(pi)]
    slots = frozenset(draw(st.lists(st.sampled_from(all_slots), unique=True, max_size=9)))
    drop = draw(st.integers(1, min(4, len(all_slots))))
    return nu, pi, slots, drop


@settings(max_examples=150, deadline=None)
@given(edge_sets(), st.sampled_from(["undirected", "directed"]), st.integers(0, 4))
def test_drop_family_matches_subset_removal(problem, mode, side):
    nu, pi, slots, drop = problem
    cut_side = side if mode == "undirected" and 1 <= side < nu else None
    assert (_drop_family_sat(slots, nu, pi, drop, mode, cut_side)
            == _brute_split(slots, nu, drop, mode, cut_side))
