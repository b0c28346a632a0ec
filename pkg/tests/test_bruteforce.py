import pytest
from hypothesis import given, settings, strategies as st

from helpers import extends_to_model
from vtsearch import bruteforce as bf
from vtsearch.bruteforce import BoundsError, brute_force_search
from vtsearch.encoder import encode_problem
from vtsearch.model import SearchConfig, same_class
from vtsearch.solver import Status, solve
from vtsearch.verifier import verify_vts, verify_witness
from vtsearch.decoder import Witness


def test_all_active_two_nodes_infeasible():
    assert not brute_force_search(SearchConfig(2, 2, 1, variant="A")).feasible


def test_bounds_guard():
    with pytest.raises(BoundsError):
        brute_force_search(SearchConfig(4, 2, 1))
    with pytest.raises(BoundsError):
        brute_force_search(SearchConfig(2, 2, 2))
    with pytest.raises(BoundsError):
        brute_force_search(SearchConfig(2, 5, 1))


def test_feasible_case_is_valid_and_encodable():
    # the only feasible toy shape; it needs the printed inhibition reading
    cfg = SearchConfig(2, 4, 1, variant="F", inhibition="printed")
    res = brute_force_search(cfg)
    assert res.feasible
    assert verify_vts(res.vts, "F", inhibition="printed").passed
    assert not verify_vts(res.vts, "F").passed
    assert extends_to_model(encode_problem(cfg), res.vts) is Status.SAT


@pytest.mark.parametrize("var", "BDF")
@pytest.mark.parametrize("mu", [2, 3])
def test_shortcut_matches_exhaustive_activity(var, mu):
    cfg = SearchConfig(2, mu, 1, variant=var)
    assert (brute_force_search(cfg).feasible
            == brute_force_search(cfg, exhaustive_activity=True).feasible)


@st.composite
def activity_problems(draw):
    nu, mu = draw(st.integers(2, 3)), draw(st.integers(2, 4))
    labels = tuple(draw(st.integers(0, (1 << mu) - 1)) for _ in range(nu))
    pairs = [(i, j) for i in range(nu) for j in range(nu) if i != j]
    edges = {}
    for i, j in draw(st.lists(st.sampled_from(pairs), unique=True, min_size=1)):
        lab = labels[i] & labels[j] & draw(st.integers(1, (1 << mu) - 1))
        if lab:
            edges[i, j] = lab
    partners = [0] * mu
    for m in range(mu):
        for m2 in range(mu):
            if not same_class(m, m2, mu) and draw(st.booleans()):
                partners[m] |= 1 << m2
    return nu, mu, labels, edges, partners


@settings(max_examples=300, deadline=None)
@given(st.sampled_from("ABCDEF"), activity_problems())
def test_activity_shortcuts(var, problem):
    nu, mu, labels, edges, partners = problem
    cfg = SearchConfig(nu, mu, 1, variant=var)
    keys = sorted(edges)
    rule = cfg.variant.edge_rule
    fast = bf._search_activity(cfg, labels, keys, edges, partners, rule, False)
    full = bf._search_activity(cfg, labels, keys, edges, partners, rule, True)
    assert (fast is None) == (full is None)


@pytest.mark.parametrize("var", "ABCDEF")
@pytest.mark.parametrize("mu", [3, 4])
@pytest.mark.parametrize("drop", [1, 2])
def test_drop_query_agrees_with_solver(var, mu, drop):
    cfg = SearchConfig(2, mu, 1, drop, var, connectivity_query=True)
    found = brute_force_search(cfg)
    res = solve(encode_problem(cfg).cnf)
    assert found.feasible == (res.status is Status.SAT)
    if found.feasible:
        assert len(found.dropped) == drop
        assert verify_witness(Witness(found.vts, found.dropped), cfg).passed


@pytest.mark.parametrize("var", "EF")
@pytest.mark.parametrize("drop", [1, 2])
def test_printed_drop_query_agrees_with_solver(var, drop):
    cfg = SearchConfig(2, 4, 1, drop, var, connectivity_query=True, inhibition="printed")
    found = brute_force_search(cfg)
    assert found.feasible == (solve(encode_problem(cfg).cnf).status is Status.SAT)


def test_printed_inhibition_agrees_with_solver():
    for mu in (2, 3, 4):
        for var in "EF":
            cfg = SearchConfig(2, mu, 1, variant=var, inhibition="printed")
            res = solve(encode_problem(cfg).cnf)
            assert brute_force_search(cfg).feasible == (res.status is Status.SAT)
