"""Solver-free semantic checks over concrete VTS values."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .model import (ActivityConflict, DropSemantics, EdgeRule, EdgeSlot, InhibitionReading,
                    NodeRule, SearchConfig, Variant, Vts, edge_activity_table, node_activity_table,
                    variant as as_variant)


@dataclass(frozen=True)
class Failure:
    location: str
    explanation: str

    def __str__(self) -> str:
        return f"{self.location}: {self.explanation}"


@dataclass
class CheckResult:
    name: str
    failures: list[Failure] = field(default_factory=list)
    value: object = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.passed

    def fail(self, location: str, explanation: str) -> None:
        self.failures.append(Failure(location, explanation))


# -- graph helpers ------------------------------------------------------------

def _reachable(num_nodes: int, adj: dict[int, set[int]], start: int) -> set[int]:
    seen = {start}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def _adjacency(slots, undirected: bool) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for s in slots:
        adj.setdefault(s.src, set()).add(s.dst)
        if undirected:
            adj.setdefault(s.dst, set()).add(s.src)
    return adj


def components(v: Vts, removed=()) -> list[set[int]]:
    """Connected components of the underlying undirected graph."""
    gone = set(removed)
    adj = _adjacency([s for s in v.edges if s not in gone], undirected=True)
    left = set(range(v.num_nodes))
    out = []
    while left:
        comp = _reachable(v.num_nodes, adj, min(left))
        out.append(comp)
        left -= comp
    return out


def strongly_connected(v: Vts) -> bool:
    adj = _adjacency(v.edges, undirected=False)
    radj = _adjacency([EdgeSlot(s.dst, s.src, s.slot) for s in v.edges], undirected=False)
    n = v.num_nodes
    return len(_reachable(n, adj, 0)) == n and len(_reachable(n, radj, 0)) == n


# -- checks -------------------------------------------------------------------

def check_well_structured(v: Vts) -> CheckResult:
    res = CheckResult("well_structured")
    for msg in v.structural_violations():
        where, _, why = msg.partition(": ")
        res.fail(where, why)
    return res


def check_stability(v: Vts) -> CheckResult:
    """Every molecule carried by an edge can travel back to the edge's source."""
    res = CheckResult("stable")
    by_molecule: dict[int, dict[int, set[int]]] = {}
    for s, e in v.edges.items():
        for m in e.molecules:
            by_molecule.setdefault(m, {}).setdefault(s.src, set()).add(s.dst)
    for s, e in v.edges.items():
        for m in sorted(e.molecules):
            if s.src not in _reachable(v.num_nodes, by_molecule[m], s.dst):
                res.fail(f"edge {s} molecule {m}",
                         f"no {m}-path from node {s.dst} back to node {s.src}")
    return res


def check_well_fused(v: Vts) -> CheckResult:
    res = CheckResult("well_fused")
    for s, e in v.edges.items():
        fusing = [(m, m2) for m in sorted(e.active) for m2 in sorted(v.node_active[s.dst])
                  if (m, m2) in v.pairing]
        if not fusing:
            res.fail(f"edge {s}", f"no active molecule pairs with an active molecule on node {s.dst}")
        for m in sorted(e.active):
            for node in range(v.num_nodes):
                if node == s.dst:
                    continue
                clash = sorted(m2 for m2 in v.node_active[node] if (m, m2) in v.pairing)
                if clash:
                    res.fail(f"edge {s} molecule {m}",
                             f"could also fuse with node {node} via active molecule {clash[0]}")
    return res


def pairing_inhibition_holds(v: Vts, labels: frozenset[int], active: frozenset[int], m: int,
                             reading: InhibitionReading | str = InhibitionReading.MUTUAL) -> bool:
    """Whether molecule m obeys the pairing-inhibition rule at one edge."""
    reading = InhibitionReading(reading)
    if reading is InhibitionReading.MUTUAL:
        blocked = any(m2 != m and m2 in labels and ((m, m2) in v.pairing or (m2, m) in v.pairing)
                      for m2 in range(v.num_molecules))
        return (m in active) == (m in labels and not blocked)
    partners = [m2 for m2 in range(v.num_molecules) if m2 != m and (m, m2) in v.pairing]
    lhs = m not in labels or all(m2 in labels for m2 in partners)
    rhs = m not in active and all(m2 not in active for m2 in partners)
    return lhs == rhs


def check_activity_rules(v: Vts, var: Variant | str,
                         inhibition: InhibitionReading | str = InhibitionReading.MUTUAL) -> CheckResult:
    var = as_variant(var)
    res = CheckResult(f"activity_rules({var.name})")
    if var.node_rule is NodeRule.ALL_ACTIVE:
        for i, (lab, act) in enumerate(zip(v.node_labels, v.node_active)):
            for m in sorted(lab ^ act):
                res.fail(f"node {i} molecule {m}", "activity differs from presence")
    else:
        for i, (lab, act) in enumerate(zip(v.node_labels, v.node_active)):
            for m in sorted(act - lab):
                res.fail(f"node {i} molecule {m}", "active but not present")
        try:
            node_activity_table(v)
        except ActivityConflict as exc:
            res.fail(f"{exc.sites[0]} / {exc.sites[1]}", str(exc))

    if var.edge_rule is EdgeRule.ALL_ACTIVE:
        for s, e in v.edges.items():
            for m in sorted(e.molecules ^ e.active):
                res.fail(f"edge {s} molecule {m}", "activity differs from presence")
    elif var.edge_rule is EdgeRule.BOOLEAN_FN:
        for s, e in v.edges.items():
            for m in sorted(e.active - e.molecules):
                res.fail(f"edge {s} molecule {m}", "active but not present")
        try:
            edge_activity_table(v)
        except ActivityConflict as exc:
            res.fail(f"{exc.sites[0]} / {exc.sites[1]}", str(exc))
    else:
        for s, e in v.edges.items():
            for m in range(v.num_molecules):
                if not pairing_inhibition_holds(v, e.molecules, e.active, m, inhibition):
                    res.fail(f"edge {s} molecule {m}", "pairing-inhibition rule violated")
    return res


def check_connected(v: Vts) -> CheckResult:
    res = CheckResult("connected")
    comps = components(v)
    if len(comps) > 1:
        res.fail(f"nodes {min(comps[0])} and {min(comps[1])}", "graph is not connected")
    return res


def check_drop_disconnects(v: Vts, dropped, mode: DropSemantics | str = DropSemantics.UNDIRECTED,
                           pair: tuple[int, int] | None = None) -> CheckResult:
    """Removing ``dropped`` separates some pair of nodes.

    When ``pair`` is given, that particular pair must be separated.
    """
    mode = DropSemantics(mode) if isinstance(mode, str) else mode
    res = CheckResult("drop_disconnects")
    dropped = set(dropped)
    extra = sorted(dropped - set(v.edges))
    if extra:
        res.fail(f"edge {extra[0]}", "dropped edge is not in the VTS")
        return res
    rest = [s for s in v.edges if s not in dropped]
    adj = _adjacency(rest, undirected=mode is DropSemantics.UNDIRECTED)
    reach = [_reachable(v.num_nodes, adj, i) for i in range(v.num_nodes)]

    def separated(i, j):
        return j not in reach[i] and i not in reach[j]

    if pair is not None:
        i, j = pair
        if not separated(i, j):
            res.fail(f"pair ({i},{j})", "claimed disconnected but reachable after dropping")
        return res
    if not any(separated(i, j) for i in range(v.num_nodes) for j in range(i + 1, v.num_nodes)):
        res.fail("residual graph", f"every pair stays reachable after dropping {len(dropped)} edges")
    return res


def edge_connectivity(v: Vts) -> int:
    """Undirected edge connectivity of the multigraph (parallel edges count)."""
    nu = v.num_nodes
    if nu < 2:
        raise ValueError("edge connectivity needs at least two nodes")
    cap = np.zeros((nu, nu), dtype=np.int32)
    for s in v.edges:
        if s.src != s.dst:
            cap[s.src, s.dst] += 1
            cap[s.dst, s.src] += 1
    graph = csr_matrix(cap)
    return min(int(maximum_flow(graph, 0, t).flow_value) for t in range(1, nu))


# -- aggregate ----------------------------------------------------------------

@dataclass
class VerifierReport:
    checks: dict[str, CheckResult]
    connectivity: int | None = None
    strongly_connected: bool | None = None
    bound: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, c in self.checks.items() if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": {
                k: {"status": "pass" if c.passed else "fail",
                    "failures": [{"location": f.location, "explanation": f.explanation}
                                 for f in c.failures]}
                for k, c in self.checks.items()
            },
            "connectivity_value": self.connectivity,
            "strongly_connected": self.strongly_connected,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def render(self) -> str:
        lines = []
        for k, c in self.checks.items():
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {k}")
            lines.extend(f"      {f}" for f in c.failures)
        if self.connectivity is not None:
            lines.append(f"      edge connectivity = {self.connectivity}"
                         f" (strongly connected: {'yes' if self.strongly_connected else 'no'})")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def verify_vts(v: Vts, var: Variant | str, require_connected: bool = True,
               inhibition: InhibitionReading | str = InhibitionReading.MUTUAL) -> VerifierReport:
    checks = {
        "well_structured": check_well_structured(v),
        "stable": check_stability(v),
        "well_fused": check_well_fused(v),
        "activity_rules": check_activity_rules(v, var, inhibition),
    }
    if require_connected:
        checks["connected"] = check_connected(v)
    conn = edge_connectivity(v) if v.num_nodes >= 2 else None
    return VerifierReport(checks, conn, strongly_connected(v))


def verify_witness(w, cfg: SearchConfig) -> VerifierReport:
    """All checks that apply to a witness decoded under ``cfg``."""
    v = w.vts
    report = verify_vts(v, cfg.variant, cfg.require_connected, cfg.inhibition)
    if cfg.connectivity_query:
        drop = check_drop_disconnects(v, w.dropped, cfg.drop_semantics, w.disconnected_pair)
        if len(w.dropped) != cfg.drop:
            drop.fail("dropped set", f"{len(w.dropped)} edges dropped, expected {cfg.drop}")
        report.checks["drop_disconnects"] = drop
        value = CheckResult("connectivity_value", value=report.connectivity)
        if cfg.drop_semantics is DropSemantics.UNDIRECTED and report.connectivity > cfg.drop:
            value.fail("graph", f"edge connectivity {report.connectivity} exceeds drop {cfg.drop}")
        report.checks["connectivity_value"] = value
        report.bound = cfg.drop
    return report
