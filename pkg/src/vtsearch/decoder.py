"""Turn satisfying assignments back into VTS witnesses, and VTSs into bits."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .encoder import VarMap
from .model import (ActivityTable, Edge, EdgeRule, EdgeSlot, NodeRule, SearchConfig,
                    Vts, VtsError, edge_activity_table, node_activity_table,
                    vts_from_dict, vts_to_dict)


class DecodeError(RuntimeError):
    """The assignment breaks a decoding invariant; points at an encoder bug."""


@dataclass(frozen=True)
class Witness:
    vts: Vts
    dropped: frozenset[EdgeSlot] = frozenset()
    disconnected_pair: tuple[int, int] | None = None
    node_table: ActivityTable | None = None
    edge_table: ActivityTable | None = None

    def to_document(self) -> dict:
        doc = vts_to_dict(self.vts)
        if self.dropped or self.disconnected_pair is not None:
            doc["witness"] = {
                "dropped": [[s.src, s.dst, s.slot] for s in sorted(self.dropped)],
                "disconnected_pair": list(self.disconnected_pair) if self.disconnected_pair else None,
            }
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2) + "\n"


def witness_from_document(doc: dict) -> Witness:
    """Read a VTS document with an optional ``witness`` block."""
    vts = vts_from_dict(doc)
    block = doc.get("witness") or {}
    dropped = set()
    for item in block.get("dropped", []):
        if not (isinstance(item, list) and len(item) == 3):
            raise VtsError(f"witness.dropped entry {item!r}: expected [src, dst, slot]")
        s = EdgeSlot(*item)
        if s not in vts.edges:
            raise VtsError(f"witness.dropped entry {s} is not an edge of the VTS")
        dropped.add(s)
    pair = block.get("disconnected_pair")
    if pair is not None:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise VtsError("witness.disconnected_pair: expected [i, j]")
        pair = (pair[0], pair[1])
    return Witness(vts, frozenset(dropped), pair)


def _bits(assignment, block: np.ndarray) -> np.ndarray:
    vals = np.asarray(assignment, dtype=bool)
    return vals[block]


def decode_witness(assignment, vm: VarMap, cfg: SearchConfig) -> Witness:
    nu, mu, pi = vm.num_nodes, vm.num_molecules, vm.max_parallel
    if len(assignment) <= vm.num_named:
        raise DecodeError("assignment does not cover every named variable")
    n = _bits(assignment, vm.blocks["n"])
    e = _bits(assignment, vm.blocks["e"])
    el = _bits(assignment, vm.blocks["el"])
    p = _bits(assignment, vm.blocks["p"])
    a = _bits(assignment, vm.blocks["a"])
    b = _bits(assignment, vm.blocks["b"])

    edges = {}
    for i in range(nu):
        for j in range(nu):
            for q in range(pi):
                labels = frozenset(np.flatnonzero(el[i, j, q]).tolist())
                active = frozenset(np.flatnonzero(b[i, j, q]).tolist())
                if not e[i, j, q]:
                    if labels or active:
                        m = min(labels | active)
                        raise DecodeError(f"el/b[{i}][{j}][{q}][{m}] set on an absent edge")
                    continue
                if i == j:
                    raise DecodeError(f"e[{i}][{i}][{q}] is a self loop")
                edges[EdgeSlot(i, j, q)] = Edge(labels, active)
    labels = tuple(frozenset(np.flatnonzero(n[i]).tolist()) for i in range(nu))
    active = tuple(frozenset(np.flatnonzero(a[i]).tolist()) for i in range(nu))
    pairing = frozenset((int(x), int(y)) for x, y in zip(*np.nonzero(p)))
    vts = Vts(nu, mu, labels, active, edges, pairing)
    problems = vts.structural_violations()
    if problems:
        raise DecodeError("decoded VTS is not well formed: " + "; ".join(problems))

    dropped: frozenset[EdgeSlot] = frozenset()
    pair = None
    if cfg.connectivity_query:
        d = _bits(assignment, vm.blocks["d"])
        dropped = frozenset(EdgeSlot(int(i), int(j), int(q)) for i, j, q in zip(*np.nonzero(d)))
        missing = [s for s in dropped if s not in edges]
        if missing:
            raise DecodeError(f"d{min(missing)} drops an absent edge")
        rp = _bits(assignment, vm.blocks["rp"])
        for i in range(nu):
            for j in range(i + 1, nu):
                if not rp[i, j] and not rp[j, i]:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            raise DecodeError("no pair (i, j) with rp[i][j] and rp[j][i] both false")
    w = Witness(vts, dropped, pair)
    node_table = edge_table = None
    if cfg.variant.node_rule is NodeRule.BOOLEAN_FN:
        node_table = node_activity_table(vts)
    if cfg.variant.edge_rule is EdgeRule.BOOLEAN_FN:
        edge_table = edge_activity_table(vts)
    return Witness(vts, dropped, pair, node_table, edge_table)


def extract_activity_tables(w: Witness | Vts) -> dict[str, ActivityTable]:
    """Node and edge activity tables keyed by observed label sets.

    Raises :class:`~vtsearch.model.ActivityConflict` when two sites with the
    same labels disagree, which a model of a Boolean-function encoding never
    allows.
    """
    vts = w.vts if isinstance(w, Witness) else w
    return {"node": node_activity_table(vts), "edge": edge_activity_table(vts)}


def named_assignment(vts: Vts, vm: VarMap, dropped=()) -> dict[int, bool]:
    """Values of the named n/e/el/p/a/b/d variables that describe ``vts``."""
    nu, mu, pi = vm.num_nodes, vm.num_molecules, vm.max_parallel
    if vts.num_nodes != nu or vts.num_molecules != mu or vts.max_slot >= pi:
        raise ValueError("VTS does not fit the variable map")
    out: dict[int, bool] = {}
    for i in range(nu):
        for m in range(mu):
            out[vm.n[i][m]] = m in vts.node_labels[i]
            out[vm.a[i][m]] = m in vts.node_active[i]
    for i in range(nu):
        for j in range(nu):
            for q in range(pi):
                edge = vts.edges.get(EdgeSlot(i, j, q))
                out[vm.e[i][j][q]] = edge is not None
                out[vm.d[i][j][q]] = EdgeSlot(i, j, q) in set(dropped)
                for m in range(mu):
                    out[vm.el[i][j][q][m]] = edge is not None and m in edge.molecules
                    out[vm.b[i][j][q][m]] = edge is not None and m in edge.active
    for x in range(mu):
        for y in range(mu):
            out[vm.p[x][y]] = (x, y) in vts.pairing
    return out
