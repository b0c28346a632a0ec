"""Exhaustive search for tiny instances, independent of the CNF encoding.

Used as an oracle: its feasibility verdict must agree with the solver on
every configuration within the budget (``nu <= 3``, ``mu <= 4``, one edge
per ordered node pair).

Activity under a Boolean-function rule only has to be consistent across
sites with equal labels, so the search enumerates activity bits per label
class instead of enumerating functions.  Only the set of partners an edge's
active molecules reach matters for fusion, so one edge activity per distinct
partner set is enough.

Unless ``exhaustive_activity`` is set, two shortcuts apply.  With all-active
nodes each edge label class is independent and is solved on its own.  Under
a Boolean node rule, once edge activities are fixed, each edge needs some
partner active on its destination and none on any other node; taking every
node's activity as large as the second condition allows is then optimal, so
only that choice is checked.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import (DropSemantics, Edge, EdgeRule, EdgeSlot, InhibitionReading, NodeRule,
                    SearchConfig, Vts, same_class)

MAX_NODES, MAX_MOLECULES, MAX_PARALLEL = 3, 4, 1


class BoundsError(ValueError):
    pass


@dataclass(frozen=True)
class BruteForceResult:
    feasible: bool
    vts: Vts | None = None
    dropped: frozenset[EdgeSlot] = frozenset()


def _bits(mask: int) -> list[int]:
    return [m for m in range(mask.bit_length()) if mask >> m & 1]


def _submasks(mask: int, nonempty: bool = False):
    """All submasks of ``mask`` in increasing order."""
    out = []
    sub = 0
    while True:
        out.append(sub)
        if sub == mask:
            break
        sub = (sub - mask) & mask
    return out[1:] if nonempty else out


def _reach(num_nodes: int, arcs, start: int) -> int:
    seen = 1 << start
    todo = [start]
    while todo:
        x = todo.pop()
        for a, b in arcs:
            if a == x and not seen >> b & 1:
                seen |= 1 << b
                todo.append(b)
    return seen


def _connected(num_nodes: int, pairs) -> bool:
    arcs = [(i, j) for i, j in pairs] + [(j, i) for i, j in pairs]
    return _reach(num_nodes, arcs, 0) == (1 << num_nodes) - 1


def _stable(num_nodes: int, edges: dict) -> bool:
    for (i, j), lab in edges.items():
        for m in _bits(lab):
            arcs = [(x, y) for (x, y), l2 in edges.items() if l2 >> m & 1]
            if not _reach(num_nodes, arcs, j) >> i & 1:
                return False
    return True


def _drop_sets(num_nodes: int, edges: dict, drop: int, mode: DropSemantics):
    keys = sorted(edges)
    for gone in itertools.combinations(keys, drop):
        rest = [k for k in keys if k not in gone]
        arcs = list(rest)
        if mode is DropSemantics.UNDIRECTED:
            arcs += [(j, i) for i, j in rest]
        reach = [_reach(num_nodes, arcs, i) for i in range(num_nodes)]
        if any(not reach[i] >> j & 1 and not reach[j] >> i & 1
               for i in range(num_nodes) for j in range(i + 1, num_nodes)):
            yield gone


def _structures(cfg: SearchConfig, labels: tuple[int, ...]):
    """Edge label maps (node pair -> molecule mask) that are connected and stable."""
    nu = cfg.num_nodes
    pairs = [(i, j) for i in range(nu) for j in range(nu) if i != j]
    options = [[0] + _submasks(labels[i] & labels[j], nonempty=True) for i, j in pairs]
    for choice in itertools.product(*options):
        edges = {pr: lab for pr, lab in zip(pairs, choice) if lab}
        if cfg.require_connected and not _connected(nu, list(edges)):
            continue
        if _stable(nu, edges):
            yield edges


def _aep_ok(lab: int, act: int, partners: list[int], mu: int) -> bool:
    for m in range(mu):
        pm = partners[m] & ~(1 << m)
        lhs = not lab >> m & 1 or (pm & lab) == pm
        rhs = not act >> m & 1 and not (pm & act)
        if lhs != rhs:
            return False
    return True


def _mutual(lab: int, partners: list[int], mu: int) -> int:
    act = 0
    for m in _bits(lab):
        rivals = partners[m]
        for m2 in range(mu):
            if partners[m2] >> m & 1:
                rivals |= 1 << m2
        if not rivals & lab & ~(1 << m):
            act |= 1 << m
    return act


def _edge_candidates(rule: EdgeRule, lab: int, partners: list[int], mu: int,
                     reading: InhibitionReading = InhibitionReading.MUTUAL) -> list[int]:
    if rule is EdgeRule.ALL_ACTIVE:
        return [lab]
    if rule is EdgeRule.BOOLEAN_FN:
        # only the set of reachable partners matters for fusion, so keep
        # one activity per distinct image
        seen, out = set(), []
        for act in _submasks(lab):
            img = _image(act, partners)
            if img not in seen:
                seen.add(img)
                out.append(act)
        return out
    if reading is InhibitionReading.MUTUAL:
        return [_mutual(lab, partners, mu)]
    return [act for act in _submasks(lab) if _aep_ok(lab, act, partners, mu)]


def _image(act: int, partners: list[int]) -> int:
    out = 0
    for m in _bits(act):
        out |= partners[m]
    return out


def _fused(edges, acts, node_act, partners, nu) -> bool:
    for (i, j), act in zip(edges, acts):
        img = _image(act, partners)
        if not img & node_act[j]:
            return False
        if any(img & node_act[k] for k in range(nu) if k != j):
            return False
    return True


def _node_activities(cfg, labels, edges, acts, partners, exhaustive):
    nu = cfg.num_nodes
    if cfg.variant.node_rule is NodeRule.ALL_ACTIVE:
        yield tuple(labels)
        return
    groups: dict[int, list[int]] = {}
    for k, lab in enumerate(labels):
        groups.setdefault(lab, []).append(k)
    if exhaustive:
        keys = list(groups)
        for choice in itertools.product(*(_submasks(lab) for lab in keys)):
            act = [0] * nu
            for lab, c in zip(keys, choice):
                for k in groups[lab]:
                    act[k] = c
            yield tuple(act)
        return
    imgs = [_image(a, partners) for a in acts]
    act = [0] * nu
    for lab, members in groups.items():
        common = lab
        for k in members:
            for (i, j), img in zip(edges, imgs):
                if j != k:
                    common &= ~img
        for k in members:
            act[k] = common
    yield tuple(act)


def _check_bounds(cfg: SearchConfig):
    if (cfg.num_nodes > MAX_NODES or cfg.num_molecules > MAX_MOLECULES
            or cfg.max_parallel != MAX_PARALLEL):
        raise BoundsError(f"brute force is limited to nodes <= {MAX_NODES}, "
                          f"molecules <= {MAX_MOLECULES}, max_parallel == {MAX_PARALLEL}")


def brute_force_search(cfg: SearchConfig, exhaustive_activity: bool = False) -> BruteForceResult:
    _check_bounds(cfg)
    nu, mu = cfg.num_nodes, cfg.num_molecules
    cross = [(m, m2) for m in range(mu) for m2 in range(mu) if not same_class(m, m2, mu)]
    rule = cfg.variant.edge_rule
    # permuting nodes preserves every property, so labels may be sorted
    for labels in itertools.combinations_with_replacement(range(1 << mu), nu):
        for edges in _structures(cfg, labels):
            drops = [()]
            if cfg.connectivity_query:
                drops = list(itertools.islice(_drop_sets(nu, edges, cfg.drop, cfg.drop_semantics), 1))
                if not drops:
                    continue
            keys = sorted(edges)
            for pmask in range(1 << len(cross)):
                pairing = [pr for k, pr in enumerate(cross) if pmask >> k & 1]
                partners = [0] * mu
                for m, m2 in pairing:
                    partners[m] |= 1 << m2
                found = _search_activity(cfg, labels, keys, edges, partners, rule, exhaustive_activity)
                if found is not None:
                    node_act, acts = found
                    vts = _to_vts(cfg, labels, node_act, keys, edges, acts, pairing)
                    dropped = frozenset(EdgeSlot(i, j, 0) for i, j in drops[0])
                    return BruteForceResult(True, vts, dropped)
    return BruteForceResult(False)


def _fits(act, targets, node_act, partners, nu) -> bool:
    img = _image(act, partners)
    return all(img & node_act[j] and not any(img & node_act[k] for k in range(nu) if k != j)
               for j in targets)


def _search_activity(cfg, labels, keys, edges, partners, rule, exhaustive):
    mu, nu = cfg.num_molecules, cfg.num_nodes
    if cfg.variant.node_rule is NodeRule.ALL_ACTIVE and not exhaustive:
        # node activity is fixed, so each group of equally labelled edges
        # (each single edge unless the edge rule is a Boolean function)
        # can pick its activity on its own
        node_act = tuple(labels)
        groups: dict = {}
        for k in keys:
            groups.setdefault(edges[k] if rule is EdgeRule.BOOLEAN_FN else k, []).append(k)
        chosen = {}
        for key, members in groups.items():
            lab = edges[members[0]]
            targets = [j for _, j in members]
            for act in _edge_candidates(rule, lab, partners, mu, cfg.inhibition):
                if _fits(act, targets, node_act, partners, nu):
                    chosen[key] = act
                    break
            else:
                return None
        acts = tuple(chosen[edges[k] if rule is EdgeRule.BOOLEAN_FN else k] for k in keys)
        return node_act, acts
    if rule is EdgeRule.BOOLEAN_FN:
        # one shared activity per distinct edge label
        groups = sorted({edges[k] for k in keys})
        per_group = [_edge_candidates(rule, lab, partners, mu) for lab in groups]
        combos = (tuple(dict(zip(groups, c))[edges[k]] for k in keys)
                  for c in itertools.product(*per_group))
    else:
        combos = itertools.product(*(_edge_candidates(rule, edges[k], partners, mu, cfg.inhibition)
                                     for k in keys))
    for acts in combos:
        for node_act in _node_activities(cfg, labels, keys, acts, partners, exhaustive):
            if _fused(keys, acts, node_act, partners, nu):
                return node_act, acts
    return None


def _to_vts(cfg, labels, node_act, keys, edges, acts, pairing) -> Vts:
    return Vts(
        cfg.num_nodes, cfg.num_molecules,
        tuple(frozenset(_bits(l)) for l in labels),
        tuple(frozenset(_bits(a)) for a in node_act),
        {EdgeSlot(i, j, 0): Edge(frozenset(_bits(edges[(i, j)])), frozenset(_bits(a)))
         for (i, j), a in zip(keys, acts)},
        frozenset(pairing),
    )
