"""Vesicle traffic systems as labeled directed multigraphs.

A VTS has ``num_nodes`` compartments, ``num_molecules`` molecule types, a set
of edges (vesicles) addressed by ``(src, dst, slot)``, each carrying a
non-empty molecule set, a pairing relation between molecules, and activity
assignments on nodes and edges.

Molecules ``[0, ceil(mu/2))`` form the Q-SNARE class and the remaining
indices the R-SNARE class.  For odd ``mu`` the Q class is the larger one.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class VtsError(ValueError):
    """Malformed or invalid VTS document or value."""


class NodeRule(enum.Enum):
    ALL_ACTIVE = "AllActive"
    BOOLEAN_FN = "BooleanFn"


class EdgeRule(enum.Enum):
    ALL_ACTIVE = "AllActive"
    BOOLEAN_FN = "BooleanFn"
    PAIRING_INHIBITION = "PairingInhibition"


class DropSemantics(enum.Enum):
    DIRECTED = "directed"
    UNDIRECTED = "undirected"


class InhibitionReading(enum.Enum):
    """How the pairing-inhibition edge rule is read.

    ``MUTUAL``: a molecule on an edge is active iff it is present and no
    molecule it pairs with (in either direction) is present on the same edge.
    ``PRINTED``: the literal biconditional
    ``[el[m] => AND_m' (p[m][m'] => el[m'])] <=> [~b[m] AND AND_{p[m][m']} ~b[m']]``.
    """

    MUTUAL = "mutual"
    PRINTED = "printed"


@dataclass(frozen=True)
class Variant:
    name: str
    node_rule: NodeRule
    edge_rule: EdgeRule

    def __str__(self) -> str:
        return self.name


VARIANTS: dict[str, Variant] = {
    "A": Variant("A", NodeRule.ALL_ACTIVE, EdgeRule.ALL_ACTIVE),
    "B": Variant("B", NodeRule.BOOLEAN_FN, EdgeRule.ALL_ACTIVE),
    "C": Variant("C", NodeRule.ALL_ACTIVE, EdgeRule.BOOLEAN_FN),
    "D": Variant("D", NodeRule.BOOLEAN_FN, EdgeRule.BOOLEAN_FN),
    "E": Variant("E", NodeRule.ALL_ACTIVE, EdgeRule.PAIRING_INHIBITION),
    "F": Variant("F", NodeRule.BOOLEAN_FN, EdgeRule.PAIRING_INHIBITION),
}


def variant(name: str | Variant) -> Variant:
    if isinstance(name, Variant):
        return name
    try:
        return VARIANTS[name.upper()]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}; expected one of A-F") from None


def q_class_size(num_molecules: int) -> int:
    return (num_molecules + 1) // 2


def same_class(m1: int, m2: int, num_molecules: int) -> bool:
    half = q_class_size(num_molecules)
    return (m1 < half) == (m2 < half)


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one search query.

    ``drop`` is the number of edges removed by the connectivity query, i.e.
    ``k - 1`` when asking whether a graph fails to be k-connected.
    ``require_connected`` demands that the undropped graph is connected.
    ``symmetry_breaking`` keeps only canonical orderings of nodes, molecules
    and parallel slots; it never changes satisfiability, but a particular
    graph may be excluded in favour of a relabelled copy.
    ``cut_side`` (undirected queries only) fixes node 0's residual side to
    nodes ``0 .. cut_side-1``.
    """

    num_nodes: int
    num_molecules: int
    max_parallel: int = 2
    drop: int = 0
    variant: Variant = VARIANTS["A"]
    drop_semantics: DropSemantics = DropSemantics.UNDIRECTED
    connectivity_query: bool = False
    time_limit: float | None = None
    require_connected: bool = True
    inhibition: InhibitionReading = InhibitionReading.MUTUAL
    symmetry_breaking: bool = True
    cut_side: int | None = None

    def __post_init__(self):
        if isinstance(self.variant, str):
            object.__setattr__(self, "variant", variant(self.variant))
        if isinstance(self.drop_semantics, str):
            object.__setattr__(self, "drop_semantics", DropSemantics(self.drop_semantics))
        if isinstance(self.inhibition, str):
            object.__setattr__(self, "inhibition", InhibitionReading(self.inhibition))
        if self.num_nodes < 2:
            raise ValueError("num_nodes must be >= 2")
        if self.num_molecules < 2:
            raise ValueError("num_molecules must be >= 2")
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")
        if self.drop < 0:
            raise ValueError("drop must be >= 0")
        if self.connectivity_query and self.drop == 0:
            raise ValueError("a connectivity query needs drop >= 1")
        if self.cut_side is not None:
            if not self.connectivity_query or self.drop_semantics is not DropSemantics.UNDIRECTED:
                raise ValueError("cut_side needs an undirected connectivity query")
            if not 1 <= self.cut_side < self.num_nodes:
                raise ValueError("cut_side must be in [1, num_nodes)")

    @classmethod
    def default(cls, variant_name: str, num_nodes: int, **kw) -> "SearchConfig":
        """Experimental defaults: mu = 2 nu (2 nu + 1 for nu = 2), two parallel edges."""
        kw.setdefault("num_molecules", default_molecules(num_nodes))
        kw.setdefault("max_parallel", 2)
        if kw.get("drop", 0) > 0:
            kw.setdefault("connectivity_query", True)
        return cls(num_nodes=num_nodes, variant=variant(variant_name), **kw)


def default_molecules(num_nodes: int) -> int:
    return 2 * num_nodes + 1 if num_nodes == 2 else 2 * num_nodes


@dataclass(frozen=True, order=True)
class EdgeSlot:
    src: int
    dst: int
    slot: int = 0

    def __str__(self) -> str:
        return f"({self.src},{self.dst},{self.slot})"


@dataclass(frozen=True)
class Edge:
    molecules: frozenset[int]
    active: frozenset[int] = frozenset()


@dataclass(frozen=True)
class Vts:
    """An immutable VTS value.

    The constructor only checks index ranges; structural invariants are
    reported by :meth:`structural_violations` so the verifier can inspect
    broken instances.
    """

    num_nodes: int
    num_molecules: int
    node_labels: tuple[frozenset[int], ...]
    node_active: tuple[frozenset[int], ...]
    edges: Mapping[EdgeSlot, Edge] = field(default_factory=dict)
    pairing: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "node_labels", tuple(frozenset(s) for s in self.node_labels))
        object.__setattr__(self, "node_active", tuple(frozenset(s) for s in self.node_active))
        object.__setattr__(self, "pairing", frozenset(tuple(p) for p in self.pairing))
        # sorted for a deterministic iteration order
        object.__setattr__(self, "edges", dict(sorted(self.edges.items())))
        self._check_ranges()

    def _check_ranges(self):
        nu, mu = self.num_nodes, self.num_molecules
        if len(self.node_labels) != nu or len(self.node_active) != nu:
            raise VtsError(f"expected {nu} node label sets")
        mols = range(mu)
        for i, (lab, act) in enumerate(zip(self.node_labels, self.node_active)):
            bad = sorted(m for m in lab | act if m not in mols)
            if bad:
                raise VtsError(f"node {i}: molecule index {bad[0]} out of range [0, {mu})")
        for s, e in self.edges.items():
            if not (0 <= s.src < nu and 0 <= s.dst < nu) or s.slot < 0:
                raise VtsError(f"edge {s}: node index out of range [0, {nu})")
            bad = sorted(m for m in e.molecules | e.active if m not in mols)
            if bad:
                raise VtsError(f"edge {s}: molecule index {bad[0]} out of range [0, {mu})")
        for q, r in self.pairing:
            if q not in mols or r not in mols:
                raise VtsError(f"pairing ({q},{r}): molecule index out of range [0, {mu})")

    def __eq__(self, other):
        if not isinstance(other, Vts):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and self.num_molecules == other.num_molecules
            and self.node_labels == other.node_labels
            and self.node_active == other.node_active
            and dict(self.edges) == dict(other.edges)
            and self.pairing == other.pairing
        )

    def __hash__(self):
        return hash((self.num_nodes, self.num_molecules, self.node_labels,
                     self.node_active, tuple(self.edges.items()), self.pairing))

    @property
    def max_slot(self) -> int:
        return max((s.slot for s in self.edges), default=-1)

    def pairs_with(self, m: int, m2: int) -> bool:
        return (m, m2) in self.pairing

    def structural_violations(self) -> list[str]:
        """List every broken structural constraint, named by its family."""
        out = []
        for s, e in self.edges.items():
            if not e.molecules:
                out.append(f"V1 at edge {s}: edge carries no molecule")
            for m in sorted(e.active - e.molecules):
                out.append(f"V2 at edge {s} molecule {m}: active but not present")
            for m in sorted(e.molecules - self.node_labels[s.src]):
                out.append(f"V4 at edge {s} molecule {m}: not on source node {s.src}")
            for m in sorted(e.molecules - self.node_labels[s.dst]):
                out.append(f"V4 at edge {s} molecule {m}: not on destination node {s.dst}")
            if s.src == s.dst:
                out.append(f"V5 at edge {s}: self loop")
        for i, (lab, act) in enumerate(zip(self.node_labels, self.node_active)):
            for m in sorted(act - lab):
                out.append(f"V3 at node {i} molecule {m}: active but not present")
        for q, r in sorted(self.pairing):
            if same_class(q, r, self.num_molecules):
                out.append(f"V6 at pairing ({q},{r}): molecules of the same class")
        return out

    def with_edges(self, edges: Mapping[EdgeSlot, Edge]) -> "Vts":
        return Vts(self.num_nodes, self.num_molecules, self.node_labels,
                   self.node_active, edges, self.pairing)

    def without(self, slots: Iterable[EdgeSlot]) -> "Vts":
        drop = set(slots)
        return self.with_edges({s: e for s, e in self.edges.items() if s not in drop})


# -- serialization ------------------------------------------------------------

def _int_list(value, what: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise VtsError(f"{what}: expected a list of integers")
    return value


def vts_to_dict(v: Vts) -> dict:
    return {
        "num_molecules": v.num_molecules,
        "nodes": [
            {"id": i, "molecules": sorted(lab), "active": sorted(act)}
            for i, (lab, act) in enumerate(zip(v.node_labels, v.node_active))
        ],
        "edges": [
            {"src": s.src, "dst": s.dst, "slot": s.slot,
             "molecules": sorted(e.molecules), "active": sorted(e.active)}
            for s, e in v.edges.items()
        ],
        "pairing": [list(p) for p in sorted(v.pairing)],
    }


def vts_from_dict(doc: Mapping, strict: bool = True) -> Vts:
    if not isinstance(doc, Mapping):
        raise VtsError("document must be a mapping")
    for key in ("num_molecules", "nodes", "edges", "pairing"):
        if key not in doc:
            raise VtsError(f"missing field {key!r}")
    mu = doc["num_molecules"]
    if not isinstance(mu, int) or mu < 0:
        raise VtsError("num_molecules must be a non-negative integer")
    nodes = doc["nodes"]
    if not isinstance(nodes, list):
        raise VtsError("nodes: expected a list")
    ids = []
    for k, nd in enumerate(nodes):
        if not isinstance(nd, Mapping) or "id" not in nd or "molecules" not in nd:
            raise VtsError(f"nodes[{k}]: expected {{id, molecules, active}}")
        ids.append(nd["id"])
    if sorted(ids) != list(range(len(nodes))):
        raise VtsError("node ids must be exactly 0..n-1")
    labels: list[frozenset[int]] = [frozenset()] * len(nodes)
    active: list[frozenset[int]] = [frozenset()] * len(nodes)
    for nd in nodes:
        i = nd["id"]
        labels[i] = frozenset(_int_list(nd["molecules"], f"node {i} molecules"))
        active[i] = frozenset(_int_list(nd.get("active", []), f"node {i} active"))

    edges: dict[EdgeSlot, Edge] = {}
    if not isinstance(doc["edges"], list):
        raise VtsError("edges: expected a list")
    for k, ed in enumerate(doc["edges"]):
        if not isinstance(ed, Mapping) or not all(x in ed for x in ("src", "dst", "molecules")):
            raise VtsError(f"edges[{k}]: expected {{src, dst, slot, molecules, active}}")
        s = EdgeSlot(ed["src"], ed["dst"], ed.get("slot", 0))
        if not all(isinstance(x, int) for x in (s.src, s.dst, s.slot)):
            raise VtsError(f"edges[{k}]: src, dst, slot must be integers")
        if s in edges:
            raise VtsError(f"duplicate edge slot {s}")
        edges[s] = Edge(frozenset(_int_list(ed["molecules"], f"edge {s} molecules")),
                        frozenset(_int_list(ed.get("active", []), f"edge {s} active")))

    pairing = []
    if not isinstance(doc["pairing"], list):
        raise VtsError("pairing: expected a list")
    for p in doc["pairing"]:
        p = _int_list(p, "pairing entry")
        if len(p) != 2:
            raise VtsError(f"pairing entry {p}: expected [q, r]")
        pairing.append(tuple(p))

    v = Vts(len(nodes), mu, tuple(labels), tuple(active), edges, frozenset(pairing))
    if strict:
        problems = v.structural_violations()
        if problems:
            raise VtsError("; ".join(problems))
    return v


def parse_vts(text: str, strict: bool = True) -> Vts:
    """Parse a VTS document (JSON text)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise VtsError(f"malformed document: {exc}") from exc
    return vts_from_dict(doc, strict=strict)


def emit_vts(v: Vts, extra: Mapping | None = None) -> str:
    doc = vts_to_dict(v)
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def reference_fixture() -> Vts:
    """Three compartments, eight molecules, six vesicles; 3-edge-connected."""
    labels = ({0, 1, 2, 3, 4}, {0, 1, 2, 3, 6}, {1, 2, 3, 5, 7})
    edges = {
        EdgeSlot(0, 1, 0): Edge(frozenset({0, 1}), frozenset({1})),
        EdgeSlot(0, 1, 1): Edge(frozenset({0, 1, 2, 3}), frozenset({0, 1})),
        EdgeSlot(1, 0, 0): Edge(frozenset({0, 1, 3}), frozenset({3})),
        EdgeSlot(1, 2, 0): Edge(frozenset({1, 2, 3}), frozenset({2})),
        EdgeSlot(2, 1, 0): Edge(frozenset({1, 3}), frozenset({1})),
        EdgeSlot(2, 0, 0): Edge(frozenset({2, 3}), frozenset({3})),
    }
    return Vts(3, 8, labels, labels, edges, frozenset({(1, 6), (2, 5), (3, 4)}))


# -- activity tables ----------------------------------------------------------

class ActivityConflict(VtsError):
    """Two sites with identical labels disagree on a molecule's activity."""

    def __init__(self, kind: str, molecule: int, site1, site2):
        self.kind, self.molecule, self.sites = kind, molecule, (site1, site2)
        super().__init__(f"{kind} activity of molecule {molecule} differs between "
                         f"{site1} and {site2} although their labels are equal")


@dataclass(frozen=True)
class ActivityTable:
    """Extensional activity function: per molecule, label set -> active."""

    kind: str  # "node" or "edge"
    entries: Mapping[int, Mapping[frozenset[int], bool]]

    def __call__(self, molecule: int, labels: frozenset[int]) -> bool:
        return self.entries[molecule][frozenset(labels)]

    @property
    def keys(self) -> set[frozenset[int]]:
        return {k for tbl in self.entries.values() for k in tbl}


def _build_table(kind, num_molecules, sites):
    entries: dict[int, dict[frozenset[int], bool]] = {m: {} for m in range(num_molecules)}
    seen: dict[frozenset[int], object] = {}
    for site, labels, active in sites:
        first = seen.setdefault(labels, site)
        for m in range(num_molecules):
            out = m in active
            prev = entries[m].setdefault(labels, out)
            if prev != out:
                raise ActivityConflict(kind, m, first, site)
    return ActivityTable(kind, entries)


def node_activity_table(v: Vts) -> ActivityTable:
    sites = [(f"node {i}", lab, act) for i, (lab, act) in enumerate(zip(v.node_labels, v.node_active))]
    return _build_table("node", v.num_molecules, sites)


def edge_activity_table(v: Vts) -> ActivityTable:
    sites = [(f"edge {s}", e.molecules, e.active) for s, e in v.edges.items()]
    return _build_table("edge", v.num_molecules, sites)
