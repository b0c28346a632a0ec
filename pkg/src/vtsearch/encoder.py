"""CNF encoding of the VTS search problem.

Every constraint family is a separate function returning a list of clauses,
so the clause count of each family can be audited.  Auxiliary variables
(Tseitin definitions, counter registers, base-connectivity layers) are
allocated from the :class:`VarMap` after all named variables.

Tseitin variables are defined only in the direction their occurrence needs
(Plaisted-Greenbaum) wherever that occurrence is pure; the pairing-inhibition
biconditional gets full definitions on both sides.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .model import DropSemantics, EdgeRule, InhibitionReading, NodeRule, SearchConfig, q_class_size, same_class

Clause = list[int]

# Upper bound on variable indices accepted by common DIMACS solvers.
MAX_VARS = 2**31 - 2


class EncodingError(ValueError):
    pass


class VarMap:
    """Named propositional variables and the auxiliary allocator.

    Named blocks are numpy index arrays, allocated in a fixed order:
    ``n, e, el, p, a, b, r, d, rp``.  ``r[i, j, m, l - 1]`` stands for an
    m-path from i to j of length at most ``l``, ``l`` in ``[1, nu]``.
    """

    BLOCKS = ("n", "e", "el", "p", "a", "b", "r", "d", "rp")

    def __init__(self, num_nodes: int, num_molecules: int, max_parallel: int):
        nu, mu, pi = num_nodes, num_molecules, max_parallel
        self.num_nodes, self.num_molecules, self.max_parallel = nu, mu, pi
        shapes = {
            "n": (nu, mu), "e": (nu, nu, pi), "el": (nu, nu, pi, mu), "p": (mu, mu),
            "a": (nu, mu), "b": (nu, nu, pi, mu), "r": (nu, nu, mu, nu),
            "d": (nu, nu, pi), "rp": (nu, nu),
        }
        total = sum(int(np.prod(s)) for s in shapes.values())
        if total > MAX_VARS:
            raise EncodingError(f"configuration needs {total} variables, more than {MAX_VARS}")
        self.blocks: dict[str, np.ndarray] = {}
        start = 1
        for name in self.BLOCKS:
            size = int(np.prod(shapes[name]))
            self.blocks[name] = np.arange(start, start + size, dtype=np.int64).reshape(shapes[name])
            start += size
        self.num_named = start - 1
        self.top = self.num_named
        self._aux: list[tuple[int, int, str]] = []
        # nested lists are much faster to index from Python than numpy arrays
        for name, arr in self.blocks.items():
            setattr(self, name, arr.tolist())

    def new_vars(self, count: int, tag: str) -> list[int]:
        if self.top + count > MAX_VARS:
            raise EncodingError("variable index space exhausted")
        first = self.top + 1
        self.top += count
        if self._aux and self._aux[-1][2] == tag and self._aux[-1][1] == first - 1:
            lo, _, _ = self._aux[-1]
            self._aux[-1] = (lo, self.top, tag)
        else:
            self._aux.append((first, self.top, tag))
        return list(range(first, self.top + 1))

    def new_var(self, tag: str) -> int:
        return self.new_vars(1, tag)[0]

    def name(self, var: int) -> str:
        if var <= self.num_named:
            for block, arr in self.blocks.items():
                lo = int(arr.flat[0])
                if lo <= var < lo + arr.size:
                    idx = np.unravel_index(var - lo, arr.shape)
                    if block == "r":
                        idx = idx[:3] + (idx[3] + 1,)
                    return block + "".join(f"[{int(k)}]" for k in idx)
        for lo, hi, tag in self._aux:
            if lo <= var <= hi:
                return f"{tag}#{var - lo}"
        raise KeyError(var)

    def named_items(self):
        """Yield ``(name, var)`` for every named variable in index order."""
        for var in range(1, self.num_named + 1):
            yield self.name(var), var

    def aux_ranges(self) -> list[tuple[int, int, str]]:
        return list(self._aux)

    def non_self_slots(self):
        nu, pi = self.num_nodes, self.max_parallel
        return [(i, j, q) for i in range(nu) for j in range(nu) if i != j for q in range(pi)]


@dataclass
class Cnf:
    num_vars: int
    clauses: list[Clause]

    def check(self) -> None:
        for k, cl in enumerate(self.clauses):
            for lit in cl:
                if not isinstance(lit, int) or lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {k}: bad literal {lit!r}")

    def evaluate(self, assignment) -> int | None:
        """Index of the first clause falsified by ``assignment`` or None.

        ``assignment`` maps variable -> bool (a dict or a sequence indexed by
        variable, element 0 unused).
        """
        for k, cl in enumerate(self.clauses):
            if not any(assignment[abs(l)] == (l > 0) for l in cl):
                return k
        return None

    def to_dimacs(self, comments: list[str] | None = None) -> str:
        lines = [f"c {c}" for c in comments or []]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, cl)) + " 0" for cl in self.clauses)
        return "\n".join(lines) + "\n"


@dataclass
class Encoding:
    varmap: VarMap
    cnf: Cnf
    config: SearchConfig
    family_counts: dict[str, int] = field(default_factory=dict)

    def dimacs_header(self) -> list[str]:
        cfg = self.config
        head = [
            f"vts search variant={cfg.variant.name} nodes={cfg.num_nodes} "
            f"molecules={cfg.num_molecules} max_parallel={cfg.max_parallel} "
            f"drop={cfg.drop if cfg.connectivity_query else 0} "
            f"semantics={cfg.drop_semantics.value} connected={int(cfg.require_connected)} "
            f"inhibition={cfg.inhibition.value} symmetry={int(cfg.symmetry_breaking)}"
            + ("" if cfg.cut_side is None else f" cut_side={cfg.cut_side}"),
        ]
        head += [f"family {k} = {v}" for k, v in self.family_counts.items()]
        head += [f"var {name} = {var}" for name, var in self.varmap.named_items()]
        head += [f"aux {tag} = {lo}..{hi}" for lo, hi, tag in self.varmap.aux_ranges()]
        return head

    def to_dimacs(self) -> str:
        return self.cnf.to_dimacs(self.dimacs_header())


def allocate_variables(cfg: SearchConfig) -> VarMap:
    return VarMap(cfg.num_nodes, cfg.num_molecules, cfg.max_parallel)


def _cross_pairs(mu: int):
    """Molecule pairs from different classes; same-class pairing is fixed false."""
    return [(m, m2) for m in range(mu) for m2 in range(mu) if not same_class(m, m2, mu)]


# -- structure ----------------------------------------------------------------

def encode_structure(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    nu, mu, pi = cfg.num_nodes, cfg.num_molecules, cfg.max_parallel
    n, e, el, p, a, b = vm.n, vm.e, vm.el, vm.p, vm.a, vm.b
    out: list[Clause] = []
    for i, j, q in itertools.product(range(nu), range(nu), range(pi)):
        labels = el[i][j][q]
        for m in range(mu):
            out.append([-labels[m], e[i][j][q]])                # V1
            out.append([-b[i][j][q][m], labels[m]])             # V2
            out.append([-labels[m], n[i][m]])                   # V4
            out.append([-labels[m], n[j][m]])
        # an existing edge carries at least one molecule
        out.append([-e[i][j][q]] + labels)
    for i, m in itertools.product(range(nu), range(mu)):
        out.append([-a[i][m], n[i][m]])                         # V3
    for i, q in itertools.product(range(nu), range(pi)):
        out.append([-e[i][i][q]])                               # V5
    for x, y in itertools.product(range(mu), range(mu)):
        if same_class(x, y, mu):
            out.append([-p[x][y]])                              # V6
    return out


# -- fusion -------------------------------------------------------------------

def encode_fusion(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    nu, mu = cfg.num_nodes, cfg.num_molecules
    e, p, a, b = vm.e, vm.p, vm.a, vm.b
    cross = _cross_pairs(mu)
    out: list[Clause] = []
    for i, j, q in vm.non_self_slots():
        bs = b[i][j][q]
        # V7: the edge fuses with its destination via some active pair
        ts = vm.new_vars(len(cross), "fuse")
        out.append([-e[i][j][q]] + ts)
        for t, (m, m2) in zip(ts, cross):
            out.append([-t, bs[m]])
            out.append([-t, a[j][m2]])
            out.append([-t, p[m][m2]])
        # V8: no active edge molecule pairs with an active molecule elsewhere
        for m, m2 in cross:
            for j2 in range(nu):
                if j2 != j:
                    out.append([-bs[m], -a[j2][m2], -p[m][m2]])
    return out


# -- activity -----------------------------------------------------------------

def _equal_vectors(vm: VarMap, xs: list[int], ys: list[int], tag: str, out: list[Clause]) -> int:
    """Return a variable forced true whenever ``xs`` and ``ys`` agree bitwise."""
    bits = vm.new_vars(len(xs), tag + "_bit")
    eq = vm.new_var(tag)
    for t, x, y in zip(bits, xs, ys):
        out.append([-x, -y, t])
        out.append([x, y, t])
    out.append([-t for t in bits] + [eq])
    return eq


def _congruence(vm: VarMap, sites: list[tuple[list[int], list[int]]], tag: str) -> list[Clause]:
    """Ackermann expansion: equal input vectors give equal output vectors."""
    out: list[Clause] = []
    for (xs, outs), (ys, outs2) in itertools.combinations(sites, 2):
        eq = _equal_vectors(vm, xs, ys, tag, out)
        for o1, o2 in zip(outs, outs2):
            out.append([-eq, -o1, o2])
            out.append([-eq, o1, -o2])
    return out


def _mutual_inhibition(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    """Per (slot, m): b[m] <-> el[m] AND no co-present m' pairs with m either way.

    ``s`` marks unordered cross-class pairs that pair in some direction and
    ``c`` marks such a pair both present on one slot.
    """
    mu = cfg.num_molecules
    p, el, b = vm.p, vm.el, vm.b
    out: list[Clause] = []
    pairs = [(m, m2) for m in range(mu) for m2 in range(m + 1, mu) if not same_class(m, m2, mu)]
    sym = {}
    for m, m2 in pairs:
        s = sym[m, m2] = vm.new_var("pairs_either")
        out += [[-p[m][m2], s], [-p[m2][m], s], [-s, p[m][m2], p[m2][m]]]
    for i, j, q in vm.non_self_slots():
        labels, acts = el[i][j][q], b[i][j][q]
        clash = {}
        for m, m2 in pairs:
            c = clash[m, m2] = vm.new_var("clash")
            out += [[-c, labels[m]], [-c, labels[m2]], [-c, sym[m, m2]]]
            out.append([-acts[m], -labels[m2], -sym[m, m2]])
            out.append([-acts[m2], -labels[m], -sym[m, m2]])
        for m in range(mu):
            out.append([-acts[m], labels[m]])
            mine = [c for (x, y), c in clash.items() if m in (x, y)]
            out.append([-labels[m], acts[m]] + mine)
    return out


def _pairing_inhibition(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    """Aep, encoded literally per (slot, m):

        [el[m] => AND_{m'} (p[m][m'] => el[m'])]
            <=> [~b[m] AND AND_{m'} (p[m][m'] => ~b[m'])]

    ``m'`` ranges over the other class only, since same-class pairing is
    fixed false and those conjuncts are trivially true.
    """
    mu = cfg.num_molecules
    p, el, b = vm.p, vm.el, vm.b
    out: list[Clause] = []
    for i, j, q in vm.non_self_slots():
        labels, acts = el[i][j][q], b[i][j][q]
        for m in range(mu):
            partners = [m2 for m2 in range(mu) if not same_class(m, m2, mu)]
            x = vm.new_var("aep")         # x <-> left-hand side
            z = vm.new_var("aep_all")     # z -> every partner is co-present
            out.append([-x, -labels[m], z])
            for m2 in partners:
                out.append([-z, -p[m][m2], labels[m2]])
            out.append([labels[m], x])
            ws = vm.new_vars(len(partners), "aep_miss")  # w -> partner paired and absent
            for w, m2 in zip(ws, partners):
                out.append([-w, p[m][m2]])
                out.append([-w, -labels[m2]])
            out.append([x] + ws)
            # x <-> right-hand side
            out.append([-x, -acts[m]])
            for m2 in partners:
                out.append([-x, -p[m][m2], -acts[m2]])
            ys = vm.new_vars(len(partners), "aep_act")   # y -> partner paired and active
            for y, m2 in zip(ys, partners):
                out.append([-y, p[m][m2]])
                out.append([-y, acts[m2]])
            out.append([x, acts[m]] + ys)
    return out


def encode_activity(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    nu, mu, pi = cfg.num_nodes, cfg.num_molecules, cfg.max_parallel
    n, a, el, b = vm.n, vm.a, vm.el, vm.b
    out: list[Clause] = []
    rule = cfg.variant.node_rule
    if rule is NodeRule.ALL_ACTIVE:
        for i, m in itertools.product(range(nu), range(mu)):
            out.append([-n[i][m], a[i][m]])
            out.append([n[i][m], -a[i][m]])
    elif rule is NodeRule.BOOLEAN_FN:
        out += _congruence(vm, [(n[i], a[i]) for i in range(nu)], "node_eq")
    else:  # pragma: no cover
        raise EncodingError(f"unknown node rule {rule}")

    rule = cfg.variant.edge_rule
    if rule is EdgeRule.ALL_ACTIVE:
        for i, j, q in itertools.product(range(nu), range(nu), range(pi)):
            for m in range(mu):
                out.append([-el[i][j][q][m], b[i][j][q][m]])
                out.append([el[i][j][q][m], -b[i][j][q][m]])
    elif rule is EdgeRule.BOOLEAN_FN:
        sites = [(el[i][j][q], b[i][j][q]) for i, j, q in vm.non_self_slots()]
        out += _congruence(vm, sites, "edge_eq")
    elif rule is EdgeRule.PAIRING_INHIBITION:
        if cfg.inhibition is InhibitionReading.MUTUAL:
            out += _mutual_inhibition(cfg, vm)
        else:
            out += _pairing_inhibition(cfg, vm)
    else:  # pragma: no cover
        raise EncodingError(f"unknown edge rule {rule}")
    return out


# -- stability ----------------------------------------------------------------

def encode_stability(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    nu, mu, pi = cfg.num_nodes, cfg.num_molecules, cfg.max_parallel
    el, r = vm.el, vm.r
    out: list[Clause] = []

    def direct(i, j, m):
        return [el[i][j][q][m] for q in range(pi)]

    for i, j, m in itertools.product(range(nu), range(nu), range(mu)):
        if i == j:
            continue
        # R1, length 1: a direct m-edge
        out.append([-r[i][j][m][0]] + direct(i, j, m))
        # R1, length l: a direct m-edge or an m-edge to i2 followed by a shorter path
        for ell in range(1, nu):
            mids = [i2 for i2 in range(nu) if i2 != i and i2 != j]
            ts = vm.new_vars(len(mids), "reach")
            out.append([-r[i][j][m][ell]] + direct(i, j, m) + ts)
            for t, i2 in zip(ts, mids):
                out.append([-t, r[i2][j][m][ell - 1]])
                out.append([-t] + direct(i, i2, m))
        # R2: an m-edge i -> j needs an m-path back from j to i
        for q in range(pi):
            out.append([-el[i][j][q][m], r[j][i][m][nu - 1]])
    return out


# -- base connectivity --------------------------------------------------------

def encode_connected(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    """The undropped graph is connected as an undirected graph.

    Layered reachability from node 0: ``c[j][l]`` means node j is within
    ``l`` undirected steps of node 0.  Layers make the least fixpoint the
    only support, so no circular justification is possible.
    """
    nu, pi = cfg.num_nodes, cfg.max_parallel
    e = vm.e
    out: list[Clause] = []
    layers = [vm.new_vars(nu, "conn") for _ in range(nu)]
    for j in range(nu):
        out.append([layers[0][j]] if j == 0 else [-layers[0][j]])
        out.append([layers[nu - 1][j]])
    for ell in range(1, nu):
        for j in range(nu):
            if j == 0:
                out.append([layers[ell][0]])
                continue
            others = [i for i in range(nu) if i != j]
            ts = vm.new_vars(len(others), "conn_step")
            out.append([-layers[ell][j], layers[ell - 1][j]] + ts)
            for t, i in zip(ts, others):
                out.append([-t, layers[ell - 1][i]])
                out.append([-t] + [e[i][j][q] for q in range(pi)] + [e[j][i][q] for q in range(pi)])
    return out


# -- cardinality --------------------------------------------------------------

def encode_exactly(lits: list[int], count: int, vm: VarMap) -> list[Clause]:
    """Sequential counter: exactly ``count`` of ``lits`` are true.

    Register ``s[k][t]`` is defined as "at least t of the first k+1 literals"
    in both directions, so the counter has one extension per projected model.
    """
    lits = list(lits)
    size = len(lits)
    if not 0 <= count <= size:
        raise EncodingError(f"cannot have exactly {count} of {size} literals")
    if count == 0:
        return [[-x] for x in lits]
    if count == size:
        return [[x] for x in lits]

    out: list[Clause] = []
    cap = count + 1
    # prev[t] for t in 0..cap: True/False constant or a literal
    prev: list = [True] + [False] * cap
    for x in lits:
        cur: list = [True]
        for t in range(1, cap + 1):
            keep, step = prev[t], prev[t - 1]
            if keep is True:
                cur.append(True)
                continue
            if step is False:
                cur.append(keep)
                continue
            s = vm.new_var("card")
            # s <-> keep OR (step AND x)
            if keep is not False:
                out.append([-keep, s])
            if step is True:
                out.append([-x, s])
                out.append([-s, keep, x] if keep is not False else [-s, x])
            else:
                out.append([-step, -x, s])
                out.append([-s, keep, step] if keep is not False else [-s, step])
                out.append([-s, keep, x] if keep is not False else [-s, x])
            cur.append(s)
        prev = cur
    at_least, too_many = prev[count], prev[cap]
    if at_least is False or too_many is True:  # pragma: no cover - excluded by range check
        return [[]]
    if at_least is not True:
        out.append([at_least])
    if too_many is not False:
        out.append([-too_many])
    return out


# -- connectivity query -------------------------------------------------------

def encode_drop(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    nu, pi = cfg.num_nodes, cfg.max_parallel
    if not cfg.connectivity_query or cfg.drop < 1:
        raise EncodingError("the drop constraints need a connectivity query with drop >= 1")
    if cfg.drop > nu * (nu - 1) * pi:
        raise EncodingError(f"drop={cfg.drop} exceeds the {nu * (nu - 1) * pi} edge slots")
    e, d, rp = vm.e, vm.d, vm.rp
    out: list[Clause] = []
    for i, j, q in itertools.product(range(nu), range(nu), range(pi)):
        out.append([-d[i][j][q], e[i][j][q]])                                   # D1
    out += encode_exactly([d[i][j][q] for i, j, q in vm.non_self_slots()], cfg.drop, vm)  # D2

    if cfg.drop_semantics is DropSemantics.UNDIRECTED:
        return out + _undirected_cut(cfg, vm)

    def surviving(x, y):
        """(e, d) variable pairs of undropped edges usable to step x -> y."""
        return [(e[x][y][q], d[x][y][q]) for q in range(pi)]

    # D3: rp over-approximates reachability in the residual graph
    for i, j in itertools.product(range(nu), range(nu)):
        if i == j:
            continue
        for ev, dv in surviving(i, j):
            out.append([-ev, dv, rp[i][j]])
        for i2 in range(nu):
            if i2 in (i, j):
                continue
            for ev, dv in surviving(i, i2):
                out.append([-rp[i2][j], -ev, dv, rp[i][j]])
    # D4: some pair is unreachable in both directions
    pairs = [(i, j) for i in range(nu) for j in range(i + 1, nu)]
    us = vm.new_vars(len(pairs), "split")
    out.append(us)
    for u, (i, j) in zip(us, pairs):
        out.append([-u, -rp[i][j]])
        out.append([-u, -rp[j][i]])
    return out


def _undirected_cut(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    """Undirected split as a cut around node 0.

    If any pair is split, node 0 is split from some node, so the pairwise
    reachability relation collapses to one side set: ``rp[0][j]`` says j is
    on node 0's side, no undropped edge leaves that side, and some node lies
    outside it.  ``rp[j][0]`` follows ``rp[0][j]`` so the decoder finds the
    pair (0, j); the other ``rp`` bits are unused.
    """
    nu, pi = cfg.num_nodes, cfg.max_parallel
    e, d, rp = vm.e, vm.d, vm.rp
    side = [None] + [rp[0][j] for j in range(1, nu)]
    out: list[Clause] = []
    for x in range(nu):
        for y in range(nu):
            if x == y or y == 0:
                continue
            keep = [] if x == 0 else [-side[x]]
            for q in range(pi):
                out.append(keep + [-e[x][y][q], d[x][y][q], side[y]])
                out.append(keep + [-e[y][x][q], d[y][x][q], side[y]])
    out.append([-side[j] for j in range(1, nu)])
    for j in range(1, nu):
        out.append([-rp[j][0], rp[0][j]])
        if cfg.cut_side is not None:
            out.append([side[j]] if j < cfg.cut_side else [-side[j]])
    return out


FAMILIES = ("structure", "fusion", "activity", "stability", "connected", "drop")


def _lex_geq(xs: list[int], ys: list[int], vm: VarMap) -> list[Clause]:
    """``xs >= ys`` lexicographically, most significant position first."""
    out: list[Clause] = []
    eq = None  # None stands for the constant true prefix
    for k, (x, y) in enumerate(zip(xs, ys)):
        guard = [] if eq is None else [-eq]
        out.append(guard + [x, -y])
        if k == len(xs) - 1:
            break
        nxt = vm.new_var("lex")
        out.append(guard + [-x, -y, nxt])
        out.append(guard + [x, y, nxt])
        eq = nxt
    return out


def encode_symmetry(cfg: SearchConfig, vm: VarMap) -> list[Clause]:
    """Canonical orderings that every model can be permuted into.

    Node label rows are non-increasing, label columns are non-increasing
    inside each molecule class (double lex), and the existing parallel
    edges between two nodes occupy the lowest slots.  Node and molecule
    permutations act on the label matrix only through rows and columns, and
    slot permutations leave it alone, so the three orderings are compatible.
    With a fixed cut side, rows are ordered within each side only.
    """
    nu, mu, pi = cfg.num_nodes, cfg.num_molecules, cfg.max_parallel
    n = vm.n
    out: list[Clause] = []
    for i in range(nu - 1):
        if i + 1 != cfg.cut_side:
            out += _lex_geq(n[i], n[i + 1], vm)
    half = q_class_size(mu)
    for lo, hi in ((0, half), (half, mu)):
        for m in range(lo, hi - 1):
            out += _lex_geq([n[i][m] for i in range(nu)], [n[i][m + 1] for i in range(nu)], vm)
    for i, j, q in vm.non_self_slots():
        if q + 1 < pi:
            out.append([vm.e[i][j][q], -vm.e[i][j][q + 1]])
    return out


def encode_problem(cfg: SearchConfig) -> Encoding:
    if cfg.connectivity_query and cfg.drop < 1:
        raise EncodingError("a connectivity query needs drop >= 1")
    vm = allocate_variables(cfg)
    clauses: list[Clause] = []
    counts: dict[str, int] = {}
    steps = [
        ("structure", encode_structure),
        ("fusion", encode_fusion),
        ("activity", encode_activity),
        ("stability", encode_stability),
    ]
    if cfg.require_connected:
        steps.append(("connected", encode_connected))
    if cfg.connectivity_query:
        steps.append(("drop", encode_drop))
    if cfg.symmetry_breaking:
        steps.append(("symmetry", encode_symmetry))
    for name, fn in steps:
        part = fn(cfg, vm)
        counts[name] = len(part)
        clauses += part
    return Encoding(vm, Cnf(vm.top, clauses), cfg, counts)
