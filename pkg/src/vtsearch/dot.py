"""Graphviz rendering of a VTS or witness.  Output is deterministic."""
from __future__ import annotations

from .model import Vts


def _molecules(present, active) -> str:
    return " ".join(f"{m}*" if m in active else str(m) for m in sorted(present))


def to_dot(v: Vts, dropped=(), name: str = "vts") -> str:
    dropped = set(dropped)
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    for i in range(v.num_nodes):
        label = f"n{i}: {_molecules(v.node_labels[i], v.node_active[i])}".rstrip()
        lines.append(f'  n{i} [label="{label}"];')
    for s in sorted(v.edges):
        e = v.edges[s]
        attrs = [f'label="{_molecules(e.molecules, e.active)}"']
        if s in dropped:
            attrs.append("style=dashed")
        lines.append(f"  n{s.src} -> n{s.dst} [{', '.join(attrs)}];")
    if v.pairing:
        pairs = " ".join(f"({x},{y})" for x, y in sorted(v.pairing))
        lines.append(f'  label="pairing: {pairs}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
