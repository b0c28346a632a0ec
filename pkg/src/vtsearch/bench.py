"""Run-time table: one fresh solver session per (variant, size) cell."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .model import SearchConfig, VtsError
from .search import run_search

# Drop count per variant.  A row for connectivity c searches for a graph
# that c dropped edges disconnect.
DEFAULT_DROPS = {"A": 2, "C": 3, "D": 2, "F": 4}

FIELDS = ("variant", "nodes", "molecules", "max_parallel", "drop", "status", "wall_seconds")


@dataclass(frozen=True)
class BenchRow:
    variant: str
    nodes: int
    molecules: int
    max_parallel: int
    drop: int
    status: str
    wall_seconds: float


def bench(variants=("A", "C", "D", "F"), sizes=range(2, 7), drops: dict | None = None,
          time_limit: float | None = None, seed: int = 0, backend: str | None = None,
          on_row=None, **cfg_kw) -> list[BenchRow]:
    drops = {**DEFAULT_DROPS, **(drops or {})}
    rows = []
    for var in variants:
        if var not in drops:
            raise VtsError(f"no drop count for variant {var}; pass one explicitly")
        for nu in sizes:
            cfg = SearchConfig.default(var, nu, drop=drops[var], time_limit=time_limit, **cfg_kw)
            out = run_search(cfg, seed=seed, backend=backend)
            row = BenchRow(var, nu, cfg.num_molecules, cfg.max_parallel, cfg.drop,
                           out.status.value, round(out.seconds, 3))
            rows.append(row)
            if on_row:
                on_row(row)
    return rows


def to_csv(rows, drops: dict | None = None) -> str:
    drops = {**DEFAULT_DROPS, **(drops or {})}
    buf = io.StringIO()
    used = sorted({r.variant for r in rows})
    mapping = " ".join(f"{v}={drops[v]}" for v in used if v in drops)
    buf.write(f"# drop = connectivity target connectivity c (c dropped edges disconnect): {mapping}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow([getattr(r, f) for f in FIELDS])
    return buf.getvalue()
