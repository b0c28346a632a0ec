"""Smallest number of dropped vesicles that splits a valid system, per variant.

Run with a node count, e.g. ``python scripts/min_connectivity_table.py 4``.
Larger sizes take minutes per row.
"""
import sys
import time

from vtsearch.model import SearchConfig
from vtsearch.search import min_connectivity

nu = int(sys.argv[1]) if len(sys.argv) > 1 else 3
limit = float(sys.argv[2]) if len(sys.argv) > 2 else 600

# A..F cross node rules {all active, Boolean function} with edge rules
# {all active, Boolean function, pairing inhibition}.
for var in "ABCDEF":
    cfg = SearchConfig.default(var, nu, time_limit=limit)
    t = time.monotonic()
    res = min_connectivity(cfg, max_drop=6)
    steps = " ".join(f"{s.drop}:{s.status.value}" for s in res.steps)
    print(f"{var}  {cfg.variant}  {str(res):<20} {time.monotonic() - t:7.1f} s   {steps}")

# NoGraph means no valid system exists at all.  MinConnectivity(c) means
# every valid system survives the loss of any c-1 vesicles, and some valid
# system falls apart after losing c.
