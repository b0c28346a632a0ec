"""From a query to a checked witness, one stage at a time."""
from vtsearch.decoder import decode_witness
from vtsearch.dot import to_dot
from vtsearch.encoder import encode_problem
from vtsearch.model import SearchConfig
from vtsearch.solver import solve
from vtsearch.verifier import edge_connectivity, verify_witness

# Three compartments, pairing inhibition on vesicles: is there a valid
# system that four vesicle losses split apart?
cfg = SearchConfig.default("F", 3, drop=4)
enc = encode_problem(cfg)
print(enc.cnf.num_vars, "variables", len(enc.cnf.clauses), "clauses")
for family, count in enc.family_counts.items():
    print(f"  {family:<10} {count}")

res = solve(enc.cnf, time_limit=300)
print(res.status.value, res.stats)

w = decode_witness(res.assignment, enc.varmap, cfg)
for s, e in sorted(w.vts.edges.items()):
    mark = "dropped" if s in w.dropped else ""
    print(s, sorted(e.molecules), "active", sorted(e.active), mark)
print("split between", w.disconnected_pair)

# the check below never looks at the formula
report = verify_witness(w, cfg)
print(report.render())
print("connectivity", edge_connectivity(w.vts))

# Three drops are not enough for any valid system of this shape.
print(solve(encode_problem(SearchConfig.default("F", 3, drop=3)).cnf).status.value)

print(to_dot(w.vts, w.dropped))
