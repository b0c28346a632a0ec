"""A walk around the three-compartment example system."""
from vtsearch.dot import to_dot
from vtsearch.model import EdgeSlot, reference_fixture, vts_from_dict, vts_to_dict
from vtsearch.verifier import check_drop_disconnects, edge_connectivity, verify_vts

v = reference_fixture()

# three compartments, eight molecule types, six vesicles
print(v.num_nodes, v.num_molecules, len(v.edges))
for i, (lab, act) in enumerate(zip(v.node_labels, v.node_active)):
    print(f"n{i}", sorted(lab), "active:", sorted(act))

# pairs (edge molecule, node molecule) that drive fusion
print(sorted(v.pairing))

# Every check passes when edges regulate activity by a Boolean function
# and nodes keep everything active.
print(verify_vts(v, "C").render())

# Variant A wants every molecule on a vesicle active; here several are
# switched off, and the report lists each one.
report = verify_vts(v, "A")
print(report.render())

# Cutting every edge that touches n2 isolates it: three edges.
print(edge_connectivity(v))
cut = {EdgeSlot(1, 2, 0), EdgeSlot(2, 1, 0), EdgeSlot(2, 0, 0)}
print(check_drop_disconnects(v, cut).passed)

# Removing the pairing (1, 6) breaks fusion for the vesicles whose only
# active molecule is 1.
doc = vts_to_dict(v)
doc["pairing"].remove([1, 6])
print(verify_vts(vts_from_dict(doc), "C").render())

print(to_dot(v, cut))
