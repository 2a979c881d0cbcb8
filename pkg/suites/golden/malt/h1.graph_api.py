doomed = ["ch3.s2"]
doomed += [
    child
    for _, child, d in G.out_edges("ch3.s2", data=True)
    if d["kind"] == "CONTAINS"
]
G.remove_nodes_from(doomed)
result = None
