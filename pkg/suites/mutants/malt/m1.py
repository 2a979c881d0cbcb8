counts = {}
for n, d in G.nodes(data=True):
    if d.get("type") != "CHASSIS":
        continue
    counts[n] = sum(
        1
        for _, child, ed in G.out_edges(n, data=True)
        if ed["kind"] == "CONTAINS"
    )
result = counts
