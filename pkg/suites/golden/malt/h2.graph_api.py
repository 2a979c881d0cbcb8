spare = {}
for ch, d in G.nodes(data=True):
    if d.get("type") != "CHASSIS":
        continue
    total = 0
    for _, sw, ed in G.out_edges(ch, data=True):
        if ed["kind"] != "CONTAINS":
            continue
        for _, p, pd in G.out_edges(sw, data=True):
            if pd["kind"] == "CONTAINS":
                total += G.nodes[p].get("speed_gbps", 0)
    spare[ch] = d["capacity"] - total
result = spare
