combined = {}
for u, v, d in G.edges(data=True):
    pair = tuple(sorted((u, v)))
    combined[pair] = combined.get(pair, 0) + d["bytes"]
(a, b), total = max(combined.items(), key=lambda kv: kv[1])
result = [{"host_a": a, "host_b": b, "bytes": total}]
