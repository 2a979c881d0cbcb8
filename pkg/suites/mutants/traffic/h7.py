u, v, d = max(G.edges(data=True), key=lambda e: e[2]["bytes"])
a, b = sorted((u, v))
result = [{"host_a": a, "host_b": b, "bytes": d["bytes"]}]
