u, v, d = max(G.edges(data=True), key=lambda e: e[2]["bytes"])
result = [{"src": u, "dst": v, "bytes": d["bytes"]}]
