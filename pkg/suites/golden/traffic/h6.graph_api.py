for u, v, k, d in G.edges(keys=True, data=True):
    if u == "15.77.140.63":
        d["bytes"] *= 2
result = None
