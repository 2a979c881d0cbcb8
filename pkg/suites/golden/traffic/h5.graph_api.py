doomed = [
    (u, v, k)
    for u, v, k, d in G.edges(keys=True, data=True)
    if d["packets"] < 2000
]
G.remove_edges_from(doomed)
result = None
