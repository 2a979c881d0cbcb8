result = sum(
    d["bytes"]
    for u, v, d in G.edges(data=True)
    if u.rsplit(".", 2)[0] != v.rsplit(".", 2)[0]
)
