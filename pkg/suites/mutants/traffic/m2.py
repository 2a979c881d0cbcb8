links = [
    {"src": u, "dst": v, "bytes": d["bytes"]}
    for u, v, d in G.edges(data=True)
]
links.sort(key=lambda r: r["bytes"])
result = links[:3]
