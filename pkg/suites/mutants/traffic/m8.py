opened = {}
for src, _, d in G.edges(data=True):
    opened[src] = opened.get(src, 0) + d["packets"]
result = max(opened, key=opened.get)
