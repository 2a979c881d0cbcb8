result = sum(d["bytes"] for _, _, d in G.edges(data=True))
