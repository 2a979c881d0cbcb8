result = sum(1 for _, _, d in G.edges(data=True) if d["bytes"] > 600000)
