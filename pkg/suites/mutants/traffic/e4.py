result = min(d["packets"] for _, _, d in G.edges(data=True))
