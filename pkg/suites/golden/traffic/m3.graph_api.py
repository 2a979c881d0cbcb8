result = sum(d["bytes"] for _, _, d in G.edges(data=True)) / G.number_of_edges()
