result = sorted(G.nodes())
