result = sorted(G.nodes())[:-1]
