result = next(n for n in sorted(G.nodes()) if G.in_degree(n) <= 1)
