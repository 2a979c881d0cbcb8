result = {n: G.in_degree(n) for n in G.nodes()}
