result = {n: G.out_degree(n) for n in G.nodes()}
