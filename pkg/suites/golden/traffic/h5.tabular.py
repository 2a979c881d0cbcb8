edges = edges[edges["packets"] >= 2000]
result = None
