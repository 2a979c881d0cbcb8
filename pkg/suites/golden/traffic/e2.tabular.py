result = len(edges)
