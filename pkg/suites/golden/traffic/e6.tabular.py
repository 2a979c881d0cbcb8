result = int((edges["bytes"] > 500000).sum())
