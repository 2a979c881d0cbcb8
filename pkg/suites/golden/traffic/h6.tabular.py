edges.loc[edges["src"] == "15.77.140.63", "bytes"] *= 2
result = None
