children = edges.loc[(edges["kind"] == "CONTAINS") & (edges["src"] == "ch3.s2"), "dst"]
doomed = set(children) | {"ch3.s2"}
nodes = nodes[~nodes["id"].isin(doomed)]
edges = edges[~edges["src"].isin(doomed) & ~edges["dst"].isin(doomed)]
result = None
