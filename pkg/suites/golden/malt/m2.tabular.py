chassis = set(nodes.loc[nodes["type"] == "CHASSIS", "id"])
owner = edges[
    (edges["kind"] == "CONTAINS")
    & (edges["dst"] == "ch2.s2")
    & edges["src"].isin(chassis)
]
result = owner["src"].iloc[0]
