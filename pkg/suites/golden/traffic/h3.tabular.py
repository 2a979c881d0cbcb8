seen = {"12.31.111.60"}
frontier = set(seen)
while frontier:
    fwd = set(edges.loc[edges["src"].isin(frontier), "dst"])
    back = set(edges.loc[edges["dst"].isin(frontier), "src"])
    frontier = (fwd | back) - seen
    seen |= frontier
result = len(seen)
