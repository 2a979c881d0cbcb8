dist = {"15.76.44.152": 0}
frontier = ["15.76.44.152"]
hops = 0
while frontier and "15.77.216.9" not in dist:
    hops += 1
    reached = edges.loc[edges["src"].isin(frontier), "dst"]
    frontier = [v for v in reached.unique() if v not in dist]
    for v in frontier:
        dist[v] = hops
result = dist["15.77.216.9"]
