contains = edges[edges["kind"] == "CONTAINS"]
s2c = dict(zip(contains["dst"], contains["src"]))
speeds = nodes.set_index("id")["speed_gbps"]
caps = nodes.set_index("id")["capacity"]
chassis = nodes.loc[nodes["type"] == "CHASSIS", "id"]
used = {c: 0 for c in chassis}
for p in nodes.loc[nodes["type"] == "PORT", "id"]:
    used[s2c[s2c[p]]] += speeds[p]
result = {c: int(caps[c]) - used[c] for c in chassis}
