spare = {}
for ch, d in G.nodes(data=True):
    if d.get("type") == "CHASSIS":
        spare[ch] = d["capacity"]
result = spare
