result = max(d["capacity"] for n, d in G.nodes(data=True) if d.get("type") == "CHASSIS")
