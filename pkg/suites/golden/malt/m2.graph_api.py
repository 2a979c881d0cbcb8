result = next(
    u
    for u, _, d in G.in_edges("ch2.s2", data=True)
    if d["kind"] == "CONTAINS" and G.nodes[u].get("type") == "CHASSIS"
)
