result = sorted(
    n
    for n, d in G.nodes(data=True)
    if d.get("type") in ("CHASSIS", "CONTROL_POINT")
)
