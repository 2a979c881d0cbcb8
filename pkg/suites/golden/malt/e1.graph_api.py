result = sum(1 for n, d in G.nodes(data=True) if d.get("type") == "PACKET_SWITCH")
