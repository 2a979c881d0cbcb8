ports = set(nodes.loc[nodes["type"] == "PORT", "id"])
switches = nodes.loc[nodes["type"] == "PACKET_SWITCH", "id"]
contains = edges[(edges["kind"] == "CONTAINS") & edges["dst"].isin(ports)]
per_switch = contains.groupby("src").size().to_dict()
result = {s: per_switch.get(s, 0) for s in switches}
