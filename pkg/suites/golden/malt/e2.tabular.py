result = sorted(nodes.loc[nodes["type"] == "CHASSIS", "id"])
