result = nodes.loc[nodes["type"] == "CHASSIS", "capacity"].sum()
