result = nodes.loc[nodes["id"] == "ch1", "capacity"].iloc[0]
