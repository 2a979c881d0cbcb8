result = edges.groupby("dst")["bytes"].sum().to_dict()
