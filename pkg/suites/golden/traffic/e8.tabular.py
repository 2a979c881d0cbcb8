result = edges.groupby("dst")["bytes"].sum().idxmax()
