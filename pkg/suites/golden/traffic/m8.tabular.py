result = edges.groupby("src")["connections"].sum().idxmax()
