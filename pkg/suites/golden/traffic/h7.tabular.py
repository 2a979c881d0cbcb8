pairs = edges.assign(
    host_a=edges[["src", "dst"]].min(axis=1),
    host_b=edges[["src", "dst"]].max(axis=1),
)
combined = pairs.groupby(["host_a", "host_b"])["bytes"].sum().reset_index()
row = combined.loc[combined["bytes"].idxmax()]
result = [{"host_a": row["host_a"], "host_b": row["host_b"], "bytes": int(row["bytes"])}]
