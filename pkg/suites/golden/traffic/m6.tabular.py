row = edges.loc[edges["bytes"].idxmax()]
result = [{"src": row["src"], "dst": row["dst"], "bytes": int(row["bytes"])}]
