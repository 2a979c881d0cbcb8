top = edges.sort_values("bytes", ascending=False).head(3)
result = top[["src", "dst", "bytes"]]
