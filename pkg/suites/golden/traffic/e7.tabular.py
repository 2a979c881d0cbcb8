mask = (edges["src"] == "12.30.15.24") & (edges["dst"] == "15.76.57.7")
result = int(mask.sum())
