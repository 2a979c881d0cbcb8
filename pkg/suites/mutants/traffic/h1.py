prefixes = sorted({n.rsplit(".", 2)[0] for n in G.nodes()})
result = {p: "color-1" for p in prefixes}
