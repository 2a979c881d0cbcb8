prefixes = sorted({n.rsplit(".", 2)[0] for n in G.nodes()})
result = {p: "color-%d" % (i + 1) for i, p in enumerate(prefixes)}
