prefixes = sorted({n.rsplit(".", 2)[0] for n in G.nodes()})
label = {p: "group-%d" % (i + 1) for i, p in enumerate(prefixes)}
result = {n: label[n.rsplit(".", 2)[0]] for n in G.nodes()}
