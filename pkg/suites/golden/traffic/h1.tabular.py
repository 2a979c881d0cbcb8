prefixes = sorted(nodes["id"].map(lambda a: a.rsplit(".", 2)[0]).unique())
result = {p: "color-%d" % (i + 1) for i, p in enumerate(prefixes)}
