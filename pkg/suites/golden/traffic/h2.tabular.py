prefix = nodes["id"].map(lambda a: a.rsplit(".", 2)[0])
label = {p: "group-%d" % (i + 1) for i, p in enumerate(sorted(prefix.unique()))}
result = dict(zip(nodes["id"], prefix.map(label)))
