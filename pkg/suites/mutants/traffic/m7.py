result = len({n.rsplit(".", 1)[0] for n in G.nodes()})
