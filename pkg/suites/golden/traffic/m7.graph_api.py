result = len({n.rsplit(".", 2)[0] for n in G.nodes()})
