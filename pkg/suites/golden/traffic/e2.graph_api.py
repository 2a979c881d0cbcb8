result = G.number_of_edges()
