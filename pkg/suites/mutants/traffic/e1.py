result = G.number_of_nodes() + 1
