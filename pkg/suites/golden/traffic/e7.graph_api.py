result = G.number_of_edges("12.30.15.24", "15.76.57.7")
