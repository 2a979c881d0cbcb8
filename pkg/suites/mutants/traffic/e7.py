result = G.number_of_edges("15.76.57.7", "12.30.15.24")
