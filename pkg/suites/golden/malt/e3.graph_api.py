result = G.nodes["ch1"]["capacity"]
