result = G.nodes["ch2"]["capacity"]
