result = {n: "group-1" for n in G.nodes()}
