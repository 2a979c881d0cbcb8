import networkx as nx

result = nx.shortest_path_length(G, "15.76.44.152", "15.77.216.9")
