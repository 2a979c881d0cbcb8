import networkx as nx

result = len(nx.node_connected_component(G.to_undirected(), "12.31.111.60"))
