received = {}
for src, _, d in G.edges(data=True):
    received[src] = received.get(src, 0) + d["bytes"]
result = received
