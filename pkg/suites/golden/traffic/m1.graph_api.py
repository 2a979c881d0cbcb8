received = {}
for _, dst, d in G.edges(data=True):
    received[dst] = received.get(dst, 0) + d["bytes"]
result = received
