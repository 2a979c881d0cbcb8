G.add_node("ch2.s3", type="PACKET_SWITCH")
G.add_edge("ch1", "ch2.s3", kind="CONTAINS")
G.add_edge("cp1", "ch2.s3", kind="CONTROLS")
result = None
