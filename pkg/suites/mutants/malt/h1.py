G.remove_node("ch3.s2")
result = None
