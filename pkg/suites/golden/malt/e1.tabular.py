result = int((nodes["type"] == "PACKET_SWITCH").sum())
