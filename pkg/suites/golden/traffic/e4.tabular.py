result = edges["packets"].max()
