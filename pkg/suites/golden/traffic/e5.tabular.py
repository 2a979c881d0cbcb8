result = nodes["id"].tolist()
