result = nodes["id"].map(lambda a: a.rsplit(".", 2)[0]).nunique()
