result = edges.groupby("src").size().to_dict()
