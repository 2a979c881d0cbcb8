quiet = nodes.loc[~nodes["id"].isin(edges["dst"]), "id"]
result = quiet.iloc[0]
