src_pref = edges["src"].map(lambda a: a.rsplit(".", 2)[0])
dst_pref = edges["dst"].map(lambda a: a.rsplit(".", 2)[0])
result = int(edges.loc[src_pref != dst_pref, "bytes"].sum())
