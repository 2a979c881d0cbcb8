result = edges["bytes"].sum()
