result = edges["bytes"].mean()
