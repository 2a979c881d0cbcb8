# Accepts any injective prefix -> color assignment covering every /16 exactly once.
expected = {n.rsplit(".", 2)[0] for n in G_input.nodes()}

ok = kind == "table" and isinstance(value, list)
reason = "expected a key/value table of prefixes"
if ok:
    rows_ok = all(
        isinstance(r, dict) and set(r) == {"key", "value"} for r in value
    )
    if not rows_ok:
        ok = False
        reason = "rows must carry exactly a key and a value column"
    else:
        keys = [r["key"] for r in value]
        colors = [r["value"] for r in value]
        if set(keys) != expected or len(keys) != len(set(keys)):
            ok = False
            reason = "every /16 prefix must appear exactly once"
        elif len(set(colors)) != len(colors):
            ok = False
            reason = "colors must be distinct across prefixes"
        else:
            reason = "ok"

result = [ok, reason]
