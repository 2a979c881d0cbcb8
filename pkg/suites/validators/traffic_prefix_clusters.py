# Accepts any host -> group labelling that groups hosts iff they share a /16.
hosts = set(G_input.nodes())

ok = kind == "table" and isinstance(value, list)
reason = "expected a key/value table of hosts"
if ok:
    rows_ok = all(
        isinstance(r, dict) and set(r) == {"key", "value"} for r in value
    )
    if not rows_ok:
        ok = False
        reason = "rows must carry exactly a key and a value column"
    else:
        label = {}
        for r in value:
            label[r["key"]] = r["value"]
        if set(label) != hosts or len(value) != len(hosts):
            ok = False
            reason = "every host must appear exactly once"
        else:
            pairs_ok = True
            ordered = sorted(hosts)
            for i, a in enumerate(ordered):
                for b in ordered[i + 1:]:
                    same_prefix = a.rsplit(".", 2)[0] == b.rsplit(".", 2)[0]
                    if same_prefix != (label[a] == label[b]):
                        pairs_ok = False
                        break
                if not pairs_ok:
                    break
            if not pairs_ok:
                ok = False
                reason = "hosts must share a group exactly when they share a /16"
            else:
                reason = "ok"

result = [ok, reason]
