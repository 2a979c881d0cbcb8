import pandas as pd

nodes = pd.concat(
    [nodes, pd.DataFrame([{"id": "ch2.s3", "type": "PACKET_SWITCH"}])],
    ignore_index=True,
)
edges = pd.concat(
    [
        edges,
        pd.DataFrame(
            [
                {"src": "ch2", "dst": "ch2.s3", "kind": "CONTAINS"},
                {"src": "cp1", "dst": "ch2.s3", "kind": "CONTROLS"},
            ]
        ),
    ],
    ignore_index=True,
)
result = None
