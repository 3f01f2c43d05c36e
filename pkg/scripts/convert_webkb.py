#!/usr/bin/env python3
"""Convert a raw WebKB release (cornell, texas, wisconsin) to the repo layout.

Expects the two-file format used by the geom-gcn repository's new_data/
directories:

    RAW_DIR/out1_node_feature_label.txt   header, then <id> <tab> <f,f,...> <tab> <label>
    RAW_DIR/out1_graph_edges.txt          header, then <id> <tab> <id>

Writes <out>/edges.tsv, features.csv, labels.txt, meta.json and prints the
resulting statistics, including the edge homophily checked by acceptance
criterion 1.

Usage:
    python3 scripts/convert_webkb.py /path/to/new_data/wisconsin --name wisconsin
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mvge.data import Dataset, save_dataset
from mvge.graph import Graph
from mvge.homophily import global_homophily


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("raw_dir", help="directory with the two out1_*.txt files")
    ap.add_argument("--name", required=True, help="dataset name, e.g. wisconsin")
    ap.add_argument("--out", default=None, help="output directory (default data/<name>)")
    args = ap.parse_args()

    name = args.name.lower()
    raw = Path(args.raw_dir)
    out = Path(args.out) if args.out else Path("data") / name

    rows = {}
    with open(raw / "out1_node_feature_label.txt") as fh:
        next(fh)  # header
        for line in fh:
            parts = line.strip().split("\t")
            if len(parts) != 3:
                continue
            rows[int(parts[0])] = (
                [float(x) for x in parts[1].split(",")],
                int(parts[2]),
            )
    ids = sorted(rows)
    index = {nid: i for i, nid in enumerate(ids)}
    features = np.array([rows[nid][0] for nid in ids], dtype=np.float64)
    labels = np.array([rows[nid][1] for nid in ids], dtype=np.int64)

    edges = []
    with open(raw / "out1_graph_edges.txt") as fh:
        next(fh)  # header
        for line in fh:
            parts = line.split()
            if len(parts) == 2:
                edges.append((index[int(parts[0])], index[int(parts[1])]))

    g, repairs = Graph.from_edges(len(ids), np.array(edges, dtype=np.int64))
    ds = Dataset(graph=g, features=features, labels=labels,
                 num_classes=int(labels.max()) + 1, name=name)
    ds.validate()
    save_dataset(ds, out)

    print(f"wrote {out}")
    print(f"  nodes {g.num_nodes}  undirected edges {g.num_edges}  "
          f"features {features.shape[1]}  classes {int(labels.max()) + 1}")
    print(f"  dropped: {repairs.self_loops_dropped} self loops, "
          f"{repairs.duplicates_dropped} duplicates")
    print(f"  edge homophily {global_homophily(g, labels):.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
