#!/usr/bin/env python3
"""Convert a raw LINQS citation release (cora, citeseer) to the repo layout.

Expects the unpacked distribution:

    RAW_DIR/<name>.content   lines: <paper_id> <tab> <0/1 features> <tab> <class>
    RAW_DIR/<name>.cites     lines: <cited_id> <tab> <citing_id>

Writes <out>/edges.tsv, features.csv, labels.txt, meta.json and prints the
resulting statistics, including the edge homophily checked by acceptance
criterion 1. Citations whose endpoints are missing from the content file
(citeseer has a handful) are dropped with a count.

Usage:
    python3 scripts/convert_linqs.py /path/to/cora --name cora
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
    ap.add_argument("raw_dir", help="directory with <name>.content and <name>.cites")
    ap.add_argument("--name", required=True, help="dataset name, e.g. cora")
    ap.add_argument("--out", default=None, help="output directory (default data/<name>)")
    args = ap.parse_args()

    name = args.name.lower()
    raw = Path(args.raw_dir)
    out = Path(args.out) if args.out else Path("data") / name

    ids = []
    feature_rows = []
    class_names = []
    with open(raw / f"{name}.content") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            ids.append(parts[0])
            feature_rows.append([float(x) for x in parts[1:-1]])
            class_names.append(parts[-1])
    index = {pid: i for i, pid in enumerate(ids)}
    if len(index) != len(ids):
        raise SystemExit(f"duplicate paper ids in {name}.content")

    classes = sorted(set(class_names))
    label_of = {c: i for i, c in enumerate(classes)}
    labels = np.array([label_of[c] for c in class_names], dtype=np.int64)
    features = np.array(feature_rows, dtype=np.float64)

    edges = []
    dangling = 0
    with open(raw / f"{name}.cites") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            a, b = parts[0], parts[1]
            if a in index and b in index:
                edges.append((index[a], index[b]))
            else:
                dangling += 1

    g, repairs = Graph.from_edges(len(ids), np.array(edges, dtype=np.int64))
    ds = Dataset(graph=g, features=features, labels=labels,
                 num_classes=len(classes), name=name)
    ds.validate()
    save_dataset(ds, out, extra_meta={"classes": classes})

    print(f"wrote {out}")
    print(f"  nodes {g.num_nodes}  undirected edges {g.num_edges}  "
          f"features {features.shape[1]}  classes {len(classes)}")
    print(f"  dropped: {dangling} citations with unknown ids, "
          f"{repairs.self_loops_dropped} self loops, "
          f"{repairs.duplicates_dropped} duplicates")
    print(f"  edge homophily {global_homophily(g, labels):.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
