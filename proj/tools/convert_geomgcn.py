#!/usr/bin/env python3
# Copyright 2026 The CAT Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Converts a Geom-GCN style raw dataset into a catbench dataset directory.

Input directory: out1_node_feature_label.txt and out1_graph_edges.txt.
Output directory: meta, nodes.tsv and edges.tsv (undirected, self-loops and
duplicate pairs dropped).
"""

import argparse
import pathlib
import sys


def read_rows(path):
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    return [line.split("\t") for line in lines[1:] if line.strip()]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("raw_dir", type=pathlib.Path)
    parser.add_argument("out_dir", type=pathlib.Path)
    args = parser.parse_args(argv)

    nodes = {}
    for fields in read_rows(args.raw_dir / "out1_node_feature_label.txt"):
        if len(fields) != 3:
            sys.exit(f"malformed node row: {fields!r}")
        nodes[int(fields[0])] = (int(fields[2]), fields[1].split(","))
    ids = sorted(nodes)
    if ids != list(range(len(ids))):
        sys.exit("node ids are not 0..n-1")
    dims = {len(feats) for _, feats in nodes.values()}
    if len(dims) != 1:
        sys.exit(f"inconsistent feature lengths: {sorted(dims)}")

    pairs = set()
    for fields in read_rows(args.raw_dir / "out1_graph_edges.txt"):
        a, b = int(fields[0]), int(fields[1])
        if a not in nodes or b not in nodes:
            sys.exit(f"edge ({a}, {b}) references a missing node")
        if a != b:
            pairs.add((min(a, b), max(a, b)))

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    num_classes = max(label for label, _ in nodes.values()) + 1
    with open(out / "meta", "w", encoding="utf-8", newline="\n") as f:
        f.write(f"num_nodes={len(ids)}\nnum_classes={num_classes}\n")
        f.write(f"feature_dim={dims.pop()}\nundirected=1\n")
    with open(out / "nodes.tsv", "w", encoding="utf-8", newline="\n") as f:
        for v in ids:
            label, feats = nodes[v]
            f.write(f"{v}\t{label}\t{','.join(feats)}\n")
    with open(out / "edges.tsv", "w", encoding="utf-8", newline="\n") as f:
        for a, b in sorted(pairs):
            f.write(f"{a}\t{b}\n")
    print(f"{len(ids)} nodes, {len(pairs)} undirected edges, {num_classes} classes")


if __name__ == "__main__":
    main()
