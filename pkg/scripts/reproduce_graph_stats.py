"""Graph statistics for the SNAP datasets next to the published values."""

import argparse
import os
from pathlib import Path

from graphanon import load_edge_list
from graphanon.cli import graph_stats

PUBLISHED = {
    "ca-HepTh": dict(nodes=9877, edges=51971, avg_degree=5.259, mean_cc=0.471, apl=5.945, diameter=18,
                     communities=472),
    "Email-Enron": dict(apl=3.160),
    "Wiki-Vote": dict(avg_degree=28.324),
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--data", default=os.environ.get("GRAPHANON_DATA", "data"))
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    for name, ref in PUBLISHED.items():
        path = Path(args.data) / f"{name}.txt"
        if not path.exists():
            print(f"{name}: missing ({path}); run scripts/fetch_snap.py")
            continue
        s = graph_stats(load_edge_list(path), args.seed)
        print(name)
        for key, val in s.items():
            want = ref.get(key, "")
            print(f"  {key:<16} {val:>12.4f}   {want}" if isinstance(val, float) else
                  f"  {key:<16} {val:>12}   {want}")


if __name__ == "__main__":
    main()
