"""Download the three SNAP edge lists into $GRAPHANON_DATA (or --dest).

A sha256 of each decompressed file is recorded in checksums.txt on first
download and checked on every later run.
"""

import argparse
import gzip
import hashlib
import os
import shutil
import sys
import urllib.request
from pathlib import Path

BASE = "https://snap.stanford.edu/data/"
FILES = {
    "ca-HepTh.txt": "ca-HepTh.txt.gz",
    "Email-Enron.txt": "email-Enron.txt.gz",
    "Wiki-Vote.txt": "wiki-Vote.txt.gz",
}


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dest", default=os.environ.get("GRAPHANON_DATA", "data"))
    args = p.parse_args(argv)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    sums_path = dest / "checksums.txt"
    sums = {}
    if sums_path.exists():
        sums = dict(line.split()[::-1] for line in sums_path.read_text().splitlines() if line.strip())
    status = 0
    for name, remote in FILES.items():
        target = dest / name
        if not target.exists():
            print(f"fetching {BASE + remote}")
            tmp = dest / remote
            urllib.request.urlretrieve(BASE + remote, tmp)
            with gzip.open(tmp, "rb") as src, target.open("wb") as out:
                shutil.copyfileobj(src, out)
            tmp.unlink()
        digest = sha256(target)
        if name not in sums:
            sums[name] = digest
        elif sums[name] != digest:
            print(f"checksum mismatch for {name}", file=sys.stderr)
            status = 1
        print(f"{name}\t{digest}")
    sums_path.write_text("".join(f"{d}  {n}\n" for n, d in sorted(sums.items())))
    return status


if __name__ == "__main__":
    sys.exit(main())
