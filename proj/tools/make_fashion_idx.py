#!/usr/bin/env python3
"""Pack per-class FashionMNIST JSON dumps into gzipped IDX files.

Input: a directory holding <class>.json files of the form {"data": [[784 ints]]},
as shipped by the `fashion-mnist` npm package under src/clothes/.
"""
import argparse
import gzip
import json
import struct
from pathlib import Path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("source", type=Path, help="directory with <class>.json files")
    ap.add_argument("--classes", default="0,3", help="comma-separated class ids to keep")
    ap.add_argument("--out", type=Path, default=Path("data"))
    ap.add_argument("--prefix", default="fashion")
    args = ap.parse_args()

    images = bytearray()
    labels = bytearray()
    count = 0
    for cls in (int(c) for c in args.classes.split(",")):
        rows = json.loads((args.source / f"{cls}.json").read_text())["data"]
        for row in rows:
            if not row:  # the dumps contain a few empty placeholder rows
                continue
            if len(row) != 784 or any(not 0 <= v <= 255 for v in row):
                raise SystemExit(f"class {cls}: malformed image")
            images.extend(bytes(row))
            labels.append(cls)
            count += 1

    args.out.mkdir(parents=True, exist_ok=True)
    img_path = args.out / f"{args.prefix}-images-idx3-ubyte.gz"
    lab_path = args.out / f"{args.prefix}-labels-idx1-ubyte.gz"
    # mtime=0 keeps the archives byte-identical across runs.
    with gzip.GzipFile(img_path, "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x803, count, 28, 28))
        f.write(images)
    with gzip.GzipFile(lab_path, "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x801, count))
        f.write(labels)
    print(f"wrote {count} images to {img_path} and {lab_path}")


if __name__ == "__main__":
    main()
