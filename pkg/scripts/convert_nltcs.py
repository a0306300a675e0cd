"""Convert the raw NLTCS benchmark files (comma-separated 0/1 rows) to mrf-data v1.

    python scripts/convert_nltcs.py /path/to/raw data/nltcs

Reads nltcs.train.data, nltcs.valid.data (optional) and nltcs.test.data.
"""
import argparse
from pathlib import Path

import numpy as np

from agmrf.data import Dataset, save_dataset


def read_raw(path):
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        row = [int(tok) for tok in line.split(",")]
        if any(v not in (0, 1) for v in row) or (rows and len(row) != len(rows[0])):
            raise SystemExit(f"{path}:{lineno}: expected {len(rows[0]) if rows else 'n'} binary values")
        rows.append(row)
    return np.array(rows, dtype=np.int64)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", type=Path)
    ap.add_argument("dst", type=Path)
    args = ap.parse_args()
    args.dst.mkdir(parents=True, exist_ok=True)
    for split in ("train", "valid", "test"):
        raw = args.src / f"nltcs.{split}.data"
        if not raw.exists():
            if split != "valid":
                raise SystemExit(f"missing {raw}")
            continue
        ds = Dataset(read_raw(raw), 2, split=split)
        out = args.dst / f"nltcs.{split}.txt"
        save_dataset(ds, out)
        print(f"{split}: {ds.n_points} rows x {ds.n_vars} vars -> {out}")


if __name__ == "__main__":
    main()
