#!/usr/bin/env python3
"""Convert the Tuebingen pairs shipped with the Causal Discovery Toolbox
(``cdt/data/resources/Tuebingen_pairs.csv`` + ``Tuebingen_targets.csv``) into
the directory layout read by ``kiimht.dataio.load_tcep``.

Pairs in that file are already univariate and oriented cause-first (all
targets are 1); no weights are shipped, so every pair gets weight 1.

    python scripts/tcep_from_cdt.py Tuebingen_pairs.csv Tuebingen_targets.csv out_dir
"""

import argparse
import csv
import sys
from pathlib import Path


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("pairs_csv")
    parser.add_argument("targets_csv")
    parser.add_argument("out_dir")
    args = parser.parse_args(argv)

    csv.field_size_limit(sys.maxsize)
    with open(args.targets_csv, newline="") as fh:
        targets = {row["SampleID"]: float(row["Target"]) for row in csv.DictReader(fh)}

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = []
    with open(args.pairs_csv, newline="") as fh:
        for row in csv.DictReader(fh):
            sid = row["SampleID"]
            num = int(sid.replace("pair", ""))
            a, b = row["A"].split(), row["B"].split()
            if len(a) != len(b):
                raise SystemExit(f"{sid}: column lengths differ ({len(a)} vs {len(b)})")
            cause_col, effect_col = (1, 2) if targets.get(sid, 1.0) > 0 else (2, 1)
            lines = [f"{u} {v}" for u, v in zip(a, b)]
            (out / f"pair{num:04d}.txt").write_text("\n".join(lines) + "\n")
            meta.append(f"{num:04d} {cause_col} {cause_col} {effect_col} {effect_col} 1")
    (out / "pairmeta.txt").write_text("\n".join(meta) + "\n")
    print(f"wrote {len(meta)} pairs to {out}")


if __name__ == "__main__":
    main()
