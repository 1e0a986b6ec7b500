#!/usr/bin/env python3
"""Download the two public benchmark tables into data/.

Sources (both redistributed through the Rdatasets mirror):
  * crabs: morphological measurements on Leptograpsus crabs, from the
    MASS R package (Campbell & Mahon 1974).
    https://vincentarelbundock.github.io/Rdatasets/csv/MASS/crabs.csv
  * ais: biomedical measurements of Australian Institute of Sport
    athletes, from the DAAG R package (Telford & Cunningham 1991).
    https://vincentarelbundock.github.io/Rdatasets/csv/DAAG/ais.csv

The CSVs are saved verbatim; schemas/crabs.json and schemas/ais.json pick
out the continuous columns and the sex label, and extra columns are
ignored at ingestion. Nothing here runs at build time.
"""

import sys
import urllib.request
from pathlib import Path

SOURCES = {
    "crabs.csv": "https://vincentarelbundock.github.io/Rdatasets/csv/MASS/crabs.csv",
    "ais.csv": "https://vincentarelbundock.github.io/Rdatasets/csv/DAAG/ais.csv",
}


def main() -> int:
    out_dir = Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(exist_ok=True)
    failures = 0
    for name, url in SOURCES.items():
        dest = out_dir / name
        if dest.exists():
            print(f"{dest} already present, skipping")
            continue
        try:
            print(f"fetching {url}")
            with urllib.request.urlopen(url, timeout=60) as resp:
                dest.write_bytes(resp.read())
            print(f"wrote {dest}")
        except OSError as exc:
            print(f"failed to fetch {name}: {exc}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
