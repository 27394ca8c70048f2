#!/usr/bin/env python3
"""Rebuild the shipped catalog data files from the source presentations
and verify every entry exactly before writing."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mmsym import catalog
from mmsym.core import residual


def main():
    for name, dec in catalog.source_decompositions().items():
        _, norm_sq = residual(dec)
        if norm_sq != 0:
            raise SystemExit(f"{name}: residual {norm_sq}, refusing to write")
        print(f"{name}: {dec.rank} terms, residual 0")
    for path in catalog.regenerate_data():
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
