#!/usr/bin/env python3
"""Emit the hyperelliptic BPS counting table as CSV (rows h, columns g).

Usage: python scripts/hyperelliptic_table.py [--h-max 15] [--g-max 6]
"""

import argparse
import sys

from hilbk3 import gwseries


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h-max", type=int, default=15)
    ap.add_argument("--g-max", type=int, default=6)
    ap.add_argument("--virtual", action="store_true", help="emit the virtual counts instead")
    ns = ap.parse_args()
    table = gwseries.hyperelliptic_tables(ns.h_max, ns.g_max)
    if ns.virtual:
        gs = list(range(2, ns.g_max + 1))
        print("h," + ",".join(f"g{g}" for g in gs))
        for h in range(0, ns.h_max + 1):
            print(f"{h}," + ",".join(str(table.H_rows.get((g, h), 0)) for g in gs))
    else:
        sys.stdout.write(table.to_csv())
    return 0


if __name__ == "__main__":
    sys.exit(main())
