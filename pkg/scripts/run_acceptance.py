#!/usr/bin/env python3
"""Run the acceptance suites and print one line per criterion.

Usage: python scripts/run_acceptance.py [--long] [--suite NAME ...]
"""

import argparse
import sys

from hilbk3 import verify


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--long", action="store_true", help="include long-running windows")
    ap.add_argument("--suite", action="append", help="run only the named suite(s)")
    ap.add_argument("--conja-mode", default="sampled", choices=["sampled", "full"])
    ns = ap.parse_args()
    results = verify.run(ns.suite, long=ns.long, conja_mode=ns.conja_mode)
    ok = True
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name:12s} {r.seconds:7.1f}s  {r.detail}")
        ok = ok and r.ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
