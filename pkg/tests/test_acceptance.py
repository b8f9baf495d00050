"""Acceptance gate: one pass/fail line per criterion.

Runs every verification suite at its pinned window (including the
long-gated ones; they are cheap enough here) and reports the outcome per
criterion.  Run with `pytest tests/test_acceptance.py -v -s` to see the
timing and detail lines.
"""

import pytest

from hilbk3 import verify

CRITERIA = [
    ("01 Yau-Zaslow counts", "yau-zaslow"),
    ("02 D4 theta identities", "theta"),
    ("03 differentiation closure", "closure"),
    ("04 WDVV solver vs closed forms", "wdvv"),
    ("05 structure-series expansions", "phi"),
    ("06 operator WDVV (divisor classes)", "conj-a"),
    ("07 Hilb^2 evaluations", "hilb2"),
    ("08 worked examples d<=4", "examples"),
    ("09 genus-1 potential", "genus1"),
    ("10 hyperelliptic Table 1", "table1"),
    ("11 section-class restriction", "a1"),
    ("12 quasi-Jacobi certification", "qjac-fit"),
]


@pytest.fixture(scope="module")
def results():
    out = {r.name: r for r in verify.run(long=True)}
    print()
    for label, key in CRITERIA:
        r = out[key]
        print(f"{'PASS' if r.ok else 'FAIL'}  {label:38s} {r.seconds:7.1f}s  {r.detail}")
    return out


@pytest.mark.parametrize("label,key", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(results, label, key):
    r = results[key]
    assert r.ok, f"{label}: {r.detail}"
