"""Generating-series tables: curve counts, genus 1, hyperelliptic/BPS."""

import pytest

from hilbk3.scalars import Q, GaussianRational
from hilbk3 import gwseries, jacobi


def test_yau_zaslow_against_oracles():
    n = gwseries.yau_zaslow(10)
    assert (n[0], n[1], n[2], n[3]) == (1, 24, 324, 3200)
    oracle = gwseries.yau_zaslow_sigma_oracle(10)
    assert all(n[h] == oracle[h] for h in range(11))
    brute = jacobi.euler_product_power(10, 1, -24)
    assert all(n[h] == brute.coeff(h, 0) for h in range(11))


def test_theorem_series():
    t = gwseries.theorem_series("lagrangian", 1, 4)
    n = gwseries.yau_zaslow(5)
    assert all(t.rows.get((h, 0)) == n[h] for h in range(5))
    assert not any(k for (h, k) in t.rows if k != 0)
    t = gwseries.theorem_series("cf", 2, 3)
    assert t.rows[(0, 0)] == 1  # G/Delta picks up 1 at q^-1 * q^1
    t3 = gwseries.theorem_series("points", 2, 2)
    # (1/2) C(2,1) = 1, so the d=2 point-count table has no extra prefactor
    raw = jacobi.theta_f(3).dq() ** 2 * jacobi.inv_delta(3)
    assert all(
        t3.rows.get((qe + 1, k), Q(0)) == raw.coeff_y(qe, k)
        for qe in range(-1, 3)
        for k in range(-3, 4)
    )
    # extra evaluation: F dqF = (1/2) dq(F^2)
    ex = gwseries.theorem_series("extra", 2, 2)
    half = (jacobi.theta_f(3) ** 2).dq().scale(Q(1, 2)) * jacobi.inv_delta(3)
    assert all(
        ex.rows.get((qe + 1, k), Q(0)) == half.coeff_y(qe, k)
        for qe in range(-1, 3)
        for k in range(-3, 4)
    )
    with pytest.raises(ValueError):
        gwseries.theorem_series("cf", 1, 3)
    with pytest.raises(ValueError):
        gwseries.theorem_series("nope", 2, 3)


def test_k_window_bound():
    # F^(2d-2)/Delta has |k| <= h + d - 1 at the q^(h-1) row
    for d in (2, 3):
        t = gwseries.theorem_series("lagrangian", d, 4)
        for (h, k) in t.rows:
            assert abs(k) <= h + d - 1


def test_genus1_closed_form():
    g1 = gwseries.genus1_closed_form(2)
    assert {k: g1.coeff_y(-1, k) for k in (-1, 0, 1)} == {-1: 3, 0: -48, 1: 3}
    for d in range(-1, 3):
        row = g1.q_row(d)
        assert all(not isinstance(c, GaussianRational) for c in row.values())
        assert all(row.get(e) == row.get(-e) for e in row)


def test_hyperelliptic_tables():
    hyp = gwseries.hyperelliptic_tables(10, 6)
    assert hyp.H_rows[(3, 2)] == Q(-1, 4)
    assert hyp.H_rows[(3, 1)] == 0
    for (g, h), v in gwseries.TABLE1.items():
        if h <= 10:
            assert hyp.h_rows.get((g, h), Q(0)) == v, (g, h)
    for (g, h), v in hyp.h_rows.items():
        if v:
            assert h >= gwseries.ck_vanishing_bound(g), (g, h)
        if h in (0, 1):
            assert v == 0


def test_bps_round_trip():
    hyp = gwseries.hyperelliptic_tables(8, 5)
    basis = gwseries._sin_basis(5)
    for h in range(0, 9):
        for G in range(2, 6):
            total = sum(
                hyp.h_rows.get((g, h), Q(0))
                * basis[g].rows.get(2 * G + 2, {}).get(0, Q(0))
                for g in range(2, G + 1)
            )
            assert total == hyp.H_rows.get((G, h), Q(0))


@pytest.mark.slow
def test_table1_full_window():
    hyp = gwseries.hyperelliptic_tables(15, 6)
    for (g, h), v in gwseries.TABLE1.items():
        assert hyp.h_rows.get((g, h), Q(0)) == v


def test_csv_layouts():
    hyp = gwseries.hyperelliptic_tables(4, 3)
    text = hyp.to_csv()
    assert text.splitlines()[0] == "h,g2,g3"
    assert text.splitlines()[1].startswith("2,1,")
    t = gwseries.theorem_series("lagrangian", 2, 2)
    assert t.to_csv().splitlines()[0] == "h,k,value"
