"""The coefficient recursion against its closed-form solution."""

import pytest

from hilbk3.scalars import Q
from hilbk3 import wdvv


@pytest.fixture(scope="module")
def table():
    return wdvv.solve(3, 7)


def test_initial_conditions():
    t = wdvv.initial_conditions(6)
    assert t.getT(0, 1) == 8 and t.getT(0, 2) == 1
    assert t.getH(0, -1) == 1
    assert t.getT(0, 0) == 0
    assert t.getH(0, -2) == 0 and t.getT(1, -3) == 0 and t.getI(2, -5) == 0


def test_solver_reproduces_first_values(table):
    assert table.getI(0, 0) == 2
    assert table.getH(0, 0) == 2 and table.getH(0, 1) == 1
    assert table.getT(1, -2) == 2 and table.getT(2, -4) == Q(1, 4)
    assert table.getT(1, -1) == 8 and table.getT(1, 0) == 12
    # q^0 row of F^2 = y^-1 + 2 + y
    assert table.getH(0, -1) == 1 and table.getH(0, 2) == 0


def test_closed_forms(table):
    assert wdvv.verify_closed_forms(table).ok


def test_residuals_and_relations(table):
    assert wdvv.residual_check(table).ok
    assert wdvv.residual_check(table, use_trelations=False).ok
    assert wdvv.itoh_check(table).ok
    assert wdvv.trelations_check(table).ok
    assert wdvv.h_symmetry_check(table).ok


def test_perturbation_detected(table):
    import copy

    bad = copy.deepcopy(table)
    bad.H[(1, 0)] = bad.H[(1, 0)] + 1
    r = wdvv.residual_check(bad)
    assert not r.ok and "(1,0)" in r.detail.replace(" ", "")


def test_window_monotone(table):
    small = wdvv.solve(2, 5)
    for d in range(0, 3):
        for k in range(-2 * d, small.k_hi[d] + 1):
            assert small.getH(d, k) == table.getH(d, k)
            assert small.getI(d, k) == table.getI(d, k)
            assert small.getT(d, k) == table.getT(d, k)


def test_closed_form_T_spot_values():
    assert wdvv.closed_form_T(0, 1) == 8
    assert wdvv.closed_form_T(0, 2) == 1
    assert wdvv.closed_form_T(1, -2) == 2
    assert wdvv.closed_form_T(2, -4) == Q(1, 4)
    # the q^1 y^0 cell: 12 sum_{k | 1} 1/k^3 = 12
    assert wdvv.closed_form_T(1, 0) == 12


def test_solve_rejects_bad_windows():
    with pytest.raises(ValueError):
        wdvv.solve(0, 4)
    with pytest.raises(ValueError):
        wdvv.solve(3, 4)


def test_csv_export(table):
    text = table.to_csv()
    assert text.splitlines()[0] == "d,k,H,I,T"
    assert "0,1,1,0,8" in text
