"""Core series arithmetic: ring laws, truncation bookkeeping, JSON round-trip."""

import json

import pytest
from hypothesis import given, settings, strategies as st

from hilbk3.scalars import Q, I, gr
from hilbk3.series import (
    QSeries,
    WindowError,
    assert_series_equal,
    qseries_from_json,
    qseries_to_json,
)


def mono(c, s_exp, q_exp, q_max=8):
    return QSeries.monomial(Q(c), s_exp, q_exp, q_max)


scalars = st.integers(-6, 6).map(Q)


@st.composite
def small_series(draw, q_min=0, q_max=5):
    rows = {}
    for d in range(q_min, q_max + 1):
        row = {}
        for _ in range(draw(st.integers(0, 3))):
            e = draw(st.integers(-4, 4))
            c = draw(scalars)
            if c:
                row[e] = c
        rows[d] = row
    return QSeries.from_rows(rows, q_min, q_max)


@given(small_series(), small_series(), small_series())
@settings(max_examples=60, deadline=None)
def test_ring_laws(a, b, c):
    assert (a + b) == (b + a)
    assert ((a + b) + c) == (a + (b + c))
    assert (a * b) == (b * a)
    assert ((a * b) * c).eq_report(a * (b * c))[0]
    lhs = a * (b + c)
    rhs = a * b + a * c
    assert lhs.eq_report(rhs)[0]


@given(small_series(), small_series())
@settings(max_examples=60, deadline=None)
def test_derivations(a, b):
    ab = a * b
    assert ab.dz().eq_report(a.dz() * b + a * b.dz())[0]
    assert ab.dq().eq_report(a.dq() * b + a * b.dq())[0]


@given(small_series())
@settings(max_examples=40, deadline=None)
def test_substitute_w_multiplicative(a):
    w = a.substitute_w(6)
    ww = (a * a).substitute_w(6)
    prod = w * w
    eq, _, _ = ww.eq_report(prod)
    assert eq


@given(small_series())
@settings(max_examples=40, deadline=None)
def test_substitute_w_intertwines_dz(a):
    lhs = a.dz().substitute_w(5)
    rhs = a.substitute_w(6).ddw()
    assert lhs.eq_report(rhs)[0]


def test_add_examples():
    a = mono(1, 0, -1)
    assert (a + a.scale(-1)).is_zero()
    b = QSeries.from_rows({0: {0: Q(1)}, 1: {0: Q(24)}}, 0, 8)
    assert (b + QSeries.zero(8)) == b
    c = QSeries.from_rows({0: {-1: Q(1), 1: Q(-1)}}, 0, 8)
    d = QSeries.from_rows({0: {1: Q(1)}}, 0, 8)
    assert (c + d) == QSeries.from_rows({0: {-1: Q(1)}}, 0, 8)


def test_mul_geometric_inverse():
    one_minus_q = QSeries.from_rows({0: {0: Q(1)}, 1: {0: Q(-1)}}, 0, 10)
    geo = QSeries.from_rows({d: {0: Q(1)} for d in range(11)}, 0, 10)
    prod = one_minus_q * geo
    assert prod == QSeries.const(1, 9)


def test_invert_monomial_and_identity():
    one = QSeries.const(1, 6)
    assert one.invert() == one
    m = mono(1, 2, 1, 6)
    inv = m.invert()
    assert inv.coeff(-1, -2) == 1
    assert (m * inv) == QSeries.const(1, 4)


def test_invert_rejects_binomial_lead():
    a = QSeries.from_rows({0: {-1: Q(1), 1: Q(1)}}, 0, 5)
    with pytest.raises(ValueError):
        a.invert()


@given(small_series(q_min=1, q_max=5), st.integers(-3, 3), scalars)
@settings(max_examples=50, deadline=None)
def test_invert_two_sided(tail, lead_exp, lead_coeff):
    if not lead_coeff:
        lead_coeff = Q(1)
    a = QSeries.monomial(lead_coeff, lead_exp, 0, 5) + tail
    inv = a.invert()
    one = a * inv
    eq, q_ver, _ = one.eq_report(QSeries.const(1, one.q_max))
    assert eq and q_ver == one.q_max
    eq2, _, _ = (inv * a).eq_report(QSeries.const(1, one.q_max))
    assert eq2


def test_mul_window_bookkeeping_with_negative_qmin():
    # a known through q^5 with q_min -1, times b with q_min 1: product
    # reliable through min(5+1, (b.q_max)+(-1))
    a = QSeries.from_rows({d: {0: Q(1)} for d in range(-1, 6)}, -1, 5)
    b = QSeries.from_rows({d: {0: Q(1)} for d in range(1, 4)}, 1, 3)
    p = a * b
    assert p.q_min == 0
    assert p.q_max == min(5 + 1, 3 - 1)


def test_s_cap_propagation():
    a = QSeries.from_rows({0: {2: Q(1), 4: Q(1)}}, 0, 3, s_cap=4)
    b = QSeries.from_rows({0: {-2: Q(1)}}, 0, 3)
    p = a * b
    assert p.s_cap == 4 - 2
    assert p.coeff(0, 0) == 1
    with pytest.raises(WindowError):
        p.coeff(0, 4)


def test_eq_reports_window():
    a = QSeries.const(1, 5)
    b = QSeries.const(1, 3)
    eq, q_ver, cap = a.eq_report(b)
    assert eq and q_ver == 3 and cap is None
    with pytest.raises(AssertionError):
        assert_series_equal(a, b, q_order=5)


def test_dz_dq_examples():
    y2 = mono(1, 4, 0)  # y^2 stored as s^4
    assert y2.dz() == y2.scale(2)
    const = QSeries.const(7, 4)
    assert const.dz().is_zero()
    assert const.dq().is_zero()
    qm1 = mono(1, 0, -1, 4)
    assert qm1.dq() == qm1.scale(-1)


def test_substitute_w_exponential():
    # y + 1/y stored in s: -s^2 - s^-2 -> -2cosh(w) = -2 - w^2 - w^4/12
    a = QSeries.from_rows({0: {2: Q(-1), -2: Q(-1)}}, 0, 2)
    w = a.substitute_w(4)
    assert w.coeff(0, 0) == -2
    assert w.coeff(1, 0) == 0
    assert w.coeff(2, 0) == -1
    assert w.coeff(4, 0) == Q(-1, 12)
    c = QSeries.const(5, 2).substitute_w(4)
    assert c.coeff(0, 0) == 5 and c.coeff(1, 0) == 0


def test_json_roundtrip():
    a = QSeries.from_rows(
        {-1: {0: Q(1)}, 0: {-1: gr(Q(1, 2), Q(-3, 7)), 1: Q(5)}}, -1, 2, s_cap=9
    )
    blob = json.dumps(qseries_to_json(a), sort_keys=True)
    b = qseries_from_json(json.loads(blob))
    assert a.eq_report(b)[0]
    assert b.s_cap == 9
    assert json.dumps(qseries_to_json(b), sort_keys=True) == blob


def test_gaussian_scalars():
    x = gr(1, 2)
    y = gr(3, -1)
    assert x * y == gr(5, 5)
    assert (x / y) * y == x
    assert I * I == -1
    assert gr(4, 0) == Q(4)
