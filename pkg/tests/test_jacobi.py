"""Special-function expansions against printed values and cross-checks."""

import pytest

from hilbk3.scalars import Q, I
from hilbk3 import jacobi
from hilbk3.jacobi import (
    FitError,
    bernoulli,
    closure_relations,
    deformed_g,
    deformed_j2,
    deformed_j3_half_grid,
    delta,
    diff,
    eisenstein,
    eta_and_delta,
    eta_quotient,
    f_half_specialization,
    f_u_expansion,
    f_w,
    f2_wp,
    g_series,
    generator,
    heat_equation_residual,
    inv_delta,
    inv_f2,
    j1,
    j1_w,
    k_series,
    qjac_fit,
    theta_d4,
    theta_d4_lattice_sum,
    theta_f,
    theta1,
    weierstrass_cubic_residual_capped,
    weierstrass_cubic_residual_exact,
    wp,
    wp_dot,
    wp_w,
)


def test_bernoulli():
    assert [bernoulli(n) for n in range(9)] == [
        1, Q(-1, 2), Q(1, 6), 0, Q(-1, 30), 0, Q(1, 42), 0, Q(-1, 30)
    ]


def test_theta_function_rows():
    F = theta_f(2)
    assert dict(F.q_row(0)) == {-1: I, 1: -I}
    K = k_series(2)
    assert dict(K.q_row(0)) == {-1: Q(-1), 1: Q(1)}
    # phi_{1,0} = -K = (s^-1 - s) + (-s^-3 + 3s^-1 - 3s + s^3) q + ...
    m = K.scale(Q(-1))
    assert dict(m.q_row(1)) == {-3: Q(-1), -1: Q(3), 1: Q(-3), 3: Q(1)}


def test_g_series_printed_rows():
    G = g_series(2)
    assert dict(G.q_row(0)) == {0: Q(1)}
    assert {k: G.coeff_y(1, k) for k in range(-2, 3)} == {
        -2: 1, -1: 4, 0: 6, 1: 4, 2: 1
    }
    assert {k: G.coeff_y(2, k) for k in range(-2, 3)} == {
        -2: 6, -1: 24, 0: 36, 1: 24, 2: 6
    }


def test_delta_and_inverse():
    D = delta(4)
    assert [D.coeff(d, 0) for d in range(1, 5)] == [1, -24, 252, -1472]
    iD = inv_delta(3)
    assert [iD.coeff(d, 0) for d in range(-1, 3)] == [1, 24, 324, 3200]
    assert (D * iD) == 1


def test_eisenstein_normalizations():
    assert [eisenstein(2, 3).coeff(d, 0) for d in range(4)] == [1, -24, -72, -96]
    assert eisenstein(4, 1).coeff(1, 0) == 240
    assert eisenstein(6, 1).coeff(1, 0) == -504


def test_wp_rows():
    P = wp(1, 8)
    assert P.coeff(0, 0) == Q(1, 12)
    assert P.coeff(0, 2) == 1 and P.coeff(0, 4) == 2
    # q^1 row: m | 1 only: s^2 - 2 + s^-2
    assert dict(P.q_row(1)) == {2: Q(1), 0: Q(-2), -2: Q(1)}
    # dz wp = wp_dot
    assert P.dz().eq_report(wp_dot(1, 8))[0]


def test_inv_f2_tail():
    v = inv_f2(2, 10)
    assert dict((e, c) for e, c in v.q_row(0).items() if e <= 6) == {
        2: Q(-1), 4: Q(-2), 6: Q(-3)
    }
    # F^2 * (1/F^2) = 1 on the reliable window
    F2 = theta_f(2) ** 2
    assert (F2 * v) == 1


def test_closure_heat_cubic():
    for name, res in closure_relations(4):
        assert res.is_zero(), name
    assert heat_equation_residual(6).is_zero()
    assert weierstrass_cubic_residual_exact(6).is_zero()
    assert weierstrass_cubic_residual_capped(4, 10).is_zero()


def test_eta_and_delta():
    D, eta24 = eta_and_delta(5)
    assert D.eq_report(eta24)[0]
    quot = eta_quotient(6, [(2, 8), (1, -4)])
    assert Q(quot.prefactor) == Q(1, 2)
    with pytest.raises(ValueError):
        quot.to_qseries()
    # Delta(2 tau) = q^2 - 24 q^4 + ...
    d2 = delta(3).subs_q_power(2)
    assert d2.coeff(2, 0) == 1 and d2.coeff(4, 0) == -24 and d2.coeff(3, 0) == 0


def test_theta_d4_identities():
    q_max = 6
    th = theta_d4(q_max)
    assert Q(th.prefactor) == Q(1, 2)
    vals = th.series.subs_s_value(Q(1))
    assert all(v == 0 for v in vals.values())
    t1 = theta1(q_max)
    quot = eta_quotient(q_max, [(2, 6), (1, -3)])
    rhs = (t1.series * quot.series).scale(-1)
    assert Q(t1.prefactor) + Q(quot.prefactor) == Q(1, 2)
    assert th.series.eq_report(rhs)[0]
    ls = theta_d4_lattice_sum(q_max)
    rhs2 = eta_quotient(q_max, [(2, 8), (1, -4)])
    assert ls.series.eq_report(rhs2.series.scale(2))[0]


def test_f_half_specialization():
    lhs, rhs = f_half_specialization(5)
    assert all(lhs[d] == rhs[d] for d in range(6))


def test_w_expansions_cross_check():
    # dz F = J1 * F holds between the two independent w-expansion routes
    F = theta_f(3)
    lhs = F.dz().substitute_w(7)
    rhs = j1_w(8, 3) * f_w(8, 3)
    assert lhs.eq_report(rhs)[0]
    # F^2 wp via exact rows vs the generator w-expansions
    lhs2 = f2_wp(3).substitute_w(6)
    rhs2 = f_w(9, 3) * f_w(9, 3) * wp_w(7, 3)
    assert lhs2.eq_report(rhs2)[0]
    # wp w-rows: w^-2 + E4 w^2/240 + ...
    ww = wp_w(4, 2)
    assert ww.coeff(-2, 0) == 1 and ww.coeff(0, 0) == 0
    assert ww.coeff(2, 0) == Q(1, 240) and ww.coeff(2, 1) == Q(240, 240)


def test_f_u_expansion():
    fu = f_u_expansion(2, 7)
    # q^0 part is 2 sin(u/2) = u - u^3/24 + u^5/1920 - ...
    assert fu.coeff(1, 0) == 1
    assert fu.coeff(3, 0) == Q(-1, 24)
    assert fu.coeff(5, 0) == Q(1, 1920)
    # consistency with the s-row route under w = i u: u^j rows pick up i^j
    F = theta_f(2)
    wser = F.substitute_w(7)
    for j in range(0, 8):
        for d in range(0, 3):
            assert fu.coeff(j, d) == wser.coeff(j, d) * I**j, (j, d)


def test_deformed_eisenstein_values():
    # J_{2,1} enters dz^3 T = -4 - 8 J_{2,1} - 16 G_1; spot check at q^1
    j21 = deformed_j2(1, 2, 8)
    assert j21.coeff(0, 0) == Q(-1, 2)
    assert j21.coeff_y(1, 1) == -1 and j21.coeff_y(1, -1) == 1
    g1 = deformed_g(1, 3)
    assert g1.coeff(0, 0) == 0
    assert g1.coeff(1, 4) == -1 and g1.coeff(1, -4) == 1
    j32 = deformed_j3_half_grid(2, 4)
    assert j32.coeff(0, 0) == Q(-1, 12)
    assert dict(j32.q_row(1)) == {-2: Q(1), 2: Q(1)}


def test_generator_registry_and_diff():
    g = generator("G", 2)
    assert (g.weight, g.index2, g.pole_order_z0) == (0, 2, 0)
    f = generator("F", 2)
    assert (f.weight, f.index2, f.pole_order_z0) == (-1, 1, 0)
    dz_f = diff(f, "z")
    assert (dz_f.weight, dz_f.index2, dz_f.pole_order_z0) == (0, 1, 1)
    dt_f = diff(f, "tau")
    assert dt_f.weight == 1
    prod = f * g
    assert (prod.weight, prod.index2) == (-1, 3)
    with pytest.raises(KeyError):
        generator("nope", 2)
    with pytest.raises(ValueError):
        generator("F", -1)


def test_qjac_fit_examples():
    F2 = theta_f(4) ** 2
    fit = qjac_fit(F2.scale(Q(-1)), 0, 2)
    assert fit.coeffs == {(0, 0, 0, 0, 0): Q(-1)}
    assert fit.holomorphic
    fit = qjac_fit(g_series(4), 2, 2)
    assert fit.coeffs == {(0, 0, 0, 1, 0): Q(-1), (1, 0, 0, 0, 0): Q(1, 12)}
    fit = qjac_fit(eisenstein(2, 4), 2, 0)
    assert fit.coeffs == {(1, 0, 0, 0, 0): Q(1)}
    with pytest.raises(FitError):
        qjac_fit(delta(4), 6, 0)  # weight 12 is outside the basis
