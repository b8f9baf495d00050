"""Nakajima calculus, structure series and the quantum operator."""

import pytest
from hypothesis import given, settings, strategies as st

from hilbk3.scalars import Q
from hilbk3 import jacobi
from hilbk3.fock import (
    FockVector,
    MissingPhiError,
    PhiTable,
    QuantumContext,
    SectionContext,
    SurfaceModel,
    VAC,
    a1_restriction_check,
    adjoint_check,
    basis_monomials,
    diagonal_class,
    dual_pairs,
    heisenberg_check,
    hilb2_two_point_table as fock_hilb2,
    inner,
    inner_mono,
    k_degree,
    l0_apply,
    l0_commutator_check,
    lehn_delta_apply,
    mono,
    nak_apply,
    nak_apply_class,
    self_adjoint_check,
    well_definedness_check,
    wdvv_operator_check,
)
from hilbk3.tests_data import PHI_PRINTED


@pytest.fixture(scope="module")
def k3():
    return SurfaceModel.k3_rank24()


@pytest.fixture(scope="module")
def mini():
    return SurfaceModel.elliptic_mini()


def test_model_pairings(k3):
    assert k3.pair(k3.E, k3.W) == 1
    assert k3.pair(k3.B, k3.B) == -2
    assert k3.pair(k3.B, k3.F) == 1
    assert k3.pair(k3.F, k3.F) == 0
    assert k3.n_classes == 24
    # unimodular degree-2 lattice
    ginv = k3.gram_inverse_full()
    assert all(v.denominator == 1 for row in ginv for v in row)


def test_basis_monomial_counts(k3):
    assert len(basis_monomials(k3, 1)) == 24
    assert len(basis_monomials(k3, 2)) == 324


def test_nakajima_examples(k3):
    v = FockVector.unit(mono((1, k3.E)))
    assert dict(nak_apply(k3, 1, k3.W, v)) == {VAC: Q(-1)}
    v2 = FockVector.unit(mono((2, k3.W)))
    assert dict(nak_apply(k3, 2, k3.E, v2)) == {VAC: Q(-2)}
    assert not nak_apply(k3, 1, k3.F, FockVector.unit(VAC))


def test_inner_products(k3):
    assert inner_mono(k3, mono((1, k3.W)), mono((1, k3.E))) == 1
    assert inner(k3, diagonal_class(k3, 2), FockVector.unit(mono((2, k3.W)))) == -2
    d = 3
    fact2 = Q(2)
    Dg = FockVector.unit(mono((1, k3.F), (1, k3.E), (1, k3.E)), 1 / fact2)
    Cb = FockVector.unit(mono((1, k3.B), (1, k3.W), (1, k3.W)))
    assert inner(k3, Dg, Cb) == k3.pair(k3.F, k3.B)


def test_randomized_operator_checks(k3, mini):
    assert heisenberg_check(k3).ok
    assert adjoint_check(k3).ok
    assert l0_commutator_check(mini).ok
    assert l0_commutator_check(k3, trials=10).ok


@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_adjoint_rule_property(mini, m, ci_seed, d):
    ci = ci_seed % mini.n_classes
    lows = basis_monomials(mini, d) if d else [VAC]
    his = basis_monomials(mini, d + m)
    x = FockVector.unit(lows[ci_seed % len(lows)])
    y = FockVector.unit(his[(ci_seed * 7 + m) % len(his)])
    lhs = inner(mini, nak_apply(mini, -m, ci, x), y)
    rhs = Q(-1) ** m * inner(mini, x, nak_apply(mini, m, ci, y))
    assert lhs == rhs


def test_l0_energy_and_vacuum(k3):
    gamma = [(k3.F, Q(1))]
    assert not l0_apply(k3, gamma, FockVector.unit(VAC))
    with pytest.raises(ValueError):
        l0_apply(k3, [(k3.W, Q(1))], FockVector.unit(mono((1, k3.E))))


def test_lehn_delta(k3):
    assert not lehn_delta_apply(k3, FockVector.unit(VAC))
    assert not lehn_delta_apply(k3, FockVector.unit(mono((1, k3.B))))
    unit2 = FockVector.unit(mono((1, k3.E), (1, k3.E)), Q(1, 2))
    dl = lehn_delta_apply(k3, unit2)
    assert dict(dl) == dict(diagonal_class(k3, 2).scaled(Q(-1, 2)))
    assert inner(k3, dl, FockVector.unit(mono((2, k3.W)))) == 1
    # self-adjointness on a sample pair
    a = FockVector.unit(mono((1, k3.B), (1, k3.F)))
    b = FockVector.unit(mono((2, k3.class_index("g1"))))
    assert inner(k3, lehn_delta_apply(k3, a), b) == inner(k3, a, lehn_delta_apply(k3, b))


def test_phi_printed_rows():
    phi = PhiTable(2)
    for (m, l), (row0, row1) in PHI_PRINTED.items():
        s = phi.get(m, l)
        assert dict(s.q_row(0)) == row0, (m, l)
        assert dict(s.q_row(1)) == row1, (m, l)


def test_phi_symmetries_and_errors():
    phi = PhiTable(2)
    for (m, l) in [(1, 2), (1, -2), (2, 3), (1, 3), (-2, 1), (-1, -1), (2, -3)]:
        assert phi.get(m, l).eq_report(phi.get(-m, -l).scale(Q(-1)))[0]
        assert phi.get(m, l).scale(Q(l)).eq_report(phi.get(l, m).scale(Q(m)))[0]
    assert phi.get(0, 5).is_zero()
    with pytest.raises(MissingPhiError):
        phi.get(3, -3)
    with pytest.raises(MissingPhiError):
        phi.get(4, 1)
    with pytest.raises(MissingPhiError):
        phi.get(0, 0)


@pytest.fixture(scope="module")
def ctx(k3):
    return QuantumContext(k3, 3)


def test_e_base_case(ctx):
    base = ctx.e_elem(0, VAC, VAC)
    assert base.eq_report(ctx.inv_f2d)[0]
    assert ctx.e_elem(1, VAC, VAC).is_zero()
    assert ctx.e_elem(-1, VAC, VAC).is_zero()
    # q^-1 row of 1/(F^2 Delta) is y/(1+y)^2
    assert base.coeff(-1, 2) == -1 and base.coeff(-1, 4) == -2


def test_worked_example_brackets(ctx, k3):
    invD = jacobi.inv_delta(4)
    F = jacobi.theta_f(4)
    G = jacobi.g_series(4)
    for d in (1, 2, 3):
        u = FockVector.unit(mono(*[(1, k3.F)] * d))
        target = (F ** (2 * d - 2) * invD) if d > 1 else invD
        assert ctx.ehilb_bracket(u, u).eq_report(target)[0], d
    CF = FockVector.unit(mono((1, k3.F), (1, k3.W)))
    DF = FockVector.unit(mono((1, k3.F), (1, k3.E)))
    assert ctx.ehilb_bracket(CF, DF).eq_report(G * invD)[0]
    A = FockVector.unit(mono((2, k3.W)))
    assert ctx.ehilb_bracket(A, DF).eq_report(G.dz() * invD * Q(-1, 2))[0]
    IP = FockVector.unit(mono((1, k3.W), (1, k3.E)))
    assert ctx.ehilb_bracket(IP, IP).eq_report(F.dq() * F.dq() * invD)[0]
    FF = FockVector.unit(mono((1, k3.F), (1, k3.F)))
    assert ctx.ehilb_bracket(FF, IP).eq_report(F * F.dq() * invD)[0]


def test_w_insertions_match_dq_power(ctx, k3):
    invD = jacobi.inv_delta(4)
    W = [(k3.B, Q(1)), (k3.F, Q(1))]
    v = FockVector.unit(VAC)
    for _ in range(2):
        v = nak_apply_class(k3, -1, W, v)
    target = (jacobi.theta_f(4) ** 2 * invD).dq().dq().dq().dq()
    assert ctx.ehilb_bracket(v, v).eq_report(target)[0]


def test_bracket_errors(ctx, k3):
    with pytest.raises(ValueError):
        ctx.ehilb_bracket(
            FockVector.unit(mono((1, k3.F))),
            FockVector.unit(mono((1, k3.F), (1, k3.F))),
        )


def test_well_definedness_and_self_adjointness(ctx):
    assert well_definedness_check(ctx).ok
    assert self_adjoint_check(ctx, 2, trials=8).ok


def test_operator_wdvv_small(ctx, k3):
    gamma = [(k3.F, Q(1))]
    gamma2 = [(k3.B, Q(1))]
    assert wdvv_operator_check(ctx, gamma, gamma2, 1, mode="full").ok
    assert wdvv_operator_check(ctx, gamma, gamma2, 2, mode="sampled", sample=25).ok
    # gamma = gamma2 makes identity 1 trivially zero
    r = wdvv_operator_check(ctx, gamma, gamma, 1, mode="sampled", sample=5)
    assert r.ok


def test_a1_restriction_small(k3):
    ctx = QuantumContext(k3, 1, s_cap=14)
    assert a1_restriction_check(ctx, 2, s_through=10, sample=60).ok


def test_contraction_weights_give_trace(mini):
    # sum g^{ef} <T_e | T_f> over the energy-2 basis is dim F_2
    n = mini.n_classes
    ginv = mini.gram_inverse_full()
    total = Q(0)
    for a in range(n):
        for b in range(n):
            w = ginv[a][b]
            if w:
                total += Q(-1, 2) * w * inner_mono(mini, mono((2, a)), mono((2, b)))
    nz = [(a, b, ginv[a][b]) for a in range(n) for b in range(n) if ginv[a][b]]
    for a, c, w1 in nz:
        for b, d, w2 in nz:
            p = inner_mono(mini, mono((1, a), (1, b)), mono((1, c), (1, d)))
            if p:
                total += Q(1, 2) * w1 * w2 * p
    assert total == len(basis_monomials(mini, 2))


def test_hilb2_table_interface(mini):
    ctx = QuantumContext(mini, 2, s_cap=12)
    pairs = [(mono((1, mini.F), (1, mini.F)), mono((1, mini.F), (1, mini.F)))]
    table, h2 = fock_hilb2(ctx, pairs)
    assert set(table) == {pairs[0]}
    direct = ctx.ehilb_bracket(
        FockVector.unit(pairs[0][0]), FockVector.unit(pairs[0][1])
    )
    assert table[pairs[0]].eq_report(direct)[0]
    assert h2.q_min == -1


def test_section_context_base(k3):
    sec = SectionContext(k3, 10)
    row = sec.eb_elem(0, VAC, VAC)
    assert row[2] == -1 and row[4] == -2
    assert sec.eb_elem(1, VAC, VAC) == {}


def test_k_grading_bookkeeping(k3):
    for m in basis_monomials(k3, 2)[:20]:
        assert k_degree(m, k3) == sum(k3.k_deg[c] for _n, c in m)
    pairs = list(dual_pairs(k3, 1, k_sum=-1))
    assert all(
        k_degree(a, k3) + k_degree(b, k3) == -1 for a, b in pairs
    )
