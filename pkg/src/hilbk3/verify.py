"""The acceptance suite: every headline identity at its pinned window.

Each suite function returns a SuiteResult and is deterministic.  The
windows (q-orders, s-degrees, basis sizes) are fixed here once; the CLI and
the test-suite both dispatch into this module so there is a single source
of truth for what "verified" means.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .scalars import Q, GaussianRational
from .series import QSeries
from . import jacobi, wdvv, gwseries, fock


@dataclass
class SuiteResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.time()
        ok, detail = fn(*a, **kw)
        return SuiteResult(fn.__name__.replace("suite_", "").replace("_", "-"), ok, detail, time.time() - t0)

    return wrapper


@_timed
def suite_yau_zaslow(long=False):
    """1/Delta against two independent expansions, through q^10."""
    n = gwseries.yau_zaslow(10)
    oracle = gwseries.yau_zaslow_sigma_oracle(10)
    if any(n[h] != oracle[h] for h in range(0, 11)):
        return False, "1/Delta disagrees with the divisor-sum recursion"
    if (n[1], n[2], n[3]) != (24, 324, 3200):
        return False, f"N_1..N_3 = {n[1:4]}"
    brute = jacobi.euler_product_power(10, 1, -24)
    if any(n[h] != brute.coeff(h, 0) for h in range(0, 11)):
        return False, "1/Delta disagrees with the brute-force product"
    return True, "N_h through q^10 match brute product and sigma recursion"


@_timed
def suite_theta(long=False):
    """D4 theta identities, coefficient-exact through q^12."""
    q_max = 12
    th = jacobi.theta_d4(q_max)
    t1 = jacobi.theta1(q_max)
    quot = jacobi.eta_quotient(q_max, [(2, 6), (1, -3)])
    if Q(th.prefactor) != Q(t1.prefactor) + Q(quot.prefactor):
        return False, "prefactor mismatch in the theta identity"
    rhs = (t1.series * quot.series).scale(-1)
    eq, qv, _ = th.series.eq_report(rhs)
    if not eq or qv < q_max:
        return False, f"Theta != -theta1 eta(2t)^6/eta^3 (q<={qv})"
    ls = jacobi.theta_d4_lattice_sum(q_max)
    rhs2 = jacobi.eta_quotient(q_max, [(2, 8), (1, -4)])
    eq2, qv2, _ = ls.series.eq_report(rhs2.series.scale(2))
    if not eq2 or qv2 < q_max or Q(ls.prefactor) != Q(rhs2.prefactor):
        return False, "lattice sum != 2 eta(2t)^8/eta^4"
    vals = th.series.subs_s_value(Q(1))
    if any(vals[d] for d in vals):
        return False, "Theta(0, tau) != 0"
    return True, f"both theta identities exact through q^{q_max}"


@_timed
def suite_closure(long=False):
    """Differentiation closure, heat equation and Weierstrass cubic, q^8."""
    q_max = 8
    for name, res in jacobi.closure_relations(q_max):
        if not res.is_zero():
            return False, f"closure relation {name} fails"
    if not jacobi.heat_equation_residual(q_max).is_zero():
        return False, "heat equation fails"
    if not jacobi.weierstrass_cubic_residual_exact(q_max).is_zero():
        return False, "Weierstrass cubic (exact route) fails"
    if not jacobi.weierstrass_cubic_residual_capped(6, 14).is_zero():
        return False, "Weierstrass cubic (capped route) fails"
    lhs, rhs = jacobi.f_half_specialization(q_max)
    if any(lhs[d] != rhs[d] for d in range(q_max + 1)):
        return False, "F(1/2) specialization fails"
    return True, f"eight closure relations + heat + cubic exact through q^{q_max}"


@_timed
def suite_wdvv(long=False):
    """solve(6,14) against the closed forms; residuals; ItoH; Trelations."""
    table = wdvv.solve(6, 14)
    for check in (
        wdvv.verify_closed_forms,
        wdvv.residual_check,
        wdvv.itoh_check,
        wdvv.trelations_check,
        wdvv.h_symmetry_check,
    ):
        r = check(table)
        if not r.ok:
            return False, r.detail
    return True, "solve(6,14): closed forms, W1-W6 residuals, ItoH, Trelations"


@_timed
def suite_phi(long=False):
    """Printed phi expansions, symmetries and grading invariants."""
    phi = fock.PhiTable(2)
    # grading of the closed forms: K^a J1^b wp^c wp'^e E2^f E4^g
    for (m, l), (a, terms) in fock._PHI_POLY.items():
        if a != abs(m) + abs(l):
            return False, f"phi({m},{l}): index {a}/2 != (|m|+|l|)/2"
        want_w = -1 if l == 0 else 0
        for (_c, jb, wc, we, e2p, e4p) in terms:
            w = -a + jb + 2 * wc + 3 * we + 2 * e2p + 4 * e4p
            if w != want_w:
                return False, f"phi({m},{l}): monomial weight {w} != {want_w}"
    # the printed numerical rows are asserted in the test-suite cell by
    # cell; here we re-derive them and check the structural symmetries
    checks = [
        ((1, 0), {-1: Q(1), 1: Q(-1)}),
        ((2, 0), {-2: Q(1), 2: Q(-1)}),
        ((3, 0), {-3: Q(1), 3: Q(-1)}),
        ((4, 0), {-4: Q(1), 4: Q(-1)}),
    ]
    for (m, l), row in checks:
        if dict(phi.get(m, l).q_row(0)) != row:
            return False, f"phi({m},{l}) leading row wrong"
    for (m, l) in [(1, 1), (1, -1), (2, 1), (2, -1), (2, 2), (2, -2), (3, 1), (3, 3)]:
        if phi.get(m, l).q_row(0):
            return False, f"phi({m},{l}) not O(q)"
        anti = phi.get(-m, -l).scale(Q(-1))
        if not phi.get(m, l).eq_report(anti)[0]:
            return False, f"antisymmetry fails at ({m},{l})"
        if not phi.get(m, l).scale(Q(l)).eq_report(phi.get(l, m).scale(Q(m)))[0]:
            return False, f"transposition fails at ({m},{l})"
    from .tests_data import PHI_PRINTED  # shared frozen rows

    for (m, l), (row0, row1) in PHI_PRINTED.items():
        s = phi.get(m, l)
        if dict(s.q_row(0)) != row0 or dict(s.q_row(1)) != row1:
            return False, f"printed rows of phi({m},{l}) not reproduced"
    return True, "printed expansions, gradings, antisymmetry and transposition"


@_timed
def suite_conj_a(long=False, d3_mode="sampled"):
    """Operator WDVV identities: full F_d basis for d<=2 through q^3,
    200 sampled pairs for d=3 behind the long flag (full d=3 on request)."""
    model = fock.SurfaceModel.k3_rank24()
    ctx = fock.QuantumContext(model, 3)
    gamma = [(model.F, Q(1))]
    gamma2 = [(model.B, Q(1))]
    r = fock.wdvv_operator_check(ctx, gamma, gamma2, 1, mode="full")
    if not r.ok:
        return False, r.detail
    checked = r.checked
    r = fock.wdvv_operator_check(ctx, gamma, gamma2, 2, mode="full")
    if not r.ok:
        return False, r.detail
    checked += r.checked
    gamma3 = [(model.class_index("g1"), Q(1))]
    r = fock.wdvv_operator_check(ctx, gamma, gamma3, 1, mode="full")
    if not r.ok:
        return False, f"(F,g1): {r.detail}"
    checked += r.checked
    detail = f"full basis d<=2 ({checked} pairs, q<=3)"
    if long:
        r = fock.wdvv_operator_check(ctx, gamma, gamma2, 3, mode=d3_mode, sample=200)
        if not r.ok:
            return False, r.detail
        detail += f" + {r.checked} {d3_mode} pairs at d=3"
    return True, detail


@_timed
def suite_hilb2_theorems(long=False):
    """The Hilb^2 evaluations through q^5 via the quantum operator."""
    model = fock.SurfaceModel.k3_rank24()
    q_max = 5
    ctx = fock.QuantumContext(model, q_max)
    invD = jacobi.inv_delta(q_max + 1)
    F = jacobi.theta_f(q_max + 1)
    G = jacobi.g_series(q_max + 1)
    e, B, Fc, w = model.E, model.B, model.F, model.W
    FV = fock.FockVector
    cases = [
        ("F^2/Delta", FV.unit(fock.mono((1, Fc), (1, Fc))),
         FV.unit(fock.mono((1, Fc), (1, Fc))), F * F * invD),
        ("G/Delta", FV.unit(fock.mono((1, Fc), (1, w))),
         FV.unit(fock.mono((1, Fc), (1, e))), G * invD),
        ("-1/2 dzG/Delta", FV.unit(fock.mono((2, w))),
         FV.unit(fock.mono((1, Fc), (1, e))), G.dz() * invD * Q(-1, 2)),
        ("(dqF)^2/Delta", FV.unit(fock.mono((1, w), (1, e))),
         FV.unit(fock.mono((1, w), (1, e))), F.dq() * F.dq() * invD),
        ("F dqF/Delta", FV.unit(fock.mono((1, Fc), (1, Fc))),
         FV.unit(fock.mono((1, w), (1, e))), F * F.dq() * invD),
    ]
    for label, u, v, target in cases:
        got = ctx.ehilb_bracket(u, v)
        eq, qv, _ = got.eq_report(target)
        if not eq or qv < q_max:
            return False, f"{label} fails (q<={qv})"
    return True, f"all five Hilb^2 evaluations exact through q^{q_max}"


@_timed
def suite_examples_d4(long=False):
    """Worked-example brackets at general d <= 4 through q^4."""
    model = fock.SurfaceModel.k3_rank24()
    q_max = 4
    ctx = fock.QuantumContext(model, q_max)
    invD = jacobi.inv_delta(q_max + 1)
    F = jacobi.theta_f(q_max + 1)
    G = jacobi.g_series(q_max + 1)
    e, B, Fc, w = model.E, model.B, model.F, model.W
    FV = fock.FockVector

    def fact(n):
        out = Q(1)
        for j in range(2, n + 1):
            out *= j
        return out

    for d in range(1, 5):
        u = FV.unit(fock.mono(*[(1, Fc)] * d))
        target = (F ** (2 * d - 2) if d > 1 else QSeries.const(1, q_max + 1)) * invD
        got = ctx.ehilb_bracket(u, u)
        if not got.eq_report(target)[0]:
            return False, f"F-insertions fail at d={d}"
        wvec = FV.unit(fock.VAC)
        for _ in range(d):
            wvec = fock.nak_apply_class(model, -1, [(B, Q(1)), (Fc, Q(1))], wvec)
        tgt2 = target
        for _ in range(2 * d):
            tgt2 = tgt2.dq()
        got = ctx.ehilb_bracket(wvec, wvec)
        if not got.eq_report(tgt2)[0]:
            return False, f"W-insertions fail at d={d}"
    for d in range(2, 5):
        CF = FV.unit(fock.mono((1, Fc), *[(1, w)] * (d - 1)))
        DF = FV.unit(fock.mono((1, Fc), *[(1, e)] * (d - 1)), 1 / fact(d - 1))
        got = ctx.ehilb_bracket(CF, DF)
        if not got.eq_report(G ** (d - 1) * invD)[0]:
            return False, f"C(F),D(F) fails at d={d}"
        A = FV.unit(fock.mono((2, w), *[(1, w)] * (d - 2)))
        got = ctx.ehilb_bracket(A, DF)
        target = (G.dz() * G ** (d - 2) * invD).scale(Q(-1, 2))
        if not got.eq_report(target)[0]:
            return False, f"A,D(F) fails at d={d}"
    return True, f"F/W/C(F)/A brackets for d<=4 exact through q^{q_max}"


@_timed
def suite_genus1(long=False):
    """The 324-term contraction against the genus-1 closed form, q^2."""
    model = fock.SurfaceModel.k3_rank24()
    ctx = fock.QuantumContext(model, 2, s_cap=14)
    got = fock.hilb2_contraction(ctx)
    target = gwseries.genus1_closed_form(2)
    row = {k: target.coeff_y(-1, k) for k in (-1, 0, 1)}
    if row != {-1: Q(3), 0: Q(-48), 1: Q(3)}:
        return False, f"closed-form q^-1 row is {row}"
    eq, qv, cap = got.eq_report(target)
    if not eq or qv < 2:
        return False, f"contraction mismatch (q<={qv})"
    if any(
        isinstance(c, GaussianRational)
        for d in range(-1, 3)
        for c in got.q_row(d).values()
    ):
        return False, "contraction has imaginary parts"
    return True, f"genus-1 potential matches closed form through q^{qv} (s<={cap})"


@_timed
def suite_table1(long=False):
    """Hyperelliptic BPS counts against the printed table."""
    h_max = 15 if long else 10
    hyp = gwseries.hyperelliptic_tables(h_max, 6)
    for (g, h), v in gwseries.TABLE1.items():
        if h <= h_max and hyp.h_rows.get((g, h), Q(0)) != v:
            return False, f"h({g},{h}) = {hyp.h_rows.get((g, h))} != {v}"
    for (g, h), v in hyp.h_rows.items():
        if v and h < gwseries.ck_vanishing_bound(g):
            return False, f"nonzero count below the existence bound at ({g},{h})"
        if h in (0, 1) and v:
            return False, f"h({g},{h}) != 0"
    # the prose value -1/4 sits at (g,h) = (3,2) under the table's own
    # indexing; (3,1) vanishes identically since (q dF/dq)^2 starts at q^2
    if hyp.H_rows.get((3, 2)) != Q(-1, 4):
        return False, f"H(3,2) = {hyp.H_rows.get((3, 2))} != -1/4"
    if hyp.H_rows.get((3, 1), Q(0)) != 0:
        return False, "H(3,1) should vanish"
    return True, f"Table 1 exact for h<={h_max}, vanishing pattern, H(3,2)=-1/4"


@_timed
def suite_a1(long=False):
    """Section-class restriction against the E_B recursion, d<=3, s<=12."""
    model = fock.SurfaceModel.k3_rank24()
    ctx = fock.QuantumContext(model, 1, s_cap=16)
    r = fock.a1_restriction_check(ctx, 3, s_through=12, sample=200)
    return r.ok, r.detail


@_timed
def suite_qjac_fit(long=False):
    """20 representative Hilb^2 brackets fit as index-1 quasi-Jacobi forms
    of the predicted weight 2 + sum(deg), verified on held-out q-orders and
    holomorphic at z = 0."""
    model = fock.SurfaceModel.k3_rank24()
    q_max = 8  # the weight-6 homogeneous basis needs this depth to pin
    ctx = fock.QuantumContext(model, q_max)
    D = jacobi.delta(q_max + 2)
    e, B, Fc, w = model.E, model.B, model.F, model.W
    g1 = model.class_index("g1")
    g3 = model.class_index("g3")
    FV = fock.FockVector
    W = [(B, Q(1)), (Fc, Q(1))]  # deg +1; F deg -1; e deg -1; w deg +1; g deg 0

    def vec(*parts):
        out = FV.unit(fock.VAC)
        for (n, spec) in parts:
            if isinstance(spec, list):
                out = fock.nak_apply_class(model, -n, spec, out)
            else:
                out = fock.nak_apply(model, -n, spec, out)
        return out

    # (left parts, right parts, sum of deg over all insertions)
    pairs = [
        ([(1, Fc), (1, Fc)], [(1, Fc), (1, Fc)], -4),
        ([(1, Fc), (1, w)], [(1, Fc), (1, e)], -2),
        ([(2, w)], [(1, Fc), (1, e)], -1),
        ([(1, w), (1, e)], [(1, w), (1, e)], 0),
        ([(1, Fc), (1, Fc)], [(1, w), (1, e)], -2),
        ([(2, Fc)], [(2, Fc)], -2),
        ([(2, Fc)], [(1, Fc), (1, Fc)], -3),
        ([(2, g1)], [(2, g1)], 0),
        ([(1, g1), (1, g1)], [(1, g1), (1, g1)], 0),
        ([(2, e)], [(2, w)], 0),
        ([(1, Fc), (1, g1)], [(1, Fc), (1, g1)], -2),
        ([(2, e)], [(1, w), (1, Fc)], -1),
        ([(1, g1), (1, g3)], [(1, g1), (1, g3)], 0),
        ([(1, W), (1, W)], [(1, W), (1, W)], 4),
        ([(1, W), (1, Fc)], [(1, W), (1, Fc)], 0),
        ([(1, W), (1, e)], [(1, W), (1, w)], 2),
        ([(2, W)], [(2, W)], 2),
        ([(2, W)], [(1, W), (1, W)], 3),
        ([(2, Fc)], [(2, W)], 0),
        ([(1, e), (1, w)], [(1, g1), (1, g1)], 0),
    ]
    fitted = 0
    for left, right, deg_sum in pairs:
        u, v = vec(*left), vec(*right)
        br = ctx.ehilb_bracket(u, v)
        if br.is_zero():
            return False, f"expected nonzero bracket for {left} | {right}"
        target = (br * D).truncate(q_max)
        fit = jacobi.qjac_fit(target, 6, 2)
        predicted = 2 + deg_sum
        if not fit.holomorphic:
            return False, f"fit not holomorphic for {left} | {right}"
        if set(fit.weights_used) != {predicted}:
            return False, (
                f"weights {fit.weights_used} != predicted {predicted} for {left} | {right}"
            )
        fitted += 1
    return True, f"{fitted} brackets fit at predicted weights, held-out verified"


ALL_SUITES = {
    "yau-zaslow": suite_yau_zaslow,
    "theta": suite_theta,
    "closure": suite_closure,
    "wdvv": suite_wdvv,
    "phi": suite_phi,
    "conj-a": suite_conj_a,
    "hilb2": suite_hilb2_theorems,
    "examples": suite_examples_d4,
    "genus1": suite_genus1,
    "table1": suite_table1,
    "a1": suite_a1,
    "qjac-fit": suite_qjac_fit,
}

LONG_ONLY = {"genus1"}


def run(names=None, long=False, conja_mode="sampled"):
    results = []
    for name, fn in ALL_SUITES.items():
        if names and name not in names:
            continue
        if not names and name in LONG_ONLY and not long:
            continue
        if name == "conj-a":
            res = fn(long=long, d3_mode=conja_mode)
        else:
            res = fn(long=long)
        res.name = name
        results.append(res)
    return results
