"""q-expansions of the special functions driving every generating series.

Conventions, fixed package-wide:

* q-rows are Laurent polynomials in s = (-y)^(1/2), i.e. y^k <-> (-1)^k s^(2k).
* The square-root branch is y^(1/2) = -i*s (this is what makes the theta
  function F = theta_1/eta^3 print with the first Jacobi theta's sign).
* K = i*F has purely rational rows; F itself has purely imaginary rows.

Functions with a pole at z = 0 (J1, wp, wp_prime, 1/F^2, ...) have rows with
an infinite geometric tail in the |y| < 1 expansion; those constructors take
an explicit s-cap.  Everything else is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from .scalars import Q, I, gr
from .series import QSeries, WSeries, WindowError

# ---------------------------------------------------------------------------
# small number theory helpers


def bernoulli(n):
    """Exact Bernoulli number B_n with the convention B_1 = -1/2."""
    if n == 0:
        return Q(1)
    if n == 1:
        return Q(-1, 2)
    if n % 2 == 1:
        return Q(0)
    # Akiyama-Tanigawa style recurrence on B_0..B_n
    a = [Q(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Q(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0] if n != 1 else Q(-1, 2)


def sigma(d, power):
    return sum(m**power for m in range(1, d + 1) if d % m == 0)


# ---------------------------------------------------------------------------
# exact product constructions


def delta(q_max):
    """Modular discriminant q * prod (1-q^m)^24."""
    out = QSeries.monomial(Q(1), 0, 1, q_max + 1)
    for m in range(1, q_max + 1):
        f = QSeries.from_rows({0: {0: Q(1)}, m: {0: Q(-1)}}, 0, q_max + 1)
        for _ in range(24):
            out = out * f
    return out.truncate(q_max)


def inv_delta(q_max):
    """1/Delta, reliable through q^{q_max}, starting at q^{-1}."""
    return delta(q_max + 2).invert().truncate(q_max)


def euler_product_power(q_max, scale, power):
    """prod_{m>=1} (1 - q^(scale*m))^power for integer power (may be < 0)."""
    out = QSeries.const(1, q_max)
    neg = power < 0
    for m in range(1, q_max // scale + 1):
        f = QSeries.from_rows({0: {0: Q(1)}, scale * m: {0: Q(-1)}}, 0, q_max)
        for _ in range(abs(power)):
            out = out * f
    if neg:
        out = out.invert().truncate(q_max)
    return out


def theta_f(q_max):
    """The Jacobi theta function F = theta_1/eta^3 (imaginary rows)."""
    out = QSeries.from_rows({0: {-1: I, 1: -I}}, 0, q_max)
    for m in range(1, q_max + 1):
        f = QSeries.from_rows({0: {0: Q(1)}, m: {2: Q(-1)}}, 0, q_max)
        g = QSeries.from_rows({0: {0: Q(1)}, m: {-2: Q(-1)}}, 0, q_max)
        out = out * f * g
    return out * euler_product_power(q_max, 1, -2)


def k_series(q_max):
    """K = i*F; all rows rational."""
    return theta_f(q_max).scale(I)


def eisenstein(weight, q_max):
    """E_{2k} normalized to constant term 1; weight = 2k."""
    if weight % 2 or weight < 2:
        raise ValueError("Eisenstein weight must be even and >= 2")
    k2 = weight
    factor = Q(-2 * weight, 1) / bernoulli(k2)
    rows = {0: {0: Q(1)}}
    for d in range(1, q_max + 1):
        rows[d] = {0: factor * sigma(d, k2 - 1)}
    return QSeries.from_rows(rows, 0, q_max)


def f_z_derivs(q_max, order=3):
    """[F, dz F, dz^2 F, ...] up to the requested order (exact)."""
    out = [theta_f(q_max)]
    for _ in range(order):
        out.append(out[-1].dz())
    return out


def g_series(q_max):
    """G = F^2 (y d/dy)^2 log F = F * dz^2 F - (dz F)^2 (exact rows)."""
    f, f1, f2 = f_z_derivs(q_max, 2)
    return f * f2 - f1 * f1


def f2_wp(q_max):
    """F^2 * wp = E2 F^2 / 12 - F dz^2 F + (dz F)^2 (exact rows)."""
    f, f1, f2 = f_z_derivs(q_max, 2)
    return eisenstein(2, q_max) * f * f * Q(1, 12) - f * f2 + f1 * f1


def f3_wp_dot(q_max):
    """F^3 * wp_prime = F dz(F^2 wp) - 2 (dz F)(F^2 wp) (exact rows)."""
    f, f1 = f_z_derivs(q_max, 1)
    p2 = f2_wp(q_max)
    return f * p2.dz() - f1 * p2 * 2


# ---------------------------------------------------------------------------
# capped constructions (infinite tails from the |y| < 1 region)


def _tail_row(coeff_of_j, s_cap):
    """Row sum_j c_j s^(2j) for j >= 1, truncated at the cap."""
    row = {}
    j = 1
    while 2 * j <= s_cap:
        c = coeff_of_j(j)
        if c:
            row[2 * j] = Q(c)
        j += 1
    return row


def j1(q_max, s_cap):
    """J1 = y d/dy log F; q^0 row is -1/2 - sum_j s^(2j)."""
    rows = {0: _tail_row(lambda j: -1, s_cap)}
    rows[0][0] = Q(-1, 2)
    for d in range(1, q_max + 1):
        r = {}
        for m in range(1, d + 1):
            if d % m == 0:
                r[2 * m] = r.get(2 * m, Q(0)) - 1
                r[-2 * m] = r.get(-2 * m, Q(0)) + 1
        rows[d] = r
    return QSeries.from_rows(rows, 0, q_max, s_cap)


def wp(q_max, s_cap):
    """Weierstrass wp; q^0 row is 1/12 + sum_j j s^(2j)."""
    rows = {0: _tail_row(lambda j: j, s_cap)}
    rows[0][0] = Q(1, 12)
    for d in range(1, q_max + 1):
        r = {}
        for m in range(1, d + 1):
            if d % m == 0:
                r[2 * m] = r.get(2 * m, Q(0)) + m
                r[-2 * m] = r.get(-2 * m, Q(0)) + m
                r[0] = r.get(0, Q(0)) - 2 * m
        rows[d] = r
    return QSeries.from_rows(rows, 0, q_max, s_cap)


def wp_dot(q_max, s_cap):
    """wp_prime = dz wp; q^0 row is sum_j j^2 s^(2j)."""
    rows = {0: _tail_row(lambda j: j * j, s_cap)}
    for d in range(1, q_max + 1):
        r = {}
        for m in range(1, d + 1):
            if d % m == 0:
                r[2 * m] = r.get(2 * m, Q(0)) + m * m
                r[-2 * m] = r.get(-2 * m, Q(0)) - m * m
        rows[d] = r
    return QSeries.from_rows(rows, 0, q_max, s_cap)


def inv_f2(q_max, s_cap):
    """1/F^2; q^0 tail is y/(1+y)^2 = -sum_j j s^(2j).

    Assembled as the closed-form leading row times exact geometric factors,
    so the cap bookkeeping of the product rule applies verbatim.
    """
    rest = euler_product_power(q_max, 1, 4)
    for m in range(1, q_max + 1):
        geo = {}
        geo_inv = {}
        for jj in range(0, q_max // m + 1):
            geo[m * jj] = {2 * jj: Q(1)}
            geo_inv[m * jj] = {-2 * jj: Q(1)}
        a = QSeries.from_rows(geo, 0, q_max)
        b = QSeries.from_rows(geo_inv, 0, q_max)
        rest = rest * a * a * b * b
    # single capped multiplication: the exact factors' lowest s-support sets
    # the price of the truncated geometric tail
    budget = s_cap - int(rest.min_s_support()) + 2
    lead = QSeries.from_rows({0: _tail_row(lambda j: -j, budget)}, 0, q_max, budget)
    out = lead * rest
    if out.s_cap is None or out.s_cap < s_cap:
        raise WindowError("inv_f2 cap budget too small")
    return out.truncate(s_cap=s_cap)


def inv_f2_delta(q_max, s_cap):
    return (inv_f2(q_max + 1, s_cap) * inv_delta(q_max + 1)).truncate(q_max)


# ---------------------------------------------------------------------------
# deformed Eisenstein series


def deformed_j2(n, q_max, s_cap):
    """J_{2,n}; for n = 1 the q^0 row carries the y/(y-1) tail."""
    rows = {0: {}}
    if n == 1:
        rows[0] = _tail_row(lambda j: (-1) ** (j + 1), s_cap)
    b = bernoulli(n)
    if b:
        rows[0][0] = rows[0].get(0, Q(0)) + b
    sign = (-1) ** n
    for kk in range(1, q_max + 1):
        for r in range(1, q_max // kk + 1):
            d = kk * r
            row = rows.setdefault(d, {})
            c = Q(n) * r ** (n - 1)
            yk = (-1) ** kk  # y^k in s-coordinates
            row[2 * kk] = row.get(2 * kk, Q(0)) - c * yk
            row[-2 * kk] = row.get(-2 * kk, Q(0)) - c * sign * yk
    cap = s_cap if n == 1 else None
    return QSeries.from_rows(rows, 0, q_max, cap)


def deformed_g(n, q_max):
    """G_n = J_{4,n}(2z, 2tau); exact rows."""
    rows = {0: {0: -bernoulli(n) * (1 - Q(1, 2 ** (n - 1)))}}
    sign = (-1) ** n
    for kk in range(1, q_max + 1):
        for r in range(1, (q_max // kk + 1) // 2 + 1):
            d = kk * (2 * r - 1)
            if d > q_max:
                continue
            row = rows.setdefault(d, {})
            c = Q(n) * (Q(2 * r - 1, 2)) ** (n - 1)
            row[4 * kk] = row.get(4 * kk, Q(0)) - c
            row[-4 * kk] = row.get(-4 * kk, Q(0)) - c * sign
    return QSeries.from_rows(rows, 0, q_max)


def deformed_j3_half_grid(n, q_max_half):
    """J_{3,n} on the doubled exponent grid: returned series lives in
    u = q^(1/2), so the u^m row is the q^(m/2) coefficient."""
    rows = {0: {0: -bernoulli(n) * (1 - Q(1, 2 ** (n - 1)))}}
    sign = (-1) ** n
    for kk in range(1, q_max_half + 1):
        for r in range(1, q_max_half // kk + 2):
            m = kk * (2 * r - 1)  # u-exponent = 2*k*(r - 1/2)
            if m > q_max_half:
                continue
            row = rows.setdefault(m, {})
            c = Q(n) * (Q(2 * r - 1, 2)) ** (n - 1)
            yk = (-1) ** kk
            row[2 * kk] = row.get(2 * kk, Q(0)) - c * yk
            row[-2 * kk] = row.get(-2 * kk, Q(0)) - c * sign * yk
    return QSeries.from_rows(rows, 0, q_max_half)


# ---------------------------------------------------------------------------
# eta quotients, theta functions with prefactor tracking


@dataclass(frozen=True)
class PrefactoredSeries:
    """q^prefactor * series, for fractional leading exponents (eta, theta)."""

    prefactor: object  # exact rational
    series: QSeries

    def times(self, other):
        return PrefactoredSeries(
            self.prefactor + other.prefactor, self.series * other.series
        )

    def to_qseries(self):
        p = Q(self.prefactor)
        if p.denominator != 1:
            raise ValueError(f"non-integral q-prefactor {p}")
        sh = int(p)
        s = self.series
        rows = {d + sh: s.q_row(d) for d in range(s.q_min, s.q_max + 1)}
        return QSeries.from_rows(rows, s.q_min + sh, s.q_max + sh, s.s_cap)

    def eq_report(self, other):
        if Q(self.prefactor) != Q(other.prefactor):
            return False, None, None
        return self.series.eq_report(other.series)


def eta_quotient(q_max, pairs):
    """prod over (scale, power) of eta(scale * tau)^power.

    Returns a PrefactoredSeries with prefactor sum(scale*power)/24.
    """
    pref = Q(0)
    out = QSeries.const(1, q_max)
    for scale, power in pairs:
        pref += Q(scale * power, 24)
        out = out * euler_product_power(q_max, scale, power)
    return PrefactoredSeries(pref, out.truncate(q_max))


def eta_and_delta(q_max):
    """(Delta, eta^24) with eta^24 assembled from the eta quotient route."""
    d = delta(q_max)
    eta24 = eta_quotient(q_max - 1, [(1, 24)]).to_qseries().truncate(q_max - 1)
    return d, eta24


def theta1(q_max):
    """First Jacobi theta function, prefactor 1/8."""
    out = QSeries.from_rows({0: {1: -I, -1: I}}, 0, q_max)
    for m in range(1, q_max + 1):
        out = out * QSeries.from_rows({0: {0: Q(1)}, m: {0: Q(-1)}}, 0, q_max)
        out = out * QSeries.from_rows({0: {0: Q(1)}, m: {2: Q(-1)}}, 0, q_max)
        out = out * QSeries.from_rows({0: {0: Q(1)}, m: {-2: Q(-1)}}, 0, q_max)
    return PrefactoredSeries(Q(1, 8), out)


D4_GRAM = (
    (2, -1, -1, -1),
    (-1, 2, 0, 0),
    (-1, 0, 2, 0),
    (-1, 0, 0, 2),
)
D4_ALPHA = (2, 1, 1, 1)


def _d4_pair(u, v):
    return sum(u[i] * D4_GRAM[i][j] * v[j] for i in range(4) for j in range(4))


def _d4_points(q_max):
    """Lattice points with <x + alpha/2, x + alpha/2> <= q_max + 1/2.

    Yields (d, c) with the quadratic value d + 1/2 and c = <x, e1>.
    """
    cutoff = Q(2 * q_max + 1, 2)
    # Safe box: the smallest eigenvalue of the Gram is 2 - sqrt(3) > 1/4,
    # so <v,v> <= cutoff forces |v| <= 2 sqrt(cutoff), and x = v - alpha/2
    # moves each coordinate by at most 1.
    bound = int(2 * float(cutoff) ** 0.5) + 2
    rng = range(-bound, bound + 1)
    for x1 in rng:
        for x2 in rng:
            for x3 in rng:
                for x4 in rng:
                    v = (
                        Q(2 * x1 + D4_ALPHA[0], 2),
                        Q(2 * x2 + D4_ALPHA[1], 2),
                        Q(2 * x3 + D4_ALPHA[2], 2),
                        Q(2 * x4 + D4_ALPHA[3], 2),
                    )
                    qexp = _d4_pair(v, v)
                    if qexp > cutoff:
                        continue
                    c = 2 * x1 - x2 - x3 - x4  # <x, e1>
                    yield int(qexp - Q(1, 2)), c


def theta_d4(q_max):
    """D4 characteristic theta function Theta(z, tau), prefactor 1/2.

    The z-dependence sits in odd s-powers; each point carries -i*(-1)^c.
    """
    rows = {}
    for d, c in _d4_points(q_max):
        row = rows.setdefault(d, {})
        e = -(2 * c + 1)
        w = gr(0, -1) if c % 2 == 0 else gr(0, 1)
        v = row.get(e, Q(0)) + w
        if v:
            row[e] = v
        elif e in row:
            del row[e]
    return PrefactoredSeries(Q(1, 2), QSeries.from_rows(rows, 0, q_max))


def theta_d4_lattice_sum(q_max):
    """sum_x q^<x+alpha/2, x+alpha/2>, prefactor 1/2."""
    rows = {}
    for d, _c in _d4_points(q_max):
        row = rows.setdefault(d, {})
        row[0] = row.get(0, Q(0)) + 1
    return PrefactoredSeries(Q(1, 2), QSeries.from_rows(rows, 0, q_max))


# ---------------------------------------------------------------------------
# w-expansions of the generators (w = 2*pi*i*z); poles at z=0 are explicit


def f_w(w_order, q_max):
    """F = -i w exp(sum_k B_2k/(2k (2k)!) E_2k w^2k)."""
    acc = {}
    for k in range(1, w_order // 2 + 1):
        c = bernoulli(2 * k) / (2 * k)
        for j in range(2, 2 * k + 1):
            c /= j
        e = eisenstein(2 * k, q_max)
        acc[2 * k] = {d: c * e.coeff(d, 0) for d in range(0, q_max + 1)}
    inner = WSeries(2, w_order, 0, q_max, acc)
    expo = inner.exp()
    w_mono = WSeries(1, w_order + 1, 0, q_max, {1: {0: gr(0, -1)}})
    return w_mono * expo


def j1_w(w_order, q_max):
    rows = {-1: {0: Q(1)}}
    for k in range(1, (w_order + 1) // 2 + 1):
        c = bernoulli(2 * k)
        for j in range(1, 2 * k + 1):
            c /= j
        e = eisenstein(2 * k, q_max)
        if 2 * k - 1 <= w_order:
            rows[2 * k - 1] = {d: c * e.coeff(d, 0) for d in range(0, q_max + 1)}
    return WSeries(-1, w_order, 0, q_max, rows)


def wp_w(w_order, q_max):
    rows = {-2: {0: Q(1)}}
    for k in range(2, w_order // 2 + 2):
        c = bernoulli(2 * k) * (2 * k - 1)
        for j in range(1, 2 * k + 1):
            c /= j
        if 2 * k - 2 <= w_order:
            e = eisenstein(2 * k, q_max)
            rows[2 * k - 2] = {d: -c * e.coeff(d, 0) for d in range(0, q_max + 1)}
    return WSeries(-2, w_order, 0, q_max, rows)


def wp_dot_w(w_order, q_max):
    return wp_w(w_order + 1, q_max).ddw()


def e2k_w(weight, w_order, q_max):
    e = eisenstein(weight, q_max)
    return WSeries(0, w_order, 0, q_max, {0: {d: e.coeff(d, 0) for d in range(q_max + 1)}})


def f_u_expansion(q_max, u_order):
    """F in the variables (u, q), u = 2*pi*z: u exp(sum (-1)^k B_2k/(2k(2k)!) E_2k u^2k)."""
    acc = {}
    for k in range(1, u_order // 2 + 1):
        c = (-1) ** k * bernoulli(2 * k) / (2 * k)
        for j in range(2, 2 * k + 1):
            c /= j
        e = eisenstein(2 * k, q_max)
        acc[2 * k] = {d: c * e.coeff(d, 0) for d in range(0, q_max + 1)}
    inner = WSeries(2, u_order, 0, q_max, acc)
    u_mono = WSeries(1, u_order + 1, 0, q_max, {1: {0: Q(1)}})
    return u_mono * inner.exp()


# ---------------------------------------------------------------------------
# quasi-Jacobi forms: grading metadata and the generator registry


@dataclass(frozen=True)
class QuasiJacobiForm:
    """A q-expansion tagged with weight, doubled index and pole order at z=0."""

    series: QSeries
    weight: int
    index2: int  # doubled index: F has index2 = 1
    pole_order_z0: int
    name: str = ""

    def __mul__(self, other):
        if isinstance(other, QuasiJacobiForm):
            return QuasiJacobiForm(
                self.series * other.series,
                self.weight + other.weight,
                self.index2 + other.index2,
                self.pole_order_z0 + other.pole_order_z0,
            )
        return QuasiJacobiForm(
            self.series * other, self.weight, self.index2, self.pole_order_z0
        )

    def __add__(self, other):
        if self.weight != other.weight or self.index2 != other.index2:
            raise ValueError("ungraded sum of quasi-Jacobi forms")
        return QuasiJacobiForm(
            self.series + other.series,
            self.weight,
            self.index2,
            max(self.pole_order_z0, other.pole_order_z0),
        )


# name -> (builder, weight, index2, pole order, needs_cap)
def _build_registry():
    reg = {}
    reg["F"] = (lambda qm, cap: theta_f(qm), -1, 1, 0, False)
    reg["K"] = (lambda qm, cap: k_series(qm), -1, 1, 0, False)
    reg["G"] = (lambda qm, cap: g_series(qm), 0, 2, 0, False)
    reg["J1"] = (lambda qm, cap: j1(qm, cap), 1, 0, 1, True)
    reg["wp"] = (lambda qm, cap: wp(qm, cap), 2, 0, 2, True)
    reg["wp_prime"] = (lambda qm, cap: wp_dot(qm, cap), 3, 0, 3, True)
    reg["Delta"] = (lambda qm, cap: delta(qm), 12, 0, 0, False)
    for k in range(1, 8):
        reg[f"E{2*k}"] = (
            (lambda w: lambda qm, cap: eisenstein(w, qm))(2 * k),
            2 * k, 0, 0, False,
        )
    for n in range(1, 5):
        reg[f"J2_{n}"] = (
            (lambda nn: lambda qm, cap: deformed_j2(nn, qm, cap))(n),
            n, 0, 1 if n == 1 else 0, n == 1,
        )
        reg[f"G_{n}"] = (
            (lambda nn: lambda qm, cap: deformed_g(nn, qm))(n),
            n, 0, 0, False,
        )
    return reg


_REGISTRY = _build_registry()

GENERATOR_NAMES = sorted(_REGISTRY) + ["Theta_D4", "eta", "theta1", "J3_1", "J3_2", "J3_3", "J3_4"]

_CACHE = {}
_CACHE_LOCK = __import__("threading").Lock()


def generator(name, q_max, s_cap=None):
    """Quasi-Jacobi generator by stable string name (memoized)."""
    if q_max < 0:
        raise ValueError("q_max must be >= 0")
    if name not in _REGISTRY:
        raise KeyError(f"unknown generator {name!r}; known: {', '.join(GENERATOR_NAMES)}")
    builder, weight, index2, pole, needs_cap = _REGISTRY[name]
    if needs_cap and s_cap is None:
        s_cap = 2 * q_max + 8
    key = (name, q_max, s_cap if needs_cap else None)
    with _CACHE_LOCK:
        cached = _CACHE.get(key)
    if cached is None:
        cached = QuasiJacobiForm(builder(q_max, s_cap), weight, index2, pole, name)
        with _CACHE_LOCK:
            _CACHE[key] = cached
    return cached


def _closure_rhs(name, var, q_max, s_cap):
    """Right-hand side of the differentiation rule for a bare generator."""
    build_cap = (s_cap if s_cap is not None else 2 * q_max + 8) + 2 * q_max + 4
    F = theta_f(q_max)
    J = j1(q_max, build_cap)
    P = wp(q_max, build_cap)
    Pd = wp_dot(q_max, build_cap)
    E2 = eisenstein(2, q_max)
    E4 = eisenstein(4, q_max)
    h = Q(1, 2)
    table = {
        ("F", "tau"): lambda: F * (J * J * h - P * h - E2 * Q(1, 12)),
        ("F", "z"): lambda: J * F,
        ("J1", "tau"): lambda: J * (E2 * Q(1, 12) - P) - Pd * h,
        ("J1", "z"): lambda: E2 * Q(1, 12) - P,
        ("wp", "tau"): lambda: P * P * 2 + P * E2 * Q(1, 6) + J * Pd - E4 * Q(1, 36),
        ("wp", "z"): lambda: Pd,
        ("wp_prime", "tau"): lambda: J * P * P * 6 - J * E4 * Q(1, 24) + P * Pd * 3 + E2 * Pd * Q(1, 4),
        ("wp_prime", "z"): lambda: P * P * 6 - E4 * Q(1, 24),
    }
    fn = table.get((name, var))
    return fn() if fn else None


def diff(form: QuasiJacobiForm, var: str, verify=True) -> QuasiJacobiForm:
    """d/dz (weight +1, pole +1) or d/dtau (weight +2) of a graded form.

    When the input is a bare generator with a differentiation rule, the
    derivative is checked against the rule's right-hand side on the
    reliable window.
    """
    if var == "z":
        out = QuasiJacobiForm(
            form.series.dz(), form.weight + 1, form.index2,
            form.pole_order_z0 + 1, "",
        )
    elif var == "tau":
        out = QuasiJacobiForm(
            form.series.dq(), form.weight + 2, form.index2,
            form.pole_order_z0, "",
        )
    else:
        raise ValueError("var must be 'z' or 'tau'")
    if verify and form.name:
        rhs = _closure_rhs(form.name, var, form.series.q_max, form.series.s_cap)
        if rhs is not None and not out.series.eq_report(rhs)[0]:
            raise ArithmeticError(
                f"differentiation rule for {form.name} violated"
            )
    return out


# ---------------------------------------------------------------------------
# structural identity checks (consumed by the test-suite and `verify`)


def closure_relations(q_max, s_cap=None):
    """The eight differentiation rules of the generator ring, as residuals.

    Returns a list of (name, residual QSeries); all residuals must vanish
    on their reliable windows.
    """
    cap = s_cap if s_cap is not None else 2 * q_max + 8
    build_cap = cap + 2 * q_max + 4
    F = theta_f(q_max + 1)
    J = j1(q_max + 1, build_cap)
    P = wp(q_max + 1, build_cap)
    Pd = wp_dot(q_max + 1, build_cap)
    E2 = eisenstein(2, q_max + 1)
    E4 = eisenstein(4, q_max + 1)
    half = Q(1, 2)
    rel = [
        ("dtau F", F.dq() - F * (J * J * half - P * half - E2 * Q(1, 12))),
        ("dz F", F.dz() - J * F),
        ("dtau J1", J.dq() - (J * (E2 * Q(1, 12) - P) - Pd * half)),
        ("dz J1", J.dz() - (E2 * Q(1, 12) - P)),
        ("dtau wp", P.dq() - (P * P * 2 + P * E2 * Q(1, 6) + J * Pd - E4 * Q(1, 36))),
        ("dz wp", P.dz() - Pd),
        (
            "dtau wp_prime",
            Pd.dq()
            - (J * P * P * 6 - J * E4 * Q(1, 24) + P * Pd * 3 + E2 * Pd * Q(1, 4)),
        ),
        ("dz wp_prime", Pd.dz() - (P * P * 6 - E4 * Q(1, 24))),
    ]
    return [(name, r.truncate(q_max, cap)) for name, r in rel]


def heat_equation_residual(q_max):
    """dtau F - (1/2) dz^2 F + (1/8) E2 F; exact rows."""
    F = theta_f(q_max)
    return F.dq() - F.dz().dz() * Q(1, 2) + eisenstein(2, q_max) * F * Q(1, 8)


def weierstrass_cubic_residual_exact(q_max):
    """216(P3^2 - 4 P2^3) + 18 E4 P2 F^4 - E6 F^6, all exact (must vanish)."""
    F = theta_f(q_max)
    P2 = f2_wp(q_max)
    P3 = f3_wp_dot(q_max)
    E4 = eisenstein(4, q_max)
    E6 = eisenstein(6, q_max)
    F2 = F * F
    return (P3 * P3 - P2 * P2 * P2 * 4) * 216 + E4 * P2 * F2 * F2 * 18 - E6 * F2 * F2 * F2


def weierstrass_cubic_residual_capped(q_max, s_cap):
    """(wp')^2 - 4 wp^3 + E4 wp / 12 - E6/216 with capped generators."""
    build_cap = s_cap + 2 * q_max + 6
    P = wp(q_max, build_cap)
    Pd = wp_dot(q_max, build_cap)
    E4 = eisenstein(4, q_max)
    E6 = eisenstein(6, q_max)
    r = Pd * Pd - P * P * P * 4 + E4 * P * Q(1, 12) - E6 * Q(1, 216)
    return r.truncate(q_max, s_cap)


def f_half_specialization(q_max):
    """Per-q values of F at z = 1/2 (s = i) and of 2 eta(2t)^2/eta(t)^4."""
    F = theta_f(q_max)
    lhs = F.subs_s_value(I)
    rhs = eta_quotient(q_max, [(2, 2), (1, -4)])
    assert Q(rhs.prefactor) == 0
    rhs_rows = {d: rhs.series.coeff(d, 0) * 2 for d in range(0, q_max + 1)}
    return lhs, rhs_rows


# ---------------------------------------------------------------------------
# fitting a series as a polynomial in the generators


@dataclass
class QJacFit:
    """Result of an exact linear fit against generator monomials."""

    coeffs: dict  # monomial (a,b,c,d,e) -> rational; exponents of (E2,E4,J1,wp,wp')
    index2: int
    weight: int  # max weight among contributing monomials
    weights_used: tuple
    verified_q: int
    holomorphic: bool

    def describe(self):
        names = ("E2", "E4", "J1", "wp", "wp'")
        bits = []
        for mono, c in sorted(self.coeffs.items()):
            f_pow = self.index2
            term = [f"F^{f_pow}"] if f_pow else []
            term += [f"{names[i]}^{e}" for i, e in enumerate(mono) if e]
            bits.append(f"({c}) " + "*".join(term or ["1"]))
        return " + ".join(bits) if bits else "0"


class FitError(ValueError):
    pass


def _fit_monomials(weight_max, index2, weight_exact=None):
    """Exponent tuples (a,b,c,d,e) for E2^a E4^b J1^c wp^d wp'^e F^index2."""
    out = []
    base_weight = -index2
    for a in range(0, (weight_max - base_weight) // 2 + 1):
        for b in range(0, (weight_max - base_weight - 2 * a) // 4 + 1):
            for c in range(0, weight_max - base_weight - 2 * a - 4 * b + 1):
                for d in range(
                    0, (weight_max - base_weight - 2 * a - 4 * b - c) // 2 + 1
                ):
                    for e in range(
                        0,
                        (weight_max - base_weight - 2 * a - 4 * b - c - 2 * d) // 3 + 1,
                    ):
                        w = base_weight + 2 * a + 4 * b + c + 2 * d + 3 * e
                        if weight_exact is None or w == weight_exact:
                            out.append((a, b, c, d, e))
    return out


def _monomial_series(mono, index2, q_max, cap):
    a, b, c, d, e = mono
    # every capped-factor product pays the partner's lowest s-support
    build_cap = cap + (c + d + e + 1) * (2 * q_max + 4) + index2 * (2 * q_max + 3)
    out = theta_f(q_max) ** index2 if index2 else QSeries.const(1, q_max)
    for _ in range(a):
        out = out * eisenstein(2, q_max)
    for _ in range(b):
        out = out * eisenstein(4, q_max)
    for _ in range(c):
        out = out * j1(q_max, build_cap)
    for _ in range(d):
        out = out * wp(q_max, build_cap)
    for _ in range(e):
        out = out * wp_dot(q_max, build_cap)
    return out.truncate(q_max, cap)


def _monomial_w(mono, index2, w_order, q_max):
    a, b, c, d, e = mono
    out = f_w(w_order + 3 * (c + d + e) + 3, q_max) ** index2 if index2 else None
    pieces = (
        [(e2k_w(2, w_order + 6, q_max), a), (e2k_w(4, w_order + 6, q_max), b),
         (j1_w(w_order + 6, q_max), c), (wp_w(w_order + 6, q_max), d),
         (wp_dot_w(w_order + 6, q_max), e)]
    )
    for series, count in pieces:
        for _ in range(count):
            out = series if out is None else out * series
    if out is None:
        out = WSeries.const(1, w_order, q_max)
    return out


def qjac_fit(target: QSeries, weight_max: int, index2: int, w_order=8, scan=True) -> QJacFit:
    """Fit target as an index2/2-indexed polynomial in the generator ring.

    With ``scan`` (the default) weight-homogeneous bases are tried in
    increasing weight and the first consistent fit wins, which keeps the
    linear systems overdetermined at practical q-orders; scan=False uses
    the full weight<=weight_max basis at once and needs deep expansions.
    Held-out verification always uses the top reliable q-order; holomorphy
    at z = 0 is checked through the generators' w-expansions.
    """
    if scan:
        last = None
        for w in range(-index2, weight_max + 1):
            try:
                return _qjac_fit_basis(target, weight_max, index2, w_order, weight_exact=w)
            except FitError as exc:
                last = exc
        raise FitError(f"no representation of weight <= {weight_max}: {last}")
    return _qjac_fit_basis(target, weight_max, index2, w_order, weight_exact=None)


def _qjac_fit_basis(target, weight_max, index2, w_order, weight_exact):
    if target.q_max <= target.q_min:
        raise FitError("underdetermined: need at least two q-orders")
    monos = _fit_monomials(weight_max, index2, weight_exact)
    if not monos:
        raise FitError("empty basis")
    cap = target.s_cap if target.s_cap is not None else 2 * (target.q_max + 1) + index2 + 2
    q_fit_hi = target.q_max - 1
    cols = [_monomial_series(m, index2, target.q_max, cap) for m in monos]
    # compare only where every column (and the target) is reliable
    for col in cols:
        if col.s_cap is not None:
            cap = min(cap, col.s_cap)
    cols = [col.truncate(s_cap=cap) for col in cols]
    target = target.truncate(s_cap=cap)
    cells = set()
    for d in range(target.q_min, target.q_max + 1):
        cells.update((d, e) for e in target.q_row(d))
        for col in cols:
            cells.update((d, e) for e in col.q_row(d) if e <= cap)
    fit_cells = sorted(c for c in cells if c[0] <= q_fit_hi)
    hold_cells = sorted(c for c in cells if c[0] > q_fit_hi)
    if not hold_cells:
        raise FitError("underdetermined: no held-out q-order")
    # exact Gaussian elimination on the augmented system
    rows = []
    for (d, e) in fit_cells:
        rows.append([col.q_row(d).get(e, Q(0)) for col in cols] + [target.q_row(d).get(e, Q(0))])
    ncols = len(monos)
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][ncols]:
            raise FitError("no representation: inconsistent linear system")
    free = [c for c in range(ncols) if c not in pivots]
    if free:
        # a free direction means the supplied q-window cannot pin the fit
        raise FitError(
            f"underdetermined: {len(free)} free generator directions at q<={q_fit_hi}"
        )
    sol = [Q(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = rows[i][ncols]
    coeffs = {monos[i]: sol[i] for i in range(ncols) if sol[i]}
    # held-out verification
    fitted = QSeries.zero(target.q_max, target.q_min, cap)
    for m, cval in coeffs.items():
        fitted = fitted + cols[monos.index(m)].scale(cval)
    for (d, e) in hold_cells:
        if fitted.q_row(d).get(e, Q(0)) != target.q_row(d).get(e, Q(0)):
            raise FitError(f"held-out mismatch at q^{d} s^{e}")
    eq, q_ver, _ = fitted.eq_report(target)
    if not eq:
        raise FitError("fit verification failed")
    # holomorphy at z = 0 through the w-expansion
    wq = max(target.q_max, 1)
    total_w = None
    for m, cval in coeffs.items():
        piece = _monomial_w(m, index2, w_order, wq).scale(cval)
        total_w = piece if total_w is None else total_w + piece
    holo = True
    if total_w is not None:
        holo = all(j >= 0 for j in total_w.rows)
    weights = tuple(
        sorted({-index2 + 2 * a + 4 * b + c + 2 * d + 3 * e for (a, b, c, d, e) in coeffs})
    )
    return QJacFit(
        coeffs=coeffs,
        index2=index2,
        weight=max(weights) if weights else -index2,
        weights_used=weights,
        verified_q=q_ver,
        holomorphic=holo,
    )
