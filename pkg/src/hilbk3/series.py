"""Truncated bivariate Laurent series.

A :class:`QSeries` is a formal series sum_{d} q^d * row_d(s) where each row
is a finite sparse Laurent polynomial in the half-variable s = (-y)^(1/2)
(so y^k corresponds to (-1)^k s^(2k), and the square-root branch fixed
throughout the package is y^(1/2) = -i*s).

Reliability bookkeeping
-----------------------
* ``q_min`` is an exact support bound: every coefficient below it is zero.
* ``q_max`` is a truncation order: coefficients above it are unknown.
* ``s_cap`` (optional) is a truncation order in s: within each row, terms
  with exponent <= s_cap are exact and larger exponents are unknown.  Rows
  of series expanded "in the region |y| < 1" are bounded below in s but may
  extend infinitely upward; s_cap = None marks a series whose rows are
  complete Laurent polynomials.

Arithmetic propagates both bounds conservatively (the product rule uses the
partner's lowest q- resp. s-support), and equality testing reports the
window on which agreement was actually verified; comparisons on empty
windows raise instead of silently passing.
"""

from __future__ import annotations

import math

from .scalars import Q, GaussianRational, gr, scalar_str

INF = math.inf


class WindowError(ValueError):
    """Requested data outside the reliable truncation window."""


# ---------------------------------------------------------------------------
# sparse row helpers (dict: s-exponent -> scalar)


def row_add(a, b):
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        if v is None:
            out[e] = c
        else:
            v = v + c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def row_scale(a, c):
    if not c:
        return {}
    return {e: c * v for e, v in a.items()}


def row_mul(a, b, cap=None):
    out = {}
    if len(b) < len(a):
        a, b = b, a
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if cap is not None and e > cap:
                continue
            v = out.get(e)
            if v is None:
                out[e] = ca * cb
            else:
                v = v + ca * cb
                if v:
                    out[e] = v
                else:
                    del out[e]
    return out


def row_min(a):
    return min(a) if a else INF


def row_trunc(a, cap):
    if cap is None:
        return a
    return {e: c for e, c in a.items() if e <= cap}


# ---------------------------------------------------------------------------


class QSeries:
    """Truncated series in q with sparse s-Laurent rows."""

    __slots__ = ("q_min", "q_max", "rows", "s_cap")

    def __init__(self, q_min, q_max, rows, s_cap=None):
        if q_max < q_min - 1:
            raise WindowError(f"empty q-window [{q_min}, {q_max}]")
        if len(rows) != q_max - q_min + 1:
            raise ValueError("row count does not match q-window")
        self.q_min = q_min
        self.q_max = q_max
        self.s_cap = s_cap
        self.rows = [
            {e: c for e, c in row_trunc(r, s_cap).items() if c} for r in rows
        ]

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, q_max, q_min=0, s_cap=None):
        return cls(q_min, q_max, [{} for _ in range(q_max - q_min + 1)], s_cap)

    @classmethod
    def const(cls, value, q_max, s_cap=None):
        z = cls.zero(q_max, 0, s_cap)
        v = gr(value) if not isinstance(value, GaussianRational) else value
        if v:
            z.rows[0][0] = v
        return z

    @classmethod
    def monomial(cls, coeff, s_exp, q_exp, q_max, s_cap=None):
        if q_max < q_exp:
            raise WindowError("monomial beyond truncation order")
        z = cls.zero(q_max, q_exp, s_cap)
        if coeff:
            z.rows[0][s_exp] = coeff
        return z

    @classmethod
    def from_rows(cls, mapping, q_min, q_max, s_cap=None):
        rows = [dict(mapping.get(d, {})) for d in range(q_min, q_max + 1)]
        return cls(q_min, q_max, rows, s_cap)

    # -- access ------------------------------------------------------------

    def q_row(self, d):
        if d < self.q_min:
            return {}
        if d > self.q_max:
            raise WindowError(f"q^{d} beyond reliable order {self.q_max}")
        return self.rows[d - self.q_min]

    def coeff(self, d, s_exp):
        row = self.q_row(d)
        if self.s_cap is not None and s_exp > self.s_cap:
            raise WindowError(f"s^{s_exp} beyond reliable cap {self.s_cap}")
        return row.get(s_exp, Q(0))

    def coeff_y(self, d, k):
        """Coefficient of y^k q^d (y^k = (-1)^k s^(2k))."""
        c = self.coeff(d, 2 * k)
        return c if k % 2 == 0 else -c

    def min_s_support(self):
        return min((row_min(r) for r in self.rows), default=INF)

    def is_zero(self):
        return all(not r for r in self.rows)

    def support_width(self, d):
        row = self.q_row(d)
        if not row:
            return None
        return (min(row), max(row))

    # -- bookkeeping helpers -------------------------------------------------

    def _mul_caps(self, other):
        caps = []
        if self.s_cap is not None:
            m = other.min_s_support()
            caps.append(INF if m is INF else self.s_cap + m)
        if other.s_cap is not None:
            m = self.min_s_support()
            caps.append(INF if m is INF else other.s_cap + m)
        if not caps:
            return None
        cap = min(caps)
        return None if cap is INF else int(cap)

    def truncate(self, q_max=None, s_cap=None):
        new_qmax = self.q_max if q_max is None else min(q_max, self.q_max)
        if s_cap is None:
            new_cap = self.s_cap
        elif self.s_cap is None:
            new_cap = s_cap
        else:
            new_cap = min(s_cap, self.s_cap)
        rows = self.rows[: new_qmax - self.q_min + 1]
        return QSeries(self.q_min, new_qmax, rows, new_cap)

    # -- ring operations -----------------------------------------------------

    def __neg__(self):
        return QSeries(
            self.q_min, self.q_max, [row_scale(r, Q(-1)) for r in self.rows], self.s_cap
        )

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.const(other, self.q_max)
        q_min = min(self.q_min, other.q_min)
        q_max = min(self.q_max, other.q_max)
        if self.s_cap is None:
            cap = other.s_cap
        elif other.s_cap is None:
            cap = self.s_cap
        else:
            cap = min(self.s_cap, other.s_cap)
        rows = []
        for d in range(q_min, q_max + 1):
            ra = self.q_row(d) if d >= self.q_min else {}
            rb = other.q_row(d) if d >= other.q_min else {}
            rows.append(row_add(ra, rb))
        return QSeries(q_min, q_max, rows, cap)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return QSeries(
            self.q_min, self.q_max, [row_scale(r, c) for r in self.rows], self.s_cap
        )

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        q_min = self.q_min + other.q_min
        q_max = min(self.q_max + other.q_min, other.q_max + self.q_min)
        if q_max < q_min - 1:
            raise WindowError("product has empty reliable q-window")
        cap = self._mul_caps(other)
        rows = [{} for _ in range(q_max - q_min + 1)]
        for da in range(self.q_min, self.q_max + 1):
            ra = self.rows[da - self.q_min]
            if not ra:
                continue
            db_hi = min(other.q_max, q_max - da)
            for db in range(other.q_min, db_hi + 1):
                rb = other.rows[db - other.q_min]
                if not rb:
                    continue
                rows[da + db - q_min] = row_add(
                    rows[da + db - q_min], row_mul(ra, rb, cap)
                )
        return QSeries(q_min, q_max, rows, cap)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.invert() ** (-n)
        result = None
        for _ in range(n):
            result = self if result is None else result * self
        if result is None:
            return QSeries.const(1, max(self.q_max, 0), self.s_cap)
        return result

    def invert(self):
        """Inverse of a series whose lowest q-row is a unit monomial c*s^e.

        Inputs with a non-monomial leading row are rejected; expansions of
        reciprocals with infinite Laurent tails are built at the call sites
        that know the closed form of the tail.
        """
        m = self.q_min
        lead = self.q_row(m)
        if len(lead) != 1:
            raise ValueError("leading q-coefficient is not a unit monomial")
        (e0, c0), = lead.items()
        n_rows = self.q_max - self.q_min  # result reliable through q_max - 2*q_min
        inv_c0 = 1 / c0
        cap = None if self.s_cap is None else self.s_cap - e0
        out = [dict() for _ in range(n_rows + 1)]
        out[0] = {-e0: inv_c0}
        for n in range(1, n_rows + 1):
            acc = {}
            for j in range(1, n + 1):
                aj = self.q_row(m + j)
                if not aj:
                    continue
                acc = row_add(acc, row_mul(aj, out[n - j], None))
            # b_n = -lead^{-1} * acc
            out[n] = {
                e - e0: -inv_c0 * c for e, c in acc.items()
                if cap is None or e - e0 <= cap
            }
        return QSeries(-m, -m + n_rows, out, cap)

    # -- differential operators ----------------------------------------------

    def dz(self):
        """y d/dy: multiplies the coefficient of s^e by e/2."""
        rows = []
        for r in self.rows:
            rows.append({e: c * Q(e, 2) for e, c in r.items() if e})
        return QSeries(self.q_min, self.q_max, rows, self.s_cap)

    def dq(self):
        """q d/dq: multiplies the q^d row by d."""
        rows = []
        for d in range(self.q_min, self.q_max + 1):
            rows.append(row_scale(self.rows[d - self.q_min], Q(d)))
        return QSeries(self.q_min, self.q_max, rows, self.s_cap)

    def subs_q_power(self, k):
        """Substitute q -> q^k (k >= 1)."""
        rows = {}
        for d in range(self.q_min, self.q_max + 1):
            r = self.rows[d - self.q_min]
            if r:
                rows[k * d] = dict(r)
        return QSeries.from_rows(rows, k * self.q_min, k * self.q_max + (k - 1), self.s_cap)

    def subs_s_value(self, value):
        """Evaluate every row at a fixed scalar value of s (e.g. s = 1)."""
        out = {}
        for d in range(self.q_min, self.q_max + 1):
            total = Q(0)
            for e, c in self.rows[d - self.q_min].items():
                if e >= 0:
                    total = total + c * value**e
                else:
                    total = total + c * (1 / value) ** (-e)
            out[d] = total
        return out

    def substitute_w(self, w_order):
        """Substitute s = e^(w/2) row by row, giving a w-expansion.

        Requires complete rows (s_cap is None): a truncated geometric tail
        has no meaningful exponential substitution.
        """
        if self.s_cap is not None:
            raise WindowError("substitute_w needs complete rows (s_cap is None)")
        fact = [Q(1)]
        for j in range(1, w_order + 1):
            fact.append(fact[-1] * j)
        rows = {}
        for d in range(self.q_min, self.q_max + 1):
            for e, c in self.rows[d - self.q_min].items():
                h = Q(e, 2)
                p = Q(1)
                for j in range(w_order + 1):
                    v = c * p / fact[j]
                    if v:
                        rows.setdefault(j, {})[d] = rows.get(j, {}).get(d, Q(0)) + v
                    p = p * h
        rows = {
            j: {d: c for d, c in qrow.items() if c} for j, qrow in rows.items()
        }
        return WSeries(0, w_order, self.q_min, self.q_max, rows)

    # -- comparison ----------------------------------------------------------

    def eq_report(self, other):
        """Compare on the common reliable window; returns (equal, q, s_cap)."""
        if not isinstance(other, QSeries):
            other = QSeries.const(other, self.q_max)
        q_lo = min(self.q_min, other.q_min)
        q_hi = min(self.q_max, other.q_max)
        if q_hi < q_lo:
            raise WindowError("equality window is empty")
        if self.s_cap is None:
            cap = other.s_cap
        elif other.s_cap is None:
            cap = self.s_cap
        else:
            cap = min(self.s_cap, other.s_cap)
        for d in range(q_lo, q_hi + 1):
            ra = self.q_row(d) if d >= self.q_min else {}
            rb = other.q_row(d) if d >= other.q_min else {}
            for e in set(ra) | set(rb):
                if cap is not None and e > cap:
                    continue
                if ra.get(e, 0) != rb.get(e, 0):
                    return False, q_hi, cap
        return True, q_hi, cap

    def __eq__(self, other):
        eq, _, _ = self.eq_report(other)
        return eq

    def __repr__(self):
        bits = []
        for d in range(self.q_min, min(self.q_max, self.q_min + 3) + 1):
            row = self.q_row(d)
            terms = " ".join(
                f"{scalar_str(row[e])}*s^{e}" for e in sorted(row)
            ) or "0"
            bits.append(f"q^{d}: {terms}")
        more = " ..." if self.q_max > self.q_min + 3 else ""
        cap = "" if self.s_cap is None else f" (s<={self.s_cap})"
        return f"QSeries[{'; '.join(bits)}{more}]{cap}"


# ---------------------------------------------------------------------------


class WSeries:
    """Laurent series in w = 2*pi*i*z whose coefficients are q-series.

    Rows are stored as {w_exp: {q_exp: scalar}}.  ``w_order`` is a
    truncation bound in w; ``w_min`` is an exact support bound (generator
    expansions have poles of known finite order at w = 0).
    """

    __slots__ = ("w_min", "w_order", "q_min", "q_max", "rows")

    def __init__(self, w_min, w_order, q_min, q_max, rows):
        if w_order < w_min - 1:
            raise WindowError("empty w-window")
        self.w_min = w_min
        self.w_order = w_order
        self.q_min = q_min
        self.q_max = q_max
        self.rows = {
            j: {d: c for d, c in r.items() if c}
            for j, r in rows.items()
            if w_min <= j <= w_order
        }
        self.rows = {j: r for j, r in self.rows.items() if r}

    @classmethod
    def const(cls, value, w_order, q_max, q_min=0):
        v = gr(value)
        rows = {0: {0: v}} if v else {}
        return cls(0, w_order, q_min, q_max, rows)

    def w_row(self, j):
        if j > self.w_order:
            raise WindowError(f"w^{j} beyond reliable order {self.w_order}")
        return self.rows.get(j, {})

    def min_w_support(self):
        return min(self.rows) if self.rows else INF

    def coeff(self, j, d):
        return self.w_row(j).get(d, Q(0))

    def __neg__(self):
        return self.scale(Q(-1))

    def scale(self, c):
        return WSeries(
            self.w_min,
            self.w_order,
            self.q_min,
            self.q_max,
            {j: row_scale(r, c) for j, r in self.rows.items()},
        )

    def __add__(self, other):
        if not isinstance(other, WSeries):
            other = WSeries.const(other, self.w_order, self.q_max)
        rows = {}
        w_min = min(self.w_min, other.w_min)
        w_order = min(self.w_order, other.w_order)
        for j in set(self.rows) | set(other.rows):
            if j > w_order:
                continue
            rows[j] = row_add(self.rows.get(j, {}), other.rows.get(j, {}))
        return WSeries(
            w_min, w_order, min(self.q_min, other.q_min),
            min(self.q_max, other.q_max), rows,
        )

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, WSeries):
            return self.scale(other)
        w_min = self.w_min + other.w_min
        w_order = min(
            self.w_order + other.w_min, other.w_order + self.w_min
        )
        q_min = self.q_min + other.q_min
        q_max = min(self.q_max + other.q_min, other.q_max + self.q_min)
        rows = {}
        for ja, ra in self.rows.items():
            for jb, rb in other.rows.items():
                j = ja + jb
                if j > w_order:
                    continue
                acc = rows.get(j, {})
                for da, ca in ra.items():
                    for db, cb in rb.items():
                        d = da + db
                        if d > q_max:
                            continue
                        v = acc.get(d)
                        v = ca * cb if v is None else v + ca * cb
                        if v:
                            acc[d] = v
                        elif d in acc:
                            del acc[d]
                rows[j] = acc
        return WSeries(w_min, w_order, q_min, q_max, rows)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative WSeries powers not supported")
        out = None
        for _ in range(n):
            out = self if out is None else out * self
        if out is None:
            return WSeries.const(1, self.w_order, self.q_max)
        return out

    def ddw(self):
        """d/dw."""
        rows = {}
        for j, r in self.rows.items():
            if j == 0:
                continue
            rows[j - 1] = row_scale(r, Q(j))
        return WSeries(self.w_min - 1, self.w_order - 1, self.q_min, self.q_max, rows)

    def dq(self):
        rows = {}
        for j, r in self.rows.items():
            rows[j] = {d: c * d for d, c in r.items() if d}
        return WSeries(self.w_min, self.w_order, self.q_min, self.q_max, rows)

    def exp(self):
        """exp of a series with strictly positive w-support."""
        if self.min_w_support() <= 0:
            raise ValueError("exp needs positive w-valuation")
        out = WSeries.const(1, self.w_order, self.q_max, self.q_min)
        term = WSeries.const(1, self.w_order, self.q_max, self.q_min)
        k = 0
        v = self.min_w_support()
        while (k + 1) * v <= self.w_order:
            k += 1
            term = term * self.scale(Q(1, k))
            out = out + term
        return out

    def eq_report(self, other):
        w_hi = min(self.w_order, other.w_order)
        w_lo = min(self.w_min, other.w_min)
        q_hi = min(self.q_max, other.q_max)
        q_lo = min(self.q_min, other.q_min)
        if w_hi < w_lo or q_hi < q_lo:
            raise WindowError("equality window is empty")
        for j in range(w_lo, w_hi + 1):
            ra = self.rows.get(j, {})
            rb = other.rows.get(j, {})
            for d in set(ra) | set(rb):
                if d > q_hi:
                    continue
                if ra.get(d, 0) != rb.get(d, 0):
                    return False, w_hi, q_hi
        return True, w_hi, q_hi

    def __eq__(self, other):
        eq, _, _ = self.eq_report(other)
        return eq

    def __repr__(self):
        js = sorted(self.rows)[:4]
        bits = [f"w^{j}:{len(self.rows[j])} terms" for j in js]
        return f"WSeries[{', '.join(bits)} ... w<={self.w_order}]"


# ---------------------------------------------------------------------------
# canonical JSON encoding


def _enc_scalar(c):
    if isinstance(c, GaussianRational):
        return str(c.re), str(c.im)
    return str(c), "0"


def qseries_to_json(a: QSeries) -> dict:
    rows = []
    for d in range(a.q_min, a.q_max + 1):
        row = a.q_row(d)
        terms = []
        for e in sorted(row):
            re, im = _enc_scalar(row[e])
            terms.append({"s": e, "re": _frac_str(re), "im": _frac_str(im)})
        rows.append({"q": d, "terms": terms})
    out = {"q_min": a.q_min, "q_max": a.q_max, "rows": rows}
    if a.s_cap is not None:
        out["s_cap"] = a.s_cap
    return out


def _frac_str(s):
    return s if "/" in s else s + "/1"


def qseries_from_json(obj) -> QSeries:
    rows = {}
    for row in obj["rows"]:
        r = {}
        for t in row["terms"]:
            re = Q(t["re"])
            im = Q(t["im"])
            r[int(t["s"])] = gr(re, im)
        rows[int(row["q"])] = r
    return QSeries.from_rows(
        rows, int(obj["q_min"]), int(obj["q_max"]), obj.get("s_cap")
    )


# ---------------------------------------------------------------------------
# assertion helpers used across the test-suite and the verification CLI


def assert_series_equal(a, b, q_order=None, s_through=None, what=""):
    eq, q_ver, cap = a.eq_report(b)
    if not eq:
        raise AssertionError(f"{what or 'series'} differ (window q<={q_ver}, s_cap={cap})")
    if q_order is not None and q_ver < q_order:
        raise AssertionError(
            f"{what or 'series'}: verified only through q^{q_ver}, needed q^{q_order}"
        )
    if s_through is not None and cap is not None and cap < s_through:
        raise AssertionError(
            f"{what or 'series'}: verified only through s^{cap}, needed s^{s_through}"
        )
    return q_ver, cap
