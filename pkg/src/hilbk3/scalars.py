"""Exact scalar arithmetic: rationals and Gaussian rationals.

All coefficients in this package are exact.  Real rational values are kept
as bare ``mpq`` (or ``fractions.Fraction`` when gmpy2 is unavailable); the
Gaussian rational a + b*i is only materialized when an imaginary part is
actually present.  Mixed arithmetic works through the reflected operators,
so series rows may freely contain both representations.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

ZERO = Q(0)
ONE = Q(1)


def is_rational(x):
    return not isinstance(x, GaussianRational)


class GaussianRational:
    """a + b*i with exact rational a, b and b != 0 in canonical form."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = Q(re)
        self.im = Q(im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __hash__(self):
        return hash((self.re, self.im))

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return self.im == 0 and self.re == other

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return gr(self.re + other.re, self.im + other.im)
        return gr(self.re + other, self.im)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return gr(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return gr(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            n = other.re * other.re + other.im * other.im
            return gr(
                (self.re * other.re + self.im * other.im) / n,
                (self.im * other.re - self.re * other.im) / n,
            )
        return gr(self.re / other, self.im / other)

    def __rtruediv__(self, other):
        n = self.re * self.re + self.im * self.im
        return gr(other * self.re / n, -other * self.im / n)

    def __pow__(self, n):
        if n < 0:
            return 1 / self ** (-n)
        out = Q(1)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self):
        return gr(self.re, -self.im)


def gr(re, im=0):
    """Canonical scalar: bare rational when the imaginary part vanishes."""
    im = Q(im)
    if im == 0:
        return Q(re)
    return GaussianRational(re, im)


I = GaussianRational(0, 1)

# i**a for a mod 4
I_POWERS = (ONE, I, Q(-1), GaussianRational(0, -1))


def real_part(x):
    return x.re if isinstance(x, GaussianRational) else x


def imag_part(x):
    return x.im if isinstance(x, GaussianRational) else ZERO


def scalar_str(x):
    if isinstance(x, GaussianRational):
        return f"({x.re})+({x.im})i"
    return str(x)
