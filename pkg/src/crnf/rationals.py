"""Exact Gaussian-rational arithmetic.

Coefficients throughout the package are elements of Q(i): pairs of exact
rationals (re, im). The rational parts use gmpy2.mpq when available and
fall back to fractions.Fraction otherwise; both print as "p" or "p/q",
which is the canonical string form used in all serialized output.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as _Q

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as _Q

    _HAVE_GMPY2 = False

__all__ = ["GaussRat", "Q", "rat_from_str", "rat_to_str", "ZERO", "ONE", "I"]


def Q(p, q=1):
    """Exact rational p/q."""
    return _Q(p, q)


_Q0 = _Q(0)
_Q1 = _Q(1)


def rat_from_str(s):
    """Parse a rational from its canonical "p" or "p/q" string form."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        return _Q(int(p), int(q))
    return _Q(int(s))


def rat_to_str(r):
    """Canonical string form: "p" for integers, "p/q" otherwise."""
    return str(r)


class GaussRat:
    """An element re + im*i of Q(i). Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is type(_Q0) else _Q(re))
        object.__setattr__(self, "im", im if type(im) is type(_Q0) else _Q(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_pair(pair):
        """Build from a [re, im] pair of "p/q" strings (or numbers)."""
        re, im = pair
        re = rat_from_str(re) if isinstance(re, str) else _Q(re)
        im = rat_from_str(im) if isinstance(im, str) else _Q(im)
        return GaussRat(re, im)

    def to_pair(self):
        return [rat_to_str(self.re), rat_to_str(self.im)]

    # -- predicates ----------------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self):
        return not self.im

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRat(other.re - self.re, other.im - self.im)

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussRat(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return GaussRat(self.re, -self.im)

    # -- comparison ----------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return f"GaussRat({self.re})"
        return f"GaussRat({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return rat_to_str(self.re)
        if not self.re:
            return f"{rat_to_str(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{rat_to_str(self.re)}{sign}{rat_to_str(abs(self.im))}*i"


def _coerce(x):
    if isinstance(x, GaussRat):
        return x
    if isinstance(x, int) or type(x) is type(_Q0):
        return GaussRat(x)
    return NotImplemented


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)
