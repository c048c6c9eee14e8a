"""Exact extended-rational scalars.

All shift/endpoint arithmetic in the package runs on ``fractions.Fraction``
(already stored in lowest terms with positive denominator) extended by the
two sentinels ``INF`` and ``NEG_INF``.  No floats appear anywhere in the
computational core.
"""

from __future__ import annotations

from fractions import Fraction


class _Infinity:
    """Signed infinity comparable with Fraction/int and with itself."""

    __slots__ = ("sign",)

    def __init__(self, sign):
        self.sign = sign  # +1 or -1

    def __repr__(self):
        return "INF" if self.sign > 0 else "NEG_INF"

    def __neg__(self):
        return NEG_INF if self.sign > 0 else INF

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __hash__(self):
        return hash(("_Infinity", self.sign))

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other):
        return self == other or self > other

    def __add__(self, other):
        if isinstance(other, _Infinity) and other.sign != self.sign:
            raise ArithmeticError("INF + NEG_INF is undefined")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self.__add__(-other if isinstance(other, _Infinity) else other)

    def __rsub__(self, other):
        # other - self
        return -self


INF = _Infinity(+1)
NEG_INF = _Infinity(-1)

Rat = Fraction  # alias for finite values
ExtRat = object  # Fraction | _Infinity, kept loose on purpose


def is_finite(x) -> bool:
    return not isinstance(x, _Infinity)


def ext_add(x, y):
    """x + y with infinities absorbing (INF + NEG_INF is an error)."""
    if isinstance(x, _Infinity) or isinstance(y, _Infinity):
        if isinstance(x, _Infinity):
            return x + y
        return y + x
    return x + y


def ext_sub(x, y):
    return ext_add(x, -y if is_finite(y) else -y)


def ext_neg(x):
    return -x


def ext_min(*xs):
    m = xs[0]
    for x in xs[1:]:
        if x < m:
            m = x
    return m


def ext_max(*xs):
    m = xs[0]
    for x in xs[1:]:
        if x > m:
            m = x
    return m


def parse_rat(text: str):
    """Parse 'p', 'p/q', 'inf' or '-inf' into an extended rational."""
    s = text.strip()
    if s in ("inf", "+inf"):
        return INF
    if s == "-inf":
        return NEG_INF
    return Fraction(s)


def fmt_rat(x) -> str:
    if isinstance(x, _Infinity):
        return "inf" if x.sign > 0 else "-inf"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
