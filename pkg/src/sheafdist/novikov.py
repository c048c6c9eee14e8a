"""Truncated Novikov scalars: finite sums sum_i c_i T^{e_i} with rational
exponents 0 <= e_i < precision, coefficients in a ground field.

Arithmetic is exact modulo T^precision.  A scalar remembers whether any term
was ever truncated away ("exact" flag): a truncated scalar that looks like
zero may hide terms at or beyond the precision cutoff, and decisions that
would depend on them raise PrecisionExhausted instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class PrecisionExhausted(ArithmeticError):
    pass


@dataclass(frozen=True)
class NovikovScalar:
    field: object
    precision: Fraction
    terms: tuple  # ((exponent: Fraction, coeff), ...) strictly increasing exponents
    exact: bool = True

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if any(e < 0 for e in exps):
            raise ValueError("negative exponent")
        if any(e >= self.precision for e in exps):
            raise ValueError("exponent at or beyond precision")
        if any(exps[i] >= exps[i + 1] for i in range(len(exps) - 1)):
            raise ValueError("exponents not strictly increasing")

    # --- constructors ----------------------------------------------------
    @staticmethod
    def make(field, precision, pairs, exact=True):
        """Normalize arbitrary (exponent, coeff) pairs into a scalar."""
        precision = Fraction(precision)
        acc = {}
        truncated = False
        for e, c in pairs:
            e = Fraction(e)
            if e >= precision:
                truncated = True
                continue
            acc[e] = field.add(acc.get(e, field.zero()), c)
        terms = tuple((e, c) for e, c in sorted(acc.items()) if not field.is_zero(c))
        return NovikovScalar(field, precision, terms, exact and not truncated)

    @staticmethod
    def zero(field, precision):
        return NovikovScalar(field, Fraction(precision), ())

    @staticmethod
    def one(field, precision):
        return NovikovScalar(field, Fraction(precision), ((Fraction(0), field.one()),))

    @staticmethod
    def monomial(field, precision, exponent, coeff=None):
        coeff = field.one() if coeff is None else coeff
        return NovikovScalar.make(field, precision, [(exponent, coeff)])

    # --- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        """Zero below precision (may hide truncated higher terms if not exact)."""
        return not self.terms

    def valuation(self):
        """Least exponent with nonzero coefficient; None if zero below precision."""
        return self.terms[0][0] if self.terms else None

    def lead_coeff(self):
        return self.terms[0][1]

    # --- arithmetic -------------------------------------------------------
    def _check(self, other):
        if self.field != other.field or self.precision != other.precision:
            raise ValueError("mixed Novikov contexts")

    def add(self, other):
        self._check(other)
        return NovikovScalar.make(self.field, self.precision,
                                  list(self.terms) + list(other.terms),
                                  exact=self.exact and other.exact)

    def neg(self):
        f = self.field
        return NovikovScalar(f, self.precision,
                             tuple((e, f.neg(c)) for e, c in self.terms), self.exact)

    def sub(self, other):
        return self.add(other.neg())

    def mul(self, other):
        self._check(other)
        f = self.field
        pairs = []
        truncated = False
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if e >= self.precision:
                    truncated = True
                    continue
                pairs.append((e, f.mul(c1, c2)))
        return NovikovScalar.make(f, self.precision, pairs,
                                  exact=self.exact and other.exact and not truncated)

    def shift(self, exponent):
        """Multiply by T^exponent."""
        return self.mul(NovikovScalar.monomial(self.field, self.precision, exponent))

    def inv(self):
        """Inverse of a unit (valuation 0), computed as a truncated series."""
        if self.is_zero() or self.valuation() != 0:
            raise ZeroDivisionError("only valuation-0 scalars are invertible in the ring")
        f = self.field
        c0 = self.terms[0][1]
        c0i = f.inv(c0)
        # self = c0 (1 + v) with val(v) > 0; inverse = c0^-1 sum (-v)^k
        v = NovikovScalar.make(f, self.precision,
                               [(e, f.mul(c0i, c)) for e, c in self.terms[1:]])
        out = NovikovScalar.one(f, self.precision)
        power = NovikovScalar.one(f, self.precision)
        while True:
            power = power.mul(v.neg())
            if power.is_zero():
                break
            out = out.add(power)
        # a genuine series was cut off unless v was zero
        return NovikovScalar(f, self.precision, out.terms, exact=not v.terms and self.exact)

    def divide(self, other):
        """self / other, defined when valuation(self) >= valuation(other)."""
        if other.is_zero():
            raise ZeroDivisionError("division by (truncated) zero")
        if self.is_zero():
            return NovikovScalar(self.field, self.precision, (), self.exact and other.exact)
        vs, vo = self.valuation(), other.valuation()
        if vs < vo:
            raise ValueError("quotient would have negative valuation")
        f = self.field
        unit = NovikovScalar.make(f, self.precision, [(e - vo, c) for e, c in other.terms],
                                  exact=other.exact)
        num = NovikovScalar.make(f, self.precision, [(e - vo, c) for e, c in self.terms],
                                 exact=self.exact)
        return num.mul(unit.inv())
