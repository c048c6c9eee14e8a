"""Bars and graded barcodes.

A bar is a half-open interval [birth, death) carrying an integer degree; a
graded barcode is a finite multiset of bars.  Barcodes are the computable
model of the objects everything else works on; bars never store closed or
open intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rational import INF, NEG_INF, ext_add, fmt_rat, is_finite


class ParameterError(ValueError):
    pass


def _normalize_endpoint(x):
    if x is INF or x is NEG_INF:
        return x
    return Fraction(x)


@dataclass(frozen=True, order=False)
class Bar:
    birth: object  # Fraction or NEG_INF
    death: object  # Fraction or INF
    degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, "birth", _normalize_endpoint(self.birth))
        object.__setattr__(self, "death", _normalize_endpoint(self.death))
        if self.birth is INF or self.death is NEG_INF:
            raise ValueError("bar endpoints out of range")
        if not self.birth < self.death:
            raise ValueError(f"empty bar [{self.birth}, {self.death})")

    def length(self):
        if not is_finite(self.death) or not is_finite(self.birth):
            return INF
        return self.death - self.birth

    def translate(self, c):
        """Shift by any rational c (internal helper; the functor needs c >= 0)."""
        return Bar(ext_add(self.birth, c), ext_add(self.death, c), self.degree)

    def sort_key(self):
        b = (0, self.birth) if is_finite(self.birth) else (-1, 0)
        d = (0, self.death) if is_finite(self.death) else (1, 0)
        return (self.degree, b, d)

    def __repr__(self):
        return f"Bar({fmt_rat(self.birth)},{fmt_rat(self.death)},deg={self.degree})"


@dataclass(frozen=True)
class GradedBarcode:
    bars: tuple

    @staticmethod
    def of(bars) -> "GradedBarcode":
        return GradedBarcode(tuple(sorted(bars, key=Bar.sort_key)))

    def __post_init__(self):
        object.__setattr__(self, "bars", tuple(sorted(self.bars, key=Bar.sort_key)))

    def __iter__(self):
        return iter(self.bars)

    def __len__(self):
        return len(self.bars)

    def __eq__(self, other):
        # multiset equality; bars is kept sorted
        return isinstance(other, GradedBarcode) and self.bars == other.bars

    def __hash__(self):
        return hash(self.bars)

    def is_empty(self) -> bool:
        return not self.bars

    def degrees(self):
        return sorted({b.degree for b in self.bars})

    def in_degree(self, n) -> "GradedBarcode":
        return GradedBarcode.of(b for b in self.bars if b.degree == n)

    def finite_endpoints(self):
        out = set()
        for b in self.bars:
            if is_finite(b.birth):
                out.add(b.birth)
            if is_finite(b.death):
                out.add(b.death)
        return sorted(out)

    def translate(self, c) -> "GradedBarcode":
        return GradedBarcode.of(b.translate(c) for b in self.bars)


EMPTY = GradedBarcode(())


def shift_barcode(barcode: GradedBarcode, c) -> GradedBarcode:
    """The translation functor on barcodes: every [b,d) becomes [b+c,d+c).

    c must be a finite rational >= 0.
    """
    if not is_finite(c):
        raise ParameterError("shift must be finite")
    c = Fraction(c)
    if c < 0:
        raise ParameterError("shift must be >= 0")
    return barcode.translate(c)


def torsion_threshold(barcode: GradedBarcode):
    """sup of bar lengths: the least c such that tau_{0,c} is zero.

    0 for the empty barcode, INF if any bar is infinite.  The barcode is
    c-torsion exactly when c >= this value.
    """
    best = Fraction(0)
    for bar in barcode:
        ln = bar.length()
        if ln is INF:
            return INF
        if ln > best:
            best = ln
    return best
