"""Ground fields: small prime fields F_p and the rationals.

Field elements are plain values (int reduced mod p, or Fraction); the field
object supplies the operations.  Matrices and morphism tables carry one field
tag, never mixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p ** 0.5) + 1)):
            raise FieldError(f"{self.p} is not prime")

    @property
    def tag(self) -> str:
        return f"f{self.p}"

    def zero(self):
        return 0

    def one(self):
        return 1

    def of_int(self, n: int):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def eq(self, a, b) -> bool:
        return (a - b) % self.p == 0

    def rand(self, rng):
        return rng.randrange(self.p)

    def rand_nonzero(self, rng):
        return rng.randrange(1, self.p)

    def elements(self):
        return range(self.p)


@dataclass(frozen=True)
class RationalField:
    @property
    def tag(self) -> str:
        return "q"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def of_int(self, n: int):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / Fraction(b)

    def is_zero(self, a) -> bool:
        return a == 0

    def eq(self, a, b) -> bool:
        return a == b

    def rand(self, rng):
        return Fraction(rng.randrange(-6, 7), rng.randrange(1, 5))


F2 = PrimeField(2)
F3 = PrimeField(3)
QQ = RationalField()


def parse_field(tag: str):
    """Field from its text tag: 'f2', 'f3', ..., or 'q'."""
    tag = tag.strip().lower()
    if tag == "q":
        return QQ
    if tag.startswith("f"):
        try:
            return PrimeField(int(tag[1:]))
        except (ValueError, FieldError) as exc:
            raise FieldError(f"bad field tag {tag!r}") from exc
    raise FieldError(f"bad field tag {tag!r}")
