"""Exact arithmetic in real quadratic fields Q(sqrt(d)).

Numbers are stored as a + b*sqrt(d) with rational a, b and a fixed positive
non-square d.  Every comparison, sign test and floor is decided by integer
arithmetic only; floats appear solely as initial guesses that are verified
exactly afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

Rat = Union[int, Fraction]


def squarefree_split(d: int) -> tuple[int, int]:
    """Return (s, d0) with d = s^2 * d0 and d0 squarefree."""
    if d <= 0:
        raise ValueError("d must be positive")
    s, d0, p = 1, d, 2
    while p * p <= d0:
        while d0 % (p * p) == 0:
            d0 //= p * p
            s *= p
        p += 1 if p == 2 else 2
    return s, d0


def _isqrt_floor(n: int) -> int:
    # floor(sqrt(n)) for n >= 0
    return isqrt(n)


@dataclass(frozen=True)
class QuadraticNumber:
    """a + b*sqrt(d), exact.  Mixed-d arithmetic is rejected."""

    a: Fraction
    b: Fraction
    d: int

    @staticmethod
    def of(a: Rat, b: Rat, d: int) -> QuadraticNumber:
        s, d0 = squarefree_split(d)
        if d0 == 1:
            raise ValueError("d must not be a perfect square")
        return QuadraticNumber(Fraction(a), Fraction(b) * s, d0)

    @staticmethod
    def rational(a: Rat, d: int) -> QuadraticNumber:
        return QuadraticNumber(Fraction(a), Fraction(0), d)

    def _coerce(self, other) -> QuadraticNumber:
        if isinstance(other, QuadraticNumber):
            if other.d != self.d:
                raise ValueError("mixed quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(Fraction(other), Fraction(0), self.d)
        raise TypeError(f"cannot combine QuadraticNumber with {type(other)!r}")

    def __add__(self, other) -> QuadraticNumber:
        o = self._coerce(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self) -> QuadraticNumber:
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other) -> QuadraticNumber:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> QuadraticNumber:
        return (-self) + self._coerce(other)

    def __mul__(self, other) -> QuadraticNumber:
        o = self._coerce(other)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * self.d,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def conjugate(self) -> QuadraticNumber:
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self) -> QuadraticNumber:
        n = self.norm()
        if n == 0:
            if self.a == 0 and self.b == 0:
                raise ZeroDivisionError("inverse of zero")
            raise ZeroDivisionError("zero norm")  # impossible for non-square d
        c = self.conjugate()
        return QuadraticNumber(c.a / n, c.b / n, self.d)

    def __truediv__(self, other) -> QuadraticNumber:
        return self * self._coerce(other).inverse()

    def __pow__(self, e: int) -> QuadraticNumber:
        if e < 0:
            return self.inverse() ** (-e)
        out = QuadraticNumber(Fraction(1), Fraction(0), self.d)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d): only rational comparisons of a^2 vs b^2*d."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        aa, bb = a * a, b * b * self.d
        if a > 0:  # b < 0: positive iff a^2 > b^2 d
            return 1 if aa > bb else (-1 if aa < bb else 0)
        return -1 if aa > bb else (1 if aa < bb else 0)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def floor(self) -> int:
        """Exact floor, integer arithmetic only."""
        # write self = (A + B*sqrt(d)) / Q with integers A, B, Q > 0
        q = self.a.denominator * self.b.denominator // _gcd(
            self.a.denominator, self.b.denominator
        )
        A = self.a.numerator * (q // self.a.denominator)
        B = self.b.numerator * (q // self.b.denominator)
        if B >= 0:
            s = _isqrt_floor(B * B * self.d)  # s <= B*sqrt(d) < s+1
        else:
            s = -_isqrt_floor(B * B * self.d) - 1
        n = (A + s) // q  # first guess, off by at most 1
        while self._ge_int(n + 1, A, B, q):
            n += 1
        while not self._ge_int(n, A, B, q):
            n -= 1
        return n

    def _ge_int(self, n: int, A: int, B: int, Q: int) -> bool:
        # is (A + B*sqrt(d))/Q >= n, i.e. B*sqrt(d) >= nQ - A
        rhs = n * Q - A
        if B >= 0:
            if rhs <= 0:
                return True
            return B * B * self.d >= rhs * rhs
        if rhs >= 0:
            return False
        return B * B * self.d <= rhs * rhs

    def __float__(self) -> float:
        from math import sqrt

        return float(self.a) + float(self.b) * sqrt(self.d)

    def __repr__(self) -> str:
        return f"QuadraticNumber({self.a}, {self.b}, d={self.d})"

    def __str__(self) -> str:
        return f"{self.a}{'+' if self.b >= 0 else ''}{self.b}*sqrt({self.d})"


def _gcd(x: int, y: int) -> int:
    while y:
        x, y = y, x % y
    return x


def compare(x: QuadraticNumber, y: QuadraticNumber) -> int:
    """-1, 0, +1; never consults floating point."""
    return (x - y).sign()


class LogRatioBounds:
    """Exact decision procedures and rational brackets for rho = log_k(lam).

    lam is a quadratic irrational > 1, k an integer >= 2, so rho is irrational
    and every comparison ``j*rho <=> s`` with rational s reduces to an exact
    integer comparison lam^(j*q) <=> k^p.
    """

    def __init__(self, lam: QuadraticNumber, k: int):
        if k < 2:
            raise ValueError("k must be >= 2")
        if lam.sign() <= 0 or (lam - 1).sign() <= 0:
            raise ValueError("lam must exceed 1")
        self.lam = lam
        self.k = k
        self._lo = Fraction(0)
        self._hi: Fraction | None = None  # refined lazily

    def cmp_mult_vs(self, j: int, s: Fraction) -> int:
        """sign(j*rho - s) decided exactly."""
        s = Fraction(s)
        p, q = s.numerator, s.denominator
        # j*rho vs p/q  <=>  lam^(j*q) vs k^p
        lhs = self.lam ** (j * q)
        return (lhs - Fraction(self.k) ** p).sign()

    def floor_quotient(self, s: Fraction) -> int:
        """floor(s / rho): the unique j with j*rho <= s < (j+1)*rho.

        Equality j*rho = s happens only at s = 0 (returns 0), since rho is
        irrational.
        """
        s = Fraction(s)
        if s == 0:
            return 0
        import math

        # float guess, then exact adjustment
        j = math.floor(float(s) / (math.log(float(self.lam)) / math.log(self.k)))
        while self.cmp_mult_vs(j + 1, s) <= 0:
            j += 1
        while self.cmp_mult_vs(j, s) > 0:
            j -= 1
        return j

    def refine(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """A rational bracket [lo, hi] around rho with hi - lo <= width.

        Denominators are capped (~10^6): lam^q grows linearly in bits with q,
        so extreme widths are rejected rather than silently approximated.
        """
        width = Fraction(width)
        if width <= 0:
            raise ValueError("width must be positive")
        import math

        f = math.log(float(self.lam)) / math.log(self.k)
        lo, hi = Fraction(0), Fraction(math.ceil(f) + 1)
        # mediant (Stern-Brocot) descent: denominators stay near-optimal
        while hi - lo > width:
            mid = Fraction(lo.numerator + hi.numerator, lo.denominator + hi.denominator)
            if mid.denominator > 10 ** 6:
                raise ValueError("requested width needs impractically large powers")
            if self.cmp_mult_vs(mid.denominator, Fraction(mid.numerator)) < 0:
                # mid.denominator * rho < mid.numerator => rho < mid
                hi = mid
            else:
                lo = mid
        self._lo, self._hi = lo, hi
        return lo, hi

    def float_value(self) -> float:
        import math

        return math.log(float(self.lam)) / math.log(self.k)
