"""Rational points of SOL_R = R^2 x| R, where t acts by (x,y) -> (k^t x, k^(-t) y).

Only points the pipeline actually touches are represented: rational planar
coordinates with a rational height whose k-power is rational (integer heights
in practice).  Word-length information with respect to the compact generating
set {(x,0): |x|_inf <= 1} u {(0,t): |t| <= 1} is carried through the sandwich

    max(log_k |x|_inf, |s|)  <=  |g|  <=  2 log_k(1 + |x|_inf) + 2|s|,

and every test against a rational threshold is decided exactly by integer
power comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rat = Union[int, Fraction]


class NonIntegerHeight(ValueError):
    """Group operation at a height whose k-power is irrational."""


@dataclass(frozen=True)
class SolRealPoint:
    a: Fraction
    b: Fraction
    s: Fraction

    @staticmethod
    def of(a: Rat, b: Rat, s: Rat) -> SolRealPoint:
        return SolRealPoint(Fraction(a), Fraction(b), Fraction(s))

    def is_identity(self) -> bool:
        return self.a == 0 and self.b == 0 and self.s == 0


def _k_power(k: int, s: Fraction) -> Fraction:
    if s.denominator != 1:
        raise NonIntegerHeight(f"k^{s} is irrational")
    return Fraction(k) ** s.numerator


def sol_mul(k: int, g: SolRealPoint, h: SolRealPoint) -> SolRealPoint:
    """(a,b,s)(a',b',s') = (a + k^s a', b + k^(-s) b', s + s'); s must be integer."""
    ks = _k_power(k, g.s)
    return SolRealPoint(g.a + ks * h.a, g.b + h.b / ks, g.s + h.s)


def sol_inv(k: int, g: SolRealPoint) -> SolRealPoint:
    ks = _k_power(k, g.s)
    return SolRealPoint(-g.a / ks, -g.b * ks, -g.s)


def sup_norm(g: SolRealPoint) -> Fraction:
    return max(abs(g.a), abs(g.b))


def upper_length_leq(k: int, g: SolRealPoint, bound: Rat) -> bool:
    """Exact test: 2 log_k(1 + |x|_inf) + 2|s| <= bound."""
    bound = Fraction(bound)
    z = sup_norm(g)
    e = bound - 2 * abs(g.s)  # need (1+z)^2 <= k^e
    if e < 0:
        return False
    q = e.denominator
    lhs = (1 + z) ** (2 * q)
    return lhs <= Fraction(k) ** e.numerator


def lower_length_geq(k: int, g: SolRealPoint, bound: Rat) -> bool:
    """Exact test: max(log_k |x|_inf, |s|) >= bound."""
    bound = Fraction(bound)
    if abs(g.s) >= bound:
        return True
    z = sup_norm(g)
    if z == 0:
        return bound <= 0
    q = bound.denominator
    return z ** q >= Fraction(k) ** bound.numerator if bound >= 0 else True


def upper_length_bin(k: int, g: SolRealPoint, cap: int = 512) -> int:
    """Smallest integer r >= 0 with upper bound <= r (exact bisection)."""
    lo, hi = 0, 1
    if upper_length_leq(k, g, 0):
        return 0
    while not upper_length_leq(k, g, hi):
        hi *= 2
        if hi > cap:
            raise ValueError(f"upper length exceeds cap {cap}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if upper_length_leq(k, g, mid):
            hi = mid
        else:
            lo = mid
    return hi


def length_bounds_value(k: int, g: SolRealPoint) -> tuple[float, float]:
    """Float (lower, upper) of the sandwich, for reporting only."""
    import math

    z = float(sup_norm(g))
    s = abs(float(g.s))
    lower = max(math.log(z, k) if z > 0 else float("-inf"), s)
    upper = 2 * math.log1p(z) / math.log(k) + 2 * s
    return max(lower, 0.0), upper


def in_folner_box(k: int, n: int, g: SolRealPoint) -> bool:
    """Membership in {(x, s): x in [0, k^(n+1)]^2, 0 <= s <= n}."""
    K = Fraction(k) ** (n + 1)
    return 0 <= g.a <= K and 0 <= g.b <= K and 0 <= g.s <= n
