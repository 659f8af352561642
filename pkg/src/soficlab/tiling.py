"""Eigen-coordinates, the digit map, the lattice tiling of SOL_R, and coupling maps.

The hyperbolic matrix A fixes an eigenbasis (v_plus, v_minus) normalized to
first coordinate 1.  SOL_R is charted onto R^2 x|_A R by

    (a, b, s)  |->  (a*v_plus + b*v_minus, s/rho),      rho = log_k(lambda),

which is a group isomorphism (A acts on the eigenbasis by diag(lambda,
lambda^-1) = diag(k^rho, k^-rho)).  The integer lattice Z^2 x| Z tiles the
chart by translates of [0,1)^3; pulling back and shrinking the planar
directions by t gives the tiling Gamma_t * D_t of SOL_R.  Locating a point is
exact: the height floor is the integer comparison lambda^(jq) vs k^p, the
planar floors are exact quadratic-number floors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .groups import LamplighterElement, SolLatticeElement, SolLatticeGroup
from .quadratic import LogRatioBounds, QuadraticNumber, squarefree_split
from .solreal import SolRealPoint


class DegenerateMatrix(ValueError):
    pass


def _sqrt_bounds(d0: int, digits: int = 12) -> tuple[Fraction, Fraction]:
    scale = 10 ** digits
    lo = isqrt(d0 * scale * scale)
    return Fraction(lo, scale), Fraction(lo + 1, scale)


@dataclass
class EigenData:
    """Exact eigen-structure of a hyperbolic unimodular 2x2 integer matrix."""

    A: tuple
    k: int
    det: int
    trace: int
    d: int  # squarefree part of tr^2 - 4 det
    lam: QuadraticNumber
    lam_conj: QuadraticNumber
    v_plus: tuple  # (QuadraticNumber, QuadraticNumber), first coordinate 1
    v_minus: tuple
    det_basis: QuadraticNumber  # det [v_plus | v_minus]
    log_ratio: LogRatioBounds = field(repr=False)
    k_below_lambda: bool = False

    def lam_power(self, j: int) -> QuadraticNumber:
        if not hasattr(self, "_lam_powers"):
            object.__setattr__(self, "_lam_powers", {})
        cache = self._lam_powers
        if j not in cache:
            cache[j] = self.lam ** j
        return cache[j]

    def vol_tile_bounds(self, t: Fraction, width: Fraction = Fraction(1, 10 ** 9)) -> tuple[Fraction, Fraction]:
        """Certified rational bracket of vol(D_t) = t^2 * rho / |det_basis|."""
        rho_lo, rho_hi = self.log_ratio.refine(width)
        # |det_basis| = |s*sqrt(d)/a01| with a01 = A[0][1]
        coeff = abs(self.det_basis.b)  # det_basis is purely irrational
        if self.det_basis.a != 0:
            raise AssertionError("det_basis expected purely irrational")
        sq_lo, sq_hi = _sqrt_bounds(self.d)
        det_lo, det_hi = coeff * sq_lo, coeff * sq_hi
        t = Fraction(t)
        return t * t * rho_lo / det_hi, t * t * rho_hi / det_lo

    def tile_footprint(self, t: Fraction):
        """Planar (a, b) extents of D_t: images of the chart corners [0,t]^2."""
        y_p, y_m = self.v_plus[1], self.v_minus[1]
        det = self.det_basis  # y_m - y_p
        a_vals, b_vals = [], []
        t = Fraction(t)
        for u1 in (Fraction(0), t):
            for u2_coeff in (0, 1):
                u2 = u2_coeff * t
                # solve a + b = u1, a*y_p + b*y_m = u2
                b = (QuadraticNumber.rational(u2, self.d) - y_p * u1) / det
                a = QuadraticNumber.rational(u1, self.d) - b
                a_vals.append(a)
                b_vals.append(b)
        return a_vals, b_vals

    def planar_extents(self, t: Fraction):
        a_vals, b_vals = self.tile_footprint(t)
        a_sorted = _qn_minmax(a_vals)
        b_sorted = _qn_minmax(b_vals)
        return a_sorted, b_sorted

    def ball_constant(self, t: Fraction) -> Fraction:
        """Rational C with D_t inside B_SOL(e, C/2): from corner extents."""
        (a_lo, a_hi), (b_lo, b_hi) = self.planar_extents(t)
        z_candidates = [a_lo, a_hi, b_lo, b_hi]
        zmax = None
        for q in z_candidates:
            aq = q if q.sign() >= 0 else -q
            zmax = aq if zmax is None or (aq - zmax).sign() > 0 else zmax
        # smallest p/8 with (1+z)^8 <= k^p, so log_k(1+z) <= p/8
        p = 0
        one_plus = QuadraticNumber.rational(1, self.d) + zmax
        while ((one_plus ** 8) - Fraction(self.k) ** p).sign() > 0:
            p += 1
        _, rho_hi = self.log_ratio.refine(Fraction(1, 10 ** 6))
        half = 2 * Fraction(p, 8) + 2 * rho_hi
        return 2 * half


def _qn_minmax(vals: Sequence[QuadraticNumber]):
    lo = hi = vals[0]
    for v in vals[1:]:
        if (v - lo).sign() < 0:
            lo = v
        if (v - hi).sign() > 0:
            hi = v
    return lo, hi


def eigen_data(A, k: int) -> EigenData:
    A = ((int(A[0][0]), int(A[0][1])), (int(A[1][0]), int(A[1][1])))
    tr = A[0][0] + A[1][1]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if det not in (1, -1):
        raise DegenerateMatrix("determinant must be +-1")
    disc = tr * tr - 4 * det
    if disc <= 0:
        raise DegenerateMatrix("matrix is elliptic")
    s, d0 = squarefree_split(disc)
    if d0 == 1:
        raise DegenerateMatrix("rational eigenvalues (parabolic or reducible case)")
    # a01 = 0 would force disc to be a perfect square, excluded above
    lam = QuadraticNumber(Fraction(tr, 2), Fraction(s, 2), d0)
    lam_conj = lam.conjugate()
    if (lam - 1).sign() <= 0:
        raise DegenerateMatrix("leading eigenvalue must exceed 1")
    a01 = A[0][1]
    y_p = (lam - A[0][0]) / a01
    y_m = (lam_conj - A[0][0]) / a01
    one = QuadraticNumber.rational(1, d0)
    data = EigenData(
        A=A,
        k=k,
        det=det,
        trace=tr,
        d=d0,
        lam=lam,
        lam_conj=lam_conj,
        v_plus=(one, y_p),
        v_minus=(one, y_m),
        det_basis=y_m - y_p,
        log_ratio=LogRatioBounds(lam, k),
        k_below_lambda=((lam - k).sign() > 0),
    )
    return data


# -- digit map ------------------------------------------------------------------


def digit_map(k: int, g: LamplighterElement) -> SolRealPoint:
    """(x, m) -> (sum eps_i k^i, sum eps_i k^(-i), m), exact rationals."""
    a = Fraction(0)
    b = Fraction(0)
    kf = Fraction(k)
    for p, v in g.lamps:
        a += v * kf ** p
        b += v * kf ** (-p)
    return SolRealPoint(a, b, Fraction(g.cursor))


def digit_map_corrupted(k: int, g: LamplighterElement) -> SolRealPoint:
    """Negative control: second coordinate ignores negative lamp positions."""
    a = Fraction(0)
    b = Fraction(0)
    kf = Fraction(k)
    for p, v in g.lamps:
        a += v * kf ** p
        if p >= 0:
            b += v * kf ** (-p)
    return SolRealPoint(a, b, Fraction(g.cursor))


# -- tile location ----------------------------------------------------------------


class BoundaryError(ValueError):
    """Height provably on a tile boundary (only s=0; resolved to j=0 upstream)."""


class TileLocator:
    """Exact point location in the Gamma_t * D_t tiling."""

    def __init__(self, eig: EigenData, t: Fraction):
        if eig.det != 1:
            raise DegenerateMatrix("tiling requires det(A) = 1 (group embedding)")
        self.eig = eig
        self.t = Fraction(t)
        if self.t <= 0:
            raise ValueError("t must be positive")
        self.group = SolLatticeGroup(eig.A)
        self._floor_cache: dict[Fraction, int] = {}

    def height_floor(self, s: Fraction) -> int:
        s = Fraction(s)
        if s not in self._floor_cache:
            self._floor_cache[s] = self.eig.log_ratio.floor_quotient(s)
        return self._floor_cache[s]

    def chart(self, w: SolRealPoint) -> tuple[QuadraticNumber, QuadraticNumber]:
        """X = (a*v_plus + b*v_minus)/t as an exact pair."""
        eig = self.eig
        d = eig.d
        u1 = QuadraticNumber.rational(w.a + w.b, d)
        u2 = eig.v_plus[1] * w.a + eig.v_minus[1] * w.b
        inv_t = Fraction(1) / self.t
        return u1 * inv_t, u2 * inv_t

    def locate(self, w: SolRealPoint) -> SolLatticeElement:
        """The unique gamma with w in gamma*D_t (half-open tile convention)."""
        j = self.height_floor(w.s)
        X1, X2 = self.chart(w)
        Amj = self.group.matrix_power(-j)
        Y1 = X1 * Amj[0][0] + X2 * Amj[0][1]
        Y2 = X1 * Amj[1][0] + X2 * Amj[1][1]
        f = (Y1.floor(), Y2.floor())
        Aj = self.group.matrix_power(j)
        m = (Aj[0][0] * f[0] + Aj[0][1] * f[1], Aj[1][0] * f[0] + Aj[1][1] * f[1])
        return SolLatticeElement(m, j)

    def chart_membership(self, gamma: SolLatticeElement, w: SolRealPoint) -> bool:
        """Exact re-verification that gamma^-1 * w lies in D_t (in the chart)."""
        if self.height_floor(w.s) != gamma.shift:
            return False
        X1, X2 = self.chart(w)
        j = gamma.shift
        Amj = self.group.matrix_power(-j)
        # A^-j (X - m) must land in [0,1)^2
        Z1 = X1 - gamma.vec[0]
        Z2 = X2 - gamma.vec[1]
        Y1 = Z1 * Amj[0][0] + Z2 * Amj[0][1]
        Y2 = Z1 * Amj[1][0] + Z2 * Amj[1][1]
        zero = QuadraticNumber.rational(0, self.eig.d)
        one = QuadraticNumber.rational(1, self.eig.d)
        return (
            Y1.sign() >= 0 and (Y1 - one).sign() < 0
            and Y2.sign() >= 0 and (Y2 - one).sign() < 0
        )

    def planar_coords(self, gamma: SolLatticeElement) -> tuple[QuadraticNumber, QuadraticNumber]:
        """SOL_R planar coordinates (a, b) of a lattice element: M(a,b) = t*m."""
        eig = self.eig
        u1 = Fraction(gamma.vec[0]) * self.t
        u2 = Fraction(gamma.vec[1]) * self.t
        b = (QuadraticNumber.rational(u2, eig.d) - eig.v_plus[1] * u1) / eig.det_basis
        a = QuadraticNumber.rational(u1, eig.d) - b
        return a, b
