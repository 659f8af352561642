"""The almost-cocycle, cocycle-relation sets, rho checks, cylinder measures.

The transfer of g at x is the unique target element h with u(xg) = u(x)h,
defined when x is good at |g| and (graph codomain) the image vertex is good
at r = d(u(x), u(xg)); otherwise it is Infinity.  On good image vertices the
intrinsic distance equals the target word length, so r is computed as the
word length of the group division u(x)^{-1} u(xg) and gated by the image
vertex's distance to the graph exterior.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .coupling import CouplingMap
from .groups import (
    CyclicGroup,
    Exceeds,
    LamplighterGroup,
    MarkedGroup,
    SolLatticeGroup,
)

INFINITY = "infinity"


@dataclass(frozen=True)
class Transfer:
    value: object  # target group element, or INFINITY

    @property
    def finite(self) -> bool:
        return self.value != INFINITY


class TargetLengths:
    """Word lengths in the target group, with closed forms where they exist.

    SOL lattices use a cached ball plus a vectorized meet-in-the-middle pass,
    so lengths up to twice the half-radius are exact; beyond that Exceeds is
    returned (callers treat it as a cap hit).
    """

    def __init__(self, group: MarkedGroup, half_radius: int = 9, cap: int = 10 ** 7):
        self.group = group
        self.half_radius = half_radius
        self.cap = cap
        self._cache: dict = {}
        self._sol_ball = None

    def _ensure_sol_ball(self):
        if self._sol_ball is None:
            ball = self.group.ball(self.half_radius, self.cap)
            m1 = np.array([g.vec[0] for g in ball], dtype=np.int64)
            m2 = np.array([g.vec[1] for g in ball], dtype=np.int64)
            jj = np.array([g.shift for g in ball], dtype=np.int64)
            dist = np.array(list(ball.values()), dtype=np.int64)
            self._sol_ball = (m1, m2, jj, dist)

    def length(self, h):
        if h in self._cache:
            return self._cache[h]
        out = self._length(h)
        self._cache[h] = out
        return out

    def _length(self, h):
        g = self.group
        if isinstance(g, LamplighterGroup):
            return g.word_length(h)
        if isinstance(g, CyclicGroup):
            return min(h.value, g.N - h.value)
        if isinstance(g, SolLatticeGroup):
            return self._sol_length(h)
        out = g.word_length_bfs(h, 2 * self.half_radius, self.cap)
        return out

    def _sol_length(self, h):
        self._ensure_sol_ball()
        m1, m2, jj, dist = self._sol_ball
        g: SolLatticeGroup = self.group
        # direct hit
        direct = np.nonzero((m1 == h.vec[0]) & (m2 == h.vec[1]) & (jj == h.shift))[0]
        if direct.size:
            return int(dist[direct[0]])
        # meet in the middle: |h| = min over ball w of |w| + |w^-1 h|
        best = None
        dj = h.shift - jj
        rm1 = h.vec[0] - m1
        rm2 = h.vec[1] - m2
        # w^-1 h = (A^(-j_w) (m_h - m_w), j_h - j_w)
        q1 = np.empty_like(rm1)
        q2 = np.empty_like(rm2)
        for jv in np.unique(jj):
            P = g.matrix_power(-int(jv))
            sel = jj == jv
            q1[sel] = P[0][0] * rm1[sel] + P[0][1] * rm2[sel]
            q2[sel] = P[1][0] * rm1[sel] + P[1][1] * rm2[sel]
        # membership of (q1, q2, dj) in the ball, via packed keys
        lo = (int(m1.min()), int(m2.min()), int(jj.min()))
        hi = (int(m1.max()), int(m2.max()), int(jj.max()))
        span = (hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1)

        def pack(a, b, c):
            bad = (a < lo[0]) | (a > hi[0]) | (b < lo[1]) | (b > hi[1]) | (c < lo[2]) | (c > hi[2])
            key = ((a - lo[0]) * span[1] + (b - lo[1])) * span[2] + (c - lo[2])
            return np.where(bad, -1, key)

        ball_keys = pack(m1, m2, jj)
        order = np.argsort(ball_keys)
        sorted_keys = ball_keys[order]
        sorted_dist = dist[order]
        qkeys = pack(q1, q2, dj)
        pos = np.clip(np.searchsorted(sorted_keys, qkeys), 0, sorted_keys.size - 1)
        hit = (sorted_keys[pos] == qkeys) & (qkeys >= 0)
        if not np.any(hit):
            return Exceeds(2 * self.half_radius)
        totals = dist[hit] + sorted_dist[pos[hit]]
        return int(totals.min())


class TransferContext:
    """Shared tables for transfer computations over one coupling map."""

    def __init__(self, M: CouplingMap, half_radius: int = 9):
        self.M = M
        self.domain = M.domain
        self.lengths = TargetLengths(M.target_group, half_radius=half_radius)
        self.dom_lengths = TargetLengths(M.domain.group, half_radius=half_radius)
        self._dom_exterior = None
        self._tgt_exterior = None
        self._division_cache: dict = {}

    def domain_good(self, v: int, r: int) -> bool:
        if self._dom_exterior is None:
            self._dom_exterior = self.domain.distance_to_exterior()
        return bool(self._dom_exterior[v] > r)

    def target_good(self, y: int, r: int) -> bool:
        if self._tgt_exterior is None:
            self._tgt_exterior = self.M.target_graph.distance_to_exterior()
        return bool(self._tgt_exterior[y] > r)

    def division(self, ykey1: int, ykey2: int):
        """u(x)^-1 u(xg) as a target group element, cached by value keys."""
        pair = (ykey1, ykey2)
        if pair not in self._division_cache:
            G = self.M.target_group
            e1 = (self.M.target_graph.decode(ykey1) if self.M.graph_codomain
                  else self.M.value_table[ykey1])
            e2 = (self.M.target_graph.decode(ykey2) if self.M.graph_codomain
                  else self.M.value_table[ykey2])
            self._division_cache[pair] = G.mul(G.inv(e1), e2)
        return self._division_cache[pair]


def transfer(ctx: TransferContext, g, x: int, length_g: Optional[int] = None) -> Transfer:
    """T(g, x) per the almost-cocycle definition; Infinity when gates fail."""
    M = ctx.M
    if length_g is None:
        length_g = ctx.dom_lengths.length(g)
    if not ctx.domain_good(x, length_g):
        return Transfer(INFINITY)
    xg = M.domain.almost_action(x, g, r_max=length_g)
    if xg < 0:  # cannot happen on good vertices; defensive
        return Transfer(INFINITY)
    h = ctx.division(int(M.values[x]), int(M.values[xg]))
    if M.graph_codomain:
        r = ctx.lengths.length(h)
        if isinstance(r, Exceeds):
            return Transfer(INFINITY)
        if not ctx.target_good(int(M.values[x]), r):
            return Transfer(INFINITY)
    return Transfer(h)


@dataclass
class DefectResult:
    numerator: int
    numerator_good: int
    denominator_all: int
    denominator_good: int
    radius: int
    fraction_all: Fraction
    fraction_good: Fraction
    good_fraction: Fraction
    failures: dict


def cocycle_defect(ctx: TransferContext, g, gp) -> DefectResult:
    """Fraction of x where T(gg',x) = T(g,x) T(g',xg) with all three finite.

    Reported over all vertices and conditionally over GoodSet(|g|+|g'|); the
    good-set fraction rides along so denominators are unambiguous.
    """
    M = ctx.M
    dom = M.domain
    G = dom.group
    ggp = G.mul(g, gp)
    lg = ctx.dom_lengths.length(g)
    lgp = ctx.dom_lengths.length(gp)
    lggp = ctx.dom_lengths.length(ggp)
    R = lg + lgp
    N = dom.num_vertices
    word_g = G.geodesic_word(g, lg)
    word_gp = G.geodesic_word(gp, lgp)
    xg_all = dom.almost_action_all(word_g)
    failures = {"gate": 0, "relation": 0}
    numerator = 0
    numerator_good = 0
    good_mask = dom.good_mask(R)
    tgt_group = M.target_group
    relation_cache: dict = {}
    for x in range(N):
        t_ggp = transfer(ctx, ggp, x, lggp)
        t_g = transfer(ctx, g, x, lg)
        xg = int(xg_all[x])
        t_gp = transfer(ctx, gp, xg, lgp) if xg >= 0 else Transfer(INFINITY)
        if not (t_ggp.finite and t_g.finite and t_gp.finite):
            failures["gate"] += 1
            continue
        key = (t_ggp.value, t_g.value, t_gp.value)
        ok = relation_cache.get(key)
        if ok is None:
            ok = t_ggp.value == tgt_group.mul(t_g.value, t_gp.value)
            relation_cache[key] = ok
        if ok:
            numerator += 1
            if good_mask[x]:
                numerator_good += 1
        else:
            failures["relation"] += 1
    good_count = int(good_mask.sum())
    return DefectResult(
        numerator=numerator,
        numerator_good=numerator_good,
        denominator_all=N,
        denominator_good=good_count,
        radius=R,
        fraction_all=Fraction(numerator, N),
        fraction_good=(Fraction(numerator_good, good_count) if good_count
                       else Fraction(0)),
        good_fraction=Fraction(good_count, N),
        failures=failures,
    )


def cocycle_defect_oracle(ctx: TransferContext, g, gp) -> int:
    """Brute-force numerator: per-vertex transfers, no vectorized sharing."""
    M = ctx.M
    dom = M.domain
    G = dom.group
    ggp = G.mul(g, gp)
    count = 0
    for x in range(dom.num_vertices):
        t_ggp = transfer(ctx, ggp, x)
        t_g = transfer(ctx, g, x)
        if not (t_ggp.finite and t_g.finite):
            continue
        xg = dom.almost_action(x, g)
        if xg < 0:
            continue
        t_gp = transfer(ctx, gp, xg)
        if not t_gp.finite:
            continue
        if t_ggp.value == M.target_group.mul(t_g.value, t_gp.value):
            count += 1
    return count


@dataclass
class RhoCheckResult:
    frac_rho_bounded: Fraction
    frac_no_collision: Fraction
    frac_reaches_rank0: Fraction


def rho_checks(M: CouplingMap, N_bound: int, R: int) -> RhoCheckResult:
    """The three almost-sure properties of the fiber index, at finite scale."""
    dom = M.domain
    total = dom.num_vertices
    frac_rho = Fraction(int((M.rho <= N_bound).sum()), total)
    ball = dom.group.ball(R)
    collision = np.zeros(total, dtype=bool)
    reaches = np.zeros(total, dtype=bool)
    for w, dist in ball.items():
        word = dom.group.geodesic_word(w, R)
        xw = dom.almost_action_all(word)
        defined = xw >= 0
        same_value = np.zeros(total, dtype=bool)
        same_value[defined] = M.values[xw[defined]] == M.values[defined.nonzero()[0]]
        if dist > 0:
            same_rho = np.zeros(total, dtype=bool)
            same_rho[defined] = M.rho[xw[defined]] == M.rho[defined.nonzero()[0]]
            collision |= same_value & same_rho
        rank0 = np.zeros(total, dtype=bool)
        rank0[defined] = M.rho[xw[defined]] == 0
        reaches |= same_value & rank0
    return RhoCheckResult(
        frac_rho_bounded=frac_rho,
        frac_no_collision=Fraction(int((~collision).sum()), total),
        frac_reaches_rank0=Fraction(int(reaches.sum()), total),
    )


@dataclass(frozen=True)
class CylinderPattern:
    """Finite window of transfer values and fiber indices; e must be in sigma."""

    sigma: tuple  # domain group elements, identity first
    a_h: tuple  # target group elements aligned with sigma
    a_n: tuple  # fiber indices aligned with sigma


def cylinder_measure(M: CouplingMap, pattern: CylinderPattern) -> Fraction:
    """Fraction of vertices in GoodSet(max |g|) matching the pattern."""
    dom = M.domain
    G = dom.group
    tgt = M.target_group
    if pattern.sigma[0] != G.identity:
        raise ValueError("sigma must contain (and start with) the identity")
    tl = TargetLengths(G)
    radii = [tl.length(g) for g in pattern.sigma]
    rmax = max(radii)
    good = dom.good_mask(rmax)
    base_h = pattern.a_h[0]
    count = 0
    for x in np.nonzero(good)[0]:
        ok = True
        ux = M.value_element(int(x))
        for g, ah, an in zip(pattern.sigma, pattern.a_h, pattern.a_n):
            xg = dom.almost_action(int(x), g)
            if xg < 0:
                ok = False
                break
            expect = tgt.mul(ux, tgt.mul(tgt.inv(base_h), ah))
            if M.value_element(xg) != expect or int(M.rho[xg]) != an:
                ok = False
                break
        if ok:
            count += 1
    return Fraction(count, dom.num_vertices)


def observed_cylinder_patterns(M: CouplingMap, sigma: tuple) -> dict:
    """All patterns observed on the good set, with exact measures; e-normalized."""
    dom = M.domain
    G = dom.group
    tgt = M.target_group
    tl = TargetLengths(G)
    rmax = max(tl.length(g) for g in sigma)
    good = dom.good_mask(rmax)
    counts: dict = {}
    for x in np.nonzero(good)[0]:
        ux = M.value_element(int(x))
        ux_inv = tgt.inv(ux)
        key_h, key_n = [], []
        ok = True
        for g in sigma:
            xg = dom.almost_action(int(x), g)
            if xg < 0:
                ok = False
                break
            key_h.append(tgt.mul(ux_inv, M.value_element(xg)))
            key_n.append(int(M.rho[xg]))
        if not ok:
            continue
        key = (tuple(key_h), tuple(key_n))
        counts[key] = counts.get(key, 0) + 1
    total = dom.num_vertices
    return {
        CylinderPattern(tuple(sigma), kh, kn): Fraction(c, total)
        for (kh, kn), c in counts.items()
    }
