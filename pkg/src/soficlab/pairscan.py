"""Integer machinery for the digit-map geometry of lamplighter Folner sets.

The digit image of (x, m) has planar parts v1 = sum eps_i k^i and
v2 = sum eps_i k^(-i); scaling by k^n both become integers: v1int is the
config code itself, v2int its digit reversal.  The upper-length ball test

    d_upper(v(g), v(g')) <= q

decomposes into two exact integer square comparisons with thresholds
Delta_max = isqrt(k^(2w+e)) - k^w, which drive all the pair scans below
(carry pairs, preimage-of-ball cardinalities, digit-pattern verification).
Shrinking the ball this way keeps every measured set inside the word-metric
ball, so the upper-bound checks stay one-sided.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Optional

import numpy as np


def digit_reversal(configs: np.ndarray, k: int, width: int) -> np.ndarray:
    """v2int: reverse the base-k digits of each config."""
    out = np.zeros_like(configs)
    rest = configs.copy()
    for _ in range(width):
        out = out * k + rest % k
        rest //= k
    return out


def digit_reversal_nonneg(configs: np.ndarray, k: int, n: int) -> np.ndarray:
    """Corrupted second coordinate: lamps at negative positions dropped."""
    width = 2 * n + 1
    out = np.zeros_like(configs)
    rest = configs.copy()
    for i in range(width):
        digit = rest % k
        if i - n >= 0:  # position i-n
            out += digit * k ** (n - (i - n))
        rest //= k
    return out


def delta_max(k: int, w: int, e: int) -> int:
    """Largest integer D with (k^w + D)^2 <= k^(2w+e); negative if e < 0."""
    if e < 0:
        return -1
    return isqrt(k ** (2 * w + e)) - k ** w


@dataclass
class PairScan:
    """Directed carry-pair relation between configs at cursor j and j+dj."""

    k: int
    n: int
    q: int
    corrupted: bool = False
    pairs: dict = field(default_factory=dict)  # (j, dj) -> (src_cfg, dst_cfg) arrays

    def __post_init__(self):
        k, n, q = self.k, self.n, self.q
        width = 2 * n + 1
        n_cfg = k ** width
        configs = np.arange(n_cfg, dtype=np.int64)
        v1 = configs
        v2 = (digit_reversal_nonneg(configs, k, n) if self.corrupted
              else digit_reversal(configs, k, width))
        order1 = np.argsort(v1, kind="stable")
        order2 = np.argsort(v2, kind="stable")
        for j in range(0, n + 1):
            for dj in range(-(q // 2), q // 2 + 1):
                if not (0 <= j + dj <= n):
                    continue
                e = q - 2 * abs(dj)
                t1 = delta_max(k, j + n, e)
                t2 = delta_max(k, n - j, e)
                if t1 < 0 or t2 < 0:
                    continue
                if t1 == 0 or t2 == 0:
                    # only the trivial pair c' = c survives
                    self.pairs[(j, dj)] = (configs, configs)
                    continue
                src, dst = self._scan(v1, v2, order1, order2, t1, t2)
                self.pairs[(j, dj)] = (src, dst)

    def _scan(self, v1, v2, order1, order2, t1, t2):
        """All unordered config pairs with |dv1| <= t1 and |dv2| <= t2."""
        # scan the coordinate with the smaller window; distinct values mean
        # sorted neighbors within distance t are within offset t
        if t2 <= t1:
            order, key, other, t_key, t_other = order2, v2, v1, t2, t1
        else:
            order, key, other, t_key, t_other = order1, v1, v2, t1, t2
        ks = key[order]
        os_ = other[order]
        srcs, dsts = [np.empty(0, np.int64)], [np.empty(0, np.int64)]
        o = 1
        while True:
            if o >= ks.size:
                break
            dk = ks[o:] - ks[:-o]
            cand = dk <= t_key
            if not np.any(cand):
                # sorted keys: offset-o differences only grow, so no later
                # offset can re-enter the window
                break
            idx = np.nonzero(cand)[0]
            do = np.abs(os_[idx + o] - os_[idx])
            keep = do <= t_other
            if np.any(keep):
                srcs.append(order[idx[keep]])
                dsts.append(order[idx[keep] + o])
            o += 1
        src = np.concatenate(srcs)
        dst = np.concatenate(dsts)
        # return both orientations plus the diagonal
        n_cfg = v1.shape[0]
        diag = np.arange(n_cfg, dtype=np.int64)
        return (np.concatenate([src, dst, diag]), np.concatenate([dst, src, diag]))

    def neighbors_of_vertex(self) -> dict:
        """(j, dj) -> (src, dst) arrays, diagonal excluded."""
        out = {}
        for (j, dj), (src, dst) in self.pairs.items():
            if dj == 0:
                sel = src != dst
                out[(j, dj)] = (src[sel], dst[sel])
            else:
                out[(j, dj)] = (src, dst)
        return out


def ball_cardinalities(scan: PairScan) -> np.ndarray:
    """|preimage of the radius-q chart ball| per vertex (self included)."""
    k, n = scan.k, scan.n
    n_cfg = k ** (2 * n + 1)
    counts = np.ones((n + 1) * n_cfg, dtype=np.int64)  # self
    for (j, dj), (src, dst) in scan.neighbors_of_vertex().items():
        np.add.at(counts, j * n_cfg + src, 1)
    return counts


# -- exact lamplighter word distances (vectorized for k = 2) ----------------------


def lamp_word_distance_arrays(k: int, n: int, cfg1, j1, cfg2, j2) -> np.ndarray:
    """|g^{-1} g'| for vertices (cfg, cursor) of F_n; exact closed form."""
    cfg1 = np.asarray(cfg1, dtype=np.int64)
    cfg2 = np.asarray(cfg2, dtype=np.int64)
    j1 = np.asarray(j1, dtype=np.int64)
    j2 = np.asarray(j2, dtype=np.int64)
    width = 2 * n + 1
    if k == 2:
        diff = cfg1 ^ cfg2
        pop = np.bitwise_count(diff.astype(np.uint64)).astype(np.int64)
        hasdiff = diff > 0
        f = diff.astype(np.float64)
        hi = np.where(hasdiff, np.frexp(f)[1] - 1, 0) - n
        lowbit = (diff & -diff).astype(np.float64)
        lo = np.where(hasdiff, np.frexp(lowbit)[1] - 1, 0) - n
    else:
        pop = np.zeros_like(cfg1)
        hi = np.full_like(cfg1, -10 ** 9)
        lo = np.full_like(cfg1, 10 ** 9)
        r1, r2 = cfg1.copy(), cfg2.copy()
        for i in range(width):
            d1, d2 = r1 % k, r2 % k
            ne = d1 != d2
            pop += ne.astype(np.int64)
            hi = np.where(ne, i - n, hi)
            lo = np.where(ne & (lo == 10 ** 9), i - n, lo)
            r1 //= k
            r2 //= k
        hasdiff = pop > 0
        hi = np.where(hasdiff, hi, 0)
        lo = np.where(hasdiff, lo, 0)
    a = np.minimum(np.minimum(j1, j2), np.where(hasdiff, lo, j1))
    b = np.maximum(np.maximum(j1, j2), np.where(hasdiff, hi, j1))
    left_first = (j1 - a) + (b - a) + (b - j2)
    right_first = (b - j1) + (b - a) + (j2 - a)
    return pop + np.minimum(left_first, right_first)


# -- quantitative expansivity bound ------------------------------------------------


@dataclass
class ExpansivityBoundResult:
    m: int
    measured: Fraction
    bound: Fraction
    passed: bool
    counted: int


def lemma_expansivity_bound(k: int, n: int, q: int, m_values: list,
                            scan: Optional[PairScan] = None):
    """Fraction of vertices whose chart-ball preimage has word diameter
    >= 2m + 3q, against the closed-form bound 4 k^(1-m)."""
    if scan is None:
        scan = PairScan(k, n, q)
    n_cfg = k ** (2 * n + 1)
    total = (n + 1) * n_cfg
    diam = _vertex_preimage_diameters(scan)
    out = []
    counted_vertices = {}
    for m in sorted(m_values):
        thresh = 2 * m + 3 * q
        counted = int((diam >= thresh).sum())
        bound = Fraction(4, k ** (m - 1))
        measured = Fraction(counted, total)
        out.append(ExpansivityBoundResult(m, measured, bound, measured <= bound, counted))
        counted_vertices[m] = np.nonzero(diam >= thresh)[0]
    return out, diam, counted_vertices


def _vertex_preimage_diameters(scan: PairScan) -> np.ndarray:
    """Word diameter of the chart-ball preimage around each vertex."""
    k, n = scan.k, scan.n
    n_cfg = k ** (2 * n + 1)
    total = (n + 1) * n_cfg
    members: dict = {}
    for (j, dj), (src, dst) in scan.neighbors_of_vertex().items():
        for s, d in zip(src.tolist(), dst.tolist()):
            members.setdefault(j * n_cfg + s, []).append((j + dj) * n_cfg + d)
    diam = np.zeros(total, dtype=np.int64)
    dist_cache: dict = {}
    for v, nbrs in members.items():
        group = [v] + nbrs
        best = 0
        for i in range(len(group)):
            for jdx in range(i + 1, len(group)):
                a, b = group[i], group[jdx]
                key = (a, b) if a < b else (b, a)
                d = dist_cache.get(key)
                if d is None:
                    c1, u1 = key[0] % n_cfg, key[0] // n_cfg
                    c2, u2 = key[1] % n_cfg, key[1] // n_cfg
                    d = int(lamp_word_distance_arrays(
                        k, n, np.array([c1]), np.array([u1]),
                        np.array([c2]), np.array([u2]))[0])
                    dist_cache[key] = d
                best = max(best, d)
        diam[v] = best
    return diam


# -- digit-pattern oracle -----------------------------------------------------------


@dataclass
class ClaimReport:
    pairs_checked: int
    violations: int
    samples: list


def _digits(cfg: int, k: int, width: int) -> list:
    out = []
    for _ in range(width):
        out.append(cfg % k)
        cfg //= k
    return out


def claim_digit_pattern_ok(k: int, n: int, q: int, c1: int, j: int, c2: int) -> bool:
    """Constant-digit dichotomy on the windows flanking the cursor.

    With l-/l+ the extreme differing positions, on J- = [l-+1, j-q-1] and
    J+ = [j+q+1, l+-1] one configuration must be identically 0 and the other
    identically k-1 (in either assignment), per window.
    """
    width = 2 * n + 1
    d1 = _digits(c1, k, width)
    d2 = _digits(c2, k, width)
    diffs = [i - n for i in range(width) if d1[i] != d2[i]]
    if not diffs:
        return True
    l_minus, l_plus = min(diffs), max(diffs)
    for lo, hi in ((l_minus + 1, j - q - 1), (j + q + 1, l_plus - 1)):
        lo = max(lo, -n)
        hi = min(hi, n)
        if lo > hi:
            continue
        w1 = [d1[p + n] for p in range(lo, hi + 1)]
        w2 = [d2[p + n] for p in range(lo, hi + 1)]
        ok = (all(x == 0 for x in w1) and all(x == k - 1 for x in w2)) or (
            all(x == k - 1 for x in w1) and all(x == 0 for x in w2))
        if not ok:
            return False
    return True


def claim_j_oracle(k: int, n: int, q: int, corrupted: bool = False,
                   max_samples: int = 5) -> ClaimReport:
    """Exhaustive digit-pattern verification over all qualifying pairs."""
    scan = PairScan(k, n, q, corrupted=corrupted)
    pairs_checked = 0
    violations = 0
    samples = []
    for (j, dj), (src, dst) in scan.neighbors_of_vertex().items():
        if abs(dj) > q:
            continue
        for c1, c2 in zip(src.tolist(), dst.tolist()):
            pairs_checked += 1
            if not claim_digit_pattern_ok(k, n, q, c1, j, c2):
                violations += 1
                if len(samples) < max_samples:
                    samples.append((c1, j, c2, j + dj))
    return ClaimReport(pairs_checked, violations, samples)


# -- the 2-Lipschitz certificate -----------------------------------------------------


@dataclass
class LipschitzCertificate:
    edges_checked: int
    max_planar_step: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def lipschitz_certificate(k: int, n: int) -> LipschitzCertificate:
    """Every edge displacement has upper length bound <= 2, checked exactly.

    Lamp edge at cursor j: displacement ((d'-d), (d'-d), 0), |d'-d| <= k-1,
    and (1 + |d'-d|)^2 <= k^2 decides 2 log_k(1+z) <= 2.  Cursor edges give
    (0, 0, +-1) with bound exactly 2.  Vertices are enumerated arithmetically
    so the check covers every edge without materializing the graph.
    """
    width = 2 * n + 1
    n_cfg = k ** width
    configs = np.arange(n_cfg, dtype=np.int64)
    edges = 0
    max_step = 0
    violations = 0
    for j in range(0, n + 1):
        digit = (configs // k ** (j + n)) % k
        for c in range(1, k):
            delta = np.abs((digit + c) % k - digit)
            max_step = max(max_step, int(delta.max()))
            violations += int(((1 + delta) ** 2 > k * k).sum())
            edges += n_cfg
    # cursor edges: displacement (0,0,+-1); upper bound = 2 exactly
    edges += 2 * n * n_cfg
    return LipschitzCertificate(edges, max_step, violations)


def decay_tail_slope(points: dict) -> Optional[float]:
    """Log-linear slope of the strictly decaying tail of r -> fraction.

    The head of the curve is flat (every carry pair already exceeds small
    thresholds); the geometric decay starts past an offset constant, so the
    fit drops leading values equal to the maximum and trailing values equal
    to the minimum.  None when fewer than two points remain.
    """
    import math

    items = sorted((r, f) for r, f in points.items() if f > 0)
    if len(items) < 2:
        return None
    vals = [f for _, f in items]
    head, tail = max(vals), min(vals)
    # keep the transition window: last flat-max point through first flat-min
    first_drop = next((i for i, (_, f) in enumerate(items) if f < head), None)
    if first_drop is None:
        return None
    last_needed = next((i for i, (_, f) in enumerate(items) if f == tail), len(items) - 1)
    window = items[max(first_drop - 1, 0):last_needed + 1]
    if len(window) < 2:
        return None
    xs = [r for r, _ in window]
    ys = [math.log(float(f)) for _, f in window]
    n_pts = len(xs)
    xbar = sum(xs) / n_pts
    ybar = sum(ys) / n_pts
    num = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    den = sum((x - xbar) ** 2 for x in xs)
    return num / den if den else None


def good_fraction_closed_form(k: int, n: int) -> Fraction:
    """|good-at-1| / |F_n| from the cursor-interval count."""
    if n < 1:
        raise ValueError("n >= 1")
    return Fraction(max(n - 1, 0), n + 1)
