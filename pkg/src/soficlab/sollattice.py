"""Folner graphs of SOL lattices: box slices of Gamma_t, thickening, enlargement.

Vertices are lattice elements (m, j) realized in SOL_R at planar coordinates
t*M^-1*m and height j*rho.  Three membership modes:

  * C = 0: the exact box {(a,b) in [0,K]^2, 0 <= s <= n}, K = k^(n+1);
  * sandwich: the box thickened by B(e, C) approximated через the word-length
    sandwich (recorded bound side: "upper" uses the upper-length inversion,
    margins k^n*(k^ceil(C/2)-1) and heights +-C/2);
  * tile: every lattice element whose tile gamma*D_t meets the box (exact
    corner extents; contains the full digit-map coupling image).

The optional right enlargement by B_Gamma(e, L) restores density in the
intrinsic metric and makes every pre-enlargement vertex good at radius L.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from .folner import FolnerGraph, SizeCapExceeded
from .groups import SolLatticeElement, SolLatticeGroup
from .quadratic import QuadraticNumber
from .tiling import EigenData


class SolLatticeFolnerGraph(FolnerGraph):
    """Vertices as (m1, m2, j) arrays in canonical (j, m1, m2) order."""

    def __init__(self, eig: EigenData, t: Fraction, n: int, m1, m2, j, meta=None):
        group = SolLatticeGroup(eig.A)
        super().__init__(group, n, [lab for lab, _ in group.generators], meta)
        self.eig = eig
        self.t = Fraction(t)
        order = np.lexsort((m2, m1, j))
        self.m1 = np.asarray(m1, dtype=np.int64)[order]
        self.m2 = np.asarray(m2, dtype=np.int64)[order]
        self.j = np.asarray(j, dtype=np.int64)[order]
        self._keys, self._packer = _pack_keys(self.m1, self.m2, self.j)
        if np.any(np.diff(self._keys) == 0):
            raise ValueError("duplicate lattice vertices")
        self._build_edges()

    @property
    def num_vertices(self) -> int:
        return self.m1.shape[0]

    def decode(self, v: int) -> SolLatticeElement:
        return SolLatticeElement((int(self.m1[v]), int(self.m2[v])), int(self.j[v]))

    def encode(self, g: SolLatticeElement) -> int:
        return int(self.lookup(np.array([g.vec[0]]), np.array([g.vec[1]]),
                               np.array([g.shift]))[0])

    def lookup(self, m1, m2, j) -> np.ndarray:
        """Vectorized vertex lookup; -1 where absent."""
        keys = self._packer(np.asarray(m1, np.int64), np.asarray(m2, np.int64),
                            np.asarray(j, np.int64))
        pos = np.searchsorted(self._keys, keys)
        pos_c = np.clip(pos, 0, self._keys.size - 1)
        ok = (self._keys[pos_c] == keys) & (keys >= 0)
        return np.where(ok, pos_c, -1)

    def _build_edges(self):
        group: SolLatticeGroup = self.group
        N = self.num_vertices
        j_vals = np.unique(self.j)
        slices = {int(jv): np.nonzero(self.j == jv)[0] for jv in j_vals}
        for label, gen in group.generators:
            tgt = np.full(N, -1, dtype=np.int64)
            for jv, idx in slices.items():
                if gen.shift == 0:
                    Aj = group.matrix_power(jv)
                    dv = (Aj[0][0] * gen.vec[0] + Aj[0][1] * gen.vec[1],
                          Aj[1][0] * gen.vec[0] + Aj[1][1] * gen.vec[1])
                    tgt[idx] = self.lookup(self.m1[idx] + dv[0],
                                           self.m2[idx] + dv[1],
                                           self.j[idx])
                else:
                    tgt[idx] = self.lookup(self.m1[idx], self.m2[idx],
                                           self.j[idx] + gen.shift)
            self.edges[label] = tgt


def _pack_keys(m1, m2, j):
    lo1, hi1 = int(m1.min()), int(m1.max())
    lo2, hi2 = int(m2.min()), int(m2.max())
    loj, hij = int(j.min()), int(j.max())
    s2 = hi2 - lo2 + 2
    s1 = hi1 - lo1 + 2
    if (hij - loj + 2) * s1 * s2 >= 2 ** 62:
        raise SizeCapExceeded("lattice coordinate ranges overflow packing")

    def pack(a1, a2, aj):
        out = ((aj - loj) * s1 + (a1 - lo1)) * s2 + (a2 - lo2)
        bad = (a1 < lo1) | (a1 > hi1) | (a2 < lo2) | (a2 > hi2) | (aj < loj) | (aj > hij)
        return np.where(bad, -1, out)

    keys = pack(m1, m2, j)
    return keys, pack


def _qn(x, d: int) -> QuadraticNumber:
    if isinstance(x, QuadraticNumber):
        return x
    return QuadraticNumber.rational(Fraction(x), d)


def _enumerate_slice(eig: EigenData, t: Fraction, j: int, a_bounds, b_bounds):
    """Integer (m1, m2) with planar coords in [a_lo,a_hi] x [b_lo,b_hi]."""
    d = eig.d
    a_lo, a_hi = (_qn(x, d) for x in a_bounds)
    b_lo, b_hi = (_qn(x, d) for x in b_bounds)
    y_p = eig.v_plus[1]
    y_m = eig.v_minus[1]
    slope = (y_p - y_m) / t
    m1_lo = -((-(a_lo + b_lo) * (Fraction(1) / t)).floor())  # ceil
    m1_hi = ((a_hi + b_hi) * (Fraction(1) / t)).floor()
    rows_m1, rows_start, rows_stop = [], [], []
    for m1 in range(m1_lo, m1_hi + 1):
        tm1 = Fraction(m1) * t
        # a-interval: [max(a_lo, t*m1 - b_hi), min(a_hi, t*m1 - b_lo)]
        cand_lo = a_lo
        other_lo = _qn(tm1, d) - b_hi
        if (other_lo - cand_lo).sign() > 0:
            cand_lo = other_lo
        cand_hi = a_hi
        other_hi = _qn(tm1, d) - b_lo
        if (other_hi - cand_hi).sign() < 0:
            cand_hi = other_hi
        if (cand_hi - cand_lo).sign() < 0:
            continue
        # m2(a) = m1*y_m + a*(y_p - y_m)/t, monotone in a
        e1 = y_m * m1 + cand_lo * slope
        e2 = y_m * m1 + cand_hi * slope
        if (e2 - e1).sign() < 0:
            e1, e2 = e2, e1
        m2_lo = -((-e1).floor())  # ceil
        m2_hi = e2.floor()
        if m2_hi < m2_lo:
            continue
        rows_m1.append(m1)
        rows_start.append(m2_lo)
        rows_stop.append(m2_hi)
    if not rows_m1:
        return (np.empty(0, np.int64),) * 3
    counts = np.array(rows_stop, np.int64) - np.array(rows_start, np.int64) + 1
    m1_arr = np.repeat(np.array(rows_m1, np.int64), counts)
    m2_arr = np.concatenate([np.arange(s, e + 1, dtype=np.int64)
                             for s, e in zip(rows_start, rows_stop)])
    j_arr = np.full(m1_arr.shape, j, dtype=np.int64)
    return m1_arr, m2_arr, j_arr


def folner_sol_lattice(
    eig: EigenData,
    t: Fraction,
    n: int,
    C: Fraction = Fraction(0),
    L: int = 0,
    mode: str = "sandwich",
    cap: int = 10 ** 7,
) -> SolLatticeFolnerGraph:
    """Lattice slice of the thickened Folner box, plus B_Gamma(e, L) enlargement."""
    t = Fraction(t)
    C = Fraction(C)
    if C < 0 or t <= 0 or n < 0:
        raise ValueError("need C >= 0, t > 0, n >= 0")
    k = eig.k
    K = Fraction(k) ** (n + 1)
    parts = []
    meta = {
        "family": "sol-lattice",
        "mode": mode,
        "t": str(t),
        "n": n,
        "C": str(C),
        "L": L,
        "k_below_lambda_warning": eig.k_below_lambda,
    }
    if mode == "sandwich":
        meta["bound_side"] = "upper"
        if C == 0:
            E = Fraction(0)
            s_lo, s_hi = Fraction(0), Fraction(n)
        else:
            half = -((-C.numerator) // (2 * C.denominator))  # ceil(C/2)
            E = Fraction(k) ** n * (Fraction(k) ** half - 1)
            s_lo, s_hi = -C / 2, Fraction(n) + C / 2
        j_lo = -eig.log_ratio.floor_quotient(-s_lo) if s_lo < 0 else 0
        j_hi = eig.log_ratio.floor_quotient(s_hi)
        for j in range(j_lo, j_hi + 1):
            parts.append(_enumerate_slice(eig, t, j, (-E, K + E), (-E, K + E)))
    elif mode == "tile":
        if eig.det != 1:
            raise ValueError("tile mode requires det(A) = 1")
        (a_lo_e, a_hi_e), (b_lo_e, b_hi_e) = eig.planar_extents(t)
        j_hi = eig.log_ratio.floor_quotient(Fraction(n))
        for j in range(0, j_hi + 1):
            lam_j = eig.lam_power(j)
            lam_mj = eig.lam_power(-j)
            a_bounds = (_qn(0, eig.d) - lam_j * a_hi_e, _qn(K, eig.d) - lam_j * a_lo_e)
            b_bounds = (_qn(0, eig.d) - lam_mj * b_hi_e, _qn(K, eig.d) - lam_mj * b_lo_e)
            parts.append(_enumerate_slice(eig, t, j, a_bounds, b_bounds))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    m1 = np.concatenate([p[0] for p in parts]) if parts else np.empty(0, np.int64)
    m2 = np.concatenate([p[1] for p in parts]) if parts else np.empty(0, np.int64)
    jj = np.concatenate([p[2] for p in parts]) if parts else np.empty(0, np.int64)
    if m1.size > cap:
        raise SizeCapExceeded(f"{m1.size} lattice vertices exceed cap {cap}")
    meta["core_count"] = int(m1.size)
    core = (m1.copy(), m2.copy(), jj.copy())

    if L > 0 and m1.size:
        m1, m2, jj = _enlarge(eig, m1, m2, jj, L, cap)
    meta["count"] = int(m1.size)
    graph = SolLatticeFolnerGraph(eig, t, n, m1, m2, jj, meta)
    if L > 0:
        idx = graph.lookup(*core)
        mask = np.zeros(graph.num_vertices, dtype=bool)
        mask[idx[idx >= 0]] = True
        graph.meta["core_mask"] = mask
    else:
        graph.meta["core_mask"] = np.ones(graph.num_vertices, dtype=bool)
    return graph


def _enlarge(eig: EigenData, m1, m2, jj, L: int, cap: int):
    group = SolLatticeGroup(eig.A)
    cur = np.stack([m1, m2, jj], axis=1)
    all_rows = cur
    frontier = cur
    for _ in range(L):
        cands = []
        for _, gen in group.generators:
            nm1, nm2, nj = _apply_gen(group, frontier, gen)
            cands.append(np.stack([nm1, nm2, nj], axis=1))
        cand = np.unique(np.concatenate(cands, axis=0), axis=0)
        in_all = _rows_member(cand, all_rows)
        new = cand[~in_all]
        if new.size == 0:
            break
        all_rows = np.unique(np.concatenate([all_rows, new], axis=0), axis=0)
        if all_rows.shape[0] > cap:
            raise SizeCapExceeded("enlargement exceeds cap")
        frontier = new
    return all_rows[:, 0], all_rows[:, 1], all_rows[:, 2]


def _apply_gen(group: SolLatticeGroup, rows, gen):
    m1, m2, jj = rows[:, 0], rows[:, 1], rows[:, 2]
    if gen.shift == 0:
        out1 = np.empty_like(m1)
        out2 = np.empty_like(m2)
        for jv in np.unique(jj):
            Aj = group.matrix_power(int(jv))
            dv1 = Aj[0][0] * gen.vec[0] + Aj[0][1] * gen.vec[1]
            dv2 = Aj[1][0] * gen.vec[0] + Aj[1][1] * gen.vec[1]
            sel = jj == jv
            out1[sel] = m1[sel] + dv1
            out2[sel] = m2[sel] + dv2
        return out1, out2, jj.copy()
    return m1.copy(), m2.copy(), jj + gen.shift


def _rows_member(rows, table):
    """Boolean mask: which rows (2D int array) appear in table."""
    if table.shape[0] == 0 or rows.shape[0] == 0:
        return np.zeros(rows.shape[0], dtype=bool)
    lo = np.minimum(rows.min(axis=0), table.min(axis=0))
    span = np.maximum(rows.max(axis=0), table.max(axis=0)) - lo + 1
    if int(span[0]) * int(span[1]) * int(span[2]) >= 2 ** 62:
        # fallback: structured merge
        tview = {tuple(r) for r in table.tolist()}
        return np.array([tuple(r) in tview for r in rows.tolist()], dtype=bool)

    def pack(arr):
        return ((arr[:, 0] - lo[0]) * span[1] + (arr[:, 1] - lo[1])) * span[2] + (
            arr[:, 2] - lo[2]
        )

    tkeys = np.sort(pack(table))
    rkeys = pack(rows)
    pos = np.clip(np.searchsorted(tkeys, rkeys), 0, tkeys.size - 1)
    return tkeys[pos] == rkeys
