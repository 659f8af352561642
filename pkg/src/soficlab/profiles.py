"""Statistical coarse-geometry profiles and integrability machinery.

Profiles are integer-binned histograms with exact accounting:
bins + overflow + excluded == denominator.  The overflow bin holds
cap-exceeded measurements (it forces unbounded integrability sums to
infinity); the excluded mass counts vertices dropped by goodness gates (the
boundary sets on which intrinsic and word distances are not identified), and
never enters a sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cocycle import TargetLengths, TransferContext
from .coupling import CouplingMap, image_distances
from .folner import FolnerGraph
from .groups import Exceeds, LamplighterGroup


@dataclass
class Profile:
    bins: dict
    denominator: int
    overflow: int = 0
    excluded: int = 0
    meta: dict = field(default_factory=dict)

    def add(self, r: int, count: int = 1) -> None:
        self.bins[r] = self.bins.get(r, 0) + count

    def binned_total(self) -> int:
        return sum(self.bins.values())

    def check_accounting(self) -> bool:
        return self.binned_total() + self.overflow + self.excluded == self.denominator

    def mass(self, r: int) -> Fraction:
        return Fraction(self.bins.get(r, 0), self.denominator)

    def tail_count(self, r: int) -> int:
        return sum(c for b, c in self.bins.items() if b >= r) + self.overflow

    def tail_mass(self, r: int) -> Fraction:
        return Fraction(self.tail_count(r), self.denominator)

    def max_bin(self) -> int:
        return max(self.bins) if self.bins else 0

    def merge(self, other: "Profile") -> "Profile":
        if other.denominator != self.denominator or other.meta != self.meta:
            raise ValueError("profiles to merge must share denominator and metadata")
        out = Profile(dict(self.bins), self.denominator, self.overflow + other.overflow,
                      self.excluded + other.excluded, dict(self.meta))
        for r, c in other.bins.items():
            out.add(r, c)
        return out

    @staticmethod
    def accumulate(parts: list) -> "Profile":
        """Commutative monoid merge of partial profiles over a vertex partition."""
        if not parts:
            raise ValueError("nothing to merge")
        out = parts[0]
        for p in parts[1:]:
            out = out.merge(p)
        return out


@dataclass(frozen=True)
class WeightFn:
    """phi(delta * r): power, exponential, or the L-infinity threshold weight."""

    kind: str  # "power" | "exp" | "linf"
    delta: Fraction
    power: Fraction = Fraction(1)
    threshold: Fraction = Fraction(1)

    def value(self, r: int) -> float:
        x = float(self.delta) * r
        if self.kind == "power":
            return x ** float(self.power)
        if self.kind == "exp":
            return math.exp(x)
        if self.kind == "linf":
            return 0.0 if x < float(self.threshold) else math.inf
        raise ValueError(self.kind)

    @property
    def unbounded(self) -> bool:
        if self.kind == "power":
            return self.power > 0
        return True


def integrability_sum(profile: Profile, weight: WeightFn) -> float:
    """sum_r phi(delta r) * bins[r] / denominator; inf on escaping mass."""
    if profile.overflow > 0 and weight.unbounded:
        return math.inf
    total = 0.0
    for r, c in sorted(profile.bins.items()):
        w = weight.value(r)
        if math.isinf(w) and c > 0:
            return math.inf
        total += w * c / profile.denominator
    return total


# -- profile estimators ---------------------------------------------------------


def _pair_word_distance(domain: FolnerGraph, x1: int, x2: int) -> int:
    group = domain.group
    if isinstance(group, LamplighterGroup):
        return group.word_distance(domain.decode(x1), domain.decode(x2))
    tl = TargetLengths(group)
    g = group.mul(group.inv(domain.decode(x1)), domain.decode(x2))
    out = tl.length(g)
    if isinstance(out, Exceeds):
        raise ValueError("domain word distance beyond table radius")
    return out


def lipschitz_profile(ctx: TransferContext, probe, cap: int = 10 ** 4,
                      vertices: Optional[np.ndarray] = None) -> Profile:
    """Histogram of d(u(x), u(x*probe)) over x good at |probe|.

    ``vertices`` restricts the estimator to a subset (Monte-Carlo sampling at
    scales beyond enumeration caps); the denominator follows the subset.
    """
    M = ctx.M
    dom = M.domain
    lp = ctx.dom_lengths.length(probe)
    word = dom.group.geodesic_word(probe, lp)
    xg = dom.almost_action_all(word)
    good = dom.good_mask(lp)
    if vertices is None:
        pool = np.nonzero(good)[0]
        denominator = dom.num_vertices
        skipped_bad = int(dom.num_vertices - good.sum())
    else:
        vertices = np.asarray(vertices, dtype=np.int64)
        pool = vertices[good[vertices]]
        denominator = int(vertices.size)
        skipped_bad = int(vertices.size - pool.size)
    prof = Profile({}, denominator,
                   meta={"probe": str(probe), "good_radius": lp, "kind": "lipschitz",
                         "bound_side": "word-on-good",
                         "sampled": vertices is not None})
    length_cache: dict = {}
    for x in pool:
        x = int(x)
        tgt = int(xg[x])
        if tgt < 0:
            prof.excluded += 1
            continue
        pair = (int(M.values[x]), int(M.values[tgt]))
        r = length_cache.get(pair)
        if r is None:
            h = ctx.division(*pair)
            r = ctx.lengths.length(h)
            length_cache[pair] = r
        if isinstance(r, Exceeds):
            prof.overflow += 1
            continue
        if M.graph_codomain and not ctx.target_good(pair[0], r):
            prof.excluded += 1
            continue
        if r > cap:
            prof.overflow += 1
        else:
            prof.add(r)
    prof.excluded += skipped_bad
    assert prof.check_accounting()
    return prof


def expansivity_profile(ctx: TransferContext, h, cap: int = 10 ** 4) -> Profile:
    """Histogram of diam(u^-1(y) u u^-1(yh)) over image vertices y.

    Graph codomain: yh is reached by a labeled walk from y (gated by goodness
    of y at |h|); diameters are word-metric diameters gated so they equal
    intrinsic ones; denominator is the full target vertex count.
    """
    M = ctx.M
    if not M.graph_codomain:
        raise ValueError("expansivity profile needs a graph codomain")
    tgt_graph = M.target_graph
    dom = M.domain
    lh = ctx.lengths.length(h)
    if isinstance(lh, Exceeds):
        raise ValueError("probe length beyond table radius")
    word = M.target_group.geodesic_word(h, lh)
    walk = tgt_graph.almost_action_all(word)
    fibers = M.fibers()
    image_keys = sorted(fibers)
    prof = Profile({}, tgt_graph.num_vertices,
                   meta={"probe": str(h), "probe_length": lh, "kind": "expansivity",
                         "bound_side": "word-on-good"})
    ext = tgt_graph.distance_to_exterior()
    dom_ext = dom.distance_to_exterior()
    structural = 0
    for y in image_keys:
        if ext[y] <= lh:
            prof.excluded += 1
            continue
        yh = int(walk[y])
        if yh < 0 or yh not in fibers:
            structural += 1
            continue
        S = fibers[y] + fibers[yh]
        diam = 0
        gated = True
        for i in range(len(S)):
            for jdx in range(i + 1, len(S)):
                dw = _pair_word_distance(dom, S[i], S[jdx])
                if not (dom_ext[S[i]] > dw or dom_ext[S[jdx]] > dw):
                    gated = False
                    break
                diam = max(diam, dw)
            if not gated:
                break
        if not gated:
            prof.excluded += 1
        elif diam > cap:
            prof.overflow += 1
        else:
            prof.add(diam)
    non_image = tgt_graph.num_vertices - len(image_keys)
    prof.excluded += non_image + structural
    prof.meta["non_image"] = non_image
    prof.meta["yh_outside_image"] = structural
    assert prof.check_accounting()
    return prof


def coarse_profile(M: CouplingMap, kind: str, cap: int = 10 ** 4) -> Profile:
    """kind='injectivity': fiber diameters over domain vertices;
    kind='surjectivity': distance-to-image over target vertices."""
    dom = M.domain
    if kind == "injectivity":
        prof = Profile({}, dom.num_vertices, meta={"kind": "coarse-injectivity"})
        ext = dom.distance_to_exterior()
        _, inverse, counts = np.unique(M.values, return_inverse=True, return_counts=True)
        singleton = counts[inverse] == 1
        if int(singleton.sum()):
            prof.add(0, int(singleton.sum()))
        fibers = None
        for x in np.nonzero(~singleton)[0]:
            x = int(x)
            if fibers is None:
                fibers = M.fibers()
            S = fibers[int(M.values[x])]
            diam, gated = 0, True
            for a in S:
                for b in S:
                    if a < b:
                        dw = _pair_word_distance(dom, a, b)
                        if not (ext[a] > dw or ext[b] > dw):
                            gated = False
                            break
                        diam = max(diam, dw)
                if not gated:
                    break
            if not gated:
                prof.excluded += 1
            elif diam > cap:
                prof.overflow += 1
            else:
                prof.add(diam)
        assert prof.check_accounting()
        return prof
    if kind == "surjectivity":
        if not M.graph_codomain:
            raise ValueError("surjectivity profile needs a graph codomain")
        dist = image_distances(M)
        prof = Profile({}, M.target_graph.num_vertices, meta={"kind": "coarse-surjectivity"})
        vals, counts = np.unique(dist, return_counts=True)
        for v, c in zip(vals, counts):
            if int(v) > cap:
                prof.overflow += int(c)
            else:
                prof.add(int(v), int(c))
        assert prof.check_accounting()
        return prof
    raise ValueError(kind)


def almost_action_from(graph: FolnerGraph, starts: np.ndarray, word) -> np.ndarray:
    cur = np.asarray(starts, dtype=np.int64).copy()
    for label in word:
        valid = cur >= 0
        nxt = np.full_like(cur, -1)
        nxt[valid] = graph.edges[label][cur[valid]]
        cur = nxt
    return cur


class ExpansivityBatch:
    """Shared tables for expansivity profiles over many probes (one coupling)."""

    def __init__(self, ctx: TransferContext):
        self.ctx = ctx
        M = ctx.M
        if not M.graph_codomain:
            raise ValueError("expansivity profiles need a graph codomain")
        self.M = M
        self.dom = M.domain
        self.tgt = M.target_graph
        order = np.argsort(M.values, kind="stable")
        vals = M.values[order]
        boundaries = np.nonzero(np.diff(vals))[0] + 1
        self.fiber_starts = np.concatenate([[0], boundaries, [vals.size]])
        self.fiber_keys = vals[self.fiber_starts[:-1]]
        self.fiber_members = order
        self.image_mask = np.zeros(self.tgt.num_vertices, dtype=bool)
        self.image_mask[self.fiber_keys] = True
        self.fiber_index = np.full(self.tgt.num_vertices, -1, dtype=np.int64)
        self.fiber_index[self.fiber_keys] = np.arange(self.fiber_keys.size)
        self.tgt_ext = self.tgt.distance_to_exterior()
        self.dom_ext = self.dom.distance_to_exterior()
        from .folner import LamplighterFolnerGraph

        self.fast_lamp = isinstance(self.dom, LamplighterFolnerGraph)

    def fiber(self, key: int) -> np.ndarray:
        fi = int(self.fiber_index[key])
        return self.fiber_members[self.fiber_starts[fi]:self.fiber_starts[fi + 1]]

    def profile(self, h, cap: int = 10 ** 4) -> Profile:
        ctx, M = self.ctx, self.M
        lh = ctx.lengths.length(h)
        if isinstance(lh, Exceeds):
            raise ValueError("probe length beyond table radius")
        word = M.target_group.geodesic_word(h, max(lh, 1)) if lh else []
        ys = self.fiber_keys
        yh = almost_action_from(self.tgt, ys, word)
        good = self.tgt_ext[ys] > lh
        valid = good & (yh >= 0)
        valid[valid.nonzero()[0]] &= self.image_mask[yh[valid]]
        prof = Profile({}, self.tgt.num_vertices,
                       meta={"probe": str(h), "probe_length": int(lh),
                             "kind": "expansivity", "bound_side": "word-on-good"})
        # singleton-singleton fast path
        sizes = np.diff(self.fiber_starts)
        fi_y = self.fiber_index[ys]
        singleton_y = sizes[fi_y] == 1
        fi_yh = np.full(ys.size, -1, dtype=np.int64)
        fi_yh[valid] = self.fiber_index[yh[valid]]
        singleton_yh = np.zeros(ys.size, dtype=bool)
        singleton_yh[valid] = sizes[fi_yh[valid]] == 1
        fast = valid & singleton_y & singleton_yh
        if self.fast_lamp and np.any(fast):
            x1 = self.fiber_members[self.fiber_starts[fi_y[fast]]]
            x2 = self.fiber_members[self.fiber_starts[fi_yh[fast]]]
            from .pairscan import lamp_word_distance_arrays

            W = self.dom.n_configs
            dw = lamp_word_distance_arrays(self.dom.k, self.dom.n,
                                           x1 % W, x1 // W, x2 % W, x2 // W)
            gate = (self.dom_ext[x1] > dw) | (self.dom_ext[x2] > dw)
            for r, c in zip(*np.unique(dw[gate], return_counts=True)):
                if int(r) > cap:
                    prof.overflow += int(c)
                else:
                    prof.add(int(r), int(c))
            prof.excluded += int((~gate).sum())
            rest = valid & ~fast
        else:
            rest = valid
        for pos in np.nonzero(rest)[0]:
            y = int(ys[pos])
            S = np.concatenate([self.fiber(y), self.fiber(int(yh[pos]))])
            diam, gated = 0, True
            for i in range(S.size):
                for jdx in range(i + 1, S.size):
                    dwp = _pair_word_distance(self.dom, int(S[i]), int(S[jdx]))
                    if not (self.dom_ext[S[i]] > dwp or self.dom_ext[S[jdx]] > dwp):
                        gated = False
                        break
                    diam = max(diam, dwp)
                if not gated:
                    break
            if not gated:
                prof.excluded += 1
            elif diam > cap:
                prof.overflow += 1
            else:
                prof.add(diam)
        prof.excluded += int((~valid).sum())
        prof.excluded += self.tgt.num_vertices - ys.size
        prof.meta["non_image"] = int(self.tgt.num_vertices - ys.size)
        assert prof.check_accounting()
        return prof


# -- strong exponential fit -------------------------------------------------------


@dataclass
class StrongExpFit:
    delta: Optional[Fraction]
    c_prime: Optional[float]
    c_triple: float
    passed: bool
    sums: dict


def strong_exp_fit(profiles: dict, epsilon: float,
                   delta_grid: Optional[list] = None) -> StrongExpFit:
    """Largest grid delta with finite exp-sums; fits sum(h) <= C''' e^(eps |h|).

    profiles: {h: (|h|, Profile)}.  C' is the fitted exponential slope of the
    sums in |h|, normalized by delta; pass means a
    positive delta achieved finite sums for every probe, with the C''' bound.
    """
    if delta_grid is None:
        delta_grid = [Fraction(1, 2 ** j) for j in range(0, 11)]
    for delta in sorted(delta_grid, reverse=True):
        weight = WeightFn("exp", Fraction(delta))
        sums = {}
        finite = True
        for h, (lh, prof) in profiles.items():
            s = integrability_sum(prof, weight)
            sums[h] = s
            if math.isinf(s):
                finite = False
                break
        if not finite:
            continue
        c_triple = max((sums[h] * math.exp(-epsilon * lh)
                        for h, (lh, _) in profiles.items()), default=0.0)
        pts = [(lh, math.log(sums[h])) for h, (lh, _) in profiles.items()
               if sums[h] > 0]
        if len(pts) >= 2 and len({p[0] for p in pts}) >= 2:
            xs = np.array([p[0] for p in pts], dtype=float)
            ys = np.array([p[1] for p in pts], dtype=float)
            slope = float(np.polyfit(xs, ys, 1)[0])
        else:
            slope = 0.0
        return StrongExpFit(delta=Fraction(delta), c_prime=slope / float(delta),
                            c_triple=c_triple, passed=True, sums=sums)
    return StrongExpFit(delta=None, c_prime=None, c_triple=math.inf, passed=False, sums={})


# -- covolume, fundamental-domain masses, coboundedness ----------------------------


def covolume_ratio(target: FolnerGraph, domain: FolnerGraph) -> Fraction:
    return Fraction(target.num_vertices, domain.num_vertices)


def enumerate_target(group, radius: int, cap: int = 10 ** 7) -> list:
    """h_0 = e, h_1, ... ordered by non-decreasing length, canonical within length."""
    ball = group.ball(radius, cap)
    return sorted(ball, key=lambda g: (ball[g], group.sort_key(g)))


def domain_ball_members(domain: FolnerGraph, r: int):
    """For each vertex, the list of vertices within graph distance r."""
    N = domain.num_vertices
    members = [{x} for x in range(N)]
    frontier = [{x} for x in range(N)]
    for _ in range(r):
        new_frontier = []
        for x in range(N):
            nxt = set()
            for v in frontier[x]:
                for _, w in domain.neighbors(v):
                    if w not in members[x]:
                        nxt.add(w)
            members[x] |= nxt
            new_frontier.append(nxt)
        frontier = new_frontier
    return [sorted(m) for m in members]


def fd_mass_single(M: CouplingMap, i: int, r: int, enum: list) -> Fraction:
    """Reference implementation of the i-th fundamental-domain mass."""
    dom = M.domain
    tgt = M.target_group
    balls = domain_ball_members(dom, r)
    count = 0
    for x in range(dom.num_vertices):
        if M.rho[x] != 0:
            continue
        z = M.value_element(x)
        u_ball = {M.value_element(v) for v in balls[x]}
        hi_inv = tgt.inv(enum[i])
        ok = True
        for jdx in range(i):
            cand = tgt.mul(tgt.mul(z, hi_inv), enum[jdx])
            if cand in u_ball:
                ok = False
                break
        if ok:
            count += 1
    return Fraction(count, dom.num_vertices)


def fd_mass_table(M: CouplingMap, r: int, enum: list) -> dict:
    """All fd masses at once: counted(i, x) iff the first enumerated translate
    of z*h_i^-1 hitting u(B(x,r)) is z itself."""
    from .groups import SolLatticeGroup

    dom = M.domain
    tgt = M.target_group
    balls = domain_ball_members(dom, r)
    counts = np.zeros(len(enum), dtype=np.int64)
    if isinstance(tgt, SolLatticeGroup) and M.graph_codomain:
        _fd_mass_sol(M, balls, enum, counts)
    else:
        for x in range(dom.num_vertices):
            if M.rho[x] != 0:
                continue
            z = M.value_element(x)
            u_ball = set()
            for v in balls[x]:
                u_ball.add(M.value_element(v))
            first_hit: dict = {}
            for jdx, hj in enumerate(enum):
                for uval in u_ball:
                    y = tgt.mul(uval, tgt.inv(hj))
                    if y not in first_hit:
                        first_hit[y] = jdx
            for idx, hi in enumerate(enum):
                y = tgt.mul(z, tgt.inv(hi))
                if first_hit.get(y) == idx:
                    counts[idx] += 1
    total = dom.num_vertices
    return {i: Fraction(int(c), total) for i, c in enumerate(counts)}


def _fd_mass_sol(M: CouplingMap, balls, enum, counts):
    tgt_graph = M.target_graph
    group = M.target_group
    n_enum = len(enum)
    inv_elems = [group.inv(h) for h in enum]
    im1 = np.array([g.vec[0] for g in inv_elems], dtype=np.int64)
    im2 = np.array([g.vec[1] for g in inv_elems], dtype=np.int64)
    ij = np.array([g.shift for g in inv_elems], dtype=np.int64)
    trans_cache: dict = {}

    def transformed(ju: int):
        if ju not in trans_cache:
            P = group.matrix_power(ju)
            trans_cache[ju] = (P[0][0] * im1 + P[0][1] * im2,
                               P[1][0] * im1 + P[1][1] * im2)
        return trans_cache[ju]

    vm1, vm2, vj = tgt_graph.m1, tgt_graph.m2, tgt_graph.j
    values = M.values
    rho = M.rho
    jixs = np.arange(n_enum, dtype=np.int64)
    for x in range(M.domain.num_vertices):
        if rho[x] != 0:
            continue
        ball_keys = values[np.array(balls[x], dtype=np.int64)]
        ball_keys = np.unique(ball_keys)
        zkey = int(values[x])
        all1, all2, allj, allidx = [], [], [], []
        z_row = None
        for uk in ball_keys:
            uk = int(uk)
            ju = int(vj[uk])
            T1, T2 = transformed(ju)
            y1 = vm1[uk] + T1
            y2 = vm2[uk] + T2
            yj = ju + ij
            all1.append(y1)
            all2.append(y2)
            allj.append(yj)
            allidx.append(jixs)
            if uk == zkey:
                z_row = (y1, y2, yj)
        a1 = np.concatenate(all1)
        a2 = np.concatenate(all2)
        aj = np.concatenate(allj)
        ai = np.concatenate(allidx)
        lo1, lo2, loj = a1.min(), a2.min(), aj.min()
        s2 = a2.max() - lo2 + 1
        sj = aj.max() - loj + 1
        keys = ((a1 - lo1) * s2 + (a2 - lo2)) * sj + (aj - loj)
        order = np.lexsort((ai, keys))
        ks, vs = keys[order], ai[order]
        first = np.ones(ks.shape[0], dtype=bool)
        first[1:] = ks[1:] != ks[:-1]
        minj_keys = ks[first]
        minj_vals = vs[first]
        zk = ((z_row[0] - lo1) * s2 + (z_row[1] - lo2)) * sj + (z_row[2] - loj)
        pos = np.clip(np.searchsorted(minj_keys, zk), 0, minj_keys.size - 1)
        hit = minj_keys[pos] == zk
        counted = hit & (minj_vals[pos] == jixs)
        counts += counted.astype(np.int64)


def fd_mass_image_table(M: CouplingMap, enum: list) -> tuple[dict, Fraction]:
    """Per-index fundamental-domain masses in the image limit, windowed.

    The finite-r condition "u(x) h_i^{-1} h_j not attained on B(x,r)" is taken
    at its r -> infinity reading (attained anywhere on the image), and counted
    translates are restricted to the target window; then the counted pairs
    partition the enumeration-reachable part of the target and the total mass
    converges monotonically to #target/#domain (the covolume computation's own
    bijection: y is counted at i = min{j: y h_j in Im}, x = rank-0 preimage of
    y h_i).
    """
    if not M.graph_codomain:
        return _fd_mass_image_generic(M, enum)
    from .groups import SolLatticeGroup

    H = M.target_graph
    G = M.target_group
    total = M.domain.num_vertices
    if not isinstance(G, SolLatticeGroup):
        return _fd_mass_image_generic(M, enum)
    img_keys = np.unique(M.values)
    im1, im2, ij = H.m1[img_keys], H.m2[img_keys], H.j[img_keys]
    seen = np.zeros(H.num_vertices, dtype=bool)
    masses = {}
    for i, h in enumerate(enum):
        hinv = G.inv(h)
        out1 = np.empty_like(im1)
        out2 = np.empty_like(im2)
        for jv in np.unique(ij):
            P = G.matrix_power(int(jv))
            dv1 = P[0][0] * hinv.vec[0] + P[0][1] * hinv.vec[1]
            dv2 = P[1][0] * hinv.vec[0] + P[1][1] * hinv.vec[1]
            sel = ij == jv
            out1[sel] = im1[sel] + dv1
            out2[sel] = im2[sel] + dv2
        idx = H.lookup(out1, out2, ij + hinv.shift)
        idx = idx[idx >= 0]
        fresh = np.unique(idx[~seen[idx]])
        seen[fresh] = True
        masses[i] = Fraction(int(fresh.size), total)
    return masses, Fraction(int(seen.sum()), total)


def _fd_mass_image_generic(M: CouplingMap, enum: list) -> tuple[dict, Fraction]:
    G = M.target_group
    total = M.domain.num_vertices
    image = {M.value_element(v) for v in range(M.domain.num_vertices)}
    window = (set(M.target_graph.decode(v) for v in range(M.target_graph.num_vertices))
              if M.graph_codomain else None)
    seen: set = set()
    masses = {}
    for i, h in enumerate(enum):
        hinv = G.inv(h)
        fresh = 0
        for z in image:
            y = G.mul(z, hinv)
            if window is not None and y not in window:
                continue
            if y not in seen:
                seen.add(y)
                fresh += 1
        masses[i] = Fraction(fresh, total)
    return masses, Fraction(len(seen), total)


def coboundedness_check(M: CouplingMap, R: int) -> Fraction:
    """Fraction of good-at-R vertices with a rank-0 fiber mate within R.

    Vacuously 1 when no vertex is good at R (the conditioning set is empty).
    """
    dom = M.domain
    good = dom.good_mask(R)
    ball = dom.group.ball(R)
    reaches = np.zeros(dom.num_vertices, dtype=bool)
    for w in ball:
        word = dom.group.geodesic_word(w, R)
        xw = dom.almost_action_all(word)
        defined = xw >= 0
        ok = np.zeros(dom.num_vertices, dtype=bool)
        sel = defined.nonzero()[0]
        ok[sel] = (M.values[xw[sel]] == M.values[sel]) & (M.rho[xw[sel]] == 0)
        reaches |= ok
    num = int((reaches & good).sum())
    den = int(good.sum())
    return Fraction(num, den) if den else Fraction(1)


# -- proposition-level property checks -------------------------------------------


def max_ball_cardinality(graph: FolnerGraph, r: int) -> int:
    """Exact max |B(v, r)| over vertices (small graphs only)."""
    best = 0
    for v in range(graph.num_vertices):
        dist = graph.bfs_from([v], cap=r)
        best = max(best, int((dist <= r).sum()))
    return best


def size_ratio_bound(M: CouplingMap, C: int) -> tuple[bool, Fraction, int]:
    """If the surjectivity profile has >= 1/2 mass below C then
    #target/#domain <= 2 * N_C with N_C the max target C-ball size."""
    prof = coarse_profile(M, "surjectivity")
    below = sum(c for r, c in prof.bins.items() if r < C)
    if Fraction(below, prof.denominator) < Fraction(1, 2):
        return (True, Fraction(0), 0)  # hypothesis not met; nothing to check
    n_c = max_ball_cardinality(M.target_graph, C)
    ratio = Fraction(M.target_graph.num_vertices, M.domain.num_vertices)
    return (ratio <= 2 * n_c, ratio, n_c)


def generator_domination(ctx: TransferContext, g, C: int) -> tuple[int, int]:
    """Tail count of the g-profile at C vs the summed generator tails at
    ceil(C/|g|): the triangle-inequality comparison (lhs, rhs)."""
    M = ctx.M
    dom = M.domain
    G = dom.group
    lg = ctx.dom_lengths.length(g)
    gp = lipschitz_profile(ctx, g)
    lhs = gp.tail_count(C)
    thresh = -((-C) // lg) if lg else C
    word = G.geodesic_word(g, lg)
    rhs = 0
    for label in word:
        s = G.generator_by_label(label)
        sp = lipschitz_profile(ctx, s)
        rhs += sp.tail_count(thresh) + sp.excluded
    return lhs, rhs
