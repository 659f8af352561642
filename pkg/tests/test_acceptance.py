"""Acceptance suite: the quantitative exit criteria, one pass/fail line each.

Heavy objects (the digit-map coupling at its measurement configuration
k=2, A=[[2,1],[1,1]], t=1, enlargement 3) are built once and shared.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from soficlab.cocycle import TransferContext, cocycle_defect, cocycle_defect_oracle
from soficlab.coupling import coupling_sol, identity_coupling
from soficlab.folner import folner_lamplighter, good_set
from soficlab.groups import LamplighterGroup, SolLatticeGroup
from soficlab.pairscan import (PairScan, ball_cardinalities, claim_j_oracle,
                               lemma_expansivity_bound, lipschitz_certificate)
from soficlab.profiles import (ExpansivityBatch, Profile, covolume_ratio,
                               enumerate_target, fd_mass_image_table,
                               fd_mass_single, strong_exp_fit)
from soficlab.sollattice import folner_sol_lattice
from soficlab.tiling import eigen_data

A_STD = ((2, 1), (1, 1))
A_FIB = ((1, 1), (1, 0))
T_MEASURE = Fraction(1)
L_ENLARGE = 3

_cache = {}


def the_coupling(n):
    key = ("couple", n)
    if key not in _cache:
        eig = _cache.setdefault("eig", eigen_data(A_STD, 2))
        F = folner_lamplighter(2, n)
        H = folner_sol_lattice(eig, T_MEASURE, n, mode="tile", L=L_ENLARGE,
                               cap=3 * 10 ** 7)
        M = coupling_sol(F, eig, T_MEASURE, target_graph=H)
        _cache[key] = (M, TransferContext(M, half_radius=8))
    return _cache[key]


def report(num, desc, passed, detail=""):
    tag = "PASS" if passed else "FAIL"
    print(f"[criterion {num:02d}] {tag} {desc}" + (f" ({detail})" if detail else ""))
    return passed


def test_criterion_01_lipschitz_certificate():
    t0 = time.time()
    ok = True
    details = []
    for k in (2, 3):
        for n in range(1, 7):
            cert = lipschitz_certificate(k, n)
            ok = ok and cert.passed
            details.append(f"k={k},n={n}:{cert.edges_checked}")
    elapsed = time.time() - t0
    ok = ok and elapsed < 10.0
    assert report(1, "every Folner-set edge displacement has upper length "
                     "bound <= 2 (exact, zero tolerance)", ok,
                  f"{elapsed:.1f}s, " + details[-1])


def test_criterion_02_expansivity_decay_bound():
    t0 = time.time()
    k, n, q = 2, 8, 1
    results, diam, counted = lemma_expansivity_bound(k, n, q, [1, 2, 3, 4, 5])
    ok = all(r.passed for r in results)
    nonvacuous = results[0].counted > 0
    elapsed = time.time() - t0
    ok = ok and nonvacuous and elapsed < 300.0
    detail = ", ".join(f"m={r.m}:{float(r.measured):.5f}<={float(r.bound):.3f}"
                       for r in results)
    assert report(2, "carry-pair fraction bounded by 4*2^(1-m) at n=8 over "
                     "1.18M vertices, non-vacuously", ok,
                  f"{elapsed:.1f}s, {detail}")


def test_criterion_03_preimage_ball_cardinality():
    ok = True
    worst = {}
    for q in (1, 2):
        bound = (2 * q + 1) * 2 ** (2 * q + 1)
        for n in range(q + 1, 7):
            cards = ball_cardinalities(PairScan(2, n, q))
            mx = int(cards.max())
            worst[q] = max(worst.get(q, 0), mx)
            ok = ok and mx <= bound
    assert report(3, "preimage-of-ball cardinality <= (2q+1) 2^(2q+1) for "
                     "q in {1,2}, n <= 6 (exact)", ok,
                  f"max q1={worst[1]}<=24, q2={worst[2]}<=160")


def test_criterion_04_digit_pattern_oracle():
    rep = claim_j_oracle(2, 5, 1)
    bad = claim_j_oracle(2, 5, 1, corrupted=True)
    ok = rep.violations == 0 and bad.violations >= 1
    assert report(4, "constant-digit dichotomy holds on every qualifying pair; "
                     "corrupted digit map is caught", ok,
                  f"{rep.pairs_checked} pairs clean, "
                  f"{bad.violations} violations under corruption")


def test_criterion_05_good_set_exactness():
    ok = True
    for n in range(2, 7):
        F = folner_lamplighter(2, n)
        gs = good_set(F, 1)
        ok = ok and Fraction(gs.count, F.num_vertices) == Fraction(n - 1, n + 1)
    for n in (2, 3):
        F = folner_lamplighter(2, n)
        mask = F.good_mask(1)
        for v in range(F.num_vertices):
            if F.ball_isomorphic(v, 1) != bool(mask[v]):
                ok = False
                break
    assert report(5, "good-vertex fraction equals (n-1)/(n+1) exactly for "
                     "n=2..6, cross-checked against labeled-ball isomorphism",
                  ok)


def test_criterion_06_word_length_sandwich():
    ok = True
    for G in (LamplighterGroup(2), SolLatticeGroup(A_STD)):
        for g, dist in G.ball(6).items():
            lo, hi = G.length_bounds(g)
            if not (lo <= dist <= hi):
                ok = False
    assert report(6, "BFS word length lies within the closed-form sandwich on "
                     "B(e,6) for the lamplighter and the SOL lattice (exact)", ok)


def test_criterion_07_folner_volume():
    eig = eigen_data(A_FIB, 2)
    t = Fraction(1, 8)
    vol_lo, vol_hi = eig.vol_tile_bounds(t)
    ok = True
    details = []
    for n in (2, 3, 4):
        g = folner_sol_lattice(eig, t, n, mode="sandwich", C=Fraction(0), L=0)
        target = n * 2 ** (2 * n + 2)
        lo = g.num_vertices * vol_lo
        hi = g.num_vertices * vol_hi
        good = hi <= Fraction(6, 5) * target and lo >= Fraction(4, 5) * target
        ok = ok and good
        details.append(f"n={n}:{float(lo) / target:.3f}x")
    assert report(7, "lattice count times tile volume within 20% of n*k^(2n+2) "
                     "(certified rational interval)", ok, ", ".join(details))


def test_criterion_08_cocycle_defect():
    # identity coupling: exact agreement with the brute-force definition
    F = folner_lamplighter(2, 3)
    ctx0 = TransferContext(identity_coupling(F))
    G = F.group
    ball2 = list(G.ball(2))
    exact = True
    for g in ball2:
        for gp in ball2:
            d = cocycle_defect(ctx0, g, gp)
            if d.numerator != cocycle_defect_oracle(ctx0, g, gp):
                exact = False
    # digit-map coupling: non-decreasing good-conditional fraction, >= 0.9
    fractions = []
    for n in (3, 4, 5, 6):
        M, ctx = the_coupling(n)
        d = cocycle_defect(ctx, G.generator_by_label("a1"),
                           G.generator_by_label("R"))
        fractions.append(d.fraction_good)
    monotone = all(fractions[i] <= fractions[i + 1] for i in range(len(fractions) - 1))
    # provisional threshold: failure demands investigation, not widening
    threshold_ok = fractions[-1] >= Fraction(9, 10)
    ok = exact and monotone and threshold_ok
    assert report(8, "identity-coupling cocycle relation matches the enumerated "
                     "count exactly; coupling fraction non-decreasing to >= 0.9",
                  ok, "trend " + ", ".join(f"{float(f):.4f}" for f in fractions))


def test_criterion_09_fundamental_domain_masses():
    # bijective identity coupling
    F1 = folner_lamplighter(2, 1)
    Mi = identity_coupling(F1)
    enum_small = enumerate_target(F1.group, 2)
    fd0 = fd_mass_single(Mi, 0, 0, enum_small)
    masses_i, total_i = fd_mass_image_table(Mi, enum_small)
    identity_ok = fd0 == 1 and all(masses_i[i] == 0 for i in range(1, len(enum_small)))
    # digit-map pair at n=5
    M, ctx = the_coupling(5)
    enum = enumerate_target(M.target_group, 8)
    masses, total = fd_mass_image_table(M, enum)
    cov = covolume_ratio(M.target_graph, M.domain)
    rel = abs(total - cov) / cov
    ok = identity_ok and rel <= Fraction(3, 20)
    assert report(9, "identity fd masses are exact; summed fd masses match the "
                     "covolume ratio within 15% at n=5", ok,
                  f"sum={float(total):.4f} vs cov={float(cov):.4f} "
                  f"(rel {float(rel):.4f})")


def test_criterion_10_cylinder_additivity():
    from soficlab.cocycle import observed_cylinder_patterns

    M, ctx = the_coupling(3)
    G = M.domain.group
    sigma = (G.identity, G.generator_by_label("a1"))
    patterns = observed_cylinder_patterns(M, sigma)
    total = sum(patterns.values(), Fraction(0))
    good_frac = Fraction(int(M.domain.good_mask(1).sum()), M.domain.num_vertices)
    ok = total == good_frac
    assert report(10, "cylinder measures over all observed patterns sum exactly "
                      "to the good-set fraction", ok,
                  f"{len(patterns)} patterns, sum {total}")


def test_criterion_11_strong_exponential_fit():
    M, ctx = the_coupling(6)
    batch = ExpansivityBatch(ctx)
    probes = enumerate_target(M.target_group, 4)
    profiles = {}
    for h in probes:
        profiles[h] = (ctx.lengths.length(h), batch.profile(h))
    fit = strong_exp_fit(profiles, epsilon=1.0)
    adversarial = {("adv",): (1, Profile({0: 1}, 2, overflow=1))}
    bad = strong_exp_fit(adversarial, epsilon=1.0)
    nonempty = sum(1 for _, (lh, p) in profiles.items() if p.bins and lh > 0)
    ok = fit.passed and math.isfinite(fit.c_triple) and not bad.passed and nonempty > 0
    assert report(11, "exp-sum fitter finds delta > 0 with finite C''' at eps=1; "
                      "adversarial overflow fixture fails", ok,
                  f"delta={fit.delta}, C'''={fit.c_triple:.4g}, "
                  f"{nonempty} non-trivial probes")
