from fractions import Fraction

import numpy as np
import pytest

from soficlab.folner import folner_lamplighter
from soficlab.groups import LamplighterGroup
from soficlab.pairscan import (PairScan, ball_cardinalities, claim_digit_pattern_ok,
                               claim_j_oracle, delta_max, digit_reversal,
                               good_fraction_closed_form,
                               lamp_word_distance_arrays,
                               lemma_expansivity_bound, lipschitz_certificate)
from soficlab.solreal import SolRealPoint, sol_inv, sol_mul, upper_length_leq
from soficlab.tiling import digit_map


def test_digit_reversal():
    # width 3, k=2: 0b001 -> 0b100
    out = digit_reversal(np.array([1, 4, 5]), 2, 3)
    assert out.tolist() == [4, 1, 5]
    # k=3 width 3: 5 has digits (2,1,0) low-to-high, reversal (0,1,2) = 21
    out3 = digit_reversal(np.array([5]), 3, 3)
    assert out3.tolist() == [21]


def test_delta_max_exact():
    # largest D with (2^3 + D)^2 <= 2^7: isqrt(128)-8 = 11-8 = 3
    assert delta_max(2, 3, 1) == 3
    assert delta_max(2, 3, 0) == 0
    assert delta_max(2, 3, -1) == -1


def brute_force_pairs(k, n, q):
    """Oracle: exhaustive upper-length ball test through exact rationals."""
    G = LamplighterGroup(k)
    F = folner_lamplighter(k, n)
    out = set()
    pts = [digit_map(k, F.decode(v)) for v in range(F.num_vertices)]
    for v in range(F.num_vertices):
        for w in range(F.num_vertices):
            if v == w:
                continue
            disp = sol_mul(k, sol_inv(k, pts[v]), pts[w])
            if upper_length_leq(k, disp, q):
                out.add((v, w))
    return out


@pytest.mark.parametrize("k,n,q", [(2, 2, 1), (2, 2, 2), (3, 1, 1), (3, 1, 2)])
def test_pair_scan_matches_brute_force(k, n, q):
    scan = PairScan(k, n, q)
    n_cfg = k ** (2 * n + 1)
    got = set()
    for (j, dj), (src, dst) in scan.neighbors_of_vertex().items():
        for c1, c2 in zip(src.tolist(), dst.tolist()):
            got.add((j * n_cfg + c1, (j + dj) * n_cfg + c2))
    assert got == brute_force_pairs(k, n, q)


def test_ball_cardinalities_match_brute_force():
    k, n, q = 2, 2, 2
    scan = PairScan(k, n, q)
    cards = ball_cardinalities(scan)
    pairs = brute_force_pairs(k, n, q)
    expect = np.ones(folner_lamplighter(k, n).num_vertices, dtype=np.int64)
    for v, w in pairs:
        expect[v] += 1
    assert np.array_equal(cards, expect)


def test_lamp_word_distance_matches_group_formula():
    G = LamplighterGroup(2)
    F = folner_lamplighter(2, 3)
    rng = np.random.default_rng(11)
    v = rng.integers(0, F.num_vertices, size=200)
    w = rng.integers(0, F.num_vertices, size=200)
    W = F.n_configs
    fast = lamp_word_distance_arrays(2, 3, v % W, v // W, w % W, w // W)
    for i in range(200):
        g1, g2 = F.decode(int(v[i])), F.decode(int(w[i]))
        assert fast[i] == G.word_length(G.mul(G.inv(g1), g2))


def test_lamp_word_distance_general_k():
    G = LamplighterGroup(3)
    F = folner_lamplighter(3, 2)
    rng = np.random.default_rng(12)
    v = rng.integers(0, F.num_vertices, size=100)
    w = rng.integers(0, F.num_vertices, size=100)
    W = F.n_configs
    fast = lamp_word_distance_arrays(3, 2, v % W, v // W, w % W, w // W)
    for i in range(100):
        g1, g2 = F.decode(int(v[i])), F.decode(int(w[i]))
        assert fast[i] == G.word_length(G.mul(G.inv(g1), g2))


def test_lemma_bound_small_case_brute_force():
    k, n, q = 2, 3, 1
    results, diam, counted = lemma_expansivity_bound(k, n, q, [1, 2])
    pairs = brute_force_pairs(k, n, q)
    # brute-force diameters
    F = folner_lamplighter(k, n)
    G = F.group
    members = {}
    for v, w in pairs:
        members.setdefault(v, []).append(w)
    for v in range(F.num_vertices):
        group = [v] + members.get(v, [])
        best = 0
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                g1, g2 = F.decode(group[i]), F.decode(group[j])
                best = max(best, G.word_length(G.mul(G.inv(g1), g2)))
        assert diam[v] == best
    for r in results:
        thresh = 2 * r.m + 3 * q
        expect = int((diam >= thresh).sum())
        assert r.counted == expect
        assert r.measured == Fraction(expect, F.num_vertices)


def test_claim_oracle_zero_violations():
    rep = claim_j_oracle(2, 4, 1)
    assert rep.violations == 0
    assert rep.pairs_checked > 0


def test_claim_oracle_corrupted_finds_violations():
    rep = claim_j_oracle(2, 5, 1, corrupted=True)
    assert rep.violations >= 1
    assert rep.samples


def test_claim_pattern_checker_directly():
    # configs differing at positions -2 (1 vs 0) and -4 (0 vs 1) around j=0:
    # the window [-3, -2] mixes digits and must violate
    n = 5
    c1 = 1 << (-2 + n)
    c2 = 1 << (-4 + n)
    assert not claim_digit_pattern_ok(2, n, 1, c1, 0, c2)
    # a genuine carry pair: 1 at -1..1 vs 1 at -2 and 2
    c3 = (1 << (-1 + n)) | (1 << n) | (1 << (1 + n))
    c4 = (1 << (-2 + n)) | (1 << (2 + n))
    assert claim_digit_pattern_ok(2, n, 1, c3, 0, c4)


def test_certificate_counts_every_edge():
    cert = lipschitz_certificate(2, 2)
    F = folner_lamplighter(2, 2)
    total_edges = sum(int((F.edges[lab] >= 0).sum()) for lab in F.labels)
    assert cert.edges_checked == total_edges
    assert cert.passed


def test_certificate_oracle_on_explicit_edges():
    # independent per-edge displacement check through exact rationals
    k, n = 3, 1
    F = folner_lamplighter(k, n)
    cert = lipschitz_certificate(k, n)
    violations = 0
    edges = 0
    for lab in F.labels:
        arr = F.edges[lab]
        for v in np.nonzero(arr >= 0)[0]:
            p1 = digit_map(k, F.decode(int(v)))
            p2 = digit_map(k, F.decode(int(arr[v])))
            disp = sol_mul(k, sol_inv(k, p1), p2)
            edges += 1
            if not upper_length_leq(k, disp, 2):
                violations += 1
    assert edges == cert.edges_checked
    assert violations == cert.violations == 0


def test_good_fraction_closed_form_matches_graph():
    from soficlab.folner import good_set

    for n in (2, 3, 4):
        F = folner_lamplighter(2, n)
        assert good_fraction_closed_form(2, n) == Fraction(
            good_set(F, 1).count, F.num_vertices)
