from fractions import Fraction

import numpy as np
import pytest

from soficlab.coupling import (collapse_coupling, coupling_sol, export_coupling,
                               identity_coupling, image_distances,
                               load_coupling_records, nearest_image_distance)
from soficlab.folner import cyclic_graph, folner_lamplighter
from soficlab.groups import LamplighterGroup
from soficlab.sollattice import folner_sol_lattice
from soficlab.tiling import eigen_data

A_STD = ((2, 1), (1, 1))


def build_sol_coupling(n=2, t=Fraction(1, 4), L=0):
    E = eigen_data(A_STD, 2)
    F = folner_lamplighter(2, n)
    H = folner_sol_lattice(E, t, n, mode="tile", L=L)
    return coupling_sol(F, E, t, target_graph=H), F, H


def test_identity_vertex_maps_to_identity_with_rho_zero():
    M, F, H = build_sol_coupling()
    v = F.encode(F.group.identity)
    gamma = M.value_element(v)
    assert gamma.vec == (0, 0) and gamma.shift == 0
    assert M.rho[v] == 0


def test_fiber_report_first_run_values():
    # frozen from the first run at (k=2, A=[[2,1],[1,1]], t=1/4, n=3):
    # the digit map is not injective at this t; 128 two-element fibers
    M, F, H = build_sol_coupling(n=3)
    assert M.fiber_report.num_fibers_ge2 == 128
    assert M.fiber_report.max_fiber_size == 2
    assert not M.fiber_report.injective


def test_rho_canonical_order_in_fibers():
    M, F, H = build_sol_coupling(n=3)
    G = F.group
    for key, members in M.fibers().items():
        if len(members) < 2:
            assert M.rho[members[0]] == 0
            continue
        ranked = sorted(members, key=lambda v: G.sort_key(F.decode(v)))
        for i, v in enumerate(ranked):
            assert M.rho[v] == i
        assert sorted(M.rho[m] for m in members) == list(range(len(members)))


def test_coupling_values_inside_target():
    M, F, H = build_sol_coupling(n=3)
    assert np.all(M.values >= 0) and np.all(M.values < H.num_vertices)


def test_identity_coupling_trivial():
    F = folner_lamplighter(2, 2)
    M = identity_coupling(F)
    assert M.fiber_report.injective
    assert np.all(M.rho == 0)
    assert np.array_equal(M.values, np.arange(F.num_vertices))


def test_collapse_coupling_fixture():
    dom = cyclic_graph(12)
    tgt = cyclic_graph(6)
    M = collapse_coupling(dom, tgt, block=2)
    assert M.fiber_report.max_fiber_size == 2
    assert M.fiber_report.num_fibers_ge2 == 6
    # rho: within {2i, 2i+1} the canonical order is by value
    assert list(M.rho[:4]) == [0, 1, 0, 1]


def test_nearest_image_distance_examples():
    dom = cyclic_graph(12)
    tgt = cyclic_graph(12)
    values = np.arange(12)
    values[1] = 0  # vertex 1 not in the image
    from soficlab.coupling import CouplingMap

    M = CouplingMap(dom, tgt, tgt.group, values)
    assert nearest_image_distance(M, 0) == 0  # in the image
    assert nearest_image_distance(M, 1) == 1  # adjacent to an image point
    dist = image_distances(M)
    assert dist.max() == 1


def test_export_roundtrip(tmp_path):
    M, F, H = build_sol_coupling(n=2)
    path = tmp_path / "map.txt"
    export_coupling(M, str(path))
    records = load_coupling_records(str(path), F.group, M.target_group)
    assert len(records) == F.num_vertices
    for v, (dom, tgt, rho) in enumerate(records):
        assert dom == F.decode(v)
        assert tgt == M.value_element(v)
        assert rho == int(M.rho[v])


def test_load_truncated_coupling(tmp_path):
    from soficlab.folner import GraphParseError

    M, F, H = build_sol_coupling(n=2)
    path = tmp_path / "map.txt"
    export_coupling(M, str(path))
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:10]) + "\n")
    with pytest.raises(GraphParseError):
        load_coupling_records(str(path), F.group, M.target_group)


def test_group_codomain_variant():
    E = eigen_data(A_STD, 2)
    F = folner_lamplighter(2, 2)
    M = coupling_sol(F, E, Fraction(1, 4), target_graph=None)
    assert not M.graph_codomain
    v = F.encode(F.group.identity)
    assert M.value_element(v).vec == (0, 0)
