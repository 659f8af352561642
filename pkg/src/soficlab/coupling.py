"""Tabulated coupling maps between Folner graphs (or into a target group).

A CouplingMap stores, per domain vertex, a target value plus the fiber index
rho: within every fiber, rho is the rank of the vertex under the canonical
element order of the domain group, the mechanism that absorbs non-injective
fibers downstream.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .folner import FolnerGraph, format_element, parse_element
from .groups import MarkedGroup, SolLatticeElement
from .sollattice import SolLatticeFolnerGraph
from .tiling import EigenData, TileLocator, digit_map, digit_map_corrupted


@dataclass
class FiberReport:
    num_fibers: int
    num_fibers_ge2: int
    max_fiber_size: int

    @property
    def injective(self) -> bool:
        return self.num_fibers_ge2 == 0


class CouplingMap:
    """domain vertex -> target value; graph codomain uses target vertex indices."""

    def __init__(
        self,
        domain: FolnerGraph,
        target_graph: Optional[FolnerGraph],
        target_group: MarkedGroup,
        values: np.ndarray,
        value_table: Optional[list] = None,
        meta: Optional[dict] = None,
    ):
        self.domain = domain
        self.target_graph = target_graph
        self.target_group = target_group
        self.values = np.asarray(values, dtype=np.int64)
        self.value_table = value_table
        self.meta = dict(meta or {})
        if target_graph is None and value_table is None:
            raise ValueError("group codomain requires a value table")
        self.rho = self._assign_rho()
        self.fiber_report = self._report()

    # -- codomain access ----------------------------------------------------
    @property
    def graph_codomain(self) -> bool:
        return self.target_graph is not None

    def value_element(self, v: int):
        if self.graph_codomain:
            return self.target_graph.decode(int(self.values[v]))
        return self.value_table[int(self.values[v])]

    def fibers(self) -> dict:
        out: dict[int, list[int]] = {}
        for v, key in enumerate(self.values):
            out.setdefault(int(key), []).append(v)
        return out

    def image_value_keys(self) -> np.ndarray:
        return np.unique(self.values)

    # -- rho ------------------------------------------------------------------
    def _assign_rho(self) -> np.ndarray:
        group = self.domain.group
        rho = np.zeros(self.values.shape[0], dtype=np.int64)
        order = np.argsort(self.values, kind="stable")
        start = 0
        vals = self.values[order]
        N = vals.shape[0]
        while start < N:
            stop = start
            while stop < N and vals[stop] == vals[start]:
                stop += 1
            members = order[start:stop]
            if stop - start == 1:
                rho[members[0]] = 0
            else:
                ranked = sorted(members, key=lambda v: group.sort_key(self.domain.decode(int(v))))
                for i, v in enumerate(ranked):
                    rho[v] = i
            start = stop
        return rho

    def _report(self) -> FiberReport:
        _, counts = np.unique(self.values, return_counts=True)
        return FiberReport(
            num_fibers=int(counts.size),
            num_fibers_ge2=int((counts >= 2).sum()),
            max_fiber_size=int(counts.max()) if counts.size else 0,
        )


def identity_coupling(domain: FolnerGraph) -> CouplingMap:
    return CouplingMap(
        domain,
        domain,
        domain.group,
        np.arange(domain.num_vertices, dtype=np.int64),
        meta={"kind": "identity"},
    )


def collapse_coupling(domain: FolnerGraph, target: FolnerGraph, block: int = 2) -> CouplingMap:
    """Fixture: vertex v -> v // block (requires aligned vertex counts)."""
    if domain.num_vertices != target.num_vertices * block:
        raise ValueError("domain must be exactly block * target")
    values = np.arange(domain.num_vertices, dtype=np.int64) // block
    return CouplingMap(domain, target, target.group, values, meta={"kind": f"collapse{block}"})


def constant_coupling(domain: FolnerGraph, target: FolnerGraph, vertex: int = 0) -> CouplingMap:
    values = np.full(domain.num_vertices, vertex, dtype=np.int64)
    return CouplingMap(domain, target, target.group, values, meta={"kind": "constant"})


def coupling_sol(
    domain: FolnerGraph,
    eig: EigenData,
    t: Fraction,
    target_graph: Optional[SolLatticeFolnerGraph] = None,
    corrupted: bool = False,
) -> CouplingMap:
    """The digit-map coupling: tile-locate the digit image of every vertex.

    With a target graph, every value must be one of its vertices (the tile
    builder guarantees coverage); without one the codomain is the lattice
    group itself.
    """
    locator = TileLocator(eig, t)
    k = eig.k
    N = domain.num_vertices
    dm = digit_map_corrupted if corrupted else digit_map
    m1 = np.empty(N, dtype=np.int64)
    m2 = np.empty(N, dtype=np.int64)
    jj = np.empty(N, dtype=np.int64)
    for v in range(N):
        g = domain.decode(v)
        gamma = locator.locate(dm(k, g))
        m1[v], m2[v], jj[v] = gamma.vec[0], gamma.vec[1], gamma.shift
    meta = {
        "kind": "digit-tile" + ("-corrupted" if corrupted else ""),
        "t": str(Fraction(t)),
        "k": k,
        "A": eig.A,
        "k_below_lambda_warning": eig.k_below_lambda,
    }
    if target_graph is not None:
        values = target_graph.lookup(m1, m2, jj)
        if np.any(values < 0):
            missing = int((values < 0).sum())
            raise ValueError(f"{missing} coupling values outside the target graph")
        return CouplingMap(domain, target_graph, target_graph.group, values, meta=meta)
    # group codomain: dedupe values into a table
    keys = np.stack([m1, m2, jj], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    table = [SolLatticeElement((int(r[0]), int(r[1])), int(r[2])) for r in uniq]
    return CouplingMap(domain, None, locator.group, inverse.astype(np.int64),
                       value_table=table, meta=meta)


# -- distances to the image -----------------------------------------------------


def image_distances(M: CouplingMap, cap: int = np.iinfo(np.int32).max) -> np.ndarray:
    """d(y, image) for every target vertex (graph codomain)."""
    if not M.graph_codomain:
        raise ValueError("image distances need a graph codomain")
    return M.target_graph.bfs_from(M.image_value_keys().tolist(), cap=cap)


def nearest_image_distance(M: CouplingMap, y: int, cap: int = 10 ** 6) -> int:
    """min distance from target vertex y to the image (graph BFS)."""
    if M.image_value_keys().size == 0:
        raise ValueError("empty image")
    dist = image_distances(M, cap)
    return int(dist[y])


# -- export / load ----------------------------------------------------------------


def export_coupling(M: CouplingMap, path: str) -> None:
    lines = ["couplingmap v1"]
    lines.append(f"domain {M.domain.group.name} n={M.domain.n}")
    lines.append(f"target {M.target_group.name}")
    lines.append(f"vertices {M.domain.num_vertices}")
    for v in range(M.domain.num_vertices):
        dom_s = format_element(M.domain.group, M.domain.decode(v))
        tgt_s = format_element(M.target_group, M.value_element(v))
        lines.append(f"{dom_s} {tgt_s} {int(M.rho[v])}")
    lines.append("end")
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_coupling_records(path: str, domain_group: MarkedGroup, target_group: MarkedGroup):
    """Round-trip loader: list of (domain element, target element, rho)."""
    from .folner import GraphParseError

    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "couplingmap v1":
        raise GraphParseError(1, "bad header")
    if len(lines) < 4:
        raise GraphParseError(len(lines), "truncated file")
    try:
        n_vertices = int(lines[3].split()[1])
    except Exception as exc:
        raise GraphParseError(4, f"bad vertex count: {exc}") from exc
    records = []
    for i in range(n_vertices):
        line_no = 5 + i
        if 4 + i >= len(lines):
            raise GraphParseError(line_no, "truncated file")
        parts = lines[4 + i].split()
        if len(parts) != 3:
            raise GraphParseError(line_no, f"expected 3 fields, got {len(parts)}")
        dom = parse_element(domain_group, parts[0])
        tgt = parse_element(target_group, parts[1])
        records.append((dom, tgt, int(parts[2])))
    if 4 + n_vertices >= len(lines) or lines[4 + n_vertices] != "end":
        raise GraphParseError(5 + n_vertices, "missing end marker")
    return records
