"""Finite edge-labeled graphs carrying the sofic-approximation structure.

A FolnerGraph is (for the builders here) an induced subgraph of a Cayley
graph: vertices decode to group elements, and the edge for label s exists at
v exactly when decode(v)*s is again a vertex.  Good vertices at radius r are
those whose labeled r-ball matches the group ball; for induced subgraphs this
is equivalent to decode(v)*B(e,r) being contained in the vertex set, and also
to the vertex having graph distance > r from the complement, which is what
the production implementation computes (one multi-source BFS for all radii).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .groups import (
    BsElement,
    CyclicElement,
    CyclicGroup,
    Exceeds,
    LamplighterElement,
    LamplighterGroup,
    MarkedGroup,
    SolLatticeElement,
    SolLatticeGroup,
)

UNREACHED = np.iinfo(np.int32).max


class SizeCapExceeded(Exception):
    pass


# -- element text round-trip -------------------------------------------------


def format_element(group: MarkedGroup, g) -> str:
    if isinstance(g, LamplighterElement):
        lamps = ",".join(f"{p}:{v}" for p, v in g.lamps)
        return f"{g.cursor};{lamps}"
    if isinstance(g, BsElement):
        return f"{g.translation.numerator}/{g.translation.denominator};{g.exponent}"
    if isinstance(g, SolLatticeElement):
        return f"{g.vec[0]},{g.vec[1]};{g.shift}"
    if isinstance(g, CyclicElement):
        return str(g.value)
    raise TypeError(f"cannot format {type(g)!r}")


def parse_element(group: MarkedGroup, text: str):
    if isinstance(group, LamplighterGroup):
        cursor_s, lamps_s = text.split(";")
        lamps = []
        if lamps_s:
            for item in lamps_s.split(","):
                p, v = item.split(":")
                lamps.append((int(p), int(v)))
        return LamplighterElement(tuple(sorted(lamps)), int(cursor_s))
    from .groups import BsGroup

    if isinstance(group, BsGroup):
        frac_s, exp_s = text.split(";")
        num, den = frac_s.split("/")
        return BsElement(Fraction(int(num), int(den)), int(exp_s))
    if isinstance(group, SolLatticeGroup):
        vec_s, shift_s = text.split(";")
        m1, m2 = vec_s.split(",")
        return SolLatticeElement((int(m1), int(m2)), int(shift_s))
    if isinstance(group, CyclicGroup):
        return CyclicElement(int(text))
    raise TypeError(f"cannot parse elements of {type(group)!r}")


# -- the graph ----------------------------------------------------------------


class FolnerGraph:
    """Dense-indexed vertex set with partial labeled right-action by generators.

    edges[label][v] is the target index or -1.  decode(v) returns the group
    element; encode(g) the index or -1.  Subclasses specialize storage.
    """

    def __init__(self, group: MarkedGroup, n: int, labels: Sequence[str], meta=None):
        self.group = group
        self.n = n
        self.labels = list(labels)
        self.edges: dict[str, np.ndarray] = {}
        self.meta = dict(meta or {})
        self._dist_exterior: Optional[np.ndarray] = None

    # subclass surface
    @property
    def num_vertices(self) -> int:
        raise NotImplementedError

    def decode(self, v: int):
        raise NotImplementedError

    def encode(self, g) -> int:
        raise NotImplementedError

    # shared machinery
    def __len__(self) -> int:
        return self.num_vertices

    def neighbors(self, v: int) -> list[tuple[str, int]]:
        out = []
        for label in self.labels:
            w = int(self.edges[label][v])
            if w >= 0:
                out.append((label, w))
        return out

    def distance_to_exterior(self) -> np.ndarray:
        """d(v, complement) in the ambient Cayley graph, UNREACHED if none.

        A shortest exit path stays inside the graph until its last step, so a
        multi-source BFS from vertices with a missing edge computes it.
        """
        if self._dist_exterior is not None:
            return self._dist_exterior
        N = self.num_vertices
        dist = np.full(N, UNREACHED, dtype=np.int32)
        missing = np.zeros(N, dtype=bool)
        for label in self.labels:
            missing |= self.edges[label] < 0
        frontier = np.nonzero(missing)[0]
        dist[frontier] = 1
        level = 1
        while frontier.size:
            nxt = []
            for label in self.labels:
                t = self.edges[label][frontier]
                t = t[t >= 0]
                t = t[dist[t] == UNREACHED]
                if t.size:
                    dist[t] = level + 1
                    nxt.append(t)
            frontier = np.unique(np.concatenate(nxt)) if nxt else np.empty(0, dtype=np.int64)
            level += 1
        self._dist_exterior = dist
        return dist

    def good_mask(self, r: int) -> np.ndarray:
        """Vertices whose labeled r-ball matches the group r-ball."""
        if r < 0:
            raise ValueError("radius must be >= 0")
        if r == 0:
            return np.ones(self.num_vertices, dtype=bool)
        return self.distance_to_exterior() > r

    def almost_action_word(self, v: int, word: Iterable[str]) -> int:
        """Follow labeled edges; -1 once any step leaves the graph."""
        cur = v
        for label in word:
            if cur < 0:
                return -1
            cur = int(self.edges[label][cur])
        return cur

    def almost_action(self, v: int, g, r_max: int = 64) -> int:
        """Right almost-action v.g along a fixed geodesic word for g; -1 if undefined."""
        word = self.group.geodesic_word(g, r_max)
        return self.almost_action_word(v, word)

    def almost_action_all(self, word: Iterable[str]) -> np.ndarray:
        """Vectorized almost-action for every vertex at once."""
        cur = np.arange(self.num_vertices, dtype=np.int64)
        for label in word:
            valid = cur >= 0
            nxt = np.full_like(cur, -1)
            nxt[valid] = self.edges[label][cur[valid]]
            cur = nxt
        return cur

    def bfs_from(self, sources: Iterable[int], cap: int = UNREACHED) -> np.ndarray:
        """Graph distances from a source set; UNREACHED where not reached."""
        N = self.num_vertices
        dist = np.full(N, UNREACHED, dtype=np.int32)
        frontier = np.asarray(sorted(set(int(s) for s in sources)), dtype=np.int64)
        dist[frontier] = 0
        level = 0
        while frontier.size and level < cap:
            nxt = []
            for label in self.labels:
                t = self.edges[label][frontier]
                t = t[t >= 0]
                t = t[dist[t] == UNREACHED]
                if t.size:
                    dist[t] = level + 1
                    nxt.append(t)
            frontier = np.unique(np.concatenate(nxt)) if nxt else np.empty(0, dtype=np.int64)
            level += 1
        return dist

    def graph_distance(self, v: int, w: int, cap: int):
        """Intrinsic distance, or Exceeds(cap)."""
        if v == w:
            return 0
        dist = self.bfs_from([v], cap=cap)
        d = int(dist[w])
        if d == UNREACHED or d > cap:
            return Exceeds(cap)
        return d

    def subset_diameter(self, S: Sequence[int], cap: int):
        """Intrinsic diameter of S; Exceeds(cap) if disconnected within cap."""
        S = list(S)
        if not S:
            raise ValueError("subset must be nonempty")
        best = 0
        for v in S:
            dist = self.bfs_from([v], cap=cap)
            for w in S:
                d = int(dist[w])
                if d == UNREACHED or d > cap:
                    return Exceeds(cap)
                best = max(best, d)
        return best

    # goodness oracles (slow paths, used for cross-checks)
    def good_mask_by_ball(self, r: int, cap: int = 10 ** 6) -> np.ndarray:
        """Direct criterion: decode(v)*w is a vertex for every |w| <= r."""
        ball = self.group.ball(r, cap)
        mask = np.ones(self.num_vertices, dtype=bool)
        for v in range(self.num_vertices):
            gv = self.decode(v)
            for w in ball:
                if self.encode(self.group.mul(gv, w)) < 0:
                    mask[v] = False
                    break
        return mask

    def ball_isomorphic(self, v: int, r: int, cap: int = 10 ** 6) -> bool:
        """Labeled-graph isomorphism B_graph(v,r) ~ B_group(e,r), checked directly."""
        ball = self.group.ball(r, cap)
        assign: dict[int, object] = {}
        for w, dist_w in ball.items():
            if dist_w == 0:
                target = v
            else:
                word = self.group.geodesic_word(w, r)
                target = self.almost_action_word(v, word)
                if target < 0:
                    return False
            if target in assign and assign[target] != w:
                return False
            assign[target] = w
        if len(assign) != len(ball):
            return False
        # no extra vertices within graph radius r
        dist = self.bfs_from([v], cap=r)
        graph_ball = int((dist <= r).sum())
        if graph_ball != len(ball):
            return False
        # every labeled edge inside the ball is the translate of a group edge
        inv_assign = {t: w for t, w in assign.items()}
        for t, w in inv_assign.items():
            for label in self.labels:
                u = int(self.edges[label][t])
                if u >= 0 and u in inv_assign:
                    s = self.group.generator_by_label(label)
                    if inv_assign[u] != self.group.mul(w, s):
                        return False
        return True


@dataclass
class GoodSet:
    radius: int
    mask: np.ndarray

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def fraction(self, total: int) -> Fraction:
        return Fraction(self.count, total)


def good_set(graph: FolnerGraph, r: int) -> GoodSet:
    return GoodSet(r, graph.good_mask(r))


# -- lamplighter Folner graph (arithmetic vertex codec) ------------------------


class LamplighterFolnerGraph(FolnerGraph):
    """F_n = {(x, m): supp x in [-n, n], 0 <= m <= n}, index = m*k^(2n+1) + digits."""

    def __init__(self, k: int, n: int, cap: int = 10 ** 7):
        if n < 1:
            raise ValueError("n must be >= 1")
        group = LamplighterGroup(k)
        width = 2 * n + 1
        n_configs = k ** width
        N = (n + 1) * n_configs
        if N > cap:
            raise SizeCapExceeded(f"{N} vertices exceed cap {cap}")
        super().__init__(group, n, [lab for lab, _ in group.generators],
                         meta={"k": k, "n": n, "family": "lamplighter"})
        self.k = k
        self.width = width
        self.n_configs = n_configs
        self._N = N
        self._build_edges()

    @property
    def num_vertices(self) -> int:
        return self._N

    def decode(self, v: int) -> LamplighterElement:
        cursor, config = divmod(int(v), self.n_configs)
        lamps = []
        for i in range(self.width):
            d = (config // self.k ** i) % self.k
            if d:
                lamps.append((i - self.n, d))
        return LamplighterElement(tuple(lamps), cursor)

    def encode(self, g: LamplighterElement) -> int:
        if not (0 <= g.cursor <= self.n):
            return -1
        config = 0
        for p, v in g.lamps:
            if not (-self.n <= p <= self.n):
                return -1
            config += v * self.k ** (p + self.n)
        return g.cursor * self.n_configs + config

    def _build_edges(self):
        k, n, W = self.k, self.n, self.n_configs
        configs = np.arange(W, dtype=np.int64)
        cursor_block = np.arange(self._N, dtype=np.int64) // W
        # lamp writes: value c at the cursor position
        powers = np.array([k ** i for i in range(self.width)], dtype=np.int64)
        for c in range(1, k):
            tgt = np.empty(self._N, dtype=np.int64)
            for m in range(n + 1):
                digit = (configs // powers[m + n]) % k
                delta = ((digit + c) % k - digit) * powers[m + n]
                tgt[m * W:(m + 1) * W] = m * W + configs + delta
            self.edges[f"a{c}"] = tgt
        # cursor moves
        right = np.arange(self._N, dtype=np.int64) + W
        right[cursor_block == n] = -1
        left = np.arange(self._N, dtype=np.int64) - W
        left[cursor_block == 0] = -1
        self.edges["R"] = right
        self.edges["L"] = left

    def config_arrays(self):
        """(config, cursor) arrays aligned with vertex indices."""
        idx = np.arange(self._N, dtype=np.int64)
        return idx % self.n_configs, idx // self.n_configs


def folner_lamplighter(k: int, n: int, cap: int = 10 ** 7) -> LamplighterFolnerGraph:
    return LamplighterFolnerGraph(k, n, cap)


# -- explicit graph (generic storage; used by loader and small builders) -------


class ExplicitFolnerGraph(FolnerGraph):
    def __init__(self, group: MarkedGroup, n: int, elements: list, meta=None):
        super().__init__(group, n, [lab for lab, _ in group.generators], meta)
        self.elements = list(elements)
        self._index = {g: i for i, g in enumerate(self.elements)}

    @property
    def num_vertices(self) -> int:
        return len(self.elements)

    def decode(self, v: int):
        return self.elements[v]

    def encode(self, g) -> int:
        return self._index.get(g, -1)

    def build_induced_edges(self):
        for label, s in self.group.generators:
            tgt = np.full(len(self.elements), -1, dtype=np.int64)
            for i, g in enumerate(self.elements):
                j = self.encode(self.group.mul(g, s))
                if j >= 0:
                    tgt[i] = j
            self.edges[label] = tgt


def cyclic_graph(N: int) -> ExplicitFolnerGraph:
    """Cayley graph of Z/NZ: a finite-quotient approximation of Z."""
    group = CyclicGroup(N)
    g = ExplicitFolnerGraph(group, N, [CyclicElement(i) for i in range(N)],
                            meta={"family": "cyclic", "N": N})
    g.build_induced_edges()
    return g


def induced_subgraph(group: MarkedGroup, elements: list, n: int = 0, meta=None) -> ExplicitFolnerGraph:
    g = ExplicitFolnerGraph(group, n, elements, meta)
    g.build_induced_edges()
    return g


# -- export / load -------------------------------------------------------------


def export_graph(graph: FolnerGraph, path: str) -> None:
    import io, os

    buf = io.StringIO()
    buf.write("folnergraph v1\n")
    buf.write(f"group {graph.group.name}\n")
    buf.write(f"n {graph.n}\n")
    buf.write("labels " + " ".join(graph.labels) + "\n")
    N = graph.num_vertices
    buf.write(f"vertices {N}\n")
    for v in range(N):
        buf.write(f"{v} {format_element(graph.group, graph.decode(v))}\n")
    rows = []
    for label in graph.labels:
        arr = graph.edges[label]
        for v in np.nonzero(arr >= 0)[0]:
            rows.append(f"{label} {v} {int(arr[v])}\n")
    buf.write(f"edges {len(rows)}\n")
    for row in rows:
        buf.write(row)
    buf.write("end\n")
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, path)


class GraphParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def load_graph(path: str, group: MarkedGroup) -> ExplicitFolnerGraph:
    with open(path) as fh:
        lines = fh.read().splitlines()
    pos = 0

    def need(prefix: str) -> str:
        nonlocal pos
        if pos >= len(lines):
            raise GraphParseError(pos + 1, f"unexpected end of file, wanted {prefix!r}")
        line = lines[pos]
        pos += 1
        if not line.startswith(prefix):
            raise GraphParseError(pos, f"expected {prefix!r}, got {line!r}")
        return line[len(prefix):].strip()

    if need("folnergraph ") != "v1":
        raise GraphParseError(1, "unsupported version")
    need("group ")
    n = int(need("n "))
    labels = need("labels ").split()
    n_vertices = int(need("vertices "))
    elements = []
    for i in range(n_vertices):
        try:
            line = lines[pos]
            pos += 1
            idx_s, el_s = line.split(" ", 1)
            if int(idx_s) != i:
                raise ValueError("vertex index out of order")
            elements.append(parse_element(group, el_s))
        except GraphParseError:
            raise
        except Exception as exc:
            raise GraphParseError(pos, f"bad vertex line: {exc}") from exc
    graph = ExplicitFolnerGraph(group, n, elements)
    graph.labels = labels
    for label in labels:
        graph.edges[label] = np.full(n_vertices, -1, dtype=np.int64)
    n_edges = int(need("edges "))
    for _ in range(n_edges):
        try:
            line = lines[pos]
            pos += 1
            label, src_s, dst_s = line.split()
            graph.edges[label][int(src_s)] = int(dst_s)
        except GraphParseError:
            raise
        except Exception as exc:
            raise GraphParseError(pos, f"bad edge line: {exc}") from exc
    need("end")
    return graph


def graphs_equal(g1: FolnerGraph, g2: FolnerGraph) -> bool:
    if g1.num_vertices != g2.num_vertices or g1.labels != g2.labels:
        return False
    for v in range(g1.num_vertices):
        if format_element(g1.group, g1.decode(v)) != format_element(g2.group, g2.decode(v)):
            return False
    return all(np.array_equal(g1.edges[lab], g2.edges[lab]) for lab in g1.labels)
