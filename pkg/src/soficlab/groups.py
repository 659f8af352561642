"""Marked groups with exact normal forms and BFS word metrics.

Families: lamplighter L_k = (Z/kZ) wr Z, BS(1,k) = Z[1/k] x| Z, SOL_A = Z^2 x|_A Z,
and Z/NZ (a finite-quotient fixture).  Each group fixes a finite symmetric
generating set with stable labels; word lengths come from breadth-first
exploration with memoized balls, plus closed-form lengths/bounds where the
family admits them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

DEFAULT_BALL_CAP = 10 ** 7


class BallCapExceeded(Exception):
    """Raised when a ball enumeration would exceed its state cap."""


class Exceeds:
    """Sentinel: a length/diameter measurement exceeded its cap."""

    __slots__ = ("cap",)

    def __init__(self, cap: int):
        self.cap = cap

    def __repr__(self) -> str:
        return f"Exceeds({self.cap})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Exceeds) and other.cap == self.cap

    def __hash__(self) -> int:
        return hash(("Exceeds", self.cap))


class MarkedGroup:
    """A group with a fixed labeled symmetric generating set.

    Subclasses provide: identity, mul, inv, sort_key, and ``generators`` as a
    list of (label, element).  ``inverse_label`` pairs each label with the
    label of its inverse generator.  Elements are immutable; the memoized
    ball grows behind a lock so concurrent readers see consistent results.
    """

    name = "group"

    def __init__(self):
        import threading

        self._balls: dict = {}  # element -> distance, grown on demand
        self._ball_radius = -1
        self._ball_parent: dict = {}  # element -> (parent, label), BFS tree
        self._frontier: list = []
        self._ball_lock = threading.RLock()

    # -- subclass surface ---------------------------------------------------
    @property
    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def sort_key(self, g):
        """Total order key on normal forms; deterministic tie-breaking."""
        raise NotImplementedError

    @property
    def generators(self) -> list:
        raise NotImplementedError

    @property
    def inverse_label(self) -> dict:
        raise NotImplementedError

    # -- balls and word metric ----------------------------------------------
    def _grow_ball(self, r: int, cap: int) -> None:
        with self._ball_lock:
            if self._ball_radius < 0:
                e = self.identity
                self._balls = {e: 0}
                self._ball_parent = {e: None}
                self._frontier = [e]
                self._ball_radius = 0
            gens = self.generators
            while self._ball_radius < r:
                new_frontier = []
                for g in sorted(self._frontier, key=self.sort_key):
                    for label, s in gens:
                        h = self.mul(g, s)
                        if h not in self._balls:
                            self._balls[h] = self._ball_radius + 1
                            self._ball_parent[h] = (g, label)
                            new_frontier.append(h)
                if len(self._balls) > cap:
                    raise BallCapExceeded(
                        f"ball of radius {self._ball_radius + 1} exceeds cap {cap}"
                    )
                self._frontier = new_frontier
                self._ball_radius += 1

    def ball(self, r: int, cap: int = DEFAULT_BALL_CAP) -> dict:
        """Exact ball B(e, r) as {element: distance}; deterministic order."""
        if r < 0:
            raise ValueError("radius must be >= 0")
        self._grow_ball(r, cap)
        out = {}
        for g in sorted(
            (g for g, dist in self._balls.items() if dist <= r), key=self.sort_key
        ):
            out[g] = self._balls[g]
        return out

    def word_length_bfs(self, g, r_max: int, cap: int = DEFAULT_BALL_CAP):
        """Exact word length, or Exceeds(r_max) if |g| > r_max."""
        if g == self.identity:
            self._grow_ball(0, cap)
            return 0
        for r in range(self._ball_radius + 1, r_max + 1):
            if g in self._balls:
                break
            self._grow_ball(r, cap)
        dist = self._balls.get(g)
        if dist is None or dist > r_max:
            return Exceeds(r_max)
        return dist

    def geodesic_word(self, g, r_max: int, cap: int = DEFAULT_BALL_CAP) -> list:
        """Label word of the first BFS geodesic from identity to g."""
        dist = self.word_length_bfs(g, r_max, cap)
        if isinstance(dist, Exceeds):
            raise ValueError(f"element beyond radius {r_max}")
        word = []
        cur = g
        while self._ball_parent[cur] is not None:
            parent, label = self._ball_parent[cur]
            word.append(label)
            cur = parent
        word.reverse()
        return word

    def generator_by_label(self, label: str):
        for lab, s in self.generators:
            if lab == label:
                return s
        raise KeyError(label)

    def element_of_word(self, word: Iterable[str]):
        g = self.identity
        for label in word:
            g = self.mul(g, self.generator_by_label(label))
        return g


# ---------------------------------------------------------------------------
# lamplighter (Z/kZ) wr Z
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LamplighterElement:
    """(lamps, cursor): lamps is a sorted tuple of (position, value!=0)."""

    lamps: tuple
    cursor: int

    def support(self) -> tuple:
        return tuple(p for p, _ in self.lamps)


def _norm_lamps(items: Iterable[tuple[int, int]], k: int) -> tuple:
    acc: dict[int, int] = {}
    for p, v in items:
        acc[p] = (acc.get(p, 0) + v) % k
    return tuple(sorted((p, v) for p, v in acc.items() if v != 0))


class LamplighterGroup(MarkedGroup):
    """L_k with generators: k-1 single-lamp writes at the cursor, cursor +-1."""

    def __init__(self, k: int):
        if k < 2:
            raise ValueError("k must be >= 2")
        super().__init__()
        self.k = k
        self.name = f"lamplighter(k={k})"
        self._identity = LamplighterElement((), 0)
        gens = []
        for c in range(1, k):
            gens.append((f"a{c}", LamplighterElement(((0, c),), 0)))
        gens.append(("R", LamplighterElement((), 1)))
        gens.append(("L", LamplighterElement((), -1)))
        self._generators = gens
        inv = {"R": "L", "L": "R"}
        for c in range(1, k):
            inv[f"a{c}"] = f"a{k - c}"
        self._inverse_label = inv

    @property
    def identity(self) -> LamplighterElement:
        return self._identity

    @property
    def generators(self) -> list:
        return list(self._generators)

    @property
    def inverse_label(self) -> dict:
        return dict(self._inverse_label)

    def mul(self, g: LamplighterElement, h: LamplighterElement) -> LamplighterElement:
        shifted = [(p + g.cursor, v) for p, v in h.lamps]
        return LamplighterElement(
            _norm_lamps(list(g.lamps) + shifted, self.k), g.cursor + h.cursor
        )

    def inv(self, g: LamplighterElement) -> LamplighterElement:
        items = [(p - g.cursor, (-v) % self.k) for p, v in g.lamps]
        return LamplighterElement(_norm_lamps(items, self.k), -g.cursor)

    def sort_key(self, g: LamplighterElement):
        return (g.cursor, g.lamps)

    # -- exact word length ---------------------------------------------------
    def travel_cost(self, start: int, end: int, stops: Iterable[int]) -> int:
        """Shortest walk on Z from start to end visiting every stop."""
        pts = list(stops) + [start, end]
        a, b = min(pts), max(pts)
        left_first = (start - a) + (b - a) + (b - end)
        right_first = (b - start) + (b - a) + (end - a)
        return min(left_first, right_first)

    def word_length(self, g: LamplighterElement) -> int:
        """|g| exactly: one write per lit lamp plus optimal cursor travel."""
        return len(g.lamps) + self.travel_cost(0, g.cursor, g.support())

    def word_distance(self, g: LamplighterElement, h: LamplighterElement) -> int:
        return self.word_length(self.mul(self.inv(g), h))

    def length_bounds(self, g: LamplighterElement) -> tuple[int, int]:
        """Sandwich max(diam(supp u {0}), |j|) <= |g| <= #supp + travel."""
        supp = g.support()
        pts = supp + (0,)
        diam = max(pts) - min(pts)
        lower = max(diam, abs(g.cursor))
        upper = len(supp) + self.travel_cost(0, g.cursor, supp)
        return lower, upper


# ---------------------------------------------------------------------------
# BS(1,k) = Z[1/k] x| Z
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BsElement:
    """(translation, exponent); translation is a k-adic rational p/k^m."""

    translation: Fraction
    exponent: int


def _is_k_power_denominator(x: Fraction, k: int) -> bool:
    den = x.denominator
    while den % k == 0:
        den //= k
    # after stripping k-factors the rest must divide a power of k (i.e. share
    # k's prime factors); simplest exact check: keep dividing by gcd with k
    import math

    g = math.gcd(den, k)
    while g > 1:
        while den % g == 0:
            den //= g
        g = math.gcd(den, k)
    return den == 1


class BsGroup(MarkedGroup):
    """BS(1,k) with generators b = (1,0), t = (0,1) and inverses."""

    def __init__(self, k: int):
        if k < 2:
            raise ValueError("k must be >= 2")
        super().__init__()
        self.k = k
        self.name = f"bs(1,{k})"
        self._identity = BsElement(Fraction(0), 0)
        self._generators = [
            ("b", BsElement(Fraction(1), 0)),
            ("B", BsElement(Fraction(-1), 0)),
            ("t", BsElement(Fraction(0), 1)),
            ("T", BsElement(Fraction(0), -1)),
        ]
        self._inverse_label = {"b": "B", "B": "b", "t": "T", "T": "t"}

    @property
    def identity(self) -> BsElement:
        return self._identity

    @property
    def generators(self) -> list:
        return list(self._generators)

    @property
    def inverse_label(self) -> dict:
        return dict(self._inverse_label)

    def make(self, translation: Fraction, exponent: int) -> BsElement:
        translation = Fraction(translation)
        if not _is_k_power_denominator(translation, self.k):
            raise ValueError(f"translation {translation} is not k-adic for k={self.k}")
        return BsElement(translation, exponent)

    def mul(self, g: BsElement, h: BsElement) -> BsElement:
        return BsElement(
            g.translation + Fraction(self.k) ** g.exponent * h.translation,
            g.exponent + h.exponent,
        )

    def inv(self, g: BsElement) -> BsElement:
        return BsElement(
            -(Fraction(self.k) ** (-g.exponent)) * g.translation, -g.exponent
        )

    def sort_key(self, g: BsElement):
        return (g.exponent, g.translation)

    def length_bounds(self, g: BsElement) -> tuple[int, int]:
        """Valid sandwich: growth lower bound, Horner-word upper bound."""
        k = self.k
        x, m = g.translation, g.exponent
        e = 0
        while (x * k ** e).denominator != 1:
            e += 1
        # r generators reach |translation| <= r * k^r and depth <= r
        lower = max(abs(m), e)
        if x != 0:
            r = 1
            while r * Fraction(k) ** r < abs(x):
                r += 1
            lower = max(lower, r)
        # upper: b-digit Horner word for p = x*k^e conjugated back down
        p = abs(int(x * k ** e))
        length = 0
        digits = 0
        while p:
            length += p % k
            p //= k
            digits += 1
        horner = length + 2 * max(digits - 1, 0)
        upper = e + horner + abs(e + m)
        return lower, max(lower, upper)


# ---------------------------------------------------------------------------
# SOL_A = Z^2 x|_A Z
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolLatticeElement:
    vec: tuple[int, int]
    shift: int


def _mat_mul(A, B):
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def _mat_vec(A, v):
    return (A[0][0] * v[0] + A[0][1] * v[1], A[1][0] * v[0] + A[1][1] * v[1])


def _mat_inv_unimodular(A):
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if det not in (1, -1):
        raise ValueError("matrix must have determinant +-1")
    return (
        (det * A[1][1], -det * A[0][1]),
        (-det * A[1][0], det * A[0][0]),
    )


class SolLatticeGroup(MarkedGroup):
    """Z^2 x|_A Z for unimodular hyperbolic A; exact integer matrix powers."""

    def __init__(self, A):
        super().__init__()
        self.A = ((int(A[0][0]), int(A[0][1])), (int(A[1][0]), int(A[1][1])))
        self.Ainv = _mat_inv_unimodular(self.A)
        tr = self.A[0][0] + self.A[1][1]
        self.det = self.A[0][0] * self.A[1][1] - self.A[0][1] * self.A[1][0]
        if tr * tr <= 4 * self.det:
            raise ValueError("matrix must be hyperbolic (tr^2 > 4 det)")
        self.name = f"sol(A={self.A})"
        self._identity = SolLatticeElement((0, 0), 0)
        self._generators = [
            ("x", SolLatticeElement((1, 0), 0)),
            ("X", SolLatticeElement((-1, 0), 0)),
            ("y", SolLatticeElement((0, 1), 0)),
            ("Y", SolLatticeElement((0, -1), 0)),
            ("t", SolLatticeElement((0, 0), 1)),
            ("T", SolLatticeElement((0, 0), -1)),
        ]
        self._inverse_label = {"x": "X", "X": "x", "y": "Y", "Y": "y", "t": "T", "T": "t"}
        self._powers = {0: ((1, 0), (0, 1))}

    @property
    def identity(self) -> SolLatticeElement:
        return self._identity

    @property
    def generators(self) -> list:
        return list(self._generators)

    @property
    def inverse_label(self) -> dict:
        return dict(self._inverse_label)

    def matrix_power(self, j: int):
        if j not in self._powers:
            if j > 0:
                self._powers[j] = _mat_mul(self.matrix_power(j - 1), self.A)
            else:
                self._powers[j] = _mat_mul(self.matrix_power(j + 1), self.Ainv)
        return self._powers[j]

    def mul(self, g: SolLatticeElement, h: SolLatticeElement) -> SolLatticeElement:
        Aj = self.matrix_power(g.shift)
        w = _mat_vec(Aj, h.vec)
        return SolLatticeElement((g.vec[0] + w[0], g.vec[1] + w[1]), g.shift + h.shift)

    def inv(self, g: SolLatticeElement) -> SolLatticeElement:
        Amj = self.matrix_power(-g.shift)
        w = _mat_vec(Amj, g.vec)
        return SolLatticeElement((-w[0], -w[1]), -g.shift)

    def sort_key(self, g: SolLatticeElement):
        return (g.shift, g.vec[0], g.vec[1])

    def length_bounds(self, g: SolLatticeElement) -> tuple[int, int]:
        """Valid sandwich from generator growth; upper is the naive word."""
        m = max(abs(g.vec[0]), abs(g.vec[1]))
        upper = abs(g.vec[0]) + abs(g.vec[1]) + abs(g.shift)
        # any product of r generators has vec-norm <= sum of row norms of A^i,
        # |i| <= r; grow r until that reach covers m
        lower = abs(g.shift)
        if m > 0:
            reach, r = 0, 0
            while reach < m:
                r += 1
                norms = []
                for i in range(-r, r + 1):
                    P = self.matrix_power(i)
                    norms.append(max(abs(P[0][0]) + abs(P[0][1]), abs(P[1][0]) + abs(P[1][1])))
                reach = r * max(norms)
            lower = max(lower, r)
        return lower, upper


# ---------------------------------------------------------------------------
# Z/NZ fixture (finite quotient of Z)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CyclicElement:
    value: int


class CyclicGroup(MarkedGroup):
    """Z/NZ with generators +-1; finite-quotient sofic fixture."""

    def __init__(self, N: int):
        if N < 3:
            raise ValueError("N must be >= 3")
        super().__init__()
        self.N = N
        self.name = f"cyclic({N})"
        self._identity = CyclicElement(0)
        self._generators = [("R", CyclicElement(1)), ("L", CyclicElement(N - 1))]
        self._inverse_label = {"R": "L", "L": "R"}

    @property
    def identity(self) -> CyclicElement:
        return self._identity

    @property
    def generators(self) -> list:
        return list(self._generators)

    @property
    def inverse_label(self) -> dict:
        return dict(self._inverse_label)

    def mul(self, g: CyclicElement, h: CyclicElement) -> CyclicElement:
        return CyclicElement((g.value + h.value) % self.N)

    def inv(self, g: CyclicElement) -> CyclicElement:
        return CyclicElement((-g.value) % self.N)

    def sort_key(self, g: CyclicElement):
        return g.value
