"""Bipartite cover graphs G(A,B) and perfect-matching machinery.

For candidates A and B, the cover graph G(A,B) puts the voter set on both
sides and draws an edge from left voter v to right voter v' when
``P_v(B) & Q_{v'}(A) != 0``: some candidate that v likes at least as much as
B is liked at most as much as A by v'.  A perfect matching in G(A,B)
certifies that electing A costs at most three times the social cost of B on
every metric consistent with the profile.

Two sufficient tests avoid building the graph: a voter-majority self-loop
count, and an exact open/closed interval subtraction on tournament weights
whose empty remainder forces a perfect matching.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from mdx.profile import (
    VotingProfile,
    pairwise_counts,
    prefer_at_least,
    prefer_at_most,
)
from mdx.tournament import WeightedTournamentGraph, build_tournament

__all__ = [
    "OracleLimitError",
    "BipartiteCoverGraph",
    "MatchingResult",
    "RatInterval",
    "IntervalDifference",
    "build_cover_graph",
    "max_matching",
    "is_perfect_matching",
    "hall_violator",
    "interval_test",
    "subtract_intervals",
    "rank_sum_test",
    "matching_uncovered_set",
]

HALL_ORACLE_LIMIT = 12


class OracleLimitError(ValueError):
    """Graph too large for the brute-force Hall oracle."""


@dataclass(frozen=True)
class BipartiteCoverGraph:
    """Adjacency of G(a, b) as one bitmask of right vertices per left vertex."""

    m: int
    rows: tuple[int, ...]
    a: int
    b: int

    def has_edge(self, v: int, vp: int) -> bool:
        return bool(self.rows[v] >> vp & 1)


@dataclass(frozen=True)
class MatchingResult:
    """matching[v] is the right vertex matched to left v, or -1."""

    size: int
    matching: tuple[int, ...]
    perfect: bool

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((v, r) for v, r in enumerate(self.matching) if r >= 0)


@dataclass(frozen=True)
class RatInterval:
    """A rational interval with explicit endpoint openness."""

    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo}, {self.hi}{right}"


@dataclass(frozen=True)
class IntervalDifference:
    """base minus the union of the subtracted closed intervals."""

    base: RatInterval
    subtracted: tuple[RatInterval, ...]
    remainder: tuple[RatInterval, ...]

    @property
    def remainder_empty(self) -> bool:
        return not self.remainder


def build_cover_graph(p: VotingProfile, a: int | str, b: int | str) -> BipartiteCoverGraph:
    """Construct G(a, b) with one bitset intersection per vertex pair."""
    ai, bi = p.index(a), p.index(b)
    if ai == bi:
        raise ValueError("cover graph needs two distinct candidates")
    lefts = [prefer_at_least(p, v, bi) for v in range(p.m)]
    rights = [prefer_at_most(p, v, ai) for v in range(p.m)]
    rows = []
    for lv in lefts:
        row = 0
        bit = 1
        for rv in rights:
            if lv & rv:
                row |= bit
            bit <<= 1
        rows.append(row)
    return BipartiteCoverGraph(p.m, tuple(rows), ai, bi)


def max_matching(g: BipartiteCoverGraph) -> MatchingResult:
    """Maximum bipartite matching via Hopcroft-Karp on bitmask adjacency."""
    m = g.m
    rows = g.rows
    match_l = [-1] * m
    match_r = [-1] * m
    size = 0

    # Greedy seed: match every left vertex to a free neighbor if possible.
    free_r = (1 << m) - 1
    for v in range(m):
        avail = rows[v] & free_r
        if avail:
            r = (avail & -avail).bit_length() - 1
            match_l[v] = r
            match_r[r] = v
            free_r ^= 1 << r
            size += 1

    INF = m + 1
    dist = [0] * m

    def bfs() -> bool:
        queue = deque()
        for v in range(m):
            if match_l[v] < 0:
                dist[v] = 0
                queue.append(v)
            else:
                dist[v] = INF
        found = False
        while queue:
            v = queue.popleft()
            adj = rows[v]
            while adj:
                low = adj & -adj
                r = low.bit_length() - 1
                adj ^= low
                u = match_r[r]
                if u < 0:
                    found = True
                elif dist[u] == INF:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return found

    def dfs(v: int) -> bool:
        adj = rows[v]
        while adj:
            low = adj & -adj
            r = low.bit_length() - 1
            adj ^= low
            u = match_r[r]
            if u < 0 or (dist[u] == dist[v] + 1 and dfs(u)):
                match_l[v] = r
                match_r[r] = v
                return True
        dist[v] = INF
        return False

    while size < m and bfs():
        for v in range(m):
            if match_l[v] < 0 and dfs(v):
                size += 1
    return MatchingResult(size, tuple(match_l), size == m)


def is_perfect_matching(g: BipartiteCoverGraph, pairs: list[tuple[int, int]] | tuple) -> bool:
    """Validate an explicit left-right pairing as a perfect matching of g."""
    if len(pairs) != g.m:
        return False
    lefts = {v for v, _ in pairs}
    rights = {r for _, r in pairs}
    if len(lefts) != g.m or len(rights) != g.m:
        return False
    return all(g.has_edge(v, r) for v, r in pairs)


def hall_violator(g: BipartiteCoverGraph) -> int | None:
    """Brute-force Hall-condition oracle.

    Returns a bitmask S of left vertices with |N(S)| < |S|, or None when no
    violator exists (equivalently, a perfect matching exists).
    """
    m = g.m
    if m > HALL_ORACLE_LIMIT:
        raise OracleLimitError(f"Hall oracle capped at m <= {HALL_ORACLE_LIMIT}, got {m}")
    neighborhoods = [0] * (1 << m)
    for s in range(1, 1 << m):
        low = s & -s
        neighborhoods[s] = neighborhoods[s ^ low] | g.rows[low.bit_length() - 1]
        if neighborhoods[s].bit_count() < s.bit_count():
            return s
    return None


def _below(piece: RatInterval, cut: Fraction) -> RatInterval:
    """piece intersected with (-inf, cut), the cut point excluded."""
    if cut > piece.hi or (cut == piece.hi and piece.hi_open):
        return piece
    return RatInterval(piece.lo, cut, piece.lo_open, True)


def _above(piece: RatInterval, cut: Fraction) -> RatInterval:
    """piece intersected with (cut, +inf), the cut point excluded."""
    if cut < piece.lo or (cut == piece.lo and piece.lo_open):
        return piece
    return RatInterval(cut, piece.hi, True, piece.hi_open)


def subtract_intervals(base: RatInterval, closed: list[RatInterval]) -> tuple[RatInterval, ...]:
    """Subtract closed intervals from base, keeping exact endpoint openness."""
    pieces = [] if base.is_empty() else [base]
    for sub in closed:
        if sub.is_empty():
            continue
        next_pieces = []
        for piece in pieces:
            left = _below(piece, sub.lo)
            right = _above(piece, sub.hi)
            if not left.is_empty():
                next_pieces.append(left)
            if not right.is_empty() and right != left:
                next_pieces.append(right)
        pieces = next_pieces
    return tuple(pieces)


def interval_test(g: WeightedTournamentGraph, a: int | str, b: int | str) -> IntervalDifference:
    """Exact interval subtraction certifying perfect matchings.

    Computes (w(a,b), w(b,a)) minus the union over other candidates c of
    [w(c,a), w(c,b)].  An empty remainder guarantees that G(a,b) of every
    profile inducing g has a perfect matching; a nonempty remainder proves
    nothing in either direction.
    """
    ai, bi = g.index(a), g.index(b)
    if ai == bi:
        raise ValueError("interval test needs two distinct candidates")
    w = g.weight
    base = RatInterval(w[ai][bi], w[bi][ai], True, True)
    subtracted = tuple(
        RatInterval(w[c][ai], w[c][bi], False, False)
        for c in range(g.n)
        if c != ai and c != bi
    )
    remainder = subtract_intervals(base, list(subtracted))
    return IntervalDifference(base, subtracted, remainder)


def rank_sum_test(p: VotingProfile, a: int | str, b: int | str) -> int | None:
    """Degree-sequence test for G(a, b).

    Sorts the left degrees-proxy |P_v(b)| descending and |Q_v(a)| ascending;
    returns the least 1-based k whose pair sums to at most n, else None.
    When no such k exists a perfect matching is guaranteed; when one exists
    nothing follows (the test can fire on graphs that still have one).
    """
    ai, bi = p.index(a), p.index(b)
    if ai == bi:
        raise ValueError("rank-sum test needs two distinct candidates")
    n = p.n
    p_sizes = sorted((p.rank(v, bi) + 1 for v in range(p.m)), reverse=True)
    q_sizes = sorted(n - p.rank(v, ai) for v in range(p.m))
    for k in range(p.m):
        if p_sizes[k] + q_sizes[k] <= n:
            return k + 1
    return None


def matching_uncovered_set(p: VotingProfile, use_fast_paths: bool = True) -> int:
    """Candidates A whose cover graph G(A,B) has a perfect matching for all B.

    Fast paths (cheapest first): a weak voter majority for A over B forces a
    perfect matching via self-loops; an empty interval-test remainder forces
    one by exact weight arithmetic.  Only survivors get the full matching.
    """
    n = p.n
    if n == 1:
        return 1
    counts = pairwise_counts(p)
    g = build_tournament(p) if use_fast_paths else None
    members = 0
    for a in range(n):
        ok = True
        for b in range(n):
            if a == b:
                continue
            if use_fast_paths:
                if 2 * counts[a, b] >= p.m:
                    continue
                if interval_test(g, a, b).remainder_empty:
                    continue
            if not max_matching(build_cover_graph(p, a, b)).perfect:
                ok = False
                break
        if ok:
            members |= 1 << a
    return members
