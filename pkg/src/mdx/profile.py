"""Ranked preference profiles.

A profile is a list of voters, each with a strict total order over a common
candidate set.  The text format is one voter per line::

    # comment
    3: A > B > C
    B > A > C

An optional ``k:`` prefix repeats the ordering for k voters.  Every line must
rank every candidate exactly once; ties are not representable.

Candidate subsets are passed around as integer bitmasks over candidate
indices (bit i set means candidate i is in the set).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "ProfileParseError",
    "VotingProfile",
    "PairwiseMatrix",
    "parse_profile",
    "serialize_profile",
    "pairwise_counts",
    "triple_count",
    "prefer_at_least",
    "prefer_at_most",
    "restrict_profile",
    "iter_set",
    "set_of",
    "mask_names",
    "default_candidates",
]

# Characters with structural meaning in the text formats.
_FORBIDDEN_IN_NAMES = set(">:,#")


class ProfileParseError(ValueError):
    """Malformed profile text.  ``line`` is the 1-based offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class VotingProfile:
    """An immutable preference profile.

    candidates: distinct candidate names; index in this tuple is the
        candidate's index everywhere else.
    orderings: one tuple per voter, candidate indices from most to least
        preferred, each a permutation of range(n).
    """

    candidates: tuple[str, ...]
    orderings: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("profile needs at least one candidate")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError("candidate names must be distinct")
        for name in self.candidates:
            if not name or any(ch.isspace() or ch in _FORBIDDEN_IN_NAMES for ch in name):
                raise ValueError(f"invalid candidate name {name!r}")
        if not self.orderings:
            raise ValueError("profile needs at least one voter")
        ref = tuple(range(len(self.candidates)))
        for v, order in enumerate(self.orderings):
            if tuple(sorted(order)) != ref:
                raise ValueError(f"voter {v} ordering is not a permutation of all candidates")

    @property
    def n(self) -> int:
        return len(self.candidates)

    @property
    def m(self) -> int:
        return len(self.orderings)

    def index(self, x: int | str) -> int:
        """Resolve a candidate given by index or by name."""
        if isinstance(x, str):
            try:
                return self.candidates.index(x)
            except ValueError:
                raise KeyError(f"unknown candidate {x!r}") from None
        if not 0 <= x < self.n:
            raise KeyError(f"candidate index {x} out of range")
        return x

    def rank(self, v: int, x: int | str) -> int:
        """Position of candidate x in voter v's ordering (0 = top)."""
        return self.orderings[v].index(self.index(x))


@dataclass(frozen=True)
class PairwiseMatrix:
    """counts[x][y] = number of voters ranking x above y; diagonal 0."""

    counts: tuple[tuple[int, ...], ...]
    m: int

    def __getitem__(self, pair: tuple[int, int]) -> int:
        x, y = pair
        return self.counts[x][y]


def parse_profile(text: str) -> VotingProfile:
    """Parse profile text.  Raises ProfileParseError with a line number."""
    candidates: tuple[str, ...] | None = None
    index: dict[str, int] = {}
    orderings: list[tuple[int, ...]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mult = 1
        body = line
        if ":" in line:
            head, body = line.split(":", 1)
            head = head.strip()
            if not head.isdigit() or int(head) < 1:
                raise ProfileParseError(f"multiplicity {head!r} is not a positive integer", line_no)
            mult = int(head)
        names = [tok.strip() for tok in body.split(">")]
        if any(not tok for tok in names):
            raise ProfileParseError("malformed ordering (empty candidate name)", line_no)
        for tok in names:
            if any(ch.isspace() or ch in _FORBIDDEN_IN_NAMES for ch in tok):
                raise ProfileParseError(f"invalid candidate name {tok!r}", line_no)
        if len(set(names)) != len(names):
            dup = next(t for i, t in enumerate(names) if t in names[:i])
            raise ProfileParseError(f"duplicate candidate {dup!r}", line_no)
        if candidates is None:
            candidates = tuple(names)
            index = {name: i for i, name in enumerate(candidates)}
        else:
            for tok in names:
                if tok not in index:
                    raise ProfileParseError(f"unknown candidate {tok!r}", line_no)
            if len(names) != len(candidates):
                missing = sorted(set(candidates) - set(names))
                raise ProfileParseError(f"ordering does not rank candidate {missing[0]!r}", line_no)
        order = tuple(index[tok] for tok in names)
        orderings.extend([order] * mult)
    if candidates is None:
        raise ProfileParseError("empty profile (no voter lines)", max(1, text.count("\n") + 1))
    return VotingProfile(candidates, tuple(orderings))


def serialize_profile(p: VotingProfile) -> str:
    """Canonical text form: one voter per line, no multiplicities."""
    lines = [" > ".join(p.candidates[c] for c in order) for order in p.orderings]
    return "\n".join(lines) + "\n"


def pairwise_counts(p: VotingProfile) -> PairwiseMatrix:
    """Count, for every ordered pair (x, y), the voters ranking x above y."""
    n = p.n
    counts = [[0] * n for _ in range(n)]
    for order in p.orderings:
        for i, x in enumerate(order):
            row = counts[x]
            for y in order[i + 1:]:
                row[y] += 1
    return PairwiseMatrix(tuple(tuple(row) for row in counts), p.m)


def triple_count(p: VotingProfile, x: int | str, y: int | str, z: int | str) -> int:
    """Number of voters ranking x above y above z (candidates distinct)."""
    xi, yi, zi = p.index(x), p.index(y), p.index(z)
    if len({xi, yi, zi}) != 3:
        raise ValueError("triple_count needs three distinct candidates")
    total = 0
    for order in p.orderings:
        if order.index(xi) < order.index(yi) < order.index(zi):
            total += 1
    return total


def prefer_at_least(p: VotingProfile, v: int, x: int | str) -> int:
    """Bitmask of candidates voter v ranks at x's position or above (x included)."""
    xi = p.index(x)
    mask = 0
    for c in p.orderings[v]:
        mask |= 1 << c
        if c == xi:
            return mask
    raise AssertionError("unreachable: ordering is a permutation")


def prefer_at_most(p: VotingProfile, v: int, x: int | str) -> int:
    """Bitmask of candidates voter v ranks at x's position or below (x included)."""
    xi = p.index(x)
    mask = 0
    for c in reversed(p.orderings[v]):
        mask |= 1 << c
        if c == xi:
            return mask
    raise AssertionError("unreachable: ordering is a permutation")


def restrict_profile(p: VotingProfile, keep: int) -> VotingProfile:
    """Project the profile onto the candidate subset given by bitmask ``keep``.

    Kept candidates get fresh indices in increasing old-index order; relative
    order within every ballot is preserved.
    """
    kept = [c for c in range(p.n) if keep >> c & 1]
    if keep >> p.n:
        raise ValueError("keep mask has bits outside the candidate range")
    if not kept:
        raise ValueError("cannot restrict to an empty candidate set")
    remap = {c: i for i, c in enumerate(kept)}
    names = tuple(p.candidates[c] for c in kept)
    orders = tuple(tuple(remap[c] for c in order if c in remap) for order in p.orderings)
    return VotingProfile(names, orders)


def iter_set(mask: int) -> Iterator[int]:
    """Iterate indices present in a bitmask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def set_of(indices: Iterable[int]) -> int:
    """Build a bitmask from candidate indices."""
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def mask_names(p: VotingProfile, mask: int) -> tuple[str, ...]:
    """Names of the candidates in a bitmask, in index order."""
    return tuple(p.candidates[c] for c in iter_set(mask))


def default_candidates(n: int) -> tuple[str, ...]:
    """Generated candidate names: A..Z, then A1, B1, ... for larger n."""
    if n < 1:
        raise ValueError("need at least one candidate")
    alpha = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    names = []
    for i in range(n):
        block, letter = divmod(i, 26)
        names.append(alpha[letter] + (str(block) if block else ""))
    return tuple(names)
