"""Metrics over candidates and voters, and the worst-case distortion LP.

P(A, B, sigma) is the largest possible total voter distance to A over all
(pseudo)metrics consistent with the profile sigma, normalized so that the
total distance to B is 1.  It is computed as a dense LP with one variable
per unordered pair of the N = n + m points, triangle constraints for every
triple, and per-voter consistency constraints between ordering-adjacent
candidates.  The solver is a self-contained two-phase primal simplex.

Distances mix candidates and voters in a single space; voters may tie and
may sit at distance zero from other points (pseudometric).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from mdx.profile import VotingProfile

__all__ = [
    "DEFAULT_LP_CAP",
    "LpCapError",
    "SolverFailureError",
    "InconsistentMetricError",
    "MetricParseError",
    "Metric",
    "LpOutcome",
    "SimplexResult",
    "voter_labels",
    "parse_metric",
    "serialize_metric",
    "check_consistent",
    "social_cost",
    "instance_distortion",
    "fairness_ratio_fixed",
    "pairwise_distortion_lp",
    "max_distortion",
    "solve_lp",
]

DEFAULT_LP_CAP = 20
SOLVER_TOL = 1e-9
TRIANGLE_TOL = 1e-9
# Full triangle validation is cubic; skip it at construction for big metrics.
TRIANGLE_CHECK_LIMIT = 48


class LpCapError(ValueError):
    """LP point count over the configured cap."""


class SolverFailureError(RuntimeError):
    """Simplex exceeded its iteration cap."""


class InconsistentMetricError(ValueError):
    """Metric does not respect the profile's orderings."""


class MetricParseError(ValueError):
    """Malformed metric CSV.  ``line`` is the 1-based offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def voter_labels(m: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(1, m + 1))


@dataclass(frozen=True, eq=False)
class Metric:
    """A (pseudo)metric on candidates followed by voters.

    labels: point names, the first ``n_candidates`` of which are candidates.
    dist: symmetric nonnegative float matrix with zero diagonal.  The
    triangle inequality is validated at construction up to
    TRIANGLE_CHECK_LIMIT points (beyond that, call :meth:`triangle_violation`
    explicitly; the line-embedding instance builders are safe by
    construction).
    """

    labels: tuple[str, ...]
    n_candidates: int
    dist: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.dist, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("dist must be a square matrix")
        if len(self.labels) != arr.shape[0]:
            raise ValueError("labels must match the matrix size")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("point labels must be distinct")
        if not 1 <= self.n_candidates <= len(self.labels):
            raise ValueError("n_candidates out of range")
        if (arr < 0).any():
            raise ValueError("distances must be nonnegative")
        if np.abs(np.diagonal(arr)).max(initial=0.0) != 0.0:
            raise ValueError("diagonal distances must be 0")
        if not np.array_equal(arr, arr.T):
            raise ValueError("distance matrix must be symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "dist", arr)
        if self.n_points <= TRIANGLE_CHECK_LIMIT:
            bad = self.triangle_violation(TRIANGLE_TOL)
            if bad is not None:
                i, j, k = bad
                raise ValueError(
                    f"triangle inequality fails: d({self.labels[i]},{self.labels[j]})"
                    f" > d(.,{self.labels[k]}) sum"
                )

    @property
    def n_points(self) -> int:
        return len(self.labels)

    @property
    def n_voters(self) -> int:
        return self.n_points - self.n_candidates

    def index(self, x: int | str) -> int:
        if isinstance(x, str):
            try:
                return self.labels.index(x)
            except ValueError:
                raise KeyError(f"unknown point {x!r}") from None
        if not 0 <= x < self.n_points:
            raise KeyError(f"point index {x} out of range")
        return x

    def triangle_violation(self, tol: float = TRIANGLE_TOL) -> tuple[int, int, int] | None:
        """Worst triple violating d(i,j) <= d(i,k) + d(k,j) + tol, or None."""
        d = self.dist
        worst = None
        worst_gap = tol
        for k in range(self.n_points):
            detour = d[:, k][:, None] + d[k, :][None, :]
            gap = d - detour
            ij = np.unravel_index(np.argmax(gap), gap.shape)
            if gap[ij] > worst_gap:
                worst_gap = gap[ij]
                worst = (int(ij[0]), int(ij[1]), k)
        return worst


@dataclass(frozen=True)
class LpOutcome:
    """Result of one distortion LP: status 'optimal' or 'unbounded'."""

    status: str
    value: float | None
    witness: Metric | None


@dataclass(frozen=True)
class SimplexResult:
    status: str  # optimal | unbounded | infeasible
    value: float | None
    x: np.ndarray | None
    iterations: int


def parse_metric(text: str, n_candidates: int | None = None) -> Metric:
    """Parse the metric CSV: header row of labels, then one labeled row each.

    Entries are rationals ``p/q`` or decimals.  When ``n_candidates`` is not
    given it is inferred from the first label that looks like a voter
    (``v1``, ``v2``, ...).
    """
    rows: list[list[str]] = []
    line_nos: list[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([cell.strip() for cell in line.split(",")])
        line_nos.append(line_no)
    if not rows:
        raise MetricParseError("empty metric file", 1)
    header = rows[0]
    if header and header[0] in ("", "d", "dist"):
        header = header[1:]
    labels = tuple(header)
    if not labels or any(not lab for lab in labels):
        raise MetricParseError("header must list point labels", line_nos[0])
    size = len(labels)
    if len(rows) - 1 != size:
        raise MetricParseError(f"expected {size} data rows, found {len(rows) - 1}", line_nos[-1])
    dist = np.zeros((size, size))
    for r, (cells, line_no) in enumerate(zip(rows[1:], line_nos[1:])):
        if len(cells) != size + 1:
            raise MetricParseError(f"expected label plus {size} entries", line_no)
        if cells[0] != labels[r]:
            raise MetricParseError(f"row label {cells[0]!r} does not match header {labels[r]!r}", line_no)
        for c, cell in enumerate(cells[1:]):
            try:
                dist[r, c] = float(Fraction(cell))
            except (ValueError, ZeroDivisionError):
                raise MetricParseError("entries must be rationals p/q or decimals", line_no) from None
    if n_candidates is None:
        voterish = [lab.startswith("v") and lab[1:].isdigit() for lab in labels]
        n_candidates = voterish.index(True) if any(voterish) else size
    try:
        return Metric(labels, n_candidates, dist)
    except ValueError as exc:
        raise MetricParseError(str(exc), line_nos[0]) from None


def serialize_metric(metric: Metric) -> str:
    """Write the metric CSV with decimal entries."""
    lines = ["," + ",".join(metric.labels)]
    for lab, row in zip(metric.labels, metric.dist):
        lines.append(lab + "," + ",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def _align(metric: Metric, p: VotingProfile) -> tuple[int, ...]:
    """Map each profile candidate index to its metric point index.

    Candidate labels may appear in any order among the metric's first n
    points; voters are matched positionally (profile voter i is metric
    point n + i).
    """
    if metric.n_candidates != p.n or set(metric.labels[: p.n]) != set(p.candidates):
        raise ValueError("metric candidate labels do not match the profile's")
    if metric.n_voters != p.m:
        raise ValueError(f"metric has {metric.n_voters} voters, profile has {p.m}")
    return tuple(metric.index(name) for name in p.candidates)


def check_consistent(metric: Metric, p: VotingProfile, tol: float = 0.0) -> bool:
    """True iff every voter's distances weakly respect her ordering."""
    cand = _align(metric, p)
    d = metric.dist
    for v, order in enumerate(p.orderings):
        col = d[:, p.n + v]
        for x, y in zip(order, order[1:]):
            if col[cand[x]] > col[cand[y]] + tol:
                return False
    return True


def social_cost(metric: Metric, x: int | str) -> float:
    """Total distance from all voters to point x."""
    xi = metric.index(x)
    return float(metric.dist[xi, metric.n_candidates:].sum())


def instance_distortion(metric: Metric, p: VotingProfile, x: int | str, tol: float = 0.0) -> float:
    """S(x) / min_A S(A) on a fixed consistent metric; +inf on zero optimum."""
    if not check_consistent(metric, p, tol):
        raise InconsistentMetricError("metric is not consistent with the profile")
    xi = p.index(x)
    cand = _align(metric, p)
    costs = [social_cost(metric, cand[c]) for c in range(p.n)]
    best = min(costs)
    if best == 0.0:
        return 1.0 if costs[xi] == 0.0 else math.inf
    return costs[xi] / best


def fairness_ratio_fixed(
    metric: Metric, p: VotingProfile, x: int | str, k: int, tol: float = 0.0
) -> float:
    """Sum of the k largest voter distances to x over the best alternative."""
    if not check_consistent(metric, p, tol):
        raise InconsistentMetricError("metric is not consistent with the profile")
    if not 1 <= k <= p.m:
        raise ValueError(f"k must be in 1..{p.m}")
    xi = p.index(x)
    cand = _align(metric, p)

    def top_k(c: int) -> float:
        col = metric.dist[cand[c], p.n:]
        return float(np.sort(col)[-k:].sum())

    denom = min(top_k(c) for c in range(p.n))
    numer = top_k(xi)
    if denom == 0.0:
        return 1.0 if numer == 0.0 else math.inf
    return numer / denom


def _pair_index(n_points: int) -> dict[tuple[int, int], int]:
    idx = {}
    for i in range(n_points):
        for j in range(i + 1, n_points):
            idx[(i, j)] = len(idx)
    return idx


def _var(idx: dict, i: int, j: int) -> int:
    return idx[(i, j) if i < j else (j, i)]


def pairwise_distortion_lp(
    p: VotingProfile, a: int | str, b: int | str, cap: int = DEFAULT_LP_CAP
) -> LpOutcome:
    """Worst-case ratio LP: max total distance to a, total distance to b = 1.

    a == b short-circuits to value 1 (the objective equals the normalized
    constraint).  Status 'unbounded' means the ratio is unbounded: nothing
    in the profile ties a's distances to b's.
    """
    ai, bi = p.index(a), p.index(b)
    if ai == bi:
        return LpOutcome("optimal", 1.0, None)
    n, m = p.n, p.m
    n_points = n + m
    if n_points > cap:
        raise LpCapError(f"LP needs {n_points} points, cap is {cap}")
    idx = _pair_index(n_points)
    nv = len(idx)

    objective = np.zeros(nv)
    for v in range(m):
        objective[_var(idx, ai, n + v)] = 1.0

    a_eq = np.zeros((1, nv))
    for v in range(m):
        a_eq[0, _var(idx, bi, n + v)] = 1.0
    b_eq = np.ones(1)

    n_cons = m * (n - 1)
    n_tri = (n_points * (n_points - 1) // 2) * (n_points - 2)
    a_ub = np.zeros((n_cons + n_tri, nv))
    row = 0
    for v, order in enumerate(p.orderings):
        for x, y in zip(order, order[1:]):
            a_ub[row, _var(idx, x, n + v)] += 1.0
            a_ub[row, _var(idx, y, n + v)] -= 1.0
            row += 1
    for (i, j), vij in idx.items():
        for k in range(n_points):
            if k == i or k == j:
                continue
            a_ub[row, vij] += 1.0
            a_ub[row, _var(idx, i, k)] -= 1.0
            a_ub[row, _var(idx, k, j)] -= 1.0
            row += 1
    b_ub = np.zeros(row)

    result = solve_lp(objective, a_ub, b_ub, a_eq, b_eq, maximize=True)
    if result.status == "unbounded":
        return LpOutcome("unbounded", None, None)
    if result.status != "optimal":
        raise SolverFailureError(f"distortion LP ended with status {result.status}")

    dist = np.zeros((n_points, n_points))
    for (i, j), v in idx.items():
        dist[i, j] = dist[j, i] = max(result.x[v], 0.0)
    labels = p.candidates + voter_labels(m)
    witness = Metric(labels, n, dist)
    return LpOutcome("optimal", result.value, witness)


def max_distortion(
    p: VotingProfile, a: int | str, cap: int = DEFAULT_LP_CAP, workers: int = 1
) -> float:
    """max over opponents b of the pairwise LP value; +inf if any unbounded."""
    ai = p.index(a)
    if p.n == 1:
        return 1.0
    opponents = [b for b in range(p.n) if b != ai]

    def value(b: int) -> float:
        outcome = pairwise_distortion_lp(p, ai, b, cap=cap)
        return math.inf if outcome.status == "unbounded" else outcome.value

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(value, opponents))
    else:
        values = [value(b) for b in opponents]
    return max(values)


def solve_lp(
    c: np.ndarray,
    a_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    a_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    maximize: bool = False,
    tol: float = SOLVER_TOL,
    max_iter: int = 1_000_000,
) -> SimplexResult:
    """Two-phase primal simplex over x >= 0 with dense numpy tableaus.

    Pivoting uses Dantzig's rule, falling back to Bland's rule after a run
    of degenerate pivots so cycling cannot occur.  Raises
    SolverFailureError when the pivot count exceeds ``max_iter``.
    """
    c = np.asarray(c, dtype=float)
    nv = c.size
    a_ub = np.zeros((0, nv)) if a_ub is None else np.asarray(a_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    a_eq = np.zeros((0, nv)) if a_eq is None else np.asarray(a_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    n_ub, n_eq = a_ub.shape[0], a_eq.shape[0]
    n_rows = n_ub + n_eq

    # Columns: structural vars, one slack per <= row, artificials appended.
    body = np.zeros((n_rows, nv + n_ub))
    body[:n_ub, :nv] = a_ub
    body[n_ub:, :nv] = a_eq
    body[:n_ub, nv:] = np.eye(n_ub)
    rhs = np.concatenate([b_ub, b_eq])
    flip = rhs < 0
    body[flip] *= -1.0
    rhs = np.abs(rhs)

    # Slack columns with +1 coefficient start in the basis; other rows get
    # an artificial variable each.
    basis = np.empty(n_rows, dtype=int)
    art_rows = []
    for i in range(n_rows):
        if i < n_ub and not flip[i]:
            basis[i] = nv + i
        else:
            art_rows.append(i)
    n_art = len(art_rows)
    n_cols = nv + n_ub + n_art
    tableau = np.zeros((n_rows, n_cols + 1))
    tableau[:, : nv + n_ub] = body
    tableau[:, -1] = rhs
    for j, i in enumerate(art_rows):
        tableau[i, nv + n_ub + j] = 1.0
        basis[i] = nv + n_ub + j

    iters = 0

    def pivot_loop(obj: np.ndarray, allow_unbounded: bool) -> str:
        nonlocal iters, tableau
        degenerate_run = 0
        bland = False
        while True:
            reduced = obj[:-1]
            if bland:
                entering = -1
                for j in range(reduced.size):
                    if reduced[j] < -tol:
                        entering = j
                        break
                if entering < 0:
                    return "optimal"
            else:
                entering = int(np.argmin(reduced))
                if reduced[entering] >= -tol:
                    return "optimal"
            col = tableau[:, entering]
            positive = col > tol
            if not positive.any():
                return "unbounded" if allow_unbounded else "stalled"
            ratios = np.full(n_rows, np.inf)
            ratios[positive] = tableau[positive, -1] / col[positive]
            best = ratios.min()
            tied = np.flatnonzero(ratios <= best + 1e-12)
            leaving = int(tied[np.argmin(basis[tied])])
            if iters >= max_iter:
                raise SolverFailureError(f"simplex exceeded {max_iter} iterations")
            iters += 1
            if best <= tol:
                degenerate_run += 1
                if degenerate_run > 50:
                    bland = True
            else:
                degenerate_run = 0
                bland = False
            pivot_val = tableau[leaving, entering]
            tableau[leaving] /= pivot_val
            col_vals = tableau[:, entering].copy()
            col_vals[leaving] = 0.0
            tableau -= np.outer(col_vals, tableau[leaving])
            obj -= obj[entering] * tableau[leaving]
            basis[leaving] = entering

    def reduced_objective(costs: np.ndarray) -> np.ndarray:
        obj = np.zeros(n_cols + 1)
        obj[: costs.size] = costs
        for i in range(n_rows):
            cb = costs[basis[i]] if basis[i] < costs.size else 0.0
            if cb != 0.0:
                obj -= cb * tableau[i]
        return obj

    # Phase 1: minimize the sum of artificials.
    if n_art:
        costs1 = np.zeros(n_cols)
        costs1[nv + n_ub:] = 1.0
        obj = reduced_objective(costs1)
        status = pivot_loop(obj, allow_unbounded=False)
        if status != "optimal":
            raise SolverFailureError("phase-1 simplex stalled")
        if -obj[-1] > 1e-7:
            return SimplexResult("infeasible", None, None, iters)
        # Pivot remaining artificials out of the basis or drop their rows.
        keep = np.ones(n_rows, dtype=bool)
        for i in range(n_rows):
            if basis[i] >= nv + n_ub:
                support = np.flatnonzero(np.abs(tableau[i, : nv + n_ub]) > tol)
                if support.size == 0:
                    keep[i] = False
                    continue
                entering = int(support[0])
                tableau[i] /= tableau[i, entering]
                col_vals = tableau[:, entering].copy()
                col_vals[i] = 0.0
                tableau -= np.outer(col_vals, tableau[i])
                basis[i] = entering

        if not keep.all():
            tableau = tableau[keep]
            basis = basis[keep]
            n_rows = int(keep.sum())
    tableau = np.delete(tableau, np.s_[nv + n_ub: n_cols], axis=1)
    n_cols = nv + n_ub

    # Phase 2 with the real objective.
    sign = -1.0 if maximize else 1.0
    costs2 = np.zeros(n_cols)
    costs2[:nv] = sign * c
    obj = reduced_objective(costs2)
    status = pivot_loop(obj, allow_unbounded=True)
    if status == "unbounded":
        return SimplexResult("unbounded", None, None, iters)
    if status != "optimal":
        raise SolverFailureError("phase-2 simplex stalled")
    x = np.zeros(nv)
    for i in range(n_rows):
        if basis[i] < nv:
            x[basis[i]] = tableau[i, -1]
    value = float(c @ x)
    return SimplexResult("optimal", value, x, iters)
