"""Optimal one-to-one entity assignment.

``solve_assignment`` maximizes the total similarity of a rectangular
matrix with a shortest-augmenting-path (Hungarian / Jonker-Volgenant
style) solver on the matrix zero-padded to square. The dual potentials it
returns identify every optimal assignment at once: an assignment is
optimal iff all of its cells have zero reduced cost. That "tight" subgraph
is used for the deterministic tie-break, so equal-objective optima are
resolved without enumerating them:

1. optionally, among the optima pick those maximizing a ``secondary``
   matrix (solved again on the tight subgraph only);
2. among what remains, return the lexicographically smallest sorted pair
   list.

``brute_force_assignment`` enumerates every injection and applies the same
rules; it is the test oracle for small matrices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

# Relative tolerance (scaled by max |S|) under which two objectives tie.
TIE_RTOL = 1e-9
BRUTE_FORCE_MAX = 8


@dataclass(frozen=True)
class AssignmentResult:
    pairs: tuple[tuple[int, int], ...]
    objective: float

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def _as_matrix(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2:
        if S.size == 0:
            return S.reshape(0, 0)
        raise ValueError(f"similarity matrix must be 2-D, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("similarity matrix must be finite")
    return S


def _objective(S: np.ndarray, pairs) -> float:
    return math.fsum(float(S[i, j]) for i, j in pairs)


def _tolerance(*matrices: np.ndarray) -> float:
    scale = max((float(np.abs(M).max()) for M in matrices if M.size), default=0.0)
    return TIE_RTOL * scale


def _hungarian_min(cost: list[list[float]]):
    """Min-cost perfect matching on a square matrix.

    Returns ``(row_to_col, u, v)`` with ``cost[i][j] - u[i] - v[j] >= 0``
    everywhere and equality on the matching.
    """
    k = len(cost)
    inf = math.inf
    u = [0.0] * (k + 1)
    v = [0.0] * (k + 1)
    owner = [0] * (k + 1)  # owner[j] = 1-based row matched to 1-based column j
    way = [0] * (k + 1)
    for i in range(1, k + 1):
        owner[0] = i
        j0 = 0
        minv = [inf] * (k + 1)
        used = [False] * (k + 1)
        while True:
            used[j0] = True
            i0 = owner[j0]
            row = cost[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, k + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(k + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    row_to_col = [0] * k
    for j in range(1, k + 1):
        row_to_col[owner[j] - 1] = j - 1
    return row_to_col, u[1:], v[1:]


def _tight_graph(cost: list[list[float]], u, v, tol: float) -> list[list[int]]:
    k = len(cost)
    return [[j for j in range(k) if cost[i][j] - u[i] - v[j] <= tol] for i in range(k)]


def _pad(S: np.ndarray, k: int) -> np.ndarray:
    P = np.zeros((k, k))
    P[: S.shape[0], : S.shape[1]] = S
    return P


def _reassign(adj, row_to_col, col_to_row, fixed_cols, r, c) -> bool:
    """Try to move row ``r`` onto column ``c`` keeping a perfect tight matching.

    Rows holding a fixed column never move. On failure the matching is restored.
    """
    c0 = row_to_col[r]
    r1 = col_to_row[c]
    saved_rc, saved_cr = row_to_col[:], col_to_row[:]
    row_to_col[r] = c
    col_to_row[c] = r
    col_to_row[c0] = -1
    row_to_col[r1] = -1
    blocked = fixed_cols | {c}
    seen: set[int] = set()

    def augment(row: int) -> bool:
        for col in adj[row]:
            if col in blocked or col in seen:
                continue
            seen.add(col)
            if col_to_row[col] == -1 or augment(col_to_row[col]):
                row_to_col[row] = col
                col_to_row[col] = row
                return True
        return False

    if augment(r1):
        return True
    row_to_col[:], col_to_row[:] = saved_rc, saved_cr
    return False


def _lexicographic_canonical(adj, row_to_col, m: int) -> list[int]:
    """Among perfect matchings of the tight graph, pick the lexicographically
    smallest real pair list.

    Rows are fixed in index order to the smallest feasible column. Real
    columns precede padding columns, so a real row prefers being matched
    (smaller pair) over dropping out of the list.
    """
    k = len(adj)
    row_to_col = list(row_to_col)
    col_to_row = [0] * k
    for i, j in enumerate(row_to_col):
        col_to_row[j] = i
    fixed_cols: set[int] = set()
    for r in range(m):
        for c in sorted(adj[r]):
            if c in fixed_cols:
                continue
            if row_to_col[r] == c:
                break
            if _reassign(adj, row_to_col, col_to_row, fixed_cols, r, c):
                break
        fixed_cols.add(row_to_col[r])
    return row_to_col


def _real_pairs_forced(adj, m: int, n: int) -> bool:
    if m <= n:
        return all(len(adj[i]) == 1 for i in range(m))
    counts = [0] * len(adj)
    for row in adj:
        for j in row:
            counts[j] += 1
    return all(counts[j] == 1 for j in range(n))


def solve_assignment(S, secondary=None) -> AssignmentResult:
    """Maximum-similarity one-to-one assignment of ``min(m, n)`` pairs.

    Parameters
    ----------
    S : array-like of shape (m, n)
        Finite similarity scores.
    secondary : array-like of shape (m, n), optional
        Tie-break scores; among all assignments optimal for ``S`` the ones
        with the largest ``secondary`` total are preferred.

    Returns
    -------
    AssignmentResult
        Sorted pairs and the total of ``S`` over them. Remaining ties go to
        the lexicographically smallest sorted pair list.
    """
    S = _as_matrix(S)
    m, n = S.shape
    if m == 0 or n == 0:
        return AssignmentResult((), 0.0)
    k = max(m, n)
    cost = (-_pad(S, k)).tolist()
    row_to_col, u, v = _hungarian_min(cost)
    adj = _tight_graph(cost, u, v, _tolerance(S))

    if secondary is not None and not _real_pairs_forced(adj, m, n):
        T = _as_matrix(secondary)
        if T.shape != S.shape:
            raise ValueError(f"secondary shape {T.shape} != similarity shape {S.shape}")
        T = _pad(T, k)
        # Cells outside the tight graph are priced out of the second solve.
        penalty = 2.0 * k * (float(np.abs(T).max()) + 1.0)
        allowed = np.zeros((k, k), dtype=bool)
        for i, cols in enumerate(adj):
            allowed[i, cols] = True
        cost2 = np.where(allowed, -T, penalty).tolist()
        row_to_col, u2, v2 = _hungarian_min(cost2)
        adj2 = _tight_graph(cost2, u2, v2, _tolerance(T))
        adj = [[j for j in adj2[i] if allowed[i, j]] for i in range(k)]

    if not _real_pairs_forced(adj, m, n):
        row_to_col = _lexicographic_canonical(adj, row_to_col, m)
    pairs = tuple((i, row_to_col[i]) for i in range(m) if row_to_col[i] < n)
    return AssignmentResult(pairs, _objective(S, pairs))


def brute_force_assignment(S, secondary=None) -> AssignmentResult:
    """Exhaustive oracle for :func:`solve_assignment` (``min(m, n) <= 8``)."""
    S = _as_matrix(S)
    m, n = S.shape
    if min(m, n) > BRUTE_FORCE_MAX:
        raise ValueError(f"brute force limited to min(m, n) <= {BRUTE_FORCE_MAX}, got {min(m, n)}")
    if m == 0 or n == 0:
        return AssignmentResult((), 0.0)
    T = None if secondary is None else _as_matrix(secondary)
    if m <= n:
        candidates = [tuple(enumerate(cols)) for cols in itertools.permutations(range(n), m)]
    else:
        candidates = [tuple(sorted((i, j) for j, i in enumerate(rows))) for rows in itertools.permutations(range(m), n)]

    tol = _tolerance(S)
    scored = [(_objective(S, p), p) for p in candidates]
    best = max(s for s, _ in scored)
    optima = [p for s, p in scored if s >= best - tol]
    if T is not None:
        tol2 = _tolerance(T)
        sec = [(_objective(T, p), p) for p in optima]
        best2 = max(s for s, _ in sec)
        optima = [p for s, p in sec if s >= best2 - tol2]
    pairs = min(optima)
    return AssignmentResult(pairs, _objective(S, pairs))
