"""Hover-duration linear program.

Given candidate hover locations with their worst-case power matrix, split
the charging duration among them to maximize the minimum energy any
receiver collects:

    max E  s.t.  sum_g tau_g * power[g, k] >= E  for every receiver k,
                 sum_g tau_g = total_time,  tau >= 0.

Solved with a dense two-phase simplex using Bland's rule; problem sizes
are tiny (tens of candidates, a handful of receivers), so exact vertex
solutions beat any iterative method here. The instance is normalized by
its largest power and by the total time before pivoting so that the
1e-10 reduced-cost tolerance is meaningful at any physical scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TimeShareProblem",
    "TimeShareSolution",
    "solve_timeshare",
    "vertex_enumeration_oracle",
]

_RC_TOL = 1e-10  # reduced-cost optimality tolerance (normalized units)
_MAX_PIVOTS = 10_000


@dataclass(frozen=True)
class TimeShareProblem:
    power_matrix: np.ndarray  # (n_stops, n_receivers), watts, nonnegative
    total_time: float

    def __post_init__(self):
        m = np.asarray(self.power_matrix, dtype=float)
        object.__setattr__(self, "power_matrix", m)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError("power matrix must be 2-D and nonempty")
        if (m < 0).any():
            raise ValueError("powers must be nonnegative")
        if not self.total_time > 0:
            raise ValueError("requires total_time > 0")


@dataclass(frozen=True)
class TimeShareSolution:
    durations: np.ndarray  # seconds per candidate, zero entries retained
    energy: float  # joules


def _standard_form(problem: TimeShareProblem):
    """Equality-form LP over [tau/T, E_norm, surplus] with unit time and unit peak power."""
    q = problem.power_matrix
    scale = float(q.max())
    qn = q / scale
    n_stops, n_recv = qn.shape
    n_vars = n_stops + 1 + n_recv
    a = np.zeros((n_recv + 1, n_vars))
    a[:n_recv, :n_stops] = qn.T
    a[:n_recv, n_stops] = -1.0
    a[:n_recv, n_stops + 1:] = -np.eye(n_recv)
    a[n_recv, :n_stops] = 1.0
    b = np.zeros(n_recv + 1)
    b[n_recv] = 1.0
    c = np.zeros(n_vars)
    c[n_stops] = 1.0
    return a, b, c, scale


def _pivot(tableau: np.ndarray, basis: list[int], row: int, col: int):
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau: np.ndarray, basis: list[int], allowed: np.ndarray):
    """Bland-rule pivoting on a tableau whose last row holds z - c; maximization."""
    m = tableau.shape[0] - 1
    for _ in range(_MAX_PIVOTS):
        rc = tableau[-1, :-1]
        entering = -1
        for j in np.flatnonzero(allowed):
            if rc[j] < -_RC_TOL:
                entering = int(j)
                break
        if entering < 0:
            return
        col = tableau[:m, entering]
        rows = np.flatnonzero(col > _RC_TOL)
        if rows.size == 0:
            raise RuntimeError("time-share LP is unbounded; power matrix is malformed")
        ratios = tableau[rows, -1] / col[rows]
        best = min(zip(ratios, (basis[int(i)] for i in rows), (int(i) for i in rows)))
        _pivot(tableau, basis, best[2], entering)
    raise RuntimeError("simplex pivot limit exceeded; basis is numerically degenerate")


def _simplex_max(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Maximize c @ x subject to a @ x = b (b >= 0), x >= 0."""
    m, n = a.shape
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = a
    tableau[:m, n:n + m] = np.eye(m)
    tableau[:m, -1] = b
    basis = list(range(n, n + m))

    # Phase 1: maximize minus the artificial sum; last row holds z - c.
    tableau[-1, :] = -tableau[:m].sum(axis=0)
    tableau[-1, n:n + m] = 0.0
    allowed = np.ones(n + m, dtype=bool)
    _run_simplex(tableau, basis, allowed)
    if tableau[-1, -1] < -1e-8:
        raise RuntimeError("time-share LP is infeasible; constraints are inconsistent")

    # Drive any artificial variables still basic (at zero level) out of the basis.
    for i in range(m):
        if basis[i] >= n:
            pivots = np.flatnonzero(np.abs(tableau[i, :n]) > _RC_TOL)
            if pivots.size:
                _pivot(tableau, basis, i, int(pivots[0]))

    # Phase 2: real objective; artificial columns may never re-enter.
    allowed[n:] = False
    tableau[-1, :] = 0.0
    tableau[-1, :n] = -c
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0.0:
            tableau[-1, :] += c[basis[i]] * tableau[i, :]
    _run_simplex(tableau, basis, allowed)

    x = np.zeros(n)
    for i, col in enumerate(basis):
        if col < n:
            x[col] = tableau[i, -1]
    return x


def solve_timeshare(problem: TimeShareProblem) -> TimeShareSolution:
    """Optimal hover durations and the achieved worst-case minimum energy."""
    n_stops = problem.power_matrix.shape[0]
    if problem.power_matrix.max() == 0.0:
        durations = np.zeros(n_stops)
        durations[0] = problem.total_time
        return TimeShareSolution(durations, 0.0)
    a, b, c, scale = _standard_form(problem)
    x = _simplex_max(a, b, c)
    durations = np.clip(x[:n_stops], 0.0, None) * problem.total_time
    energy = float(x[n_stops] * scale * problem.total_time)
    return TimeShareSolution(durations, energy)


def vertex_enumeration_oracle(problem: TimeShareProblem) -> TimeShareSolution:
    """Best basic feasible solution by brute-force basis enumeration (test oracle).

    Only intended for desk-scale instances; rejects more than 11 candidate
    locations outright.
    """
    n_stops = problem.power_matrix.shape[0]
    if n_stops + 1 > 12:
        raise ValueError("vertex enumeration is limited to 11 candidate locations")
    if problem.power_matrix.max() == 0.0:
        durations = np.zeros(n_stops)
        durations[0] = problem.total_time
        return TimeShareSolution(durations, 0.0)
    a, b, c, scale = _standard_form(problem)
    m, n = a.shape
    best_obj = -np.inf
    best_x = None
    for cols in itertools.combinations(range(n), m):
        sub = a[:, cols]
        try:
            xb = np.linalg.solve(sub, b)
        except np.linalg.LinAlgError:
            continue
        if (xb < -1e-9).any() or not np.isfinite(xb).all():
            continue
        obj = float(c[list(cols)] @ xb)
        if obj > best_obj + 1e-15:
            best_obj = obj
            best_x = (cols, xb)
    if best_x is None:
        raise RuntimeError("no basic feasible solution found")
    x = np.zeros(n)
    for col, val in zip(*best_x):
        x[col] = val
    durations = np.clip(x[:n_stops], 0.0, None) * problem.total_time
    energy = float(x[n_stops] * scale * problem.total_time)
    return TimeShareSolution(durations, energy)
