"""Lagrange-dual solver for the max-min hover-planning problem.

The dual function at a weight vector on the simplex is the maximum, over
hover positions, of the weighted sum of worst-case received powers (per
second of hovering). It is evaluated by exhaustive search over a finite
grid and minimized over the simplex with the ellipsoid method; every grid
maximizer met along the way is harvested as a candidate hover location for
the time-sharing step.

Worst-case powers are tabulated once per (model, grid) as a dense
points x receivers matrix, so one dual evaluation is a matrix-vector
product plus an argmax. The argmax reduction is deterministic: ties go to
the lexicographically smallest (x, y), which is the first flat index in
x-major point order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import Scenario, SearchGrid, SolverConfig
from .robust import worst_case_power_arrays
from .scene import ChannelModel, Point2

__all__ = [
    "DualWeights",
    "DualState",
    "CandidateSet",
    "PowerField",
    "TraceRow",
    "weighted_objective",
    "grid_argmax",
    "dual_value",
    "dual_subgradient",
    "ellipsoid_minimize",
    "extract_candidates",
]

# Stop when the best dual value improved by less than this relative amount
# over this many consecutive iterations.
STAGNATION_WINDOW = 50
STAGNATION_RTOL = 1e-9


@dataclass(frozen=True)
class DualWeights:
    """Nonnegative weights summing to one, one per receiver."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("weights must be a nonempty vector")
        if (vals < 0).any():
            raise ValueError("weights must be nonnegative")
        if abs(vals.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {vals.sum()!r}")


@dataclass(frozen=True)
class TraceRow:
    """One dual evaluation: iteration count, full weights, value, grid maximizer."""

    iteration: int
    weights: np.ndarray
    value: float
    maximizer: Point2


@dataclass
class DualState:
    """Ellipsoid iterate plus everything harvested while minimizing the dual."""

    center: np.ndarray
    shape: np.ndarray
    best_value: float
    best_weights: DualWeights
    candidate_pool: list[tuple[Point2, np.ndarray]]
    iteration: int
    field: "PowerField"
    pool_indices: np.ndarray
    tie_tolerance: float
    trace: list[TraceRow] = field(default_factory=list)


@dataclass(frozen=True)
class CandidateSet:
    """Candidate hover locations and their worst-case power matrix (location x receiver)."""

    locations: tuple[Point2, ...]
    power_matrix: np.ndarray

    def __post_init__(self):
        if len(self.locations) < 1:
            raise ValueError("requires at least one candidate")
        if self.power_matrix.shape[0] != len(self.locations):
            raise ValueError("power matrix rows must match locations")


@dataclass(frozen=True)
class PowerField:
    """Worst-case received power tabulated for every receiver at every grid point."""

    grid: SearchGrid
    points_x: np.ndarray
    points_y: np.ndarray
    powers: np.ndarray  # (n_points, n_receivers)

    @classmethod
    def build(cls, scenario: Scenario, grid: SearchGrid | None = None,
              model: ChannelModel | None = None) -> "PowerField":
        grid = grid if grid is not None else scenario.search_grid()
        model = model if model is not None else scenario.segmented_model()
        px, py = grid.point_arrays()
        cols = [
            worst_case_power_arrays(model, px, py, scenario.altitude, r, scenario.tx_power)
            for r in scenario.receivers
        ]
        return cls(grid, px, py, np.column_stack(cols))

    def point(self, idx: int) -> Point2:
        return Point2(float(self.points_x[idx]), float(self.points_y[idx]))

    def argmax(self, weights: np.ndarray, tie_tolerance: float):
        """(best index, best value, near-optimal indices) of the weighted objective."""
        values = self.powers @ weights
        idx = int(np.argmax(values))
        vmax = float(values[idx])
        if not np.isfinite(vmax):
            raise RuntimeError(f"dual objective is not finite (value {vmax!r})")
        near = np.flatnonzero(values >= (1.0 - tie_tolerance) * vmax)
        return idx, vmax, near


def _full_weights(reduced: np.ndarray) -> np.ndarray:
    return np.append(reduced, 1.0 - reduced.sum())


def weighted_objective(weights: DualWeights, q: Point2, scenario: Scenario,
                       model: ChannelModel | None = None) -> float:
    """Weighted sum of closed-form worst-case powers at hover position q."""
    model = model if model is not None else scenario.segmented_model()
    powers = np.array([
        float(worst_case_power_arrays(model, q.x, q.y, scenario.altitude, r, scenario.tx_power))
        for r in scenario.receivers
    ])
    return float(powers @ weights.values)


def grid_argmax(weights: DualWeights, grid: SearchGrid, scenario: Scenario,
                model: ChannelModel | None = None,
                power_field: PowerField | None = None):
    """Exhaustive search of the weighted objective over the grid.

    Returns (maximizer, value, near_optimal) where near_optimal lists every
    grid point within the relative tie tolerance of the maximum.
    """
    f = power_field if power_field is not None else PowerField.build(scenario, grid, model)
    idx, vmax, near = f.argmax(weights.values, scenario.solver.tie_tolerance)
    return f.point(idx), vmax, [f.point(int(i)) for i in near]


def dual_value(weights: DualWeights, grid: SearchGrid, scenario: Scenario,
               model: ChannelModel | None = None,
               power_field: PowerField | None = None) -> float:
    """Per-second dual value: the grid maximum of the weighted worst-case power."""
    f = power_field if power_field is not None else PowerField.build(scenario, grid, model)
    _, vmax, _ = f.argmax(weights.values, scenario.solver.tie_tolerance)
    return vmax


def dual_subgradient(weights: DualWeights, grid: SearchGrid, scenario: Scenario,
                     model: ChannelModel | None = None,
                     power_field: PowerField | None = None) -> np.ndarray:
    """Subgradient of the dual in the reduced coordinates (last weight eliminated)."""
    f = power_field if power_field is not None else PowerField.build(scenario, grid, model)
    idx, _, _ = f.argmax(weights.values, scenario.solver.tie_tolerance)
    row = f.powers[idx]
    return row[:-1] - row[-1]


def ellipsoid_minimize(scenario: Scenario, grid: SearchGrid | None = None,
                       model: ChannelModel | None = None,
                       config: SolverConfig | None = None) -> tuple[DualWeights, DualState]:
    """Minimize the dual over the weight simplex with the ellipsoid method.

    Works in the reduced space of the first K-1 weights. Feasibility cuts
    enforce nonnegativity and the simplex cap; objective cuts use the dual
    subgradient at the grid maximizer. Every objective-cut iterate's
    maximizer and near-optimal set are pooled as candidate hover locations.
    """
    cfg = config if config is not None else scenario.solver
    grid = grid if grid is not None else scenario.search_grid()
    f = PowerField.build(scenario, grid, model)
    k = scenario.n_receivers
    tie = cfg.tie_tolerance

    if k == 1:
        lam = np.array([1.0])
        idx, vmax, near = f.argmax(lam, tie)
        pool = np.unique(np.append(near, idx))
        weights = DualWeights(lam)
        state = DualState(
            center=np.empty(0),
            shape=np.empty((0, 0)),
            best_value=vmax,
            best_weights=weights,
            candidate_pool=[(f.point(int(i)), f.powers[int(i)].copy()) for i in pool],
            iteration=0,
            field=f,
            pool_indices=pool,
            tie_tolerance=tie,
            trace=[TraceRow(0, lam.copy(), vmax, f.point(idx))],
        )
        return weights, state

    n = k - 1
    x = np.full(n, 1.0 / k)
    shape = np.eye(n)
    max_iters = cfg.max_iters if cfg.max_iters is not None else max(200, 80 * n * (n + 1))

    best_value = np.inf
    best_x = x.copy()
    last_improvement = 0
    pool: set[int] = set()
    trace: list[TraceRow] = []
    it = 0

    while it < max_iters:
        it += 1
        negative = np.flatnonzero(x < 0)
        if negative.size:
            g = np.zeros(n)
            g[negative[0]] = -1.0  # keep the half-space where this weight grows
        elif x.sum() > 1.0:
            g = np.ones(n)  # keep the half-space where the weight sum shrinks
        else:
            lam = _full_weights(x)
            idx, vmax, near = f.argmax(lam, tie)
            pool.add(idx)
            pool.update(int(i) for i in near)
            trace.append(TraceRow(it, lam.copy(), vmax, f.point(idx)))
            if vmax < best_value:
                if not np.isfinite(best_value) or best_value - vmax > STAGNATION_RTOL * abs(best_value):
                    last_improvement = it
                best_value = vmax
                best_x = x.copy()
            row = f.powers[idx]
            g = row[:-1] - row[-1]
            if not g.any():
                break  # zero subgradient: exact minimizer found

        pg = shape @ g
        denom = float(g @ pg)
        if denom <= 0:
            break  # ellipsoid degenerated below float resolution
        step = pg / np.sqrt(denom)
        if n == 1:
            x = x - 0.5 * step
            shape = shape / 4.0
        else:
            x = x - step / (n + 1)
            shape = (n * n / (n * n - 1.0)) * (shape - (2.0 / (n + 1)) * np.outer(step, step))
            shape = (shape + shape.T) / 2.0
        if it - last_improvement >= STAGNATION_WINDOW:
            break

    if not np.isfinite(best_value):
        raise RuntimeError("ellipsoid search never reached a feasible weight vector")

    weights = DualWeights(_full_weights(best_x))
    pool_idx = np.array(sorted(pool), dtype=int)
    state = DualState(
        center=x,
        shape=shape,
        best_value=best_value,
        best_weights=weights,
        candidate_pool=[(f.point(int(i)), f.powers[int(i)].copy()) for i in pool_idx],
        iteration=it,
        field=f,
        pool_indices=pool_idx,
        tie_tolerance=tie,
        trace=trace,
    )
    return weights, state


def extract_candidates(state: DualState, scenario: Scenario | None = None) -> CandidateSet:
    """Near-optimal grid points at the best weights, unioned with the harvested pool.

    All entries are grid points, so points closer than half the grid
    resolution are exact duplicates and collapse to one.
    """
    f = state.field
    tie = scenario.solver.tie_tolerance if scenario is not None else state.tie_tolerance
    _, _, near = f.argmax(state.best_weights.values, tie)
    indices = np.unique(np.concatenate([near, state.pool_indices]))
    locations = tuple(f.point(int(i)) for i in indices)
    return CandidateSet(locations, f.powers[indices].copy())
