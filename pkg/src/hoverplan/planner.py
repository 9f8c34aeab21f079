"""End-to-end hover planning, plan evaluation, and design-policy benchmarks.

A plan is computed under the channel model a design policy assumes (exact
radio map, pure LoS, or probabilistic LoS) and then scored under the true
segmented environment with the robust worst-case semantics. Comparing the
three policies on one scenario reproduces the radio-map-versus-benchmark
methodology; sweeps vary receiver separation or transmit power.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, replace

import numpy as np

from .config import Scenario, SearchGrid
from .dual import CandidateSet, PowerField, ellipsoid_minimize, extract_candidates
from .robust import (
    CLOSED_FORM,
    RobustMode,
    SampledBall,
    UncertainReceiver,
    worst_case_energy,
)
from .scene import ChannelModel, Point2, ProbabilisticLoS, PureLoS
from .timeshare import TimeShareProblem, solve_timeshare

__all__ = [
    "DesignPolicy",
    "Stop",
    "PositioningPlan",
    "PlanScore",
    "EvaluationReport",
    "SweepRow",
    "DEFAULT_BALL_SAMPLES",
    "solve_plan",
    "evaluate_plan",
    "compare_designs",
    "sweep",
    "brute_force_plan_oracle",
]

DEFAULT_BALL_SAMPLES = 4096

# Durations at or below this fraction of the total are treated as zero stops.
_ZERO_STOP_RTOL = 1e-9


class DesignPolicy(enum.Enum):
    """Which channel knowledge the planner assumes when optimizing."""

    RADIO_MAP = "radiomap"
    ASSUME_LOS = "los"
    ASSUME_PROB_LOS = "plos"

    def model_for(self, scenario: Scenario) -> ChannelModel:
        if self is DesignPolicy.RADIO_MAP:
            return scenario.segmented_model()
        if self is DesignPolicy.ASSUME_LOS:
            return PureLoS(scenario.prob_los.alpha0, scenario.prob_los.beta0)
        return ProbabilisticLoS(scenario.prob_los)


@dataclass(frozen=True)
class Stop:
    location: Point2
    duration: float


@dataclass(frozen=True)
class PositioningPlan:
    """Hover stops with durations plus the energies promised by the planning model."""

    stops: tuple[Stop, ...]
    min_energy: float
    per_receiver_energy: tuple[float, ...]

    def __post_init__(self):
        if len(self.stops) < 1:
            raise ValueError("plan requires at least one stop")
        if any(s.duration <= 0 for s in self.stops):
            raise ValueError("plan stops must have positive durations")
        lo = min(self.per_receiver_energy)
        if abs(lo - self.min_energy) > 1e-9 * max(abs(lo), 1e-300):
            raise ValueError("min_energy must equal the smallest per-receiver energy")

    @property
    def total_time(self) -> float:
        return float(sum(s.duration for s in self.stops))

    def stop_pairs(self) -> list[tuple[Point2, float]]:
        return [(s.location, s.duration) for s in self.stops]


@dataclass(frozen=True)
class PlanScore:
    """Worst-case delivered energy of a plan under one evaluation mode."""

    min_energy: float
    per_receiver_energy: tuple[float, ...]


@dataclass(frozen=True)
class EvaluationReport:
    """One policy's planned energy and its achieved energy under the true environment."""

    policy: str
    plan: PositioningPlan
    planned_energy: float
    achieved_closed: float
    achieved_sampled: float
    per_receiver_closed: tuple[float, ...]
    per_receiver_sampled: tuple[float, ...]


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float | None  # None for single-scenario comparisons
    policy: str
    planned_energy: float
    achieved_energy: float
    stop_count: int
    wall_time_s: float


def _assemble_plan(locations, power_matrix, durations, total_time) -> PositioningPlan:
    durations = np.asarray(durations, dtype=float)
    keep = np.flatnonzero(durations > _ZERO_STOP_RTOL * total_time)
    tau = durations[keep]
    tau = tau * (total_time / tau.sum())
    per_receiver = tau @ power_matrix[keep]
    stops = tuple(Stop(locations[int(i)], float(t)) for i, t in zip(keep, tau))
    return PositioningPlan(stops, float(per_receiver.min()), tuple(float(e) for e in per_receiver))


def _solve_pipeline(scenario: Scenario, policy: DesignPolicy):
    """Dual search, candidate extraction, and the time-sharing LP for one policy."""
    model = policy.model_for(scenario)
    grid = scenario.search_grid()
    _, state = ellipsoid_minimize(scenario, grid, model)
    candidates = extract_candidates(state, scenario)
    solution = solve_timeshare(TimeShareProblem(candidates.power_matrix, scenario.duration))
    plan = _assemble_plan(candidates.locations, candidates.power_matrix,
                          solution.durations, scenario.duration)
    return plan, state, candidates


def solve_plan(scenario: Scenario, policy: DesignPolicy = DesignPolicy.RADIO_MAP) -> PositioningPlan:
    """Maximize the worst-case minimum delivered energy under the policy's model.

    Stops are emitted in candidate order; with travel time ignored any
    visiting order is optimal.
    """
    plan, _, _ = _solve_pipeline(scenario, policy)
    return plan


def evaluate_plan(scenario: Scenario, plan: PositioningPlan,
                  mode: RobustMode = CLOSED_FORM) -> PlanScore:
    """Score a plan under the true segmented environment with robust semantics."""
    total = plan.total_time
    if abs(total - scenario.duration) > 1e-9 * max(scenario.duration, 1.0):
        raise ValueError(
            f"plan duration {total!r} does not match scenario duration {scenario.duration!r}"
        )
    model = scenario.segmented_model()
    pairs = plan.stop_pairs()
    per = tuple(
        worst_case_energy(model, pairs, scenario.altitude, r, scenario.tx_power, mode,
                          total_time=scenario.duration)
        for r in scenario.receivers
    )
    return PlanScore(min(per), per)


def compare_designs(scenario: Scenario,
                    ball_samples: int = DEFAULT_BALL_SAMPLES) -> list[EvaluationReport]:
    """Plan under all three policies and score each under the true environment.

    Reports are sorted by achieved closed-form energy, best first.
    """
    sampled_mode = SampledBall(ball_samples, scenario.solver.seed)
    reports = []
    for policy in DesignPolicy:
        plan = solve_plan(scenario, policy)
        closed = evaluate_plan(scenario, plan, CLOSED_FORM)
        sampled = evaluate_plan(scenario, plan, sampled_mode)
        reports.append(EvaluationReport(
            policy=policy.value,
            plan=plan,
            planned_energy=plan.min_energy,
            achieved_closed=closed.min_energy,
            achieved_sampled=sampled.min_energy,
            per_receiver_closed=closed.per_receiver_energy,
            per_receiver_sampled=sampled.per_receiver_energy,
        ))
    reports.sort(key=lambda rep: (-rep.achieved_closed, rep.policy))
    return reports


def _with_separation(scenario: Scenario, separation: float) -> Scenario:
    """Move the two receivers to the given distance apart along their current axis."""
    if scenario.n_receivers != 2:
        raise ValueError("separation sweeps require exactly two receivers")
    a, b = scenario.receivers
    dx = b.approx.x - a.approx.x
    dy = b.approx.y - a.approx.y
    norm = float(np.hypot(dx, dy))
    if norm == 0:
        raise ValueError("receivers coincide; separation axis is undefined")
    mx = (a.approx.x + b.approx.x) / 2.0
    my = (a.approx.y + b.approx.y) / 2.0
    ux, uy = dx / norm, dy / norm
    half = separation / 2.0
    moved = (
        replace(a, approx=Point2(mx - half * ux, my - half * uy)),
        replace(b, approx=Point2(mx + half * ux, my + half * uy)),
    )
    return replace(scenario, receivers=moved)


def sweep(scenario: Scenario, axis: str, values,
          ball_samples: int = DEFAULT_BALL_SAMPLES) -> list[SweepRow]:
    """Run the three-policy comparison for each value of the sweep axis.

    axis is "separation" (two-receiver scenarios) or "tx_power". One row per
    (value, policy), policies in alphabetical order.
    """
    values = list(values)
    if not values:
        raise ValueError("sweep requires at least one value")
    if axis not in ("separation", "tx_power"):
        raise ValueError(f"unknown sweep axis {axis!r}")
    rows = []
    for value in values:
        if axis == "separation":
            current = _with_separation(scenario, float(value))
        else:
            current = replace(scenario, tx_power=float(value))
        for policy in sorted(DesignPolicy, key=lambda p: p.value):
            start = time.perf_counter()
            plan = solve_plan(current, policy)
            achieved = evaluate_plan(current, plan, CLOSED_FORM)
            elapsed = time.perf_counter() - start
            rows.append(SweepRow(
                sweep_value=float(value),
                policy=policy.value,
                planned_energy=plan.min_energy,
                achieved_energy=achieved.min_energy,
                stop_count=len(plan.stops),
                wall_time_s=elapsed,
            ))
    return rows


def _pareto_indices(powers: np.ndarray) -> np.ndarray:
    """Rows not weakly dominated by another row (first of any exact-tie group kept)."""
    n = powers.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        ge = (powers >= powers[i]).all(axis=1)
        gt = (powers > powers[i]).any(axis=1)
        equal = (powers == powers[i]).all(axis=1)
        dominators = ge & (gt | (equal & (np.arange(n) < i)))
        dominators[i] = False
        if dominators.any():
            keep[i] = False
    return np.flatnonzero(keep)


def brute_force_plan_oracle(scenario: Scenario, max_stops: int,
                            policy: DesignPolicy = DesignPolicy.RADIO_MAP) -> PositioningPlan:
    """Global optimum over all stop subsets of a coarse grid (test oracle).

    Enumerates every subset of grid points of size <= max_stops and solves
    the duration LP for each. Weakly dominated grid points are discarded
    first; a dominated stop can always be replaced by its dominator without
    lowering any receiver's energy, so the reduction is exact. Scale guards:
    at most a 20x20 grid, 3 stops, and 3 receivers.
    """
    grid = scenario.search_grid()
    if grid.n_points > 400:
        raise ValueError("oracle limited to grids of at most 400 points")
    if max_stops > 3 or max_stops < 1:
        raise ValueError("oracle limited to 1..3 stops")
    if scenario.n_receivers > 3:
        raise ValueError("oracle limited to 3 receivers")
    field = PowerField.build(scenario, grid, policy.model_for(scenario))
    frontier = _pareto_indices(field.powers)
    best_energy = -np.inf
    best = None
    for size in range(1, max_stops + 1):
        for combo in itertools.combinations(frontier.tolist(), size):
            matrix = field.powers[list(combo)]
            solution = solve_timeshare(TimeShareProblem(matrix, scenario.duration))
            if solution.energy > best_energy + 1e-15:
                best_energy = solution.energy
                best = (combo, matrix, solution.durations)
    combo, matrix, durations = best
    locations = tuple(field.point(int(i)) for i in combo)
    return _assemble_plan(locations, matrix, durations, scenario.duration)
