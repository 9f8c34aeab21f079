"""Scenario and plan documents (YAML) and results tables (CSV).

Documents are versioned, human-editable YAML; parse errors name the
offending field. Results tables are plain CSV with a fixed column order
and 9-significant-digit floats so identical inputs serialize to identical
bytes.
"""

from __future__ import annotations

import csv
import io

import yaml

from .config import Scenario, SearchGrid, SolverConfig
from .dual import TraceRow
from .planner import PositioningPlan, Stop, SweepRow
from .robust import UncertainReceiver
from .scene import ChannelParams, Obstacle, Point2, ProbLoSParams

__all__ = [
    "ScenarioError",
    "parse_scenario",
    "write_scenario",
    "parse_plan",
    "write_plan",
    "write_results",
    "write_trace",
    "RESULTS_HEADER",
]

DOCUMENT_VERSION = 1

RESULTS_HEADER = [
    "sweep_value",
    "policy",
    "planned_energy_J",
    "achieved_energy_J",
    "stop_count",
    "wall_time_s",
]


class ScenarioError(ValueError):
    """Malformed or constraint-violating document; the message names the field."""


def _load_yaml(text: str, kind: str) -> dict:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{kind} document is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{kind} document must be a mapping")
    return data


def _require_version(data: dict, kind: str):
    version = data.pop("version", None)
    if version != DOCUMENT_VERSION:
        raise ScenarioError(f"{kind} document requires version: {DOCUMENT_VERSION}, got {version!r}")


def _number(mapping: dict, key: str, path: str) -> float:
    if key not in mapping:
        raise ScenarioError(f"{path}.{key}: missing required field")
    value = mapping.pop(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _optional_number(mapping: dict, key: str, path: str, default):
    if key not in mapping:
        return default
    return _number(mapping, key, path)


def _reject_unknown(mapping: dict, path: str):
    if mapping:
        name = sorted(mapping)[0]
        raise ScenarioError(f"{path}.{name}: unknown field")


def _mapping(data: dict, key: str, path: str, required: bool = True) -> dict | None:
    if key not in data:
        if required:
            raise ScenarioError(f"{path}{key}: missing required field")
        return None
    value = data.pop(key)
    if not isinstance(value, dict):
        raise ScenarioError(f"{path}{key}: expected a mapping")
    return dict(value)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document; raises ScenarioError naming the field."""
    data = _load_yaml(text, "scenario")
    _require_version(data, "scenario")

    raw_receivers = data.pop("receivers", None)
    if not isinstance(raw_receivers, list) or not raw_receivers:
        raise ScenarioError("receivers: expected a nonempty list")
    receivers = []
    for i, entry in enumerate(raw_receivers):
        path = f"receivers[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{path}: expected a mapping")
        entry = dict(entry)
        x = _number(entry, "x", path)
        y = _number(entry, "y", path)
        eps = _number(entry, "epsilon", path)
        _reject_unknown(entry, path)
        if eps < 0:
            raise ScenarioError(f"{path}.epsilon: must be >= 0, got {eps}")
        receivers.append(UncertainReceiver(Point2(x, y), eps))

    raw_obstacles = data.pop("obstacles", [])
    if raw_obstacles is None:
        raw_obstacles = []
    if not isinstance(raw_obstacles, list):
        raise ScenarioError("obstacles: expected a list")
    obstacles = []
    for i, entry in enumerate(raw_obstacles):
        path = f"obstacles[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{path}: expected a mapping")
        entry = dict(entry)
        fields = {key: _number(entry, key, path)
                  for key in ("x_min", "x_max", "y_min", "y_max", "height")}
        _reject_unknown(entry, path)
        try:
            obstacles.append(Obstacle(**fields))
        except ValueError as exc:
            raise ScenarioError(f"{path}: {exc}") from exc

    altitude = _number(data, "altitude", "scenario")
    tx_power = _number(data, "tx_power", "scenario")
    duration = _number(data, "duration", "scenario")

    channel_map = _mapping(data, "channel", "")
    channel_fields = {key: _number(channel_map, key, "channel")
                      for key in ("alpha_los", "beta_los", "alpha_nlos", "beta_nlos")}
    _reject_unknown(channel_map, "channel")
    try:
        channel = ChannelParams(**channel_fields)
    except ValueError as exc:
        raise ScenarioError(f"channel: {exc}") from exc

    plos_map = _mapping(data, "prob_los", "")
    plos_fields = {
        "alpha0": _number(plos_map, "alpha0", "prob_los"),
        "beta0": _number(plos_map, "beta0", "prob_los"),
        "a_param": _number(plos_map, "a", "prob_los"),
        "b_param": _number(plos_map, "b", "prob_los"),
        "eta": _number(plos_map, "eta", "prob_los"),
    }
    _reject_unknown(plos_map, "prob_los")
    try:
        prob_los = ProbLoSParams(**plos_fields)
    except ValueError as exc:
        raise ScenarioError(f"prob_los: {exc}") from exc

    solver_map = _mapping(data, "solver", "", required=False) or {}
    resolution = _optional_number(solver_map, "grid_resolution", "solver", 0.25)
    pad = _optional_number(solver_map, "grid_pad", "solver", 2.0)
    tie = _optional_number(solver_map, "tie_tolerance", "solver", 1e-6)
    seed_raw = solver_map.pop("seed", 0)
    if isinstance(seed_raw, bool) or not isinstance(seed_raw, int):
        raise ScenarioError(f"solver.seed: expected an integer, got {seed_raw!r}")
    max_iters_raw = solver_map.pop("max_iters", None)
    if max_iters_raw is not None and (isinstance(max_iters_raw, bool)
                                      or not isinstance(max_iters_raw, int)):
        raise ScenarioError(f"solver.max_iters: expected an integer, got {max_iters_raw!r}")
    _reject_unknown(solver_map, "solver")
    try:
        solver = SolverConfig(grid_resolution=resolution, grid_pad=pad, seed=seed_raw,
                              tie_tolerance=tie, max_iters=max_iters_raw)
    except ValueError as exc:
        raise ScenarioError(f"solver: {exc}") from exc

    grid_map = _mapping(data, "grid", "", required=False)
    grid = None
    if grid_map is not None:
        grid_fields = {key: _number(grid_map, key, "grid")
                       for key in ("x_lo", "x_hi", "y_lo", "y_hi", "resolution")}
        _reject_unknown(grid_map, "grid")
        try:
            grid = SearchGrid(**grid_fields)
        except ValueError as exc:
            raise ScenarioError(f"grid: {exc}") from exc

    _reject_unknown(data, "scenario")
    try:
        return Scenario(
            receivers=tuple(receivers),
            obstacles=tuple(obstacles),
            altitude=altitude,
            tx_power=tx_power,
            duration=duration,
            channel=channel,
            prob_los=prob_los,
            grid=grid,
            solver=solver,
        )
    except ValueError as exc:
        raise ScenarioError(f"scenario: {exc}") from exc


def write_scenario(scenario: Scenario) -> str:
    doc = {
        "version": DOCUMENT_VERSION,
        "altitude": scenario.altitude,
        "tx_power": scenario.tx_power,
        "duration": scenario.duration,
        "receivers": [
            {"x": r.approx.x, "y": r.approx.y, "epsilon": r.epsilon}
            for r in scenario.receivers
        ],
        "obstacles": [
            {"x_min": o.x_min, "x_max": o.x_max, "y_min": o.y_min,
             "y_max": o.y_max, "height": o.height}
            for o in scenario.obstacles
        ],
        "channel": {
            "alpha_los": scenario.channel.alpha_los,
            "beta_los": scenario.channel.beta_los,
            "alpha_nlos": scenario.channel.alpha_nlos,
            "beta_nlos": scenario.channel.beta_nlos,
        },
        "prob_los": {
            "alpha0": scenario.prob_los.alpha0,
            "beta0": scenario.prob_los.beta0,
            "a": scenario.prob_los.a_param,
            "b": scenario.prob_los.b_param,
            "eta": scenario.prob_los.eta,
        },
        "solver": {
            "grid_resolution": scenario.solver.grid_resolution,
            "grid_pad": scenario.solver.grid_pad,
            "seed": scenario.solver.seed,
            "tie_tolerance": scenario.solver.tie_tolerance,
        },
    }
    if scenario.solver.max_iters is not None:
        doc["solver"]["max_iters"] = scenario.solver.max_iters
    if scenario.grid is not None:
        doc["grid"] = {
            "x_lo": scenario.grid.x_lo,
            "x_hi": scenario.grid.x_hi,
            "y_lo": scenario.grid.y_lo,
            "y_hi": scenario.grid.y_hi,
            "resolution": scenario.grid.resolution,
        }
    return yaml.safe_dump(doc, sort_keys=False)


def parse_plan(text: str) -> PositioningPlan:
    data = _load_yaml(text, "plan")
    _require_version(data, "plan")
    raw_stops = data.pop("stops", None)
    if not isinstance(raw_stops, list) or not raw_stops:
        raise ScenarioError("stops: expected a nonempty list")
    stops = []
    for i, entry in enumerate(raw_stops):
        path = f"stops[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{path}: expected a mapping")
        entry = dict(entry)
        x = _number(entry, "x", path)
        y = _number(entry, "y", path)
        duration = _number(entry, "duration", path)
        _reject_unknown(entry, path)
        if duration <= 0:
            raise ScenarioError(f"{path}.duration: must be > 0, got {duration}")
        stops.append(Stop(Point2(x, y), duration))
    min_energy = _number(data, "min_energy", "plan")
    raw_per = data.pop("per_receiver_energy", None)
    if not isinstance(raw_per, list) or not raw_per:
        raise ScenarioError("per_receiver_energy: expected a nonempty list")
    per = []
    for i, value in enumerate(raw_per):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"per_receiver_energy[{i}]: expected a number, got {value!r}")
        per.append(float(value))
    _reject_unknown(data, "plan")
    try:
        return PositioningPlan(tuple(stops), min_energy, tuple(per))
    except ValueError as exc:
        raise ScenarioError(f"plan: {exc}") from exc


def write_plan(plan: PositioningPlan) -> str:
    doc = {
        "version": DOCUMENT_VERSION,
        "stops": [
            {"x": s.location.x, "y": s.location.y, "duration": s.duration}
            for s in plan.stops
        ],
        "min_energy": plan.min_energy,
        "per_receiver_energy": list(plan.per_receiver_energy),
    }
    return yaml.safe_dump(doc, sort_keys=False)


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


def write_results(rows) -> str:
    """Sweep/comparison rows as CSV; header always present."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for row in rows:
        sweep_value = "" if row.sweep_value is None else _fmt(row.sweep_value)
        writer.writerow([
            sweep_value,
            row.policy,
            _fmt(row.planned_energy),
            _fmt(row.achieved_energy),
            str(row.stop_count),
            _fmt(row.wall_time_s),
        ])
    return out.getvalue()


def write_trace(trace: list[TraceRow], n_receivers: int) -> str:
    """Dual-iteration trace as CSV: weights, dual value, and grid maximizer per row."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ["iteration"]
    header += [f"lambda_{k + 1}" for k in range(n_receivers)]
    header += ["dual_value_w", "q_x_m", "q_y_m"]
    writer.writerow(header)
    for row in trace:
        record = [str(row.iteration)]
        record += [_fmt(v) for v in row.weights]
        record += [_fmt(row.value), _fmt(row.maximizer.x), _fmt(row.maximizer.y)]
        writer.writerow(record)
    return out.getvalue()
