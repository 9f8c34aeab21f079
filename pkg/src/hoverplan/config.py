"""Problem-instance and solver configuration dataclasses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .robust import UncertainReceiver
from .scene import ChannelParams, Obstacle, ProbLoSParams, SegmentedRadioMap

__all__ = ["SearchGrid", "SolverConfig", "Scenario"]


@dataclass(frozen=True)
class SearchGrid:
    """Rectangular hover-location search region sampled at a fixed resolution."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    resolution: float

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise ValueError("requires x_lo < x_hi")
        if not self.y_lo < self.y_hi:
            raise ValueError("requires y_lo < y_hi")
        if not self.resolution > 0:
            raise ValueError("requires resolution > 0")

    def axis_x(self) -> np.ndarray:
        return _axis(self.x_lo, self.x_hi, self.resolution)

    def axis_y(self) -> np.ndarray:
        return _axis(self.y_lo, self.y_hi, self.resolution)

    def point_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """All grid points in x-major order, so flat index order is lexicographic in (x, y)."""
        xs = self.axis_x()
        ys = self.axis_y()
        return np.repeat(xs, ys.size), np.tile(ys, xs.size)

    @property
    def n_points(self) -> int:
        return self.axis_x().size * self.axis_y().size


def _axis(lo: float, hi: float, res: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / res + 1e-9)) + 1
    return lo + res * np.arange(n)


@dataclass(frozen=True)
class SolverConfig:
    """Tunable solver knobs; defaults suit meter-scale scenes."""

    grid_resolution: float = 0.25
    grid_pad: float = 2.0
    seed: int = 0
    tie_tolerance: float = 1e-6
    max_iters: int | None = None

    def __post_init__(self):
        if not self.grid_resolution > 0:
            raise ValueError("requires grid_resolution > 0")
        if not self.grid_pad >= 0:
            raise ValueError("requires grid_pad >= 0")
        if not self.tie_tolerance >= 0:
            raise ValueError("requires tie_tolerance >= 0")
        if self.max_iters is not None and not self.max_iters >= 1:
            raise ValueError("requires max_iters >= 1 when set")


@dataclass(frozen=True)
class Scenario:
    """Full problem instance: receivers, obstacles, platform, channel, solver knobs."""

    receivers: tuple[UncertainReceiver, ...]
    obstacles: tuple[Obstacle, ...]
    altitude: float
    tx_power: float
    duration: float
    channel: ChannelParams
    prob_los: ProbLoSParams
    grid: SearchGrid | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if len(self.receivers) < 1:
            raise ValueError("requires at least one receiver")
        if not self.altitude > 0:
            raise ValueError("requires altitude > 0")
        if not self.tx_power > 0:
            raise ValueError("requires tx_power > 0")
        if not self.duration > 0:
            raise ValueError("requires duration > 0")

    @property
    def n_receivers(self) -> int:
        return len(self.receivers)

    def segmented_model(self) -> SegmentedRadioMap:
        """The true propagation environment of this scenario."""
        return SegmentedRadioMap(self.obstacles, self.channel)

    def search_grid(self) -> SearchGrid:
        """Explicit grid if set, else the receiver bounding box padded by epsilon + pad.

        The search region is derived from the approximate locations only
        (the true ones are unknown to the solver); the pad leaves room for
        blockage-avoiding hover offsets.
        """
        if self.grid is not None:
            return self.grid
        pad = self.solver.grid_pad
        res = self.solver.grid_resolution
        x_lo = min(r.approx.x - r.epsilon for r in self.receivers) - pad
        x_hi = max(r.approx.x + r.epsilon for r in self.receivers) + pad
        y_lo = min(r.approx.y - r.epsilon for r in self.receivers) - pad
        y_hi = max(r.approx.y + r.epsilon for r in self.receivers) + pad
        if not x_lo < x_hi:
            x_lo, x_hi = x_lo - res / 2, x_hi + res / 2
        if not y_lo < y_hi:
            y_lo, y_hi = y_lo - res / 2, y_hi + res / 2
        return SearchGrid(x_lo, x_hi, y_lo, y_hi, res)
