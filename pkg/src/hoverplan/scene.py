"""World geometry and air-to-ground channel models.

A channel model maps a transmitter position (q, h) and a ground receiver
position w to a path-loss exponent and a reference gain; the received RF
power then follows a power law in the 3-D transmitter-receiver distance.
Three models are supported: a segmented radio map (LoS/NLoS selected by
geometric obstacle blockage), a pure line-of-sight model, and a
probabilistic-LoS model whose expected gain is a logistic function of the
elevation angle.

All gains are linear (not dB), distances in meters, powers in watts.
Every operation is a pure function; array variants broadcast over
positions so grid-scale evaluation stays vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Point2",
    "Obstacle",
    "ChannelParams",
    "ProbLoSParams",
    "SegmentedRadioMap",
    "PureLoS",
    "ProbabilisticLoS",
    "ChannelModel",
    "los_blocked",
    "blocked_mask",
    "link_params",
    "link_params_arrays",
    "rf_power",
    "rf_power_arrays",
]


@dataclass(frozen=True)
class Point2:
    """Horizontal position in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned box standing on the ground, spanning z in [0, height]."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    height: float

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("obstacle requires x_min < x_max")
        if not self.y_min < self.y_max:
            raise ValueError("obstacle requires y_min < y_max")
        if not self.height > 0:
            raise ValueError("obstacle requires height > 0")


@dataclass(frozen=True)
class ChannelParams:
    """LoS/NLoS parameter pairs of the segmented radio-map model.

    A blocked link must never be better than an unblocked one at the same
    distance, so the exponents and gains are ordered accordingly.
    """

    alpha_los: float
    beta_los: float
    alpha_nlos: float
    beta_nlos: float

    def __post_init__(self):
        if not (self.alpha_nlos >= self.alpha_los > 0):
            raise ValueError(
                "monotonicity requires alpha_nlos >= alpha_los > 0 "
                f"(got alpha_los={self.alpha_los}, alpha_nlos={self.alpha_nlos})"
            )
        if not (0 < self.beta_nlos <= self.beta_los):
            raise ValueError(
                "monotonicity requires 0 < beta_nlos <= beta_los "
                f"(got beta_los={self.beta_los}, beta_nlos={self.beta_nlos})"
            )


@dataclass(frozen=True)
class ProbLoSParams:
    """Probabilistic-LoS model parameters.

    The LoS probability is logistic in the elevation angle theta (degrees):
    P = 1 / (1 + a * exp(-b * (theta - a))); NLoS contributions are
    attenuated by eta.
    """

    alpha0: float
    beta0: float
    a_param: float
    b_param: float
    eta: float

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError("requires alpha0 > 0")
        if not self.beta0 > 0:
            raise ValueError("requires beta0 > 0")
        if not 0 < self.eta <= 1:
            raise ValueError("requires eta in (0, 1]")


@dataclass(frozen=True)
class SegmentedRadioMap:
    """Exact propagation knowledge: LoS/NLoS selected by obstacle blockage."""

    obstacles: tuple[Obstacle, ...]
    params: ChannelParams


@dataclass(frozen=True)
class PureLoS:
    """Conventional free-space-style model: one exponent, one gain."""

    alpha0: float
    beta0: float


@dataclass(frozen=True)
class ProbabilisticLoS:
    """Expected-gain model blending LoS and attenuated NLoS."""

    params: ProbLoSParams


ChannelModel = SegmentedRadioMap | PureLoS | ProbabilisticLoS


def _axis_interval(start, end, lo, hi, shape):
    """Open parameter interval where start + t*(end - start) is strictly inside (lo, hi)."""
    s = np.broadcast_to(np.asarray(start, dtype=float), shape)
    e = np.broadcast_to(np.asarray(end, dtype=float), shape)
    d = e - s
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = (lo - s) / d
        t1 = (hi - s) / d
    a = np.minimum(t0, t1)
    b = np.maximum(t0, t1)
    parallel = d == 0
    inside = (s > lo) & (s < hi)
    a = np.where(parallel, np.where(inside, -np.inf, np.inf), a)
    b = np.where(parallel, np.where(inside, np.inf, -np.inf), b)
    return a, b


def blocked_mask(obstacles, qx, qy, h, wx, wy):
    """Slab test: where does the segment (qx, qy, h) -> (wx, wy, 0) pierce a box interior.

    Broadcasts over the position arguments. Grazing contact with a face
    (a measure-zero touch) does not count as blocked.
    """
    shape = np.broadcast(
        np.asarray(qx, dtype=float),
        np.asarray(qy, dtype=float),
        np.asarray(wx, dtype=float),
        np.asarray(wy, dtype=float),
    ).shape
    blocked = np.zeros(shape, dtype=bool)
    for box in obstacles:
        t_lo = np.zeros(shape)
        t_hi = np.ones(shape)
        for start, end, lo, hi in (
            (qx, wx, box.x_min, box.x_max),
            (qy, wy, box.y_min, box.y_max),
            (h, 0.0, 0.0, box.height),
        ):
            a, b = _axis_interval(start, end, lo, hi, shape)
            t_lo = np.maximum(t_lo, a)
            t_hi = np.minimum(t_hi, b)
        blocked |= t_lo < t_hi
    return blocked


def los_blocked(q: Point2, h: float, w: Point2, obstacles) -> bool:
    """True iff any obstacle interior intersects the segment from (q, h) to (w, 0)."""
    if not h > 0:
        raise ValueError("requires h > 0")
    return bool(blocked_mask(tuple(obstacles), q.x, q.y, h, w.x, w.y))


def link_params_arrays(model: ChannelModel, qx, qy, h, wx, wy):
    """Path-loss exponent and reference gain for each (q, w) pair; broadcasts."""
    if isinstance(model, SegmentedRadioMap):
        blocked = blocked_mask(model.obstacles, qx, qy, h, wx, wy)
        p = model.params
        alpha = np.where(blocked, p.alpha_nlos, p.alpha_los)
        beta = np.where(blocked, p.beta_nlos, p.beta_los)
        return alpha, beta
    if isinstance(model, PureLoS):
        shape = np.broadcast(np.asarray(qx, float), np.asarray(qy, float),
                             np.asarray(wx, float), np.asarray(wy, float)).shape
        return np.full(shape, float(model.alpha0)), np.full(shape, float(model.beta0))
    if isinstance(model, ProbabilisticLoS):
        p = model.params
        dx = np.asarray(qx, float) - np.asarray(wx, float)
        dy = np.asarray(qy, float) - np.asarray(wy, float)
        d3 = np.sqrt(h * h + dx * dx + dy * dy)
        theta = np.degrees(np.arcsin(np.clip(h / d3, -1.0, 1.0)))
        p_los = 1.0 / (1.0 + p.a_param * np.exp(-p.b_param * (theta - p.a_param)))
        beta = p.beta0 * (p_los + p.eta * (1.0 - p_los))
        return np.full(beta.shape, float(p.alpha0)), beta
    raise TypeError(f"unknown channel model: {model!r}")


def link_params(model: ChannelModel, q: Point2, h: float, w: Point2) -> tuple[float, float]:
    """(alpha, beta) governing the link from the transmitter at (q, h) to w."""
    if not h > 0:
        raise ValueError("requires h > 0")
    alpha, beta = link_params_arrays(model, q.x, q.y, h, w.x, w.y)
    return float(alpha), float(beta)


def rf_power_arrays(model: ChannelModel, qx, qy, h, wx, wy, p_tx):
    """Received RF power beta * p_tx / (h^2 + |q - w|^2)^(alpha/2); broadcasts."""
    alpha, beta = link_params_arrays(model, qx, qy, h, wx, wy)
    dx = np.asarray(qx, float) - np.asarray(wx, float)
    dy = np.asarray(qy, float) - np.asarray(wy, float)
    return beta * p_tx / (h * h + dx * dx + dy * dy) ** (alpha / 2.0)


def rf_power(model: ChannelModel, q: Point2, h: float, w: Point2, p_tx: float) -> float:
    """Instantaneous RF power delivered to a receiver at w; strictly positive."""
    if not p_tx > 0:
        raise ValueError("requires p_tx > 0")
    if not h > 0:
        raise ValueError("requires h > 0")
    return float(rf_power_arrays(model, q.x, q.y, h, w.x, w.y, p_tx))
