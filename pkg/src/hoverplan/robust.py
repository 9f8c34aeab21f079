"""Worst-case channel evaluation over the receiver location-uncertainty disk.

Each receiver position is known only up to a disk of radius epsilon around
an approximate location. The closed-form mode places the receiver at the
disk point farthest from the transmitter (exact whenever path loss is
monotone in distance); the sampled mode takes a minimum over uniform disk
samples and serves as a verification oracle and conservative evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scene import ChannelModel, Point2, link_params_arrays, rf_power_arrays

__all__ = [
    "UncertainReceiver",
    "ClosedForm",
    "SampledBall",
    "RobustMode",
    "CLOSED_FORM",
    "worst_case_location",
    "worst_case_power",
    "worst_case_power_arrays",
    "worst_case_energy",
]


@dataclass(frozen=True)
class UncertainReceiver:
    """Approximate receiver location plus a hard bound on the position error."""

    approx: Point2
    epsilon: float

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("requires epsilon >= 0")


@dataclass(frozen=True)
class ClosedForm:
    """Adversarial location solved analytically, applied instant by instant."""


@dataclass(frozen=True)
class SampledBall:
    """Minimum over uniform disk samples; one fixed adversary per evaluation."""

    n_samples: int
    rng_seed: int

    def __post_init__(self):
        if not self.n_samples >= 1:
            raise ValueError("requires n_samples >= 1")


RobustMode = ClosedForm | SampledBall

CLOSED_FORM = ClosedForm()


def worst_case_location_arrays(qx, qy, wx, wy, epsilon):
    """Disk point farthest from (qx, qy); +x convention when q coincides with the center."""
    dx = np.asarray(wx, float) - np.asarray(qx, float)
    dy = np.asarray(wy, float) - np.asarray(qy, float)
    dist = np.sqrt(dx * dx + dy * dy)
    with np.errstate(divide="ignore", invalid="ignore"):
        ux = np.where(dist > 0, dx / dist, 1.0)
        uy = np.where(dist > 0, dy / dist, 0.0)
    return wx + epsilon * ux, wy + epsilon * uy


def worst_case_location(q: Point2, r: UncertainReceiver) -> Point2:
    """Point of the uncertainty disk farthest from the transmitter position q."""
    sx, sy = worst_case_location_arrays(q.x, q.y, r.approx.x, r.approx.y, r.epsilon)
    return Point2(float(sx), float(sy))


def worst_case_power_arrays(model: ChannelModel, qx, qy, h, r: UncertainReceiver, p_tx):
    """Closed-form worst-case power at each transmitter position; broadcasts over q.

    The horizontal distance term is |q - w_approx| + epsilon and the channel
    parameters are looked up at the adversarial disk point.
    """
    dx = np.asarray(qx, float) - r.approx.x
    dy = np.asarray(qy, float) - r.approx.y
    dist = np.sqrt(dx * dx + dy * dy)
    sx, sy = worst_case_location_arrays(qx, qy, r.approx.x, r.approx.y, r.epsilon)
    alpha, beta = link_params_arrays(model, qx, qy, h, sx, sy)
    worst = dist + r.epsilon
    return beta * p_tx / (h * h + worst * worst) ** (alpha / 2.0)


def _disk_samples(r: UncertainReceiver, mode: SampledBall):
    """Uniform samples of the uncertainty disk, deterministic for a fixed seed."""
    rng = np.random.default_rng(mode.rng_seed)
    rad = r.epsilon * np.sqrt(rng.random(mode.n_samples))
    ang = 2.0 * np.pi * rng.random(mode.n_samples)
    return r.approx.x + rad * np.cos(ang), r.approx.y + rad * np.sin(ang)


def worst_case_power(
    model: ChannelModel,
    q: Point2,
    h: float,
    r: UncertainReceiver,
    p_tx: float,
    mode: RobustMode = CLOSED_FORM,
) -> float:
    """Worst-case received power over the uncertainty disk at a hover position q."""
    if not p_tx > 0:
        raise ValueError("requires p_tx > 0")
    if isinstance(mode, ClosedForm):
        return float(worst_case_power_arrays(model, q.x, q.y, h, r, p_tx))
    sx, sy = _disk_samples(r, mode)
    star = worst_case_location(q, r)
    xs = np.append(sx, [r.approx.x, star.x])
    ys = np.append(sy, [r.approx.y, star.y])
    powers = rf_power_arrays(model, q.x, q.y, h, xs, ys, p_tx)
    return float(powers.min())


def worst_case_energy(
    model: ChannelModel,
    stops,
    h: float,
    r: UncertainReceiver,
    p_tx: float,
    mode: RobustMode = CLOSED_FORM,
    total_time: float | None = None,
) -> float:
    """Worst-case energy a receiver collects from a sequence of (location, duration) stops.

    Closed form applies the adversarial location per stop (a lower bound on
    delivered energy); the sampled mode pins a single adversarial location
    for the whole plan and minimizes over samples. When total_time is given,
    stop durations must sum to it.
    """
    locations = [s[0] for s in stops]
    durations = np.array([s[1] for s in stops], dtype=float)
    if (durations < 0).any():
        raise ValueError("stop durations must be nonnegative")
    if total_time is not None:
        if abs(durations.sum() - total_time) > 1e-9 * max(abs(total_time), 1.0):
            raise ValueError(
                f"stop durations sum to {durations.sum()!r}, expected {total_time!r}"
            )
    qx = np.array([p.x for p in locations])
    qy = np.array([p.y for p in locations])
    if isinstance(mode, ClosedForm):
        powers = worst_case_power_arrays(model, qx, qy, h, r, p_tx)
        return float(np.dot(durations, powers))
    sx, sy = _disk_samples(r, mode)
    extra_x = [r.approx.x]
    extra_y = [r.approx.y]
    for q in locations:
        star = worst_case_location(q, r)
        extra_x.append(star.x)
        extra_y.append(star.y)
    xs = np.append(sx, extra_x)
    ys = np.append(sy, extra_y)
    # (n_stops, n_samples) power matrix, one fixed adversary per column
    powers = rf_power_arrays(model, qx[:, None], qy[:, None], h, xs[None, :], ys[None, :], p_tx)
    energies = durations @ powers
    return float(energies.min())
