"""Unicycle robot with noisy actuation, compass sensing, and anomaly reports.

Motion is integrated in substeps small enough that neither the center
translation nor the corner sweep of the rectangular footprint exceeds
``SUBSTEP_MAX`` meters, so thin segment obstacles cannot be tunneled
through.  Collisions and wheel-slip immobilizations are reported, never
raised: the robot always ends a step in a collision-free pose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

from .environment import ContactInfo, ForestEnvironment
from .geometry import normalize_angle

SUBSTEP_MAX = 0.05  # m of translation (or corner sweep) per collision check


@dataclass(frozen=True)
class RobotConfig:
    half_width: float = 0.2       # m; default footprint 0.4 x 0.4
    half_length: float = 0.2      # m
    forward_speed: float = 3.0    # m/s
    max_turn_rate: float = 180.0  # deg/s
    reverse_distance: float = 0.3 # m backed up per escape maneuver
    dt: float = 0.05              # s per control tick

    def __post_init__(self):
        if min(self.half_width, self.half_length, self.forward_speed,
               self.max_turn_rate, self.reverse_distance, self.dt) <= 0:
            raise ValueError("all robot parameters must be positive")
        if self.dt > 0.1:
            raise ValueError("dt must be <= 0.1 s")


@dataclass(frozen=True)
class NoiseModel:
    compass_sigma: float = 2.0   # deg, per compass read
    steering_sigma: float = 3.0  # deg per second: each tick adds N(0, sigma*dt) to the yaw increment

    def __post_init__(self):
        if self.compass_sigma < 0 or self.steering_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    heading: float            # deg, normalized
    odometer: float = 0.0     # m, total distance traveled (forward and reverse)
    dist_to_next_slip: float = math.inf
    immobilized: bool = False


@dataclass(frozen=True)
class Collision:
    contact: ContactInfo


class Immobilized:
    """Anomaly marker: wheel slip pinned the robot until it reverses."""

    def __repr__(self):
        return "Immobilized()"


IMMOBILIZED = Immobilized()

AnomalyReport = Optional[Union[Collision, Immobilized]]


def read_compass(state: RobotState, noise: NoiseModel, rng) -> float:
    """Measured heading: true heading plus Gaussian compass noise, normalized."""
    if noise.compass_sigma == 0.0:
        return state.heading
    return normalize_angle(state.heading + rng.normal(0.0, noise.compass_sigma))


def step(
    state: RobotState,
    env: ForestEnvironment,
    cfg: RobotConfig,
    forward: float,
    turn_rate: float,
    noise: NoiseModel,
    rng,
    slip_rng=None,
) -> tuple[RobotState, float, AnomalyReport]:
    """Execute one control tick; returns (new state, achieved yaw change, anomaly).

    An immobilized robot does not move until something calls `reverse`.
    The slip countdown decrements with forward travel only and, on
    reaching zero, stops the robot exactly at the event location and
    resamples the next inter-event distance from Exp(slip_rate).
    """
    if state.immobilized:
        return state, 0.0, IMMOBILIZED
    if slip_rng is None:
        slip_rng = rng

    dt = cfg.dt
    dpsi = turn_rate * dt
    if noise.steering_sigma > 0.0:
        dpsi += rng.normal(0.0, noise.steering_sigma * dt)
    travel = forward * dt

    corner = math.hypot(cfg.half_length, cfg.half_width)
    n = max(
        1,
        math.ceil(travel / SUBSTEP_MAX),
        math.ceil(abs(math.radians(dpsi)) * corner / SUBSTEP_MAX),
    )
    d_sub = travel / n
    dpsi_sub = dpsi / n

    x, y, heading = state.x, state.y, state.heading
    odometer = state.odometer
    slip_left = state.dist_to_next_slip
    yaw_done = 0.0

    for _ in range(n):
        d = d_sub
        rot = dpsi_sub
        slipping = False
        if forward > 0.0 and slip_left <= d:
            # truncate the substep at the slip event location
            if d > 0.0:
                rot = dpsi_sub * (slip_left / d)
            d = slip_left
            slipping = True

        new_heading = normalize_angle(heading + rot)
        hr = math.radians(new_heading)
        nx = x + d * math.cos(hr)
        ny = y + d * math.sin(hr)

        contact = env.query_collision_raw(nx, ny, new_heading, cfg.half_width, cfg.half_length)
        if contact is not None:
            new_state = replace(
                state, x=x, y=y, heading=heading, odometer=odometer, dist_to_next_slip=slip_left
            )
            return new_state, yaw_done, Collision(contact)

        x, y, heading = nx, ny, new_heading
        yaw_done += rot
        odometer += d
        if forward > 0.0:
            slip_left -= d
        if slipping:
            next_gap = _sample_slip_distance(env.params.slip_rate, slip_rng)
            new_state = replace(
                state,
                x=x, y=y, heading=heading, odometer=odometer,
                dist_to_next_slip=next_gap, immobilized=True,
            )
            return new_state, yaw_done, IMMOBILIZED

    new_state = replace(
        state, x=x, y=y, heading=heading, odometer=odometer, dist_to_next_slip=slip_left
    )
    return new_state, yaw_done, None


def reverse(state: RobotState, env: ForestEnvironment, cfg: RobotConfig, distance: float) -> RobotState:
    """Back up along -heading, collision-checked; clears immobilization.

    Stops at the last collision-free substep if something blocks the path
    behind.  Reversing is the recovery action for slip events, so the
    immobilized flag is cleared regardless of the distance achieved.
    """
    if distance <= 0:
        raise ValueError("reverse distance must be positive")
    hr = math.radians(state.heading)
    ux, uy = -math.cos(hr), -math.sin(hr)
    n = max(1, math.ceil(distance / SUBSTEP_MAX))
    d_sub = distance / n

    x, y = state.x, state.y
    odometer = state.odometer
    for _ in range(n):
        nx, ny = x + d_sub * ux, y + d_sub * uy
        if env.query_collision_raw(nx, ny, state.heading, cfg.half_width, cfg.half_length) is not None:
            break
        x, y = nx, ny
        odometer += d_sub

    return replace(state, x=x, y=y, odometer=odometer, immobilized=False)


def footprint_of(state: RobotState, cfg: RobotConfig):
    from .geometry import OrientedRect, Vec2

    return OrientedRect(Vec2(state.x, state.y), state.heading, cfg.half_width, cfg.half_length)


def _sample_slip_distance(slip_rate: float, rng) -> float:
    if slip_rate <= 0.0:
        return math.inf
    return rng.exponential(1.0 / slip_rate)
