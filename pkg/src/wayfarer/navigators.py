"""Decision-making algorithms: the Pledge-style escape family and its baselines.

All navigators implement the same tick-level protocol: `decide(obs, rng)`
receives the latest compass reading plus the anomaly (if any) raised by
the previously executed command, and returns the next command.  Commands
are declarative; the trial loop in `harness` translates them into robot
primitives.

The Pledge family keeps a cumulative turning counter: obstacle contact
triggers a reverse and a pivot of `theta` in the fixed direction `tau`
(adding to the counter), and obstacle-free motion probes forward on a
gentle arc in the opposite direction, unwinding the counter by the yaw
actually measured.  When the counter returns to zero the escape is over
and the navigator resumes the goal heading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

from .environment import Side
from .geometry import angle_diff, normalize_angle
from .robot import AnomalyReport, Collision

ALGORITHMS = (
    "pledge",
    "forest-pledge",
    "rand-pledge",
    "cv-pledge",
    "oo-pledge",
    "levy-pledge",
    "levywalk",
    "cv-levy",
    "cv-react",
    "oo-react",
)

PLEDGE_FAMILY = ALGORITHMS[:6]
BASELINES = ALGORITHMS[6:]

PIVOT_TOL = 0.25  # deg of pivot remainder treated as complete


class TurnDirection(Enum):
    """Pivot direction; `yaw_sign` is the sign of the heading change it produces
    in the CCW-positive math convention (CW turns decrease the heading)."""

    CW = "cw"
    CCW = "ccw"

    @property
    def yaw_sign(self) -> float:
        return -1.0 if self is TurnDirection.CW else 1.0

    @property
    def opposite(self) -> "TurnDirection":
        return TurnDirection.CCW if self is TurnDirection.CW else TurnDirection.CW


class Mode(Enum):
    DIRECT = "direct"
    ESCAPING = "escaping"


class _Phase(Enum):
    DIRECT = "direct"
    REVERSING = "reversing"
    PIVOTING = "pivoting"
    PROBING = "probing"


# ---- commands ----


@dataclass(frozen=True)
class Forward:
    heading_target: float  # deg; drive at cruise speed, PID-steering onto this heading


@dataclass(frozen=True)
class PivotTurn:
    direction: TurnDirection
    amount: float  # deg still to turn


@dataclass(frozen=True)
class ArcProbe:
    direction: TurnDirection
    curvature: float  # 1/m


@dataclass(frozen=True)
class Reverse:
    distance: float  # m


NavCommand = object  # Forward | PivotTurn | ArcProbe | Reverse


class Observation(NamedTuple):
    psi: float                # measured heading, deg
    anomaly: AnomalyReport    # outcome of the previously executed command


@dataclass(frozen=True)
class NavConfig:
    theta_base: float = 30.0              # deg pivoted per anomaly
    probe_curvature: float = 0.5          # 1/m, counter-rotation probe arc
    goal_align_tol: float = 5.0           # deg; Forest-style counter reset window
    orient_align_tol: float = 20.0        # deg; obstacle-orientation compatibility window
    levy_theta_clip: tuple[float, float] = (10.0, 50.0)   # deg
    levy_step_clip: tuple[float, float] = (0.5, 20.0)     # m
    probe_leg: float = 2.0                # m driven before reactive navigators resume the goal
    kp: float = 3.0                       # PID gains, deg/s output per deg error
    ki: float = 0.0
    kd: float = 0.3
    integral_limit: float = 50.0          # deg*s anti-windup clamp


class PidController:
    """PID over heading error (deg) producing a turn rate (deg/s)."""

    def __init__(self, kp: float, ki: float, kd: float,
                 integral_limit: float = 50.0, output_limit: float = math.inf):
        self.kp, self.ki, self.kd = kp, ki, kd
        self.integral_limit = integral_limit
        self.output_limit = output_limit
        self._integral = 0.0
        self._prev_error: Optional[float] = None

    def reset(self) -> None:
        self._integral = 0.0
        self._prev_error = None

    def update(self, error: float, dt: float) -> float:
        self._integral += error * dt
        self._integral = min(max(self._integral, -self.integral_limit), self.integral_limit)
        derivative = 0.0 if self._prev_error is None else (error - self._prev_error) / dt
        self._prev_error = error
        rate = self.kp * error + self.ki * self._integral + self.kd * derivative
        return min(max(rate, -self.output_limit), self.output_limit)


def sample_levy(rng, scale: float = 1.0) -> float:
    """Draw from the Levy distribution with location 0 (inverse-square-normal identity)."""
    z = rng.standard_normal()
    while z == 0.0:
        z = rng.standard_normal()
    return scale / (z * z)


def goal_compatible_heading(orientation: float, goal: float) -> float:
    """Of the two headings along an undirected orientation, the one nearer the goal."""
    h1 = normalize_angle(orientation)
    h2 = normalize_angle(orientation - 180.0)
    return h1 if abs(angle_diff(h1, goal)) <= abs(angle_diff(h2, goal)) else h2


def choose_initial_tau(
    variant: str,
    anomaly: AnomalyReport,
    psi: float,
    goal: float,
    rng,
    orient_align_tol: float = 20.0,
) -> TurnDirection:
    """Pick the escape turn direction on the first anomaly of a trial.

    Non-collision anomalies carry no contact information, so the
    collision-informed variants fall back to the fixed clockwise choice.
    """
    if variant == "rand-pledge":
        return TurnDirection.CW if rng.integers(0, 2) == 0 else TurnDirection.CCW
    if variant == "cv-pledge" and isinstance(anomaly, Collision):
        return TurnDirection.CW if anomaly.contact.side is Side.LEFT else TurnDirection.CCW
    if variant == "oo-pledge" and isinstance(anomaly, Collision):
        h = goal_compatible_heading(anomaly.contact.obstacle_orientation, goal)
        if abs(angle_diff(h, goal)) <= orient_align_tol:
            return TurnDirection.CCW if angle_diff(h, psi) > 0 else TurnDirection.CW
    return TurnDirection.CW


@dataclass
class EscapeRecord:
    theta_total: float = 0.0      # deg added to the counter by pivots
    probe_yaw_total: float = 0.0  # deg unwound by probing
    anomalies: int = 0
    exit_counter: float = math.nan   # counter value right after the escape ended
    exit_residual: float = math.nan  # counter value just before the exit clamp
    exit_via_reset: bool = False


class PledgeNavigator:
    """Escape-counter navigator; `variant` is one of the six pledge-family names."""

    def __init__(self, variant: str, goal_heading: float, cfg: NavConfig = NavConfig(),
                 reverse_distance: float = 0.3, log_escapes: bool = False):
        if variant not in PLEDGE_FAMILY:
            raise ValueError(f"unknown pledge variant {variant!r}")
        self.variant = variant
        self.goal = normalize_angle(goal_heading)
        self.cfg = cfg
        self.reverse_distance = reverse_distance
        self.counter = 0.0
        self.tau: Optional[TurnDirection] = None
        self.mode = Mode.DIRECT
        self.log_escapes = log_escapes
        self.escape_log: list[EscapeRecord] = []
        self._phase = _Phase.DIRECT
        self._prev_psi: Optional[float] = None
        self._pivot_remaining = 0.0
        self._pending_pivot = 0.0
        self._last_cmd: Optional[NavCommand] = None
        self._record: Optional[EscapeRecord] = None

    # -- counter bookkeeping (exposed for direct contract tests) --

    def apply_probe_yaw(self, yaw_in_minus_tau: float) -> None:
        """Unwind the counter by yaw measured in the probe (counter-tau) direction.

        Crossing zero clamps the counter and completes the escape.
        """
        self.counter -= yaw_in_minus_tau
        if self._record is not None:
            self._record.probe_yaw_total += yaw_in_minus_tau
        if self.counter <= 0.0:
            self._exit_escape(via_reset=False)

    def reset_if_aligned(self, psi: float) -> bool:
        """Forest-style reset: zero the counter when the heading already
        approximates the goal direction.  Plain pledge never resets."""
        if self.variant == "pledge":
            return False
        if abs(angle_diff(self.goal, psi)) <= self.cfg.goal_align_tol:
            if self.mode is Mode.ESCAPING:
                self._exit_escape(via_reset=True)
            else:
                self.counter = 0.0
            return True
        return False

    def on_anomaly(self, anomaly: AnomalyReport, psi: float, rng) -> Reverse:
        """Escape-handler entry: pick tau on the first anomaly, pivot theta onto
        the counter, and command the reverse-from-obstacle maneuver."""
        self.reset_if_aligned(psi)
        if self.tau is None:
            self.tau = choose_initial_tau(
                self.variant, anomaly, psi, self.goal, rng, self.cfg.orient_align_tol
            )
        theta = self._draw_theta(rng)
        if self.mode is Mode.DIRECT:
            self._record = EscapeRecord() if self.log_escapes else None
            self.mode = Mode.ESCAPING
        self.counter += theta
        if self._record is not None:
            self._record.theta_total += theta
            self._record.anomalies += 1
        self._pending_pivot = theta
        self._phase = _Phase.REVERSING
        return Reverse(self.reverse_distance)

    def decide(self, obs: Observation, rng) -> NavCommand:
        psi = obs.psi
        dpsi = 0.0 if self._prev_psi is None else angle_diff(psi, self._prev_psi)
        self._prev_psi = psi
        tau_sign = self.tau.yaw_sign if self.tau is not None else -1.0

        # fold in what the previously executed command actually did
        if isinstance(self._last_cmd, PivotTurn):
            self._pivot_remaining -= tau_sign * dpsi
        elif isinstance(self._last_cmd, ArcProbe) and self._phase is _Phase.PROBING:
            self.apply_probe_yaw(-tau_sign * dpsi)

        if self._phase is _Phase.PIVOTING and self._pivot_remaining <= PIVOT_TOL:
            self._finish_pivot(psi)

        if obs.anomaly is not None:
            cmd = self.on_anomaly(obs.anomaly, psi, rng)
        else:
            cmd = self._dispatch()
        self._last_cmd = cmd
        return cmd

    # -- internals --

    def _dispatch(self) -> NavCommand:
        if self._phase is _Phase.DIRECT:
            return Forward(self.goal)
        if self._phase is _Phase.REVERSING:
            self._phase = _Phase.PIVOTING
            self._pivot_remaining = self._pending_pivot
        if self._phase is _Phase.PIVOTING:
            return PivotTurn(self.tau, self._pivot_remaining)
        return ArcProbe(self.tau.opposite, self.cfg.probe_curvature)

    def _finish_pivot(self, psi: float) -> None:
        self._phase = _Phase.PROBING
        if self.reset_if_aligned(psi):
            return

    def _exit_escape(self, via_reset: bool) -> None:
        residual = self.counter
        self.counter = 0.0
        self.mode = Mode.DIRECT
        self._phase = _Phase.DIRECT
        if self._record is not None:
            self._record.exit_counter = self.counter
            self._record.exit_residual = residual
            self._record.exit_via_reset = via_reset
            self.escape_log.append(self._record)
            self._record = None

    def _draw_theta(self, rng) -> float:
        if self.variant != "levy-pledge":
            return self.cfg.theta_base
        lo, hi = self.cfg.levy_theta_clip
        return min(max(sample_levy(rng), lo), hi)


class _SteeringNavigator:
    """Shared machinery for the stochastic and reactive baselines.

    On any anomaly the navigator reverses (clearing immobilization) and
    then steers toward a reaction heading while moving; straight legs are
    dead-reckoned from the commanded speed.
    """

    def __init__(self, goal_heading: float, cfg: NavConfig,
                 reverse_distance: float, leg_speed: float, dt: float):
        self.goal = normalize_angle(goal_heading)
        self.cfg = cfg
        self.reverse_distance = reverse_distance
        self._leg_per_tick = leg_speed * dt
        self.leg_heading = self.goal
        self.leg_remaining = math.inf

    def decide(self, obs: Observation, rng) -> NavCommand:
        if obs.anomaly is not None:
            self._react(obs.anomaly, obs.psi, rng)
            return Reverse(self.reverse_distance)
        if self.leg_remaining <= 0.0:
            self._leg_exhausted(rng)
        self.leg_remaining -= self._leg_per_tick
        return Forward(self.leg_heading)

    def _react(self, anomaly: AnomalyReport, psi: float, rng) -> None:
        raise NotImplementedError

    def _leg_exhausted(self, rng) -> None:
        self.leg_heading = self.goal
        self.leg_remaining = math.inf

    def _collision_side(self, anomaly: AnomalyReport, rng) -> Side:
        if isinstance(anomaly, Collision):
            return anomaly.contact.side
        return Side.LEFT if rng.integers(0, 2) == 0 else Side.RIGHT

    def _draw_step(self, rng) -> float:
        lo, hi = self.cfg.levy_step_clip
        return min(max(sample_levy(rng), lo), hi)


class LevyWalkNavigator(_SteeringNavigator):
    """Straight toward the goal until the first anomaly, then a random walk with
    uniform headings and heavy-tailed (clipped) step lengths."""

    def _react(self, anomaly, psi, rng) -> None:
        self._redraw(rng)

    def _leg_exhausted(self, rng) -> None:
        self._redraw(rng)

    def _redraw(self, rng) -> None:
        self.leg_heading = normalize_angle(rng.uniform(-180.0, 180.0))
        self.leg_remaining = self._draw_step(rng)


class CvLevyNavigator(_SteeringNavigator):
    """Levy walk whose post-collision headings are confined to the half-circle
    away from the collision side."""

    def _react(self, anomaly, psi, rng) -> None:
        side = self._collision_side(anomaly, rng)
        away = rng.uniform(0.0, 180.0)
        if side is Side.LEFT:
            self.leg_heading = normalize_angle(psi - away)
        else:
            self.leg_heading = normalize_angle(psi + away)
        self.leg_remaining = self._draw_step(rng)

    def _leg_exhausted(self, rng) -> None:
        self.leg_heading = normalize_angle(rng.uniform(-180.0, 180.0))
        self.leg_remaining = self._draw_step(rng)


class CvReactNavigator(_SteeringNavigator):
    """Turn 90 degrees away from the collision side for a short probe leg, then
    resume goal-seeking."""

    def _react(self, anomaly, psi, rng) -> None:
        side = self._collision_side(anomaly, rng)
        delta = -90.0 if side is Side.LEFT else 90.0
        self.leg_heading = normalize_angle(psi + delta)
        self.leg_remaining = self.cfg.probe_leg


class OoReactNavigator(_SteeringNavigator):
    """Follow the contacted obstacle's orientation when it is compatible with
    the goal heading; otherwise turn away from the collision side."""

    def _react(self, anomaly, psi, rng) -> None:
        if isinstance(anomaly, Collision):
            h = goal_compatible_heading(anomaly.contact.obstacle_orientation, self.goal)
            if abs(angle_diff(h, self.goal)) <= self.cfg.orient_align_tol:
                self.leg_heading = h
                self.leg_remaining = self.cfg.probe_leg
                return
        side = self._collision_side(anomaly, rng)
        delta = -90.0 if side is Side.LEFT else 90.0
        self.leg_heading = normalize_angle(psi + delta)
        self.leg_remaining = self.cfg.probe_leg


def make_navigator(
    name: str,
    goal_heading: float,
    cfg: NavConfig = NavConfig(),
    reverse_distance: float = 0.3,
    leg_speed: float = 3.0,
    dt: float = 0.05,
    log_escapes: bool = False,
):
    """Build a navigator by canonical algorithm name."""
    if name in PLEDGE_FAMILY:
        return PledgeNavigator(name, goal_heading, cfg, reverse_distance, log_escapes)
    baseline = {
        "levywalk": LevyWalkNavigator,
        "cv-levy": CvLevyNavigator,
        "cv-react": CvReactNavigator,
        "oo-react": OoReactNavigator,
    }.get(name)
    if baseline is None:
        raise ValueError(f"unknown algorithm {name!r}; valid names: {', '.join(ALGORITHMS)}")
    return baseline(goal_heading, cfg, reverse_distance, leg_speed, dt)
