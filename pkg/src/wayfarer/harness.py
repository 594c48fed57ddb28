"""Seeded trial execution and Monte-Carlo batches over generated forests.

A trial drives one navigator through one world until it crosses the
destination line (success), leaves the world bounds (success, with the
remaining distance added to the path), or exhausts the time budget
(entrapment).  Batches fan trials out over a process pool; every trial
seeds its own generators from a stable hash of (master seed, environment
seed, algorithm name), so results are independent of worker count and of
whatever other trials run alongside.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from . import robot as robot_mod
from .environment import EnvParams, ForestEnvironment, generate
from .geometry import Vec2, angle_diff
from .navigators import (
    ArcProbe,
    Forward,
    NavConfig,
    Observation,
    PidController,
    PivotTurn,
    Reverse,
    make_navigator,
)
from .robot import IMMOBILIZED, Collision, NoiseModel, RobotConfig, RobotState


class Outcome(Enum):
    REACHED = "reached"
    ENTRAPPED = "entrapped"
    EXITED_BOUNDS = "exited_bounds"


@dataclass(frozen=True)
class TrialConfig:
    destination_offset: float = 40.0   # m from start to the finish line, along the goal heading
    time_budget: float = 90.0          # s of simulated time
    goal_heading: float = 0.0          # deg
    start_x: Optional[float] = None    # default: the world's start point
    start_y: Optional[float] = None
    start_heading: float = 0.0         # deg
    robot: RobotConfig = RobotConfig()
    noise: NoiseModel = NoiseModel()
    nav: NavConfig = NavConfig()
    trajectory_sample_dt: float = 0.2  # s between logged poses


@dataclass
class TrialResult:
    outcome: Outcome
    path_length: float
    sim_time: float
    anomaly_count: int
    trajectory: list = field(default_factory=list)  # (t, x, y, psi_deg)
    events: list = field(default_factory=list)      # (t, kind, x, y)
    algorithm: str = ""
    env_seed: int = -1


@dataclass
class AlgoStats:
    trials: int
    successes: int
    entrapped: int
    entrapment_proportion: float
    path_mean: Optional[float]
    path_sd: Optional[float]
    path_quartiles: Optional[tuple[float, float, float]]  # q1, median, q3


@dataclass
class BatchSummary:
    per_algorithm: dict[str, AlgoStats]


def derive_trial_seed(master_seed: int, env_seed: int, algorithm: str) -> int:
    """Stable 64-bit seed; adding algorithms or envs never perturbs other trials."""
    digest = hashlib.sha256(f"{master_seed}|{env_seed}|{algorithm}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def run_trial(
    env: ForestEnvironment,
    algorithm: str,
    config: TrialConfig,
    seed: int,
    record_trajectory: bool = True,
    tick_hook: Optional[Callable] = None,
    navigator=None,
) -> TrialResult:
    """Run one deterministic trial; see module docstring for the outcome rules."""
    rcfg = config.robot
    noise = config.noise
    dt = rcfg.dt

    noise_seq, slip_seq, nav_seq = np.random.SeedSequence(seed).spawn(3)
    noise_rng = np.random.default_rng(noise_seq)
    slip_rng = np.random.default_rng(slip_seq)
    nav_rng = np.random.default_rng(nav_seq)

    start_default = env.params.start_point()
    sx = config.start_x if config.start_x is not None else start_default.x
    sy = config.start_y if config.start_y is not None else start_default.y

    state = RobotState(
        x=sx, y=sy, heading=config.start_heading,
        dist_to_next_slip=robot_mod._sample_slip_distance(env.params.slip_rate, slip_rng),
    )
    if env.query_collision_raw(sx, sy, state.heading, rcfg.half_width, rcfg.half_length) is not None:
        raise ValueError(f"start pose ({sx}, {sy}) is in collision")

    if navigator is None:
        navigator = make_navigator(
            algorithm, config.goal_heading, config.nav,
            reverse_distance=rcfg.reverse_distance, leg_speed=rcfg.forward_speed, dt=dt,
        )
    pid = PidController(
        config.nav.kp, config.nav.ki, config.nav.kd,
        config.nav.integral_limit, output_limit=rcfg.max_turn_rate,
    )

    goal_rad = math.radians(config.goal_heading)
    ux, uy = math.cos(goal_rad), math.sin(goal_rad)
    offset = config.destination_offset

    t = 0.0
    anomaly = None
    anomaly_count = 0
    events: list = []
    trajectory: list = [(0.0, sx, sy, config.start_heading)] if record_trajectory else []
    next_sample = config.trajectory_sample_dt

    arc_rate_cache: dict[float, float] = {}

    while True:
        progress = (state.x - sx) * ux + (state.y - sy) * uy
        if progress >= offset:
            outcome = Outcome.REACHED
            path = state.odometer
            break
        if not (0.0 <= state.x <= env.side and 0.0 <= state.y <= env.side):
            outcome = Outcome.EXITED_BOUNDS
            path = state.odometer + (offset - progress)
            break
        if t >= config.time_budget - 1e-9:
            outcome = Outcome.ENTRAPPED
            path = state.odometer
            break

        psi_meas = robot_mod.read_compass(state, noise, noise_rng)
        cmd = navigator.decide(Observation(psi_meas, anomaly), nav_rng)
        anomaly = None

        if isinstance(cmd, Reverse):
            state = robot_mod.reverse(state, env, rcfg, cmd.distance)
            t += cmd.distance / rcfg.forward_speed
        else:
            if isinstance(cmd, Forward):
                fwd = rcfg.forward_speed
                rate = pid.update(angle_diff(cmd.heading_target, psi_meas), dt)
            elif isinstance(cmd, ArcProbe):
                fwd = rcfg.forward_speed
                rate = arc_rate_cache.get(cmd.curvature)
                if rate is None:
                    rate = min(math.degrees(fwd * cmd.curvature), rcfg.max_turn_rate)
                    arc_rate_cache[cmd.curvature] = rate
                rate *= cmd.direction.yaw_sign
            elif isinstance(cmd, PivotTurn):
                fwd = 0.0
                turn = min(cmd.amount, rcfg.max_turn_rate * dt)
                rate = cmd.direction.yaw_sign * turn / dt
            else:
                raise TypeError(f"navigator returned unknown command {cmd!r}")
            state, _, anomaly = robot_mod.step(
                state, env, rcfg, fwd, rate, noise, noise_rng, slip_rng
            )
            t += dt

        if anomaly is not None:
            anomaly_count += 1
            kind = "collision" if isinstance(anomaly, Collision) else "immobilized"
            events.append((t, kind, state.x, state.y))

        if tick_hook is not None:
            tick_hook(t, state, navigator)

        if record_trajectory and t >= next_sample - 1e-12:
            trajectory.append((t, state.x, state.y, state.heading))
            while next_sample <= t + 1e-12:
                next_sample += config.trajectory_sample_dt

    if record_trajectory:
        trajectory.append((t, state.x, state.y, state.heading))

    return TrialResult(
        outcome=outcome,
        path_length=path,
        sim_time=t,
        anomaly_count=anomaly_count,
        trajectory=trajectory,
        events=events,
        algorithm=algorithm,
        env_seed=env.seed,
    )


def _run_batch_task(args) -> TrialResult:
    env_seed, algorithm, env_params, config, master_seed = args
    env = generate(env_params, env_seed)
    seed = derive_trial_seed(master_seed, env_seed, algorithm)
    return run_trial(env, algorithm, config, seed, record_trajectory=False)


def run_batch(
    env_seeds: Sequence[int],
    algorithms: Sequence[str],
    config: TrialConfig = TrialConfig(),
    env_params: EnvParams = EnvParams(),
    master_seed: int = 0,
    jobs: int = 1,
) -> tuple[list[TrialResult], BatchSummary]:
    """One trial per (environment seed, algorithm); parallel-safe and order-independent."""
    if not env_seeds or not algorithms:
        raise ValueError("env_seeds and algorithms must be nonempty")
    tasks = [
        (env_seed, algo, env_params, config, master_seed)
        for algo in algorithms
        for env_seed in env_seeds
    ]
    if jobs and jobs > 1:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_batch_task, tasks, chunksize=chunk))
    else:
        results = [_run_batch_task(t) for t in tasks]

    order = {name: i for i, name in enumerate(algorithms)}
    results.sort(key=lambda r: (order[r.algorithm], r.env_seed))
    return results, summarize(results)


def summarize(results: Sequence[TrialResult]) -> BatchSummary:
    """Entrapment proportion over all trials; path statistics over successes only."""
    if not results:
        raise ValueError("no results to summarize")
    by_algo: dict[str, list[TrialResult]] = {}
    for r in results:
        by_algo.setdefault(r.algorithm, []).append(r)

    per_algorithm = {}
    for algo, rs in by_algo.items():
        entrapped = sum(1 for r in rs if r.outcome is Outcome.ENTRAPPED)
        paths = [r.path_length for r in rs if r.outcome is not Outcome.ENTRAPPED]
        if paths:
            arr = np.asarray(paths)
            mean = float(arr.mean())
            sd = float(arr.std(ddof=1)) if len(paths) > 1 else 0.0
            q1, med, q3 = (float(q) for q in np.percentile(arr, [25, 50, 75]))
            quartiles = (q1, med, q3)
        else:
            mean = sd = quartiles = None
        per_algorithm[algo] = AlgoStats(
            trials=len(rs),
            successes=len(paths),
            entrapped=entrapped,
            entrapment_proportion=entrapped / len(rs),
            path_mean=mean,
            path_sd=sd,
            path_quartiles=quartiles,
        )
    return BatchSummary(per_algorithm)


# ---- result files ----

CSV_HEADER = ["env_seed", "algorithm", "outcome", "path_length_m", "sim_time_s", "anomaly_count"]


def write_results_csv(results: Sequence[TrialResult], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        for r in results:
            w.writerow(
                [r.env_seed, r.algorithm, r.outcome.value,
                 repr(r.path_length), repr(r.sim_time), r.anomaly_count]
            )


def read_results_csv(path) -> list[TrialResult]:
    results = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected results header {reader.fieldnames}")
        for row in reader:
            results.append(
                TrialResult(
                    outcome=Outcome(row["outcome"]),
                    path_length=float(row["path_length_m"]),
                    sim_time=float(row["sim_time_s"]),
                    anomaly_count=int(row["anomaly_count"]),
                    algorithm=row["algorithm"],
                    env_seed=int(row["env_seed"]),
                )
            )
    return results


def summary_to_dict(summary: BatchSummary) -> dict:
    doc = {}
    for algo, s in summary.per_algorithm.items():
        doc[algo] = {
            "trials": s.trials,
            "successes": s.successes,
            "entrapped": s.entrapped,
            "entrapment_proportion": s.entrapment_proportion,
            "path_mean_m": s.path_mean,
            "path_sd_m": s.path_sd,
            "path_quartiles_m": list(s.path_quartiles) if s.path_quartiles else None,
        }
    return doc


def write_summary_json(summary: BatchSummary, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary_to_dict(summary), f, indent=1)
        f.write("\n")


def format_summary_table(summary: BatchSummary) -> str:
    lines = [f"{'algorithm':<14} {'trials':>6} {'entrap%':>8} {'path mean':>10} {'path sd':>8}"]
    for algo, s in summary.per_algorithm.items():
        mean = f"{s.path_mean:.1f}" if s.path_mean is not None else "-"
        sd = f"{s.path_sd:.1f}" if s.path_sd is not None else "-"
        lines.append(
            f"{algo:<14} {s.trials:>6} {100 * s.entrapment_proportion:>7.1f}% {mean:>10} {sd:>8}"
        )
    return "\n".join(lines)
