"""Probing-driven 2D forest navigation: algorithms, simulator, and benchmark harness."""

from .environment import ContactInfo, EnvParams, ForestEnvironment, Side, generate, load
from .geometry import (
    Disc,
    OrientedRect,
    Segment,
    Vec2,
    angle_diff,
    disc_rect_intersect,
    normalize_angle,
    seg_rect_intersect,
)
from .harness import (
    BatchSummary,
    Outcome,
    TrialConfig,
    TrialResult,
    run_batch,
    run_trial,
    summarize,
)
from .navigators import (
    ALGORITHMS,
    BASELINES,
    PLEDGE_FAMILY,
    NavConfig,
    PledgeNavigator,
    TurnDirection,
    make_navigator,
)
from .robot import IMMOBILIZED, Collision, NoiseModel, RobotConfig, RobotState, read_compass, reverse, step

__all__ = [
    "ALGORITHMS",
    "BASELINES",
    "PLEDGE_FAMILY",
    "BatchSummary",
    "Collision",
    "ContactInfo",
    "Disc",
    "EnvParams",
    "ForestEnvironment",
    "IMMOBILIZED",
    "NavConfig",
    "NoiseModel",
    "OrientedRect",
    "Outcome",
    "PledgeNavigator",
    "RobotConfig",
    "RobotState",
    "Segment",
    "Side",
    "TrialConfig",
    "TrialResult",
    "TurnDirection",
    "Vec2",
    "angle_diff",
    "disc_rect_intersect",
    "generate",
    "load",
    "make_navigator",
    "normalize_angle",
    "read_compass",
    "reverse",
    "run_batch",
    "run_trial",
    "seg_rect_intersect",
    "step",
    "summarize",
]
