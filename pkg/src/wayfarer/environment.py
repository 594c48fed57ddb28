"""Procedural abstract-forest worlds: generation, collision queries, (de)serialization.

A world is a square [0, side]^2 holding disc obstacles (standing trees)
and segment obstacles (fallen branches), plus the parameters of a
distance-triggered wheel-slip process that the robot module consumes.
Worlds are immutable once generated and safe to share between parallel
trials.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from .geometry import (
    Disc,
    OrientedRect,
    Segment,
    Vec2,
    _seg_closest_point,
    _seg_hits_box,
    _to_local,
    point_seg_dist,
)

SCHEMA_VERSION = 1

MAX_PLACEMENT_ATTEMPTS = 100_000

GRID_CELL = 2.5  # meters; spatial-index resolution for collision queries


class GenerationError(RuntimeError):
    """Raised when rejection sampling cannot place all obstacles."""


class SchemaError(ValueError):
    """Raised when an environment file has an unsupported schema version."""


class ValidationError(ValueError):
    """Raised when an environment file violates world invariants."""


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class EnvParams:
    side_length: float = 50.0          # m
    tree_density: float = 80.0         # trees per hectare
    tree_radius: float = 0.25          # m
    branch_count: int = 30
    branch_length_range: tuple[float, float] = (2.0, 10.0)  # m
    slip_rate: float = 0.5             # slip events per meter traveled
    clearance_from_start: float = 1.0  # m kept obstacle-free around the start

    def __post_init__(self):
        if self.side_length <= 0:
            raise ValueError("side_length must be positive")
        lo, hi = self.branch_length_range
        if lo > hi:
            raise ValueError("branch_length_range must be (min, max) with min <= max")
        if self.slip_rate < 0:
            raise ValueError("slip_rate must be >= 0")

    def tree_count(self) -> int:
        return round(self.tree_density * self.side_length**2 / 10_000.0)

    def start_point(self) -> Vec2:
        """Canonical trial start; the clearance disc is centered here."""
        return Vec2(min(5.0, self.side_length / 2.0), self.side_length / 2.0)


class ContactInfo(NamedTuple):
    point: Vec2
    obstacle_orientation: float  # undirected, degrees in [0, 180)
    side: Side                   # side of the robot centerline holding the contact


@dataclass(frozen=True)
class ForestEnvironment:
    params: EnvParams
    trees: tuple[Disc, ...]
    branches: tuple[Segment, ...]
    seed: int

    @property
    def side(self) -> float:
        return self.params.side_length

    def in_bounds(self, p: Vec2) -> bool:
        return 0.0 <= p.x <= self.side and 0.0 <= p.y <= self.side

    @cached_property
    def _grid(self) -> dict:
        """Cell -> list of obstacle records; built once, read-only afterwards.

        Records are ('t', cx, cy, r) or ('b', ax, ay, bx, by); registering an
        obstacle in every cell its AABB overlaps guarantees any footprint
        whose AABB overlaps the obstacle shares at least one cell with it.
        """
        grid: dict[tuple[int, int], list] = {}

        def register(x0, y0, x1, y1, rec):
            i0, i1 = int(x0 // GRID_CELL), int(x1 // GRID_CELL)
            j0, j1 = int(y0 // GRID_CELL), int(y1 // GRID_CELL)
            for i in range(i0, i1 + 1):
                for j in range(j0, j1 + 1):
                    grid.setdefault((i, j), []).append(rec)

        for d in self.trees:
            cx, cy, r = d.center.x, d.center.y, d.radius
            register(cx - r, cy - r, cx + r, cy + r, ("t", cx, cy, r))
        for s in self.branches:
            ax, ay, bx, by = s.a.x, s.a.y, s.b.x, s.b.y
            register(min(ax, bx), min(ay, by), max(ax, bx), max(ay, by), ("b", ax, ay, bx, by))
        return grid

    def query_collision(self, footprint: OrientedRect) -> Optional[ContactInfo]:
        return self.query_collision_raw(
            footprint.center.x,
            footprint.center.y,
            footprint.heading,
            footprint.half_width,
            footprint.half_length,
        )

    def query_collision_raw(
        self, x: float, y: float, heading: float, half_width: float, half_length: float
    ) -> Optional[ContactInfo]:
        """Collision test against a footprint given as plain floats.

        Returns contact info for the intersecting obstacle whose nearest
        point lies closest to the footprint center, or None.
        """
        grid = self._grid
        reach = math.hypot(half_length, half_width)
        i0, i1 = int((x - reach) // GRID_CELL), int((x + reach) // GRID_CELL)
        j0, j1 = int((y - reach) // GRID_CELL), int((y + reach) // GRID_CELL)
        cos_h = math.cos(math.radians(heading))
        sin_h = math.sin(math.radians(heading))

        best_d2 = math.inf
        best: Optional[tuple] = None
        seen = set()
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                for rec in grid.get((i, j), ()):
                    key = id(rec)
                    if key in seen:
                        continue
                    seen.add(key)
                    if rec[0] == "t":
                        _, cx, cy, r = rec
                        lx, ly = _to_local(cx, cy, x, y, cos_h, sin_h)
                        qx = min(max(lx, -half_length), half_length)
                        qy = min(max(ly, -half_width), half_width)
                        if (lx - qx) ** 2 + (ly - qy) ** 2 > r * r:
                            continue
                        # contact = boundary point of the disc nearest the center
                        dx, dy = x - cx, y - cy
                        dist = math.hypot(dx, dy)
                        if dist > 1e-12:
                            px, py = cx + dx / dist * r, cy + dy / dist * r
                        else:
                            px, py = cx + r, cy
                        orient = (math.degrees(math.atan2(py - cy, px - cx)) + 90.0) % 180.0
                    else:
                        _, ax, ay, bx, by = rec
                        lax, lay = _to_local(ax, ay, x, y, cos_h, sin_h)
                        lbx, lby = _to_local(bx, by, x, y, cos_h, sin_h)
                        if not _seg_hits_box(lax, lay, lbx, lby, half_length, half_width):
                            continue
                        px, py = _seg_closest_point(ax, ay, bx, by, x, y)
                        orient = math.degrees(math.atan2(by - ay, bx - ax)) % 180.0
                    d2 = (px - x) ** 2 + (py - y) ** 2
                    if d2 < best_d2:
                        best_d2 = d2
                        best = (px, py, orient)

        if best is None:
            return None
        px, py, orient = best
        cross = cos_h * (py - y) - sin_h * (px - x)
        side = Side.LEFT if cross > 0.0 else Side.RIGHT
        return ContactInfo(Vec2(px, py), orient, side)

    def save(self, path) -> None:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "params": _params_to_doc(self.params),
            "trees": [{"cx": d.center.x, "cy": d.center.y, "r": d.radius} for d in self.trees],
            "branches": [
                {"ax": s.a.x, "ay": s.a.y, "bx": s.b.x, "by": s.b.y} for s in self.branches
            ],
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")


def _params_to_doc(params: EnvParams) -> dict:
    doc = asdict(params)
    doc["branch_length_range"] = list(params.branch_length_range)
    return doc


def generate(params: EnvParams, seed: int) -> ForestEnvironment:
    """Generate a forest world, deterministic in (params, seed).

    Tree centers and branch midpoints are uniform over the bounds; branch
    lengths are uniform in `branch_length_range` and orientations uniform
    in [0, 180).  Placements that stick out of bounds or touch the
    start-clearance disc are rejected and redrawn.
    """
    rng = np.random.default_rng(seed)
    side = params.side_length
    start = params.start_point()
    clearance = params.clearance_from_start
    attempts = 0

    def spend_attempt():
        nonlocal attempts
        attempts += 1
        if attempts > MAX_PLACEMENT_ATTEMPTS:
            raise GenerationError(
                f"could not place all obstacles within {MAX_PLACEMENT_ATTEMPTS} attempts; "
                "parameters likely overcrowd the world"
            )

    trees = []
    r = params.tree_radius
    for _ in range(params.tree_count()):
        while True:
            spend_attempt()
            cx = rng.uniform(0.0, side)
            cy = rng.uniform(0.0, side)
            if cx < r or cx > side - r or cy < r or cy > side - r:
                continue
            if math.hypot(cx - start.x, cy - start.y) <= clearance + r:
                continue
            trees.append(Disc(Vec2(cx, cy), r))
            break

    branches = []
    lo, hi = params.branch_length_range
    for _ in range(params.branch_count):
        while True:
            spend_attempt()
            mx = rng.uniform(0.0, side)
            my = rng.uniform(0.0, side)
            theta = math.radians(rng.uniform(0.0, 180.0))
            half = rng.uniform(lo, hi) / 2.0
            ax, ay = mx - half * math.cos(theta), my - half * math.sin(theta)
            bx, by = mx + half * math.cos(theta), my + half * math.sin(theta)
            if not (0.0 <= ax <= side and 0.0 <= ay <= side and 0.0 <= bx <= side and 0.0 <= by <= side):
                continue
            if point_seg_dist(start.x, start.y, ax, ay, bx, by) <= clearance:
                continue
            branches.append(Segment(Vec2(ax, ay), Vec2(bx, by)))
            break

    return ForestEnvironment(params=params, trees=tuple(trees), branches=tuple(branches), seed=seed)


def load(path) -> ForestEnvironment:
    """Load a world file, rejecting version mismatches and invariant violations."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)

    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {version!r}, expected {SCHEMA_VERSION}")

    pdoc = dict(doc["params"])
    pdoc["branch_length_range"] = tuple(pdoc["branch_length_range"])
    try:
        params = EnvParams(**pdoc)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad environment params: {exc}") from exc

    side = params.side_length
    trees = []
    for t in doc["trees"]:
        d = Disc(Vec2(t["cx"], t["cy"]), t["r"])
        if d.radius <= 0:
            raise ValidationError(f"tree radius must be positive, got {d.radius}")
        if not _disc_in_bounds(d, side):
            raise ValidationError(f"tree at ({d.center.x}, {d.center.y}) lies outside bounds")
        trees.append(d)
    branches = []
    for b in doc["branches"]:
        s = Segment(Vec2(b["ax"], b["ay"]), Vec2(b["bx"], b["by"]))
        for p in (s.a, s.b):
            if not (0.0 <= p.x <= side and 0.0 <= p.y <= side):
                raise ValidationError(f"branch endpoint ({p.x}, {p.y}) lies outside bounds")
        branches.append(s)

    return ForestEnvironment(
        params=params, trees=tuple(trees), branches=tuple(branches), seed=int(doc["seed"])
    )


def _disc_in_bounds(d: Disc, side: float) -> bool:
    return (
        d.radius <= d.center.x <= side - d.radius
        and d.radius <= d.center.y <= side - d.radius
    )
