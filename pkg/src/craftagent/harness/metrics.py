"""Run metrics: unique-item curve, tech-tree unlocks, map coverage, terrains.

Everything here is a pure function of the event log, so persisted logs
recompute to exactly the live values.
"""

from __future__ import annotations

import csv
import json
import math
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

TIER_ORDER = ["wooden", "stone", "iron", "diamond"]
_TOOL_RE = re.compile(r"^(wooden|stone|iron|diamond)_(pickaxe|axe|shovel|sword|hoe)$")


class MalformedLogError(ValueError):
    pass


def read_events(path: str | Path) -> list[dict]:
    events = []
    for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise MalformedLogError(f"bad event at line {i}: {exc}") from exc
    return events


def round_events(events: Iterable[dict], driver: Optional[str] = None) -> list[dict]:
    rounds = [e for e in events if e.get("type") == "round"]
    if driver is not None:
        rounds = [e for e in rounds if e.get("driver") == driver]
    return rounds


def compute_unique_items_curve(events: Iterable[dict]) -> list[tuple[int, int]]:
    """Cumulative count of distinct items ever held, per prompting iteration."""
    curve = []
    for event in round_events(events):
        if "iteration" not in event or "items_ever" not in event:
            raise MalformedLogError("round event missing iteration/items_ever")
        curve.append((int(event["iteration"]), len(set(event["items_ever"]))))
    return curve


def compute_tech_tree(events: Iterable[dict]) -> dict[str, Optional[int]]:
    """First prompting iteration that shows a tool of each tier, else None."""
    unlocks: dict[str, Optional[int]] = {tier: None for tier in TIER_ORDER}
    for event in round_events(events):
        for item in event.get("items_ever", []):
            match = _TOOL_RE.match(item)
            if match:
                tier = match.group(1)
                if unlocks[tier] is None:
                    unlocks[tier] = int(event["iteration"])
    return unlocks


def tech_tree_labels(unlocks: dict[str, Optional[int]]) -> dict[str, str]:
    return {tier: ("N/A" if at is None else str(at)) for tier, at in unlocks.items()}


# ----- smallest enclosing circle --------------------------------------------


@dataclass(frozen=True)
class Circle:
    x: float
    z: float
    radius: float

    def contains(self, point: tuple[float, float], eps: float = 1e-9) -> bool:
        return math.hypot(point[0] - self.x, point[1] - self.z) <= self.radius + eps


_EPS = 1e-12


def _in_circle(circle: Optional[Circle], point: tuple[float, float]) -> bool:
    return circle is not None and math.hypot(point[0] - circle.x, point[1] - circle.z) \
        <= circle.radius * (1 + 1e-14) + _EPS


def _diameter(a, b) -> Circle:
    cx, cz = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
    radius = max(math.hypot(cx - a[0], cz - a[1]), math.hypot(cx - b[0], cz - b[1]))
    return Circle(cx, cz, radius)


def _circumcircle(a, b, c) -> Optional[Circle]:
    ox, oz = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0, \
             (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, az = a[0] - ox, a[1] - oz
    bx, bz = b[0] - ox, b[1] - oz
    cx, cz = c[0] - ox, c[1] - oz
    d = (ax * (bz - cz) + bx * (cz - az) + cx * (az - bz)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + az * az) * (bz - cz) + (bx * bx + bz * bz) * (cz - az)
              + (cx * cx + cz * cz) * (az - bz)) / d
    z = oz + ((ax * ax + az * az) * (cx - bx) + (bx * bx + bz * bz) * (ax - cx)
              + (cx * cx + cz * cz) * (bx - ax)) / d
    radius = max(math.hypot(x - p[0], z - p[1]) for p in (a, b, c))
    return Circle(x, z, radius)


def _circle_two_points(points, p, q) -> Circle:
    circle = _diameter(p, q)
    left: Optional[Circle] = None
    right: Optional[Circle] = None
    px, pz = p
    qx, qz = q
    for r in points:
        if _in_circle(circle, r):
            continue
        cross = (qx - px) * (r[1] - pz) - (qz - pz) * (r[0] - px)
        candidate = _circumcircle(p, q, r)
        if candidate is None:
            continue
        candidate_cross = (qx - px) * (candidate.z - pz) - (qz - pz) * (candidate.x - px)
        if cross > 0.0 and (left is None or candidate_cross >
                            (qx - px) * (left.z - pz) - (qz - pz) * (left.x - px)):
            left = candidate
        elif cross < 0.0 and (right is None or candidate_cross <
                              (qx - px) * (right.z - pz) - (qz - pz) * (right.x - px)):
            right = candidate
    if left is None and right is None:
        return circle
    if left is None:
        return right
    if right is None:
        return left
    return left if left.radius <= right.radius else right


def _circle_one_point(points, p) -> Circle:
    circle = Circle(p[0], p[1], 0.0)
    for i, q in enumerate(points):
        if not _in_circle(circle, q):
            if circle.radius == 0.0:
                circle = _diameter(p, q)
            else:
                circle = _circle_two_points(points[: i + 1], p, q)
    return circle


def smallest_enclosing_circle(points: list[tuple[float, float]]) -> Circle:
    """Minimal circle containing all points; expected O(n) randomized."""
    if not points:
        raise ValueError("need at least one point")
    shuffled = [(float(x), float(z)) for x, z in points]
    random.Random(0x5EC).shuffle(shuffled)  # fixed seed: output is unique anyway
    circle: Optional[Circle] = None
    for i, p in enumerate(shuffled):
        if not _in_circle(circle, p):
            circle = _circle_one_point(shuffled[:i], p)
    return circle


def brute_force_enclosing_circle(points: list[tuple[float, float]]) -> Circle:
    """O(n^4) oracle: try every pair diameter and every triple circumcircle."""
    if not points:
        raise ValueError("need at least one point")
    pts = [(float(x), float(z)) for x, z in points]
    if len(pts) == 1:
        return Circle(pts[0][0], pts[0][1], 0.0)
    candidates: list[Circle] = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            candidates.append(_diameter(pts[i], pts[j]))
            for k in range(j + 1, len(pts)):
                circle = _circumcircle(pts[i], pts[j], pts[k])
                if circle is not None:
                    candidates.append(circle)
    best = None
    for circle in candidates:
        if all(circle.contains(p) for p in pts):
            if best is None or circle.radius < best.radius:
                best = circle
    return best


def positions_visited(events: Iterable[dict]) -> list[tuple[float, float]]:
    """(x, z) sampled where the agent talks to the model: one per iteration."""
    return [(float(e["position"][0]), float(e["position"][2]))
            for e in round_events(events) if "position" in e]


def coverage_circle(events: Iterable[dict]) -> Optional[Circle]:
    points = positions_visited(events)
    return smallest_enclosing_circle(points) if points else None


def terrains_visited(events: Iterable[dict]) -> list[str]:
    return sorted({e["biome"] for e in round_events(events) if "biome" in e})


@dataclass
class Metrics:
    unique_items_curve: list[tuple[int, int]]
    tech_tree: dict[str, Optional[int]]
    coverage: Optional[Circle]
    terrains: list[str]


def compute_metrics(events: Iterable[dict]) -> Metrics:
    events = list(events)
    return Metrics(
        unique_items_curve=compute_unique_items_curve(events),
        tech_tree=compute_tech_tree(events),
        coverage=coverage_circle(events),
        terrains=terrains_visited(events),
    )


def write_metrics_csv(events: Iterable[dict], path: str | Path) -> None:
    """Columns: iteration, unique_items, wooden, stone, iron, diamond, radius."""
    events = list(events)
    curve = compute_unique_items_curve(events)
    points = positions_visited(events)
    unlocks: dict[str, Optional[int]] = {tier: None for tier in TIER_ORDER}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "unique_items", "wooden", "stone", "iron", "diamond", "radius"])
        rounds = round_events(events)
        for i, event in enumerate(rounds):
            for item in event.get("items_ever", []):
                match = _TOOL_RE.match(item)
                if match and unlocks[match.group(1)] is None:
                    unlocks[match.group(1)] = int(event["iteration"])
            circle = smallest_enclosing_circle(points[: i + 1]) if points[: i + 1] else None
            writer.writerow([
                curve[i][0], curve[i][1],
                *(unlocks[tier] if unlocks[tier] is not None else "" for tier in TIER_ORDER),
                f"{circle.radius:.3f}" if circle else "",
            ])
