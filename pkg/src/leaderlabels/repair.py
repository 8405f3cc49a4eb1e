"""Greedy local conflict repair.

Shared by the LocalP baseline (which runs it on the raw initial layout) and
by the optimizer's finishing pass (which runs it on whatever small residue
the beam iteration could not untangle, typically labels wedged between
opposing constraints whose net force cancels).

The procedure ranks labels by conflict degree and grid-searches the worst
one for the nearest displacement that clears every one of its conflicts
while keeping it on screen and attached to its leader. A move is accepted
only when the new spot is conflict-free against the whole scene, so every
accepted move strictly reduces the number of conflicting pairs and the loop
terminates. Labels never in conflict are never touched. Total work is
additionally capped by a deterministic candidate-evaluation budget so that
hopelessly overfull scenes fail fast instead of grinding.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Sequence

from .forces import conflicting_feature_pairs, conflicting_label_pairs
from .geometry import Rect, Vec2, interiors_overlap, point_rect_signed_clearance, rect_distance
from .scene import Label, LayoutConfig, LeaderType, PointFeature, connection_point

# Search retries double the radius each time: 10 * d_min * 2^retry. Eight
# retries reach 512 mm at the default d_min, beyond any screen used here, so
# the axis search only gives up when every admissible position is blocked.
BASE_RADIUS_FACTOR = 10.0
MAX_RETRIES = 8
# The 2D ring search is quadratic in the radius, so it escalates less far.
MAX_RETRIES_DIAGONAL = 3
# Hard cap on candidate positions evaluated across one repair invocation.
# Feasible scenes use a few thousand; the cap only bites on hopelessly
# overfull scenes, which then report their residue instead of grinding.
CANDIDATE_BUDGET = 500_000


def admissible_directions(cfg: LayoutConfig) -> tuple[Vec2, ...]:
    """Unit directions a label may move in, by leader type."""
    if cfg.leader.kind is LeaderType.FIXED_DIR_FIXED_CONN:
        u = cfg.leader.unit()
        return (u, -u)
    return (Vec2(1.0, 0.0), Vec2(-1.0, 0.0), Vec2(0.0, 1.0), Vec2(0.0, -1.0))


def conflict_degrees(
    labels: Sequence[Label], features: Sequence[PointFeature], d_min: float
) -> dict[int, int]:
    degree: dict[int, int] = {}
    for i, j in conflicting_label_pairs(labels, d_min):
        degree[i] = degree.get(i, 0) + 1
        degree[j] = degree.get(j, 0) + 1
    for i, _ in conflicting_feature_pairs(labels, features, d_min):
        degree[i] = degree.get(i, 0) + 1
    return degree


class _Budget:
    __slots__ = ("left",)

    def __init__(self, amount: int) -> None:
        self.left = amount

    def spend(self) -> bool:
        if self.left <= 0:
            return False
        self.left -= 1
        return True


def greedy_repair(
    labels: Sequence[Label],
    features: Sequence[PointFeature],
    cfg: LayoutConfig,
    diagonal: bool = False,
    max_axis_retries: int = MAX_RETRIES,
) -> tuple[list[Label], int]:
    """Resolve conflicts in place by nearest-first grid moves.

    With diagonal=True a label whose axis-aligned escapes are all blocked is
    additionally searched over a 2D grid ring, which rescues labels wedged
    into corners (for example screen edge on one side, fixed symbol on the
    other). max_axis_retries bounds how far the axis search escalates; a
    finishing pass after an iterative solve should keep it small so stuck
    labels get nudged, never relocated across the layout. Returns the
    adjusted labels and how many moves were applied. Stops when
    conflict-free, when no conflicted label has a clearing position within
    the bounded search radius, or when the evaluation budget runs out.
    """
    labels = list(labels)
    anchors = {f.id: f.anchor for f in features}
    directions = admissible_directions(cfg)
    grid = cfg.d_min / 2.0
    moves = 0
    allow_ring = diagonal and cfg.leader.kind is not LeaderType.FIXED_DIR_FIXED_CONN
    budget = _Budget(CANDIDATE_BUDGET)
    # A label whose search exhausted stays parked until some move lands near
    # enough to change its surroundings.
    stuck: dict[int, float] = {}

    while budget.left > 0:
        degree = conflict_degrees(labels, features, cfg.d_min)
        if not degree:
            break
        candidates = [i for i in degree if i not in stuck]
        moved = False
        for idx in sorted(candidates, key=lambda i: (-degree[i], i)):
            lbl = labels[idx]
            anchor = anchors[lbl.feature_id]
            d = _search_displacement(
                idx, labels, features, cfg, anchor, directions, grid, budget, max_axis_retries
            )
            if d is None and allow_ring:
                d = _search_displacement_ring(idx, labels, features, cfg, anchor, grid, budget)
            if d is not None:
                old_center = lbl.rect.center()
                rect = lbl.rect.translated(d)
                conn = connection_point(rect, anchor, cfg.leader, lbl.conn + d)
                labels[idx] = replace(lbl, rect=rect, conn=conn)
                moves += 1
                moved = True
                # Unpark stuck labels whose surroundings this move changed,
                # at either the vacated or the newly occupied spot.
                new_center = rect.center()
                for s_idx in [
                    s
                    for s, reach in stuck.items()
                    if (labels[s].rect.center() - old_center).norm() <= reach
                    or (labels[s].rect.center() - new_center).norm() <= reach
                ]:
                    del stuck[s_idx]
                break
            reach = BASE_RADIUS_FACTOR * cfg.d_min * (2.0**max_axis_retries) + 4.0 * math.hypot(
                lbl.rect.width, lbl.rect.height
            )
            stuck[idx] = reach
        if not moved:
            break
    return labels, moves


def _search_displacement(
    idx: int,
    labels: Sequence[Label],
    features: Sequence[PointFeature],
    cfg: LayoutConfig,
    anchor: Vec2,
    directions: tuple[Vec2, ...],
    grid: float,
    budget: _Budget,
    max_retries: int = MAX_RETRIES,
) -> Vec2 | None:
    rect = labels[idx].rect
    center = rect.center()
    own_half_diag = 0.5 * math.hypot(rect.width, rect.height)
    deleted_ids = {l.feature_id for l in labels if l.deleted}
    k_start = 1
    for retry in range(max_retries + 1):
        radius = BASE_RADIUS_FACTOR * cfg.d_min * (2.0**retry)
        # Anything beyond the candidate sweep's reach is irrelevant;
        # prefilter once per retry ring.
        reach = radius + own_half_diag + cfg.d_min
        near_labels = [
            other.rect
            for j, other in enumerate(labels)
            if j != idx
            and not other.deleted
            and (other.rect.center() - center).norm()
            <= reach + 0.5 * math.hypot(other.rect.width, other.rect.height)
        ]
        near_features = [
            f
            for f in features
            if f.id != labels[idx].feature_id
            and f.id not in deleted_ids
            and (f.anchor - center).norm() <= reach + f.symbol_radius
        ]
        k_end = int(radius / grid)
        for k in range(k_start, k_end + 1):
            for direction in directions:
                if not budget.spend():
                    return None
                d = direction * (k * grid)
                if _candidate_ok(rect.translated(d), near_labels, near_features, cfg, anchor):
                    return d
        k_start = k_end + 1
    return None


def _search_displacement_ring(
    idx: int,
    labels: Sequence[Label],
    features: Sequence[PointFeature],
    cfg: LayoutConfig,
    anchor: Vec2,
    grid: float,
    budget: _Budget,
) -> Vec2 | None:
    rect = labels[idx].rect
    center = rect.center()
    own_half_diag = 0.5 * math.hypot(rect.width, rect.height)
    deleted_ids = {l.feature_id for l in labels if l.deleted}
    ring_start = 1
    for retry in range(MAX_RETRIES_DIAGONAL + 1):
        radius = BASE_RADIUS_FACTOR * cfg.d_min * (2.0**retry)
        reach = radius * math.sqrt(2.0) + own_half_diag + cfg.d_min
        near_labels = [
            other.rect
            for j, other in enumerate(labels)
            if j != idx
            and not other.deleted
            and (other.rect.center() - center).norm()
            <= reach + 0.5 * math.hypot(other.rect.width, other.rect.height)
        ]
        near_features = [
            f
            for f in features
            if f.id != labels[idx].feature_id
            and f.id not in deleted_ids
            and (f.anchor - center).norm() <= reach + f.symbol_radius
        ]
        ring_end = int(radius / grid)
        for ring in range(ring_start, ring_end + 1):
            offsets = sorted(
                (ix * ix + iy * iy, ix, iy)
                for ix in range(-ring, ring + 1)
                for iy in range(-ring, ring + 1)
                if max(abs(ix), abs(iy)) == ring and ix != 0 and iy != 0
            )
            for _, ix, iy in offsets:
                if not budget.spend():
                    return None
                d = Vec2(ix * grid, iy * grid)
                if _candidate_ok(rect.translated(d), near_labels, near_features, cfg, anchor):
                    return d
        ring_start = ring_end + 1
    return None


def _candidate_ok(
    candidate: Rect,
    near_labels: Sequence[Rect],
    near_features: Sequence[PointFeature],
    cfg: LayoutConfig,
    anchor: Vec2,
) -> bool:
    d_min = cfg.d_min
    for other in near_labels:
        if rect_distance(candidate, other) < d_min or interiors_overlap(candidate, other):
            return False
    for feat in near_features:
        if point_rect_signed_clearance(feat.anchor, candidate) - feat.symbol_radius < d_min:
            return False
    screen = cfg.screen
    fits = (
        candidate.width <= screen.width - 2 * d_min
        and candidate.height <= screen.height - 2 * d_min
    )
    if fits and not (
        candidate.x_min - screen.x_min >= d_min
        and screen.x_max - candidate.x_max >= d_min
        and candidate.y_min - screen.y_min >= d_min
        and screen.y_max - candidate.y_max >= d_min
    ):
        return False
    if cfg.leader.kind is LeaderType.FIXED_DIR_FREE_CONN:
        # Keep the label attached: the leader ray must still meet the
        # attachment edge after the move.
        u = cfg.leader.unit()
        if abs(u.y) >= abs(u.x):
            if not (candidate.x_min <= anchor.x <= candidate.x_max):
                return False
            level = candidate.y_min if u.y > 0 else candidate.y_max
            if (level - anchor.y) * u.y < 0:
                return False
        else:
            if not (candidate.y_min <= anchor.y <= candidate.y_max):
                return False
            level = candidate.x_min if u.x > 0 else candidate.x_max
            if (level - anchor.x) * u.x < 0:
                return False
    return True
