"""Per-label force vectors from every constraint source.

Four sources act on a label: repulsion from other labels (separated-but-close
and overlapping cases), repulsion from fixed feature symbols, attraction back
to its leader line, and containment pressure from the screen edges. Forces
are displacement-valued (mm): applying a force as a translation moves the
label toward resolving the constraint that produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import (
    OverlapError,
    Rect,
    Vec2,
    ZERO,
    interiors_overlap,
    point_axis_gaps,
    point_rect_signed_clearance,
    rect_distance,
    rect_nearest_points,
)
from .scene import Label, LayoutConfig, LeaderSpec, LeaderType, PointFeature

# A label in conflict with more than this many feature symbols composes over
# the nearest ones only, bounding the 4^k selection search.
MAX_COMPOSED_FEATURES = 8

# Assembly aims conflict resolution at this multiple of d_min while still
# gating conflicts at d_min itself. Without the margin, pairs whose partner
# is pinned approach the threshold asymptotically and the loop stops with
# the gap a hair under d_min; with it they land strictly clear and the
# force vanishes, giving the iteration a stable fixed point.
RESOLVE_TARGET_FACTOR = 1.25


class NotInConflictError(ValueError):
    """The gate condition for this force does not hold."""


class NotOverlappingError(ValueError):
    """overlap_force requires intersecting interiors."""


class LabelLargerThanScreenError(ValueError):
    """No placement of this label can satisfy screen containment."""


@dataclass(frozen=True, slots=True)
class ForceAssignment:
    """Total force per label slot plus tagged per-source contributions."""

    totals: tuple[Vec2, ...]
    contributions: tuple[tuple[tuple[str, Vec2], ...], ...]

    def max_magnitude(self) -> float:
        return max((f.norm() for f in self.totals), default=0.0)

    def tags_seen(self) -> frozenset[str]:
        """Distinct base tags (pair indices stripped) present anywhere."""
        out = set()
        for entry in self.contributions:
            for tag, _ in entry:
                out.add(tag.split(":")[0])
        return frozenset(out)


def separation_force(a: Rect, b: Rect, d_min: float) -> tuple[Vec2, Vec2]:
    """Push two disjoint-but-too-close rectangles apart.

    Each side receives half the remaining deficit along the nearest-point
    axis, in opposite directions. Raises NotInConflictError when the gap is
    already at least d_min, OverlapError when interiors intersect (the
    overlap force handles that case).
    """
    if interiors_overlap(a, b):
        raise OverlapError("rect interiors intersect; use overlap_force")
    gap = rect_distance(a, b)
    if gap >= d_min:
        raise NotInConflictError(f"gap {gap} is not below d_min {d_min}")
    if gap > 0.0:
        pa, qb = rect_nearest_points(a, b)
        direction = (pa - qb) * (1.0 / gap)
    else:
        # Touching rects leave the nearest-point axis undefined; fall back to
        # the center line, then to +x for concentric degenerates.
        d = a.center() - b.center()
        direction = d.normalized() if d.norm() > 0.0 else Vec2(1.0, 0.0)
    fa = direction * (0.5 * (d_min - gap))
    return fa, Vec2(-fa.x, -fa.y)


_OVERLAP_DIRS = (Vec2(-1.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, -1.0), Vec2(0.0, 1.0))


def overlap_force(a: Rect, b: Rect, d_min: float) -> tuple[Vec2, Vec2]:
    """Separate two overlapping rectangles along the cheapest axis direction.

    Candidate magnitudes are the moves of `a` along -x, +x, -y, +y that leave
    an axis gap of d_min; the smallest wins (ties in that order). Each rect
    receives half of it, in opposite directions.
    """
    if not interiors_overlap(a, b):
        raise NotOverlappingError("rect interiors are disjoint")
    mags = (
        a.x_max - b.x_min + d_min,
        b.x_max - a.x_min + d_min,
        a.y_max - b.y_min + d_min,
        b.y_max - a.y_min + d_min,
    )
    best = 0
    for k in range(1, 4):
        if abs(mags[k]) < abs(mags[best]):
            best = k
    fa = _OVERLAP_DIRS[best] * (0.5 * abs(mags[best]))
    return fa, Vec2(-fa.x, -fa.y)


def point_repulsion_candidates(
    rect: Rect, center: Vec2, radius: float, d_min: float
) -> list[Vec2]:
    """Four axis-direction escapes from a conflicting feature symbol.

    Each candidate is the smallest move of the rect along that axis direction
    giving the symbol disk an axis clearance of d_min. All four are positive
    whenever the gate (disk within d_min of the rect, or overlapping) holds.
    """
    clearance = point_rect_signed_clearance(center, rect) - radius
    if clearance >= d_min:
        raise NotInConflictError(f"symbol clearance {clearance} is not below d_min {d_min}")
    gaps = point_axis_gaps(rect, center)
    pad = radius + d_min
    return [
        Vec2(-(gaps.x_neg + pad), 0.0),
        Vec2(gaps.x_pos + pad, 0.0),
        Vec2(0.0, -(gaps.y_neg + pad)),
        Vec2(0.0, gaps.y_pos + pad),
    ]


def compose_point_forces(candidates_per_feature: Sequence[Sequence[Vec2]]) -> Vec2:
    """Combine one escape direction per conflicting feature into one force.

    A selection is admissible when every chosen pair spans at most 90
    degrees; among admissible selections the smallest vector sum wins. With a
    single feature that reduces to its smallest candidate. When opposing
    features leave no admissible selection, the smallest sum over all
    selections is used instead.
    """
    if not candidates_per_feature:
        raise ValueError("at least one candidate set is required")

    sets = [list(c) for c in candidates_per_feature]
    best_adm: tuple[float, Vec2] | None = None
    chosen: list[Vec2] = []

    def visit(level: int, sx: float, sy: float) -> None:
        nonlocal best_adm
        if level == len(sets):
            mag2 = sx * sx + sy * sy
            if best_adm is None or mag2 < best_adm[0]:
                best_adm = (mag2, Vec2(sx, sy))
            return
        for cand in sets[level]:
            if any(prev.dot(cand) < 0.0 for prev in chosen):
                continue
            chosen.append(cand)
            visit(level + 1, sx + cand.x, sy + cand.y)
            chosen.pop()

    visit(0, 0.0, 0.0)
    if best_adm is not None:
        return best_adm[1]

    # No angle-admissible selection exists (opposing features): fall back to
    # the smallest sum over the full selection product.
    best_any: tuple[float, Vec2] | None = None
    stack = [(0, 0.0, 0.0)]
    while stack:
        level, sx, sy = stack.pop()
        if level == len(sets):
            mag2 = sx * sx + sy * sy
            if best_any is None or mag2 < best_any[0]:
                best_any = (mag2, Vec2(sx, sy))
            continue
        for cand in reversed(sets[level]):
            stack.append((level + 1, sx + cand.x, sy + cand.y))
    assert best_any is not None
    return best_any[1]


def _attachment_edge(rect: Rect, u: Vec2) -> tuple[Vec2, Vec2]:
    # The rect edge facing against the leader direction (dominant axis).
    if abs(u.y) >= abs(u.x):
        y = rect.y_min if u.y > 0 else rect.y_max
        return Vec2(rect.x_min, y), Vec2(rect.x_max, y)
    x = rect.x_min if u.x > 0 else rect.x_max
    return Vec2(x, rect.y_min), Vec2(x, rect.y_max)


def attachment_force(label: Label, feature: PointFeature, leader: LeaderSpec) -> Vec2:
    """Pull a drifted label back over its fixed-direction leader ray.

    Zero while the ray from the anchor still meets the attachment edge.
    Otherwise the force is perpendicular to the leader, with magnitude equal
    to the exact offset that brings the nearest edge endpoint back onto the
    ray's line, so one clean step restores attachment.
    """
    if not leader.kind.fixed_direction:
        return ZERO
    u = leader.unit()
    n = u.perp()
    e1, e2 = _attachment_edge(label.rect, u)
    a_off = n.dot(e1 - feature.anchor)
    b_off = n.dot(e2 - feature.anchor)
    lo, hi = (a_off, b_off) if a_off <= b_off else (b_off, a_off)
    if lo <= 0.0 <= hi:
        # The supporting line crosses the edge. A label fully behind its
        # anchor cannot be recovered by a perpendicular pull either, so no
        # force is emitted in that case and the screen and pair forces are
        # left to move it.
        return ZERO
    if lo > 0.0:
        return n * (-lo)
    return n * (-hi)


def screen_force(rect: Rect, screen: Rect, d_min: float) -> Vec2:
    """Inward pressure when a label sits within d_min of any screen edge.

    Violated edges contribute (d_min - clearance) each, pointing inward;
    clearance goes negative once the label crosses the edge. Raises
    LabelLargerThanScreenError when no position could satisfy containment.
    """
    if rect.width > screen.width - 2.0 * d_min or rect.height > screen.height - 2.0 * d_min:
        raise LabelLargerThanScreenError(
            f"label {rect.width:.3f}x{rect.height:.3f} mm cannot keep {d_min} mm "
            f"clearance inside a {screen.width:.3f}x{screen.height:.3f} mm screen"
        )
    fx = 0.0
    fy = 0.0
    left = rect.x_min - screen.x_min
    if left < d_min:
        fx += d_min - left
    right = screen.x_max - rect.x_max
    if right < d_min:
        fx -= d_min - right
    bottom = rect.y_min - screen.y_min
    if bottom < d_min:
        fy += d_min - bottom
    top = screen.y_max - rect.y_max
    if top < d_min:
        fy -= d_min - top
    return Vec2(fx, fy)


def conflicting_label_pairs(labels: Sequence[Label], d_min: float) -> list[tuple[int, int]]:
    """All live label pairs overlapping or closer than d_min, sorted.

    Uses a uniform-grid broad phase (cell edge = largest label diagonal plus
    d_min) so two conflicting rects always land in the same or adjacent
    cells, then confirms exactly.
    """
    live = [i for i, l in enumerate(labels) if not l.deleted]
    if len(live) < 2:
        return []
    diag = max(math.hypot(labels[i].rect.width, labels[i].rect.height) for i in live)
    cell = diag + d_min
    if cell <= 0.0:
        cell = 1.0
    grid: dict[tuple[int, int], list[int]] = {}
    for i in live:
        c = labels[i].rect.center()
        key = (int(c.x // cell), int(c.y // cell))
        grid.setdefault(key, []).append(i)
    pairs: list[tuple[int, int]] = []
    for (cx, cy), members in grid.items():
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                other = grid.get((cx + dx, cy + dy))
                if other is None:
                    continue
                for i in members:
                    ri = labels[i].rect
                    for j in other:
                        if j <= i:
                            continue
                        rj = labels[j].rect
                        if rect_distance(ri, rj) < d_min or interiors_overlap(ri, rj):
                            pairs.append((i, j))
    return sorted(set(pairs))


def conflicting_feature_pairs(
    labels: Sequence[Label], features: Sequence[PointFeature], d_min: float
) -> list[tuple[int, int]]:
    """(label index, feature index) conflicts against foreign feature symbols.

    A label never conflicts with its own feature, and symbols whose label was
    deleted are treated as removed from the map.
    """
    deleted_ids = {l.feature_id for l in labels if l.deleted}
    pairs: list[tuple[int, int]] = []
    for i, lbl in enumerate(labels):
        if lbl.deleted:
            continue
        rect = lbl.rect
        for k, feat in enumerate(features):
            if feat.id == lbl.feature_id or feat.id in deleted_ids:
                continue
            if point_rect_signed_clearance(feat.anchor, rect) - feat.symbol_radius < d_min:
                pairs.append((i, k))
    return pairs


def assemble_forces(
    labels: Sequence[Label], features: Sequence[PointFeature], cfg: LayoutConfig
) -> ForceAssignment:
    """Sum every constraint source into one force per label.

    Label-label forces apply to every conflicting pair, not only graph
    neighbors. Feature repulsions are composed per label across conflicting
    symbols. The leader attachment pull applies to the sliding-connection
    fixed-direction type only (the fixed-connection variant can never
    detach). Deleted labels receive no force. Contributions are recorded
    sorted by tag so accumulation order, and therefore the total, is stable.
    """
    n = len(labels)
    contribs: list[list[tuple[str, Vec2]]] = [[] for _ in range(n)]
    d_min = cfg.d_min
    target = RESOLVE_TARGET_FACTOR * d_min

    for i, j in conflicting_label_pairs(labels, d_min):
        ri, rj = labels[i].rect, labels[j].rect
        if interiors_overlap(ri, rj):
            fi, fj = overlap_force(ri, rj, target)
        else:
            fi, fj = separation_force(ri, rj, target)
        contribs[i].append((f"pair:{j:04d}", fi))
        contribs[j].append((f"pair:{i:04d}", fj))

    feature_conflicts: dict[int, list[tuple[float, int]]] = {}
    for i, k in conflicting_feature_pairs(labels, features, d_min):
        gap = point_rect_signed_clearance(features[k].anchor, labels[i].rect) - features[k].symbol_radius
        feature_conflicts.setdefault(i, []).append((gap, k))
    for i, hits in feature_conflicts.items():
        hits.sort()
        rect = labels[i].rect
        cand_sets = [
            point_repulsion_candidates(rect, features[k].anchor, features[k].symbol_radius, target)
            for _, k in hits[:MAX_COMPOSED_FEATURES]
        ]
        composed = compose_point_forces(cand_sets)
        if composed.norm() > 0.0:
            contribs[i].append(("point", composed))

    feature_by_id = {f.id: f for f in features}
    for i, lbl in enumerate(labels):
        if lbl.deleted:
            continue
        if cfg.leader.kind is LeaderType.FIXED_DIR_FREE_CONN:
            fa = attachment_force(lbl, feature_by_id[lbl.feature_id], cfg.leader)
            if fa.norm() > 0.0:
                contribs[i].append(("attachment", fa))
        fs = screen_force(lbl.rect, cfg.screen, d_min)
        if fs.norm() > 0.0:
            contribs[i].append(("screen", fs))

    totals = []
    frozen = []
    for i in range(n):
        entry = tuple(sorted(contribs[i], key=lambda item: item[0]))
        frozen.append(entry)
        tx = 0.0
        ty = 0.0
        for _, f in entry:
            tx += f.x
            ty += f.y
        totals.append(Vec2(tx, ty))
    return ForceAssignment(totals=tuple(totals), contributions=tuple(frozen))
