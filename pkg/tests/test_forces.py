import itertools
import math

import pytest

from leaderlabels.forces import (
    LabelLargerThanScreenError,
    NotInConflictError,
    NotOverlappingError,
    RESOLVE_TARGET_FACTOR,
    assemble_forces,
    attachment_force,
    compose_point_forces,
    conflicting_feature_pairs,
    conflicting_label_pairs,
    overlap_force,
    point_repulsion_candidates,
    screen_force,
    separation_force,
)
from leaderlabels.geometry import (
    OverlapError,
    Rect,
    Vec2,
    interiors_overlap,
    point_rect_signed_clearance,
    rect_distance,
)
from leaderlabels.scene import Label, LayoutConfig, LeaderSpec, LeaderType, PointFeature

from conftest import (
    brute_force_feature_conflicts,
    brute_force_label_conflicts,
    disjoint_rect_pair,
    labels_from_rects,
    overlapping_rect_pair,
    random_labels,
)


class TestSeparationForce:
    def test_facing_edges(self):
        fa, fb = separation_force(Rect(0, 0, 4, 2), Rect(6, 0, 10, 2), d_min=3.0)
        assert fa == Vec2(-0.5, 0.0)
        assert fb == Vec2(0.5, 0.0)

    def test_gap_equal_d_min_not_in_conflict(self):
        with pytest.raises(NotInConflictError):
            separation_force(Rect(0, 0, 4, 2), Rect(6, 0, 10, 2), d_min=2.0)

    def test_corner_case(self):
        fa, fb = separation_force(Rect(0, 0, 2, 2), Rect(3, 3, 5, 5), d_min=2.0)
        gap = math.sqrt(2.0)
        expected = 0.5 * (2.0 - gap)
        assert fa.norm() == pytest.approx(expected)
        assert fa.x == pytest.approx(-expected / math.sqrt(2))
        assert fa.y == pytest.approx(-expected / math.sqrt(2))
        assert fb.x == -fa.x and fb.y == -fa.y

    def test_overlapping_rejected(self):
        with pytest.raises(OverlapError):
            separation_force(Rect(0, 0, 2, 2), Rect(1, 1, 3, 3), d_min=1.0)

    def test_newton_pair_on_random_conflicts(self, rng):
        count = 0
        while count < 2000:
            a, b = disjoint_rect_pair(rng)
            gap = rect_distance(a, b)
            if gap >= 5.0:
                continue
            fa, fb = separation_force(a, b, d_min=5.0)
            assert fa.x == -fb.x and fa.y == -fb.y
            assert fa.norm() == pytest.approx(0.5 * (5.0 - gap), rel=1e-12)
            count += 1


class TestOverlapForce:
    def test_worked_example(self):
        fa, fb = overlap_force(Rect(0, 0, 10, 4), Rect(8, 1, 20, 5), d_min=1.0)
        assert fa == Vec2(-1.5, 0.0)
        assert fb == Vec2(1.5, 0.0)

    def test_identical_rects_tie_break(self):
        fa, fb = overlap_force(Rect(0, 0, 2, 2), Rect(0, 0, 2, 2), d_min=0.0)
        assert fa == Vec2(-1.0, 0.0)
        assert fb == Vec2(1.0, 0.0)

    def test_disjoint_rejected(self):
        with pytest.raises(NotOverlappingError):
            overlap_force(Rect(0, 0, 1, 1), Rect(5, 5, 6, 6), d_min=1.0)

    def test_double_displacement_resolves(self, rng):
        # Moving each rect by twice its force separates them to exactly
        # d_min along the chosen axis.
        d_min = 0.7
        for _ in range(400):
            a, b = overlapping_rect_pair(rng)
            fa, fb = overlap_force(a, b, d_min)
            a2 = a.translated(fa * 2.0)
            b2 = b.translated(fb * 2.0)
            assert not interiors_overlap(a2, b2)
            assert rect_distance(a2, b2) >= d_min - 1e-9

    def test_newton_pairs(self, rng):
        for _ in range(400):
            a, b = overlapping_rect_pair(rng)
            fa, fb = overlap_force(a, b, 0.5)
            assert fa.x == -fb.x and fa.y == -fb.y


class TestPointRepulsionCandidates:
    def test_not_in_conflict(self):
        with pytest.raises(NotInConflictError):
            point_repulsion_candidates(Rect(7, 2, 15, 6), Vec2(5, 5), radius=0.0, d_min=1.0)

    def test_point_inside_rect(self):
        cands = point_repulsion_candidates(Rect(7, 2, 15, 6), Vec2(8, 4), radius=0.0, d_min=1.0)
        assert cands[0] == Vec2(-8.0, 0.0)
        assert cands[1] == Vec2(2.0, 0.0)
        assert cands[2] == Vec2(0.0, -3.0)
        assert cands[3] == Vec2(0.0, 3.0)

    def test_center_of_square_symmetric(self):
        cands = point_repulsion_candidates(Rect(0, 0, 4, 4), Vec2(2, 2), radius=0.0, d_min=0.5)
        mags = sorted(c.norm() for c in cands)
        assert mags[0] == pytest.approx(mags[-1])

    def test_applying_candidate_reaches_clearance(self, rng):
        # Each candidate moves the rect so the disk's axis clearance equals
        # d_min exactly, hence overall clearance is at least d_min.
        d_min = 0.8
        tried = 0
        while tried < 300:
            x = rng.uniform(0, 40)
            y = rng.uniform(0, 40)
            rect = Rect(x, y, x + rng.uniform(1, 15), y + rng.uniform(1, 8))
            p = Vec2(rng.uniform(-5, 45), rng.uniform(-5, 45))
            radius = rng.uniform(0.0, 1.0)
            if point_rect_signed_clearance(p, rect) - radius >= d_min:
                continue
            tried += 1
            for cand in point_repulsion_candidates(rect, p, radius, d_min):
                moved = rect.translated(cand)
                clearance = point_rect_signed_clearance(p, moved) - radius
                assert clearance >= d_min - 1e-9


class TestComposePointForces:
    def test_single_feature_min_candidate(self):
        result = compose_point_forces([[Vec2(-8, 0), Vec2(2, 0), Vec2(0, -3), Vec2(0, 3)]])
        assert result == Vec2(2.0, 0.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            compose_point_forces([])

    def _oracle(self, candidate_sets):
        best_adm = None
        best_any = None
        for combo in itertools.product(*candidate_sets):
            sx = sum(v.x for v in combo)
            sy = sum(v.y for v in combo)
            mag2 = sx * sx + sy * sy
            admissible = all(
                a.dot(b) >= 0.0 for a, b in itertools.combinations(combo, 2)
            )
            if best_any is None or mag2 < best_any[0]:
                best_any = (mag2, Vec2(sx, sy))
            if admissible and (best_adm is None or mag2 < best_adm[0]):
                best_adm = (mag2, Vec2(sx, sy))
        return best_adm[1] if best_adm is not None else best_any[1]

    def test_two_features_against_enumeration(self):
        base = [Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0), Vec2(0, -1)]
        scaled = [v * 2.0 for v in base]
        result = compose_point_forces([base, scaled])
        assert result == self._oracle([base, scaled])

    def test_random_cases_against_enumeration(self, rng):
        for _ in range(500):
            k = rng.randint(2, 3)
            sets = []
            for _ in range(k):
                mx = rng.uniform(0.5, 4.0)
                my = rng.uniform(0.5, 4.0)
                sets.append([Vec2(-mx, 0), Vec2(mx * rng.uniform(0.5, 1.5), 0),
                             Vec2(0, -my), Vec2(0, my * rng.uniform(0.5, 1.5))])
            result = compose_point_forces(sets)
            expected = self._oracle(sets)
            assert result.norm() == pytest.approx(expected.norm(), rel=1e-12)

    def test_identical_sets_bounded_by_sum_of_minima(self):
        base = [Vec2(-3, 0), Vec2(1, 0), Vec2(0, -2), Vec2(0, 2)]
        result = compose_point_forces([base, base])
        min_mag = min(v.norm() for v in base)
        assert result.norm() <= 2 * min_mag + 1e-12

    def test_scaling_invariance_of_argmin(self):
        base = [Vec2(-8, 0), Vec2(2, 0), Vec2(0, -3), Vec2(0, 3)]
        scaled = [v * 7.5 for v in base]
        assert compose_point_forces([scaled]) == Vec2(15.0, 0.0)


def _label(rect: Rect, feature_id: str = "f0") -> Label:
    return Label(feature_id=feature_id, rect=rect, conn=Vec2(0, 0), font_size=10.0)


class TestAttachmentForce:
    leader = LeaderSpec(length=10.0, direction=90.0, kind=LeaderType.FIXED_DIR_FREE_CONN)

    def _feature(self, x: float, y: float) -> PointFeature:
        return PointFeature(id="f0", anchor=Vec2(x, y), depth=100.0, text="T")

    def test_missed_to_the_right(self):
        label = _label(Rect(12, 20, 20, 24))
        f = attachment_force(label, self._feature(10, 0), self.leader)
        assert f == Vec2(-2.0, 0.0)

    def test_missed_to_the_left(self):
        label = _label(Rect(2, 20, 8, 24))
        f = attachment_force(label, self._feature(10, 0), self.leader)
        assert f == Vec2(2.0, 0.0)

    def test_ray_hits_edge_no_force(self):
        label = _label(Rect(5, 20, 15, 24))
        f = attachment_force(label, self._feature(10, 0), self.leader)
        assert f == Vec2(0.0, 0.0)

    def test_applying_force_reattaches(self):
        label = _label(Rect(12, 20, 20, 24))
        f = attachment_force(label, self._feature(10, 0), self.leader)
        moved = _label(label.rect.translated(f))
        assert moved.rect.x_min <= 10.0 <= moved.rect.x_max

    def test_free_direction_type_gets_no_force(self):
        label = _label(Rect(12, 20, 20, 24))
        leader2 = LeaderSpec(kind=LeaderType.FREE_DIR_FIXED_CONN)
        assert attachment_force(label, self._feature(10, 0), leader2) == Vec2(0.0, 0.0)


class TestScreenForce:
    screen = Rect(0, 0, 100, 100)

    def test_near_left_edge(self):
        assert screen_force(Rect(1, 40, 5, 44), self.screen, d_min=2.0) == Vec2(1.0, 0.0)

    def test_fully_inside(self):
        assert screen_force(Rect(40, 40, 60, 60), self.screen, d_min=2.0) == Vec2(0.0, 0.0)

    def test_crossing_edge(self):
        assert screen_force(Rect(-3, 40, 2, 44), self.screen, d_min=2.0) == Vec2(5.0, 0.0)

    def test_corner_sums_both_axes(self):
        f = screen_force(Rect(1, 1, 5, 5), self.screen, d_min=2.0)
        assert f == Vec2(1.0, 1.0)

    def test_oversized_label_rejected(self):
        with pytest.raises(LabelLargerThanScreenError):
            screen_force(Rect(0, 40, 99, 44), self.screen, d_min=2.0)


class TestConflictScan:
    def test_matches_brute_force(self, rng):
        for _ in range(20):
            labels = random_labels(rng, 25, span=120.0)
            d_min = rng.uniform(0.1, 3.0)
            assert conflicting_label_pairs(labels, d_min) == brute_force_label_conflicts(labels, d_min)

    def test_feature_pairs_match_brute_force(self, rng):
        for _ in range(10):
            labels = random_labels(rng, 15, span=80.0)
            features = [
                PointFeature(
                    id=f"f{i}",
                    anchor=Vec2(rng.uniform(0, 100), rng.uniform(0, 100)),
                    depth=100.0,
                    text="T",
                )
                for i in range(15)
            ]
            got = conflicting_feature_pairs(labels, features, 0.5)
            assert sorted(got) == sorted(brute_force_feature_conflicts(labels, features, 0.5))


def scene_config(**kw) -> LayoutConfig:
    kw.setdefault("screen", Rect(0, 0, 200, 150))
    return LayoutConfig(**kw)


class TestAssembleForces:
    def test_conflict_free_scene_all_zero(self):
        labels = labels_from_rects([Rect(10, 10, 20, 14), Rect(50, 50, 62, 54)])
        features = [
            PointFeature(id="f0", anchor=Vec2(15, 2), depth=100, text="A"),
            PointFeature(id="f1", anchor=Vec2(55, 40), depth=100, text="B"),
        ]
        fa = assemble_forces(labels, features, scene_config())
        assert all(f == Vec2(0.0, 0.0) for f in fa.totals)
        assert fa.max_magnitude() == 0.0

    def test_single_overlap_equals_overlap_force(self):
        r1, r2 = Rect(50, 50, 60, 54), Rect(58, 51, 70, 55)
        labels = labels_from_rects([r1, r2])
        features = [
            PointFeature(id="f0", anchor=Vec2(55, 30), depth=100, text="A"),
            PointFeature(id="f1", anchor=Vec2(64, 30), depth=100, text="B"),
        ]
        cfg = scene_config()
        fa = assemble_forces(labels, features, cfg)
        expected = overlap_force(r1, r2, RESOLVE_TARGET_FACTOR * cfg.d_min)
        assert fa.totals[0] == expected[0]
        assert fa.totals[1] == expected[1]

    def test_deleted_labels_get_zero(self):
        labels = labels_from_rects([Rect(50, 50, 60, 54), Rect(58, 51, 70, 55)])
        labels[1] = Label(
            feature_id="f1", rect=labels[1].rect, conn=labels[1].conn, font_size=10.0, deleted=True
        )
        features = [
            PointFeature(id="f0", anchor=Vec2(55, 30), depth=100, text="A"),
            PointFeature(id="f1", anchor=Vec2(64, 30), depth=100, text="B"),
        ]
        fa = assemble_forces(labels, features, scene_config())
        assert fa.totals[1] == Vec2(0.0, 0.0)
        assert fa.totals[0] == Vec2(0.0, 0.0)  # partner deleted, no pair conflict

    def test_total_equals_per_source_recomputation(self, rng):
        # Independent recomputation of every source for every label.
        cfg = scene_config()
        target = RESOLVE_TARGET_FACTOR * cfg.d_min
        for _ in range(6):
            labels = random_labels(rng, 10, span=60.0, max_side=14.0)
            features = [
                PointFeature(
                    id=f"f{i}",
                    anchor=Vec2(rng.uniform(0, 70), rng.uniform(0, 70)),
                    depth=100.0,
                    text="T",
                )
                for i in range(10)
            ]
            fa = assemble_forces(labels, features, cfg)
            for i, lbl in enumerate(labels):
                expected = Vec2(0.0, 0.0)
                for j, other in enumerate(labels):
                    if j == i:
                        continue
                    ri, rj = lbl.rect, other.rect
                    if interiors_overlap(ri, rj):
                        expected = expected + overlap_force(ri, rj, target)[0]
                    elif rect_distance(ri, rj) < cfg.d_min:
                        expected = expected + separation_force(ri, rj, target)[0]
                cand_sets = []
                hits = []
                for f in features:
                    if f.id == lbl.feature_id:
                        continue
                    gap = point_rect_signed_clearance(f.anchor, lbl.rect) - f.symbol_radius
                    if gap < cfg.d_min:
                        hits.append((gap, f))
                hits.sort(key=lambda t: t[0])
                for _, f in hits[:8]:
                    cand_sets.append(
                        point_repulsion_candidates(lbl.rect, f.anchor, f.symbol_radius, target)
                    )
                if cand_sets:
                    expected = expected + compose_point_forces(cand_sets)
                feature = next(f for f in features if f.id == lbl.feature_id)
                expected = expected + attachment_force(lbl, feature, cfg.leader)
                expected = expected + screen_force(lbl.rect, cfg.screen, cfg.d_min)
                assert fa.totals[i].x == pytest.approx(expected.x, abs=1e-9)
                assert fa.totals[i].y == pytest.approx(expected.y, abs=1e-9)

    def test_forces_zero_iff_no_conflicts(self, rng):
        # Gate semantics: forces appear exactly when the scene has a
        # conflict at d_min, never for merely-snug layouts above it.
        cfg = scene_config()
        for _ in range(10):
            labels = random_labels(rng, 12, span=80.0, max_side=12.0)
            features = [
                PointFeature(
                    id=f"f{i}",
                    anchor=Vec2(rng.uniform(0, 90), rng.uniform(0, 90)),
                    depth=100.0,
                    text="T",
                )
                for i in range(12)
            ]
            fa = assemble_forces(labels, features, cfg)
            has_conflict = bool(
                conflicting_label_pairs(labels, cfg.d_min)
                or conflicting_feature_pairs(labels, features, cfg.d_min)
            )
            has_screen_violation = any(
                screen_force(l.rect, cfg.screen, cfg.d_min).norm() > 0 for l in labels
            )
            anchors = {f.id: f for f in features}
            has_attachment_miss = any(
                attachment_force(l, anchors[l.feature_id], cfg.leader).norm() > 0
                for l in labels
            )
            expected_nonzero = has_conflict or has_screen_violation or has_attachment_miss
            assert (fa.max_magnitude() > 0) == expected_nonzero

    def test_contribution_tags_sorted_and_summed(self):
        labels = labels_from_rects([Rect(50, 50, 60, 54), Rect(58, 51, 70, 55)])
        features = [
            PointFeature(id="f0", anchor=Vec2(55, 30), depth=100, text="A"),
            PointFeature(id="f1", anchor=Vec2(64, 30), depth=100, text="B"),
        ]
        fa = assemble_forces(labels, features, scene_config())
        for entry, total in zip(fa.contributions, fa.totals):
            tags = [t for t, _ in entry]
            assert tags == sorted(tags)
            s = Vec2(0.0, 0.0)
            for _, v in entry:
                s = s + v
            assert s == total
