"""The iterative placement loop.

Each pass rebuilds the proximity graph from current label centers, assembles
constraint forces, solves the beam network for displacements, and moves the
labels. The loop stops once the iteration cap is reached or the largest
nodal force falls below the force threshold. Large scenes can be partitioned
into spatial subgroups that iterate independently.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Sequence

from .beams import solve_displacements
from .forces import assemble_forces
from .geometry import Rect, Vec2
from .metrics import count_conflicts, mean_direction_deviation, total_displacement_cm
from .proximity import (
    ProximityGraph,
    delaunay_graph,
    mean_nn_distance,
    mst_graph,
    partition_labels,
    prune_graph,
)
from .repair import greedy_repair
from .scene import (
    GraphKind,
    Label,
    LayoutConfig,
    LeaderSpec,
    LeaderType,
    PointFeature,
    connection_point,
    initial_layout,
)

MIN_ITERATION_CAP = 20
MAX_ITERATION_CAP = 100


def effective_max_iterations(n_labels: int, override: int | None = None) -> int:
    """Iteration cap: the label count, clamped to [20, 100], unless overridden."""
    if n_labels < 1:
        raise ValueError("need at least one label")
    if override is not None:
        if override < 1:
            raise ValueError("iteration override must be at least 1")
        return override
    return min(MAX_ITERATION_CAP, max(MIN_ITERATION_CAP, n_labels))


def project_for_leader_type(displacement: Vec2, leader: LeaderSpec) -> Vec2:
    """Restrict motion for the fully fixed leader type.

    Fixed direction plus fixed connection means the label may only slide
    along the leader axis; every other type moves freely.
    """
    if leader.kind is not LeaderType.FIXED_DIR_FIXED_CONN:
        return displacement
    u = leader.unit()
    return u * displacement.dot(u)


def handle_offscreen_fixed(
    labels: Sequence[Label], screen: Rect, leader: LeaderSpec
) -> list[Label]:
    """Delete labels that stick out of the screen across the leader axis.

    Applies to the fully fixed leader type: such labels can only slide along
    the leader, so an overhang perpendicular to it can never be resolved.
    The deleted labels' features drop out of all conflict checks.
    """
    n = leader.unit().perp()
    out = []
    lo_screen = min(n.dot(Vec2(screen.x_min, screen.y_min)), n.dot(Vec2(screen.x_max, screen.y_max)),
                    n.dot(Vec2(screen.x_min, screen.y_max)), n.dot(Vec2(screen.x_max, screen.y_min)))
    hi_screen = max(n.dot(Vec2(screen.x_min, screen.y_min)), n.dot(Vec2(screen.x_max, screen.y_max)),
                    n.dot(Vec2(screen.x_min, screen.y_max)), n.dot(Vec2(screen.x_max, screen.y_min)))
    for lbl in labels:
        if lbl.deleted:
            out.append(lbl)
            continue
        r = lbl.rect
        corners = (Vec2(r.x_min, r.y_min), Vec2(r.x_max, r.y_min),
                   Vec2(r.x_min, r.y_max), Vec2(r.x_max, r.y_max))
        supports = [n.dot(c) for c in corners]
        if min(supports) < lo_screen or max(supports) > hi_screen:
            out.append(replace(lbl, deleted=True))
        else:
            out.append(lbl)
    return out


@dataclass(frozen=True, slots=True)
class StepStats:
    step: int
    max_force: float
    label_conflicts: int
    feature_conflicts: int
    graph_edges: int
    force_tags: frozenset[str]


@dataclass(slots=True)
class OptimizerState:
    labels: list[Label]
    step_count: int = 0
    last_max_force: float = float("inf")
    history: list[StepStats] = field(default_factory=list)


def build_graph(labels: Sequence[Label], features: Sequence[PointFeature], cfg: LayoutConfig) -> ProximityGraph:
    """The per-iteration proximity graph: pruned Delaunay or MST."""
    if cfg.graph_kind is GraphKind.MST:
        return mst_graph(labels, weight="center")
    t_d = cfg.t_d_factor * mean_nn_distance([f.anchor for f in features])
    return prune_graph(delaunay_graph(labels), labels, t_d)


def step(state: OptimizerState, features: Sequence[PointFeature], cfg: LayoutConfig) -> OptimizerState:
    """One pass: rebuild graph, assemble forces, solve, move labels."""
    labels = state.labels
    graph = build_graph(labels, features, cfg)
    assignment = assemble_forces(labels, features, cfg)
    totals = assignment.totals
    if cfg.leader.kind is LeaderType.FIXED_DIR_FIXED_CONN:
        # Only the along-leader force component can produce motion, so the
        # perpendicular remainder is dropped before the solve as well.
        totals = tuple(project_for_leader_type(f, cfg.leader) for f in totals)
    max_force = max(
        (totals[i].norm() for i, l in enumerate(labels) if not l.deleted), default=0.0
    )
    disp = solve_displacements(graph, totals, cfg.resolved_beam())

    anchors = {f.id: f.anchor for f in features}
    moved: list[Label] = []
    for i, lbl in enumerate(labels):
        if lbl.deleted:
            moved.append(lbl)
            continue
        d = project_for_leader_type(disp.translations[i], cfg.leader)
        rect = lbl.rect.translated(d)
        conn = connection_point(rect, anchors[lbl.feature_id], cfg.leader, lbl.conn + d)
        moved.append(replace(lbl, rect=rect, conn=conn))

    n_rr, n_rp = count_conflicts(moved, features, cfg.d_min)
    stats = StepStats(
        step=state.step_count + 1,
        max_force=max_force,
        label_conflicts=n_rr,
        feature_conflicts=n_rp,
        graph_edges=len(graph.edges),
        force_tags=assignment.tags_seen(),
    )
    return OptimizerState(
        labels=moved,
        step_count=state.step_count + 1,
        last_max_force=max_force,
        history=state.history + [stats],
    )


@dataclass(frozen=True, slots=True)
class LoopStats:
    """Termination record of one optimization loop (one subgroup or the
    whole scene)."""

    size: int
    steps: int
    max_iterations: int
    final_max_force: float
    exit_reason: str  # "force" or "max_iterations"
    history: tuple[StepStats, ...]


@dataclass(frozen=True, slots=True)
class RunReport:
    method: str
    graph_kind: str
    leader_type: int
    iterations: int
    total_steps: int
    elapsed_s: float
    exit_reason: str
    infeasible: bool
    label_conflicts: int
    feature_conflicts: int
    total_displacement_cm: float
    mean_direction_deviation_deg: float
    initial_graph_edges: int
    solver_graph_edges: int
    force_tags: tuple[str, ...]
    subgroup_sizes: tuple[int, ...]
    loops: tuple[LoopStats, ...]
    deleted_count: int
    repair_moves: int

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "graph_kind": self.graph_kind,
            "leader_type": self.leader_type,
            "iterations": self.iterations,
            "total_steps": self.total_steps,
            "elapsed_s": self.elapsed_s,
            "exit_reason": self.exit_reason,
            "infeasible": self.infeasible,
            "label_conflicts": self.label_conflicts,
            "feature_conflicts": self.feature_conflicts,
            "total_displacement_cm": self.total_displacement_cm,
            "mean_direction_deviation_deg": self.mean_direction_deviation_deg,
            "initial_graph_edges": self.initial_graph_edges,
            "solver_graph_edges": self.solver_graph_edges,
            "force_tags": list(self.force_tags),
            "subgroup_sizes": list(self.subgroup_sizes),
            "deleted_count": self.deleted_count,
            "repair_moves": self.repair_moves,
        }


def _run_loop(
    labels: list[Label], features: Sequence[PointFeature], cfg: LayoutConfig
) -> tuple[list[Label], LoopStats]:
    n_live = sum(1 for l in labels if not l.deleted)
    if n_live == 0:
        return labels, LoopStats(0, 0, 0, 0.0, "force", ())
    t_s = effective_max_iterations(n_live, cfg.t_s_override)
    t_f = cfg.force_threshold
    state = OptimizerState(labels=labels)
    while True:
        state = step(state, features, cfg)
        if state.step_count >= t_s or state.last_max_force <= t_f:
            break
    reason = "force" if state.last_max_force <= t_f else "max_iterations"
    return state.labels, LoopStats(
        size=n_live,
        steps=state.step_count,
        max_iterations=t_s,
        final_max_force=state.last_max_force,
        exit_reason=reason,
        history=tuple(state.history),
    )


def run(
    features: Sequence[PointFeature], cfg: LayoutConfig
) -> tuple[list[Label], RunReport]:
    """Optimize a whole scene and report how it went.

    With t_num set, labels are partitioned once into spatial subgroups that
    iterate independently (no cross-group forces). After the loop (or loops)
    exit, any residual conflicts are handed to a bounded greedy repair pass:
    the iteration has a blind spot for labels wedged between opposing
    constraints whose forces cancel, and the local search resolves those
    without disturbing the rest of the layout. A scene that still has
    conflicts after repair is flagged infeasible rather than raising.
    """
    t0 = time.perf_counter()
    features = list(features)
    initial = initial_layout(features, cfg)
    labels = list(initial)
    if cfg.leader.kind is LeaderType.FIXED_DIR_FIXED_CONN:
        labels = handle_offscreen_fixed(labels, cfg.screen, cfg.leader)
    reference = list(labels)

    t_d = cfg.t_d_factor * mean_nn_distance([f.anchor for f in features])
    ref_graph = prune_graph(delaunay_graph(reference), reference, t_d)

    feature_by_id = {f.id: f for f in features}
    loops: list[LoopStats] = []
    if cfg.t_num is None:
        labels, stats = _run_loop(labels, features, cfg)
        loops.append(stats)
        subgroup_sizes: tuple[int, ...] = ()
    else:
        groups = partition_labels(labels, cfg.t_num)
        merged = list(labels)
        for group in groups:
            sub_labels = [labels[i] for i in group]
            sub_features = [feature_by_id[l.feature_id] for l in sub_labels]
            solved, stats = _run_loop(sub_labels, sub_features, cfg)
            loops.append(stats)
            for local, original in enumerate(group):
                merged[original] = solved[local]
        labels = merged
        subgroup_sizes = tuple(len(g) for g in groups)

    repair_moves = 0
    n_rr, n_rp = count_conflicts(labels, features, cfg.d_min)
    if n_rr + n_rp > 0:
        # Finishing pass for force-cancellation deadlocks. Kept deliberately
        # short-ranged (64 mm at the default d_min): nudging preserves the
        # relative arrangement the iteration produced, relocating does not.
        labels, repair_moves = greedy_repair(
            labels, features, cfg, diagonal=True, max_axis_retries=5
        )
        n_rr, n_rp = count_conflicts(labels, features, cfg.d_min)

    elapsed = time.perf_counter() - t0
    tags: set[str] = set()
    for loop in loops:
        for s in loop.history:
            tags.update(s.force_tags)
    reasons = {loop.exit_reason for loop in loops}
    reason = reasons.pop() if len(reasons) == 1 else "mixed"
    report = RunReport(
        method="beams",
        graph_kind=cfg.graph_kind.value,
        leader_type=int(cfg.leader.kind),
        iterations=max((loop.steps for loop in loops), default=0),
        total_steps=sum(loop.steps for loop in loops),
        elapsed_s=elapsed,
        exit_reason=reason,
        infeasible=(n_rr + n_rp) > 0,
        label_conflicts=n_rr,
        feature_conflicts=n_rp,
        total_displacement_cm=total_displacement_cm(reference, labels),
        mean_direction_deviation_deg=mean_direction_deviation(reference, labels, ref_graph),
        initial_graph_edges=len(ref_graph.edges),
        solver_graph_edges=sum(
            loop.history[0].graph_edges for loop in loops if loop.history
        ),
        force_tags=tuple(sorted(tags)),
        subgroup_sizes=subgroup_sizes,
        loops=tuple(loops),
        deleted_count=sum(1 for l in labels if l.deleted),
        repair_moves=repair_moves,
    )
    return labels, report
