"""Domain entities, text measurement, and the initial leadered layout.

A scene is a set of point features on the screen plane. Every feature gets
one label connected by a straight leader line. Font size shrinks with the
feature's distance from the viewpoint, the usual perspective cue.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum

from .geometry import Rect, Vec2, unit_from_degrees

PT_TO_MM = 0.3528

# Monospace approximation: em fractions per character class. Deterministic
# across platforms, unlike real font metrics.
SINGLE_WIDTH_EM = 0.60
DOUBLE_WIDTH_EM = 1.00
LINE_HEIGHT_EM = 1.20

# Unicode blocks rendered double width: CJK Unified Ideographs, CJK Symbols
# and Punctuation, Halfwidth and Fullwidth Forms.
_DOUBLE_WIDTH_RANGES = (
    (0x3000, 0x303F),
    (0x4E00, 0x9FFF),
    (0xFF00, 0xFFEF),
)


class LeaderType(IntEnum):
    """The four straight-leader variants, by direction and connection freedom."""

    FIXED_DIR_FIXED_CONN = 1
    FREE_DIR_FIXED_CONN = 2
    FREE_DIR_FREE_CONN = 3
    FIXED_DIR_FREE_CONN = 4

    @property
    def fixed_direction(self) -> bool:
        return self in (LeaderType.FIXED_DIR_FIXED_CONN, LeaderType.FIXED_DIR_FREE_CONN)

    @property
    def fixed_connection(self) -> bool:
        return self in (LeaderType.FIXED_DIR_FIXED_CONN, LeaderType.FREE_DIR_FIXED_CONN)


class GraphKind(str, Enum):
    """Which proximity graph drives the beam network."""

    DT = "dt"
    MST = "mst"


@dataclass(frozen=True, slots=True)
class PointFeature:
    """An anchor on the screen plane with a label text.

    depth is the planar distance from the viewpoint in arbitrary positive
    units; it only enters font sizing as a ratio. symbol_radius is the drawn
    marker radius in mm, used for label-vs-feature conflict checks.
    """

    id: str
    anchor: Vec2
    depth: float
    text: str
    symbol_radius: float = 0.5

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError(f"feature {self.id!r} has empty text")
        if not self.depth > 0:
            raise ValueError(f"feature {self.id!r} has non-positive depth {self.depth!r}")
        if self.symbol_radius < 0:
            raise ValueError(f"feature {self.id!r} has negative symbol radius")


@dataclass(frozen=True, slots=True)
class LeaderSpec:
    length: float = 10.0
    direction: float = 90.0
    kind: LeaderType = LeaderType.FIXED_DIR_FREE_CONN

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise ValueError("leader length must be positive")
        object.__setattr__(self, "direction", float(self.direction) % 360.0)

    def unit(self) -> Vec2:
        return unit_from_degrees(self.direction)


@dataclass(frozen=True, slots=True)
class Label:
    """A placed label: bounding rectangle plus leader connection point."""

    feature_id: str
    rect: Rect
    conn: Vec2
    font_size: float
    deleted: bool = False


@dataclass(frozen=True, slots=True)
class BeamParams:
    """Stiffness parameters of the elastic network, in mm-based units.

    The defaults are tuned so that a node's displacement response is of the
    same order as the applied force (ground stiffness near 1) while beam
    coupling still drags neighbors along; much softer ground springs make
    the iteration overshoot and ping-pong, much stiffer coupling prevents
    conflicting pairs from separating at all. max_step caps per-iteration
    node translation; None means "resolve to 2 * d_min when the layout
    config is applied".
    """

    elastic_modulus: float = 1.0
    cross_section: float = 5.0
    moment_of_inertia: float = 100.0
    ground_stiffness: float = 1.0
    max_step: float | None = None

    def __post_init__(self) -> None:
        for name in ("elastic_modulus", "cross_section", "moment_of_inertia", "ground_stiffness"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.max_step is not None and not self.max_step > 0:
            raise ValueError("max_step must be strictly positive")


@dataclass(frozen=True, slots=True)
class LayoutConfig:
    """All tunables of the placement pipeline."""

    screen: Rect
    d_min: float = 0.2
    w_max_pt: float = 12.0
    w_min_pt: float = 4.0
    leader: LeaderSpec = field(default_factory=LeaderSpec)
    t_d_factor: float = 3.0
    t_s_override: int | None = None
    t_f_factor: float = 0.1
    t_num: int | None = None
    graph_kind: GraphKind = GraphKind.DT
    padding: float = 0.0
    conn_anchor: tuple[float, float] = (0.5, 0.0)
    beam: BeamParams = field(default_factory=BeamParams)

    def __post_init__(self) -> None:
        if not self.d_min > 0:
            raise ValueError("d_min must be positive")
        if not (0 < self.w_min_pt <= self.w_max_pt):
            raise ValueError("font bounds must satisfy 0 < w_min_pt <= w_max_pt")
        if not self.t_d_factor > 0:
            raise ValueError("t_d_factor must be positive")
        if not self.t_f_factor > 0:
            raise ValueError("t_f_factor must be positive")
        if self.t_num is not None and self.t_num < 1:
            raise ValueError("t_num must be at least 1")
        if self.padding < 0:
            raise ValueError("padding must be non-negative")

    @property
    def force_threshold(self) -> float:
        return self.t_f_factor * self.d_min

    def resolved_beam(self) -> BeamParams:
        """Beam parameters with the default step cap filled in."""
        if self.beam.max_step is not None:
            return self.beam
        return replace(self.beam, max_step=2.0 * self.d_min)


def is_double_width(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _DOUBLE_WIDTH_RANGES)


def measure_text(text: str, font_size_pt: float) -> tuple[float, float]:
    """Width and height in mm of a single-line string at the given size.

    Per-character advance is 0.6 em for single-width characters and 1.0 em
    for double-width (CJK) ones; line height is 1.2 em.
    """
    if not text:
        raise ValueError("cannot measure empty text")
    if not font_size_pt > 0:
        raise ValueError("font size must be positive")
    em = font_size_pt * PT_TO_MM
    width = sum((DOUBLE_WIDTH_EM if is_double_width(ch) else SINGLE_WIDTH_EM) for ch in text) * em
    return width, LINE_HEIGHT_EM * em


def font_size_for(feature: PointFeature, d_nearest: float, cfg: LayoutConfig) -> float:
    """Perspective font size: nearest feature gets w_max_pt, farther ones
    shrink proportionally, clamped to [w_min_pt, w_max_pt]."""
    if not d_nearest > 0:
        raise ValueError("d_nearest must be positive")
    size = cfg.w_max_pt * d_nearest / feature.depth
    return min(cfg.w_max_pt, max(cfg.w_min_pt, size))


def connection_point(rect: Rect, anchor: Vec2, leader: LeaderSpec, translated_conn: Vec2) -> Vec2:
    """Where the leader attaches after a label has moved.

    Fixed-connection types carry the point rigidly with the rect. The free
    free-direction type snaps to the rect point nearest the anchor. The
    sliding fixed-direction type intersects the leader's supporting line
    with the attachment edge's supporting line; the ray may miss the edge
    span itself, which the attachment force corrects on later passes.
    """
    kind = leader.kind
    if kind.fixed_connection:
        return translated_conn
    if kind is LeaderType.FREE_DIR_FREE_CONN:
        x = min(max(anchor.x, rect.x_min), rect.x_max)
        y = min(max(anchor.y, rect.y_min), rect.y_max)
        return Vec2(x, y)
    u = leader.unit()
    if abs(u.y) >= abs(u.x):
        level = rect.y_min if u.y > 0 else rect.y_max
        t = (level - anchor.y) / u.y
        return Vec2(anchor.x + t * u.x, level)
    level = rect.x_min if u.x > 0 else rect.x_max
    t = (level - anchor.x) / u.x
    return Vec2(level, anchor.y + t * u.y)


def initial_layout(features: list[PointFeature], cfg: LayoutConfig) -> list[Label]:
    """Place every label at its leader tip.

    The leader runs from the anchor along the configured direction for the
    configured length; the label rectangle is positioned so that its initial
    connection point (bottom-edge midpoint by default) sits on the tip.
    """
    if not features:
        raise ValueError("at least one feature is required")
    d_nearest = min(f.depth for f in features)
    u = cfg.leader.unit()
    ax_frac, ay_frac = cfg.conn_anchor
    labels = []
    for f in features:
        size = font_size_for(f, d_nearest, cfg)
        w, h = measure_text(f.text, size)
        w += 2.0 * cfg.padding
        h += 2.0 * cfg.padding
        tip = f.anchor + u * cfg.leader.length
        x_min = tip.x - ax_frac * w
        y_min = tip.y - ay_frac * h
        rect = Rect(x_min, y_min, x_min + w, y_min + h)
        labels.append(Label(feature_id=f.id, rect=rect, conn=tip, font_size=size))
    return labels
