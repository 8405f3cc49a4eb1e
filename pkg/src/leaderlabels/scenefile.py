"""Scene and placement file formats, plus the synthetic scene generator.

Scenes are JSON with explicit mm units in field names, so files stay
readable and diffable. The generator is fully seeded: the same (n, seed,
profile, charset) always produces byte-identical output, which makes the
generated scenes usable as canonical test fixtures.
"""

from __future__ import annotations

import json
import math
import random
from typing import Any, Sequence

from .geometry import Rect, Vec2
from .scene import (
    BeamParams,
    GraphKind,
    Label,
    LayoutConfig,
    LeaderSpec,
    LeaderType,
    PointFeature,
)

SCHEMA_VERSION = "1"

_ASCII_POOL = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
_CJK_POOL = "北京王府井大街东西南中山路口公园湖海学堂市场商城村镇桥站塔楼阁寺庙巷里坊区门外内新老长安"


class SceneValidationError(ValueError):
    """A scene or placement file violated the schema."""


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise SceneValidationError(f"{where}: missing required field {key!r}")
    value = data[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SceneValidationError(f"{where}.{key}: expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, kind):
        raise SceneValidationError(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _optional_number(data: dict, key: str, default: float, where: str) -> float:
    if key not in data or data[key] is None:
        return default
    if not isinstance(data[key], (int, float)) or isinstance(data[key], bool):
        raise SceneValidationError(f"{where}.{key}: expected a number, got {data[key]!r}")
    return float(data[key])


def parse_scene(data: Any, source: str = "<scene>") -> tuple[list[PointFeature], LayoutConfig]:
    if not isinstance(data, dict):
        raise SceneValidationError(f"{source}: top level must be an object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SceneValidationError(f"{source}: unsupported schema_version {version!r}")

    screen_raw = _require(data, "screen", dict, source)
    width = _require(screen_raw, "width_mm", float, f"{source}.screen")
    height = _require(screen_raw, "height_mm", float, f"{source}.screen")
    if width <= 0 or height <= 0:
        raise SceneValidationError(f"{source}.screen: dimensions must be positive")
    screen = Rect(0.0, 0.0, width, height)

    raw_features = _require(data, "features", list, source)
    if not raw_features:
        raise SceneValidationError(f"{source}.features: at least one feature is required")
    features: list[PointFeature] = []
    seen_ids: set[str] = set()
    for pos, raw in enumerate(raw_features):
        where = f"{source}.features[{pos}]"
        if not isinstance(raw, dict):
            raise SceneValidationError(f"{where}: expected an object")
        fid = _require(raw, "id", str, where)
        if fid in seen_ids:
            raise SceneValidationError(f"{where}: duplicate feature id {fid!r}")
        seen_ids.add(fid)
        x = _require(raw, "x_mm", float, where)
        y = _require(raw, "y_mm", float, where)
        if not (0.0 <= x <= width and 0.0 <= y <= height):
            raise SceneValidationError(
                f"{where}: position ({x}, {y}) lies outside the {width}x{height} mm screen"
            )
        depth = _require(raw, "depth", float, where)
        text = _require(raw, "text", str, where)
        radius = _optional_number(raw, "symbol_radius_mm", 0.5, where)
        try:
            features.append(
                PointFeature(id=fid, anchor=Vec2(x, y), depth=depth, text=text, symbol_radius=radius)
            )
        except ValueError as exc:
            raise SceneValidationError(f"{where}: {exc}") from exc

    cfg_raw = data.get("config", {})
    if cfg_raw is None:
        cfg_raw = {}
    if not isinstance(cfg_raw, dict):
        raise SceneValidationError(f"{source}.config: expected an object")
    cfg = _parse_config(cfg_raw, screen, f"{source}.config")
    return features, cfg


def _parse_config(raw: dict, screen: Rect, where: str) -> LayoutConfig:
    leader_raw = raw.get("leader", {}) or {}
    if not isinstance(leader_raw, dict):
        raise SceneValidationError(f"{where}.leader: expected an object")
    kind_code = leader_raw.get("type", int(LeaderType.FIXED_DIR_FREE_CONN))
    try:
        kind = LeaderType(int(kind_code))
    except (ValueError, TypeError) as exc:
        raise SceneValidationError(f"{where}.leader.type: must be 1, 2, 3, or 4") from exc
    leader = LeaderSpec(
        length=_optional_number(leader_raw, "length_mm", 10.0, f"{where}.leader"),
        direction=_optional_number(leader_raw, "direction_deg", 90.0, f"{where}.leader"),
        kind=kind,
    )

    beam_raw = raw.get("beam", {}) or {}
    if not isinstance(beam_raw, dict):
        raise SceneValidationError(f"{where}.beam: expected an object")
    max_step = beam_raw.get("max_step_mm")
    if max_step is not None and (not isinstance(max_step, (int, float)) or isinstance(max_step, bool)):
        raise SceneValidationError(f"{where}.beam.max_step_mm: expected a number")
    beam_defaults = BeamParams()
    beam = BeamParams(
        elastic_modulus=_optional_number(
            beam_raw, "elastic_modulus", beam_defaults.elastic_modulus, f"{where}.beam"
        ),
        cross_section=_optional_number(
            beam_raw, "cross_section", beam_defaults.cross_section, f"{where}.beam"
        ),
        moment_of_inertia=_optional_number(
            beam_raw, "moment_of_inertia", beam_defaults.moment_of_inertia, f"{where}.beam"
        ),
        ground_stiffness=_optional_number(
            beam_raw, "ground_stiffness", beam_defaults.ground_stiffness, f"{where}.beam"
        ),
        max_step=float(max_step) if max_step is not None else None,
    )

    graph_code = raw.get("graph", GraphKind.DT.value)
    try:
        graph_kind = GraphKind(graph_code)
    except ValueError as exc:
        raise SceneValidationError(f"{where}.graph: must be 'dt' or 'mst'") from exc

    t_s = raw.get("t_s_override")
    if t_s is not None and not isinstance(t_s, int):
        raise SceneValidationError(f"{where}.t_s_override: expected an integer")
    t_num = raw.get("t_num")
    if t_num is not None and not isinstance(t_num, int):
        raise SceneValidationError(f"{where}.t_num: expected an integer")

    try:
        return LayoutConfig(
            screen=screen,
            d_min=_optional_number(raw, "d_min_mm", 0.2, where),
            w_max_pt=_optional_number(raw, "w_max_pt", 12.0, where),
            w_min_pt=_optional_number(raw, "w_min_pt", 4.0, where),
            leader=leader,
            t_d_factor=_optional_number(raw, "t_d_factor", 3.0, where),
            t_s_override=t_s,
            t_f_factor=_optional_number(raw, "t_f_factor", 0.1, where),
            t_num=t_num,
            graph_kind=graph_kind,
            padding=_optional_number(raw, "padding_mm", 0.0, where),
            beam=beam,
        )
    except ValueError as exc:
        raise SceneValidationError(f"{where}: {exc}") from exc


def scene_to_dict(features: Sequence[PointFeature], cfg: LayoutConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "screen": {"width_mm": cfg.screen.width, "height_mm": cfg.screen.height},
        "features": [
            {
                "id": f.id,
                "x_mm": f.anchor.x,
                "y_mm": f.anchor.y,
                "depth": f.depth,
                "text": f.text,
                "symbol_radius_mm": f.symbol_radius,
            }
            for f in features
        ],
        "config": {
            "d_min_mm": cfg.d_min,
            "w_max_pt": cfg.w_max_pt,
            "w_min_pt": cfg.w_min_pt,
            "leader": {
                "length_mm": cfg.leader.length,
                "direction_deg": cfg.leader.direction,
                "type": int(cfg.leader.kind),
            },
            "t_d_factor": cfg.t_d_factor,
            "t_s_override": cfg.t_s_override,
            "t_f_factor": cfg.t_f_factor,
            "t_num": cfg.t_num,
            "graph": cfg.graph_kind.value,
            "padding_mm": cfg.padding,
            "beam": {
                "elastic_modulus": cfg.beam.elastic_modulus,
                "cross_section": cfg.beam.cross_section,
                "moment_of_inertia": cfg.beam.moment_of_inertia,
                "ground_stiffness": cfg.beam.ground_stiffness,
                "max_step_mm": cfg.beam.max_step,
            },
        },
    }


def load_scene(path: str) -> tuple[list[PointFeature], LayoutConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneValidationError(f"{path}: not valid JSON ({exc})") from exc
    return parse_scene(data, source=path)


def save_scene(features: Sequence[PointFeature], cfg: LayoutConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(features, cfg), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def generate_synthetic(
    n: int,
    seed: int,
    screen: tuple[float, float] = (250.0, 150.0),
    profile: str = "uniform",
    charset: str = "ascii",
) -> dict:
    """Deterministic pseudo-random scene with n features.

    Profiles: "uniform" scatters anchors evenly, "clustered" draws them
    around a handful of cluster centers. Depths are log-uniform in [50, 500]
    so font sizes span the configured range; texts are 4 to 14 characters
    from the ASCII or CJK pool. Anchors keep a margin below the top edge so
    upward leaders have headroom.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if profile not in ("uniform", "clustered"):
        raise ValueError(f"unknown profile {profile!r}")
    if charset not in ("ascii", "cjk"):
        raise ValueError(f"unknown charset {charset!r}")
    rng = random.Random(seed)
    width, height = screen
    margin = 4.0
    top_margin = 22.0
    pool = _ASCII_POOL if charset == "ascii" else _CJK_POOL

    if profile == "clustered":
        k = max(1, round(math.sqrt(n) / 1.5))
        centers = [
            (rng.uniform(margin, width - margin), rng.uniform(margin, height - top_margin))
            for _ in range(k)
        ]
        spread = min(width, height) / 10.0

    features = []
    for idx in range(n):
        if profile == "uniform":
            x = rng.uniform(margin, width - margin)
            y = rng.uniform(margin, height - top_margin)
        else:
            cx, cy = centers[rng.randrange(len(centers))]
            x = min(width - margin, max(margin, rng.gauss(cx, spread)))
            y = min(height - top_margin, max(margin, rng.gauss(cy, spread)))
        depth = math.exp(rng.uniform(math.log(50.0), math.log(500.0)))
        length = rng.randint(4, 14)
        text = "".join(rng.choice(pool) for _ in range(length))
        features.append(
            {
                "id": f"p{idx:04d}",
                "x_mm": round(x, 4),
                "y_mm": round(y, 4),
                "depth": round(depth, 4),
                "text": text,
                "symbol_radius_mm": 0.5,
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "screen": {"width_mm": width, "height_mm": height},
        "features": features,
        "config": {},
    }


def synthetic_scene(
    n: int,
    seed: int,
    screen: tuple[float, float] = (250.0, 150.0),
    profile: str = "uniform",
    charset: str = "ascii",
) -> tuple[list[PointFeature], LayoutConfig]:
    """Generate and parse in one step; handy for tests and benchmarks."""
    return parse_scene(generate_synthetic(n, seed, screen, profile, charset))


def labels_to_dict(labels: Sequence[Label], report: dict | None = None) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "labels": [
            {
                "feature_id": l.feature_id,
                "rect_mm": [l.rect.x_min, l.rect.y_min, l.rect.x_max, l.rect.y_max],
                "conn_mm": [l.conn.x, l.conn.y],
                "font_size_pt": l.font_size,
                "deleted": l.deleted,
            }
            for l in labels
        ],
    }
    if report is not None:
        out["report"] = report
    return out


def parse_placement(data: Any, source: str = "<placement>") -> list[Label]:
    if not isinstance(data, dict):
        raise SceneValidationError(f"{source}: top level must be an object")
    raw_labels = _require(data, "labels", list, source)
    labels = []
    for pos, raw in enumerate(raw_labels):
        where = f"{source}.labels[{pos}]"
        if not isinstance(raw, dict):
            raise SceneValidationError(f"{where}: expected an object")
        fid = _require(raw, "feature_id", str, where)
        rect_vals = _require(raw, "rect_mm", list, where)
        if len(rect_vals) != 4 or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in rect_vals
        ):
            raise SceneValidationError(f"{where}.rect_mm: expected four numbers")
        conn_vals = _require(raw, "conn_mm", list, where)
        if len(conn_vals) != 2 or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in conn_vals
        ):
            raise SceneValidationError(f"{where}.conn_mm: expected two numbers")
        size = _require(raw, "font_size_pt", float, where)
        deleted = raw.get("deleted", False)
        if not isinstance(deleted, bool):
            raise SceneValidationError(f"{where}.deleted: expected a boolean")
        try:
            labels.append(
                Label(
                    feature_id=fid,
                    rect=Rect(*[float(v) for v in rect_vals]),
                    conn=Vec2(float(conn_vals[0]), float(conn_vals[1])),
                    font_size=size,
                    deleted=deleted,
                )
            )
        except ValueError as exc:
            raise SceneValidationError(f"{where}: {exc}") from exc
    return labels


def load_placement(path: str) -> list[Label]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneValidationError(f"{path}: not valid JSON ({exc})") from exc
    return parse_placement(data, source=path)


def save_placement(labels: Sequence[Label], path: str, report: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(labels_to_dict(labels, report), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
