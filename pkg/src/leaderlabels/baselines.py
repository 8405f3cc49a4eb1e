"""Reference placement methods for comparison runs.

`nop` leaves the initial layout untouched. `localp` is a purely greedy
local repair: it repeatedly picks the most conflicted label and slides it to
the nearest position that clears all of its conflicts. Only conflicted
labels ever move, which resolves overlaps but tends to tear up relative
directions between neighbors; that contrast is exactly what the beam method
is measured against.
"""

from __future__ import annotations

from typing import Sequence

from .optimizer import handle_offscreen_fixed
from .repair import greedy_repair
from .scene import Label, LayoutConfig, LeaderType, PointFeature, initial_layout


def nop(features: Sequence[PointFeature], cfg: LayoutConfig) -> list[Label]:
    """The unmodified initial layout."""
    return initial_layout(list(features), cfg)


def localp(features: Sequence[PointFeature], cfg: LayoutConfig) -> list[Label]:
    """Greedy conflict-driven adjustment of the initial layout.

    Labels are ranked by conflict degree (ties by index); the worst one is
    grid-searched for the nearest clearing displacement along the leader
    type's admissible axes, with the radius doubling on failure. Residual
    conflicts are left in place when the bounded search fails, for the
    metrics to report honestly.
    """
    features = list(features)
    labels = initial_layout(features, cfg)
    if cfg.leader.kind is LeaderType.FIXED_DIR_FIXED_CONN:
        labels = handle_offscreen_fixed(labels, cfg.screen, cfg.leader)
    repaired, _ = greedy_repair(labels, features, cfg)
    return repaired
