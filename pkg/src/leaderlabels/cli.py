"""Command-line surface: place, gen, eval, bench.

Exit codes: 0 success (including infeasible scenes, which are reported in
the output rather than failed), 1 usage error, 2 scene or placement
validation error, 3 I/O error.
"""

from __future__ import annotations

import dataclasses
import json
import sys
import time

import click

from . import baselines, optimizer
from .forces import conflicting_feature_pairs, conflicting_label_pairs
from .metrics import build_report
from .proximity import delaunay_graph, mean_nn_distance, prune_graph
from .scene import GraphKind, LayoutConfig, LeaderSpec, LeaderType, initial_layout
from .scenefile import (
    SceneValidationError,
    generate_synthetic,
    load_placement,
    load_scene,
    labels_to_dict,
    parse_scene,
)
from .svgrender import write_svg


@click.group()
def cli() -> None:
    """Optimize the placement of leader-line point labels."""


def _apply_overrides(
    cfg: LayoutConfig,
    leader_type: int | None,
    graph: str | None,
    tnum: int | None,
    iterations: int | None,
) -> LayoutConfig:
    changes: dict = {}
    if leader_type is not None:
        changes["leader"] = LeaderSpec(
            length=cfg.leader.length,
            direction=cfg.leader.direction,
            kind=LeaderType(leader_type),
        )
    if graph is not None:
        changes["graph_kind"] = GraphKind(graph)
    if tnum is not None:
        changes["t_num"] = None if tnum <= 0 else tnum
    if iterations is not None:
        changes["t_s_override"] = iterations
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _reference_graph(labels, features, cfg):
    t_d = cfg.t_d_factor * mean_nn_distance([f.anchor for f in features])
    return prune_graph(delaunay_graph(labels), labels, t_d)


@cli.command()
@click.argument("scene", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["beams", "localp", "nop"]), default="beams")
@click.option("--leader-type", type=click.IntRange(1, 4), default=None, help="Override the leader type.")
@click.option("--graph", type=click.Choice(["dt", "mst"]), default=None, help="Proximity graph kind.")
@click.option("--tnum", type=int, default=None, help="Max subgroup size; 0 disables clustering.")
@click.option(
    "--seed-iterations",
    type=int,
    default=None,
    help="Override the iteration cap (default: label count clamped to [20, 100]).",
)
@click.option("--out-json", type=click.Path(dir_okay=False), default=None)
@click.option("--out-svg", type=click.Path(dir_okay=False), default=None)
@click.option("--svg-graph", is_flag=True, help="Overlay the proximity graph in the SVG.")
@click.option("--metrics", "show_metrics", is_flag=True, help="Print the full metrics report.")
def place(
    scene: str,
    method: str,
    leader_type: int | None,
    graph: str | None,
    tnum: int | None,
    seed_iterations: int | None,
    out_json: str | None,
    out_svg: str | None,
    svg_graph: bool,
    show_metrics: bool,
) -> None:
    """Run a placement method on SCENE and report the outcome."""
    features, cfg = load_scene(scene)
    cfg = _apply_overrides(cfg, leader_type, graph, tnum, seed_iterations)

    t0 = time.perf_counter()
    if method == "beams":
        labels, run_report = optimizer.run(features, cfg)
        report = run_report.as_dict()
    else:
        place_fn = baselines.localp if method == "localp" else baselines.nop
        labels = place_fn(features, cfg)
        report = {"method": method, "elapsed_s": time.perf_counter() - t0}
    initial = initial_layout(features, cfg)
    ref_graph = _reference_graph(initial, features, cfg)
    metrics = build_report(
        initial, labels, features, cfg.d_min, ref_graph, elapsed_s=report["elapsed_s"]
    )
    report["metrics"] = metrics.as_dict()
    report["infeasible"] = (metrics.label_conflicts + metrics.feature_conflicts) > 0

    if out_json:
        with open(out_json, "w", encoding="utf-8") as fh:
            json.dump(labels_to_dict(labels, report), fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
    if out_svg:
        write_svg(
            out_svg,
            labels,
            features,
            cfg.screen,
            graph=_reference_graph(labels, features, cfg) if svg_graph else None,
            label_conflicts=conflicting_label_pairs(labels, cfg.d_min),
            feature_conflicts=conflicting_feature_pairs(labels, features, cfg.d_min),
        )
    payload = report if show_metrics else {
        "method": method,
        "infeasible": report["infeasible"],
        "label_conflicts": metrics.label_conflicts,
        "feature_conflicts": metrics.feature_conflicts,
        "total_displacement_cm": metrics.total_displacement_cm,
        "mean_direction_deviation_deg": metrics.mean_direction_deviation_deg,
        "elapsed_s": report["elapsed_s"],
    }
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@cli.command()
@click.option("--n", type=click.IntRange(min=1), required=True, help="Number of features.")
@click.option("--seed", type=int, default=0)
@click.option("--width-mm", type=float, default=250.0)
@click.option("--height-mm", type=float, default=150.0)
@click.option("--profile", type=click.Choice(["uniform", "clustered"]), default="uniform")
@click.option("--charset", type=click.Choice(["ascii", "cjk"]), default="ascii")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")
def gen(n: int, seed: int, width_mm: float, height_mm: float, profile: str, charset: str, out: str | None) -> None:
    """Generate a deterministic synthetic scene."""
    data = generate_synthetic(n, seed, (width_mm, height_mm), profile, charset)
    text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@cli.command("eval")
@click.argument("scene", type=click.Path(exists=True, dir_okay=False))
@click.argument("placement", type=click.Path(exists=True, dir_okay=False))
def eval_cmd(scene: str, placement: str) -> None:
    """Metrics for a stored placement, relative to the scene's initial layout."""
    features, cfg = load_scene(scene)
    labels = load_placement(placement)
    if len(labels) != len(features):
        raise SceneValidationError(
            f"{placement}: {len(labels)} labels for {len(features)} features"
        )
    initial = initial_layout(features, cfg)
    ref_graph = _reference_graph(initial, features, cfg)
    metrics = build_report(initial, labels, features, cfg.d_min, ref_graph)
    payload = metrics.as_dict()
    payload["infeasible"] = (metrics.label_conflicts + metrics.feature_conflicts) > 0
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@cli.command()
@click.option("--sizes", default="10,30,60,120,200", help="Comma-separated label counts.")
@click.option("--seed", type=int, default=0)
@click.option("--width-mm", type=float, default=250.0)
@click.option("--height-mm", type=float, default=150.0)
def bench(sizes: str, seed: int, width_mm: float, height_mm: float) -> None:
    """Sweep scene sizes and report steps, time, and residual conflicts."""
    try:
        counts = [int(s) for s in sizes.split(",") if s.strip()]
    except ValueError as exc:
        raise click.UsageError(f"--sizes must be comma-separated integers: {exc}")
    rows = []
    for n in counts:
        features, cfg = parse_scene(generate_synthetic(n, seed, (width_mm, height_mm)))
        labels, report = optimizer.run(features, cfg)
        rows.append(
            {
                "n": n,
                "steps": report.total_steps,
                "elapsed_s": report.elapsed_s,
                "label_conflicts": report.label_conflicts,
                "feature_conflicts": report.feature_conflicts,
                "infeasible": report.infeasible,
            }
        )
        click.echo(json.dumps(rows[-1], sort_keys=True))


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except SceneValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
