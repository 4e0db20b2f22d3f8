import sys
from pathlib import Path
from typing import Dict, Optional

import pandas as pd
from loguru import logger
from pydantic import ValidationError

from lib.experiments import DEFAULT_TARGETS, compare
from lib.io import (
    SUFFIXES,
    TraceWriter,
    detect_format,
    load_config,
    parse_graph,
    parse_layout,
    serialize_layout,
    serialize_placements,
)
from lib.layout import PipelineError, run_pipeline
from lib.metrics import report
from lib.models import AspectRatioTarget, Graph, GraphParseError, GraphValidationError, LayoutConfig
from lib.render import RenderOptions, render_svg

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PIPELINE = 2


def read_graph(path: Path, fmt: Optional[str], cfg: LayoutConfig) -> Graph:
    with open(path, "rb") as f:
        data = f.read()
    return parse_graph(
        data,
        fmt or detect_format(path),
        default_size=cfg.default_node_size,
        largest_component=cfg.largest_component,
    )


def config_from_args(args) -> LayoutConfig:
    overrides = {
        "target_ar": getattr(args, "ar", None),
        "seed": getattr(args, "seed", None),
        "restarts": getattr(args, "restarts", None),
        "force_fit": True if getattr(args, "force_fit", False) else None,
        "baseline": True if getattr(args, "baseline", False) else None,
        "refine": False if getattr(args, "no_refine", False) else None,
        "largest_component": True if getattr(args, "largest_component", False) else None,
    }
    return load_config(args.config, overrides)


def run_layout(args) -> int:
    cfg = config_from_args(args)
    post_scale = AspectRatioTarget.parse(args.post_scale) if args.post_scale else None
    graph = read_graph(args.input, args.format, cfg)
    logger.info(f"Read {len(graph.nodes)} nodes and {len(graph.edges)} edges from {args.input}")

    trace = TraceWriter(args.trace_stress) if args.trace_stress else None
    try:
        result = run_pipeline(graph, cfg, post_scale=post_scale, trace=trace)
    finally:
        if trace is not None:
            trace.close()

    payload = serialize_layout(result.layout, cfg, result.refine)
    if args.out:
        args.out.write_bytes(payload)
        logger.info(f"Layout written to {args.out}")
        print(result.metrics.model_dump_json(indent=2))
    else:
        sys.stdout.write(payload.decode("utf-8") + "\n")

    if args.svg:
        frame = post_scale or (None if cfg.baseline else cfg.target_ar)
        args.svg.write_bytes(render_svg(result.layout, RenderOptions(scale=args.svg_scale), frame))
        logger.info(f"SVG written to {args.svg}")
    if args.dump_decomposition:
        args.dump_decomposition.write_text(result.decomposition.model_dump_json(indent=2), encoding="utf-8")
    if args.dump_grid and result.grid is not None:
        args.dump_grid.write_text(result.grid.model_dump_json(indent=2), encoding="utf-8")
    if args.dump_placements:
        args.dump_placements.write_bytes(serialize_placements(result.placements))
    logger.success(f"Laid out {args.input} at aspect ratio {result.metrics.ar:.3f}")
    return EXIT_OK


def run_metrics(args) -> int:
    with open(args.input, "rb") as f:
        document = parse_layout(f.read())
    state = document.to_state()
    cfg = document.config or LayoutConfig()
    if args.graph:
        graph = read_graph(args.graph, args.format, cfg)
        if graph.nodes.keys() != state.graph.nodes.keys() or graph.edges != state.graph.edges:
            raise GraphValidationError(f"Layout {args.input} does not belong to graph {args.graph}")

    metrics = report(state, ideal_edge_length=cfg.ideal_edge_length)
    print(metrics.model_dump_json(indent=2))
    if args.csv:
        row = pd.DataFrame([{"layout": str(args.input), "target": str(cfg.target_ar), **metrics.model_dump()}])
        row.to_csv(args.csv, mode="a", header=not args.csv.exists(), index=False)
        logger.info(f"Appended metrics to {args.csv}")
    return EXIT_OK


def run_compare(args) -> int:
    cfg = config_from_args(args)
    files = sorted(p for p in args.corpus.iterdir() if p.suffix.lower() in SUFFIXES)
    graphs: Dict[str, Graph] = {}
    for path in files:
        try:
            graphs[path.stem] = read_graph(path, None, cfg)
        except (GraphParseError, GraphValidationError) as e:
            logger.error(f"Skipping {path.name}: {e}")
    if not graphs:
        raise GraphValidationError(f"No readable graphs in {args.corpus}")

    targets = [AspectRatioTarget.parse(t) for t in args.ars.split(",")]
    result = compare(
        graphs,
        targets,
        cfg,
        include_scaled_arcol=args.include_scaled_arcol,
        gallery_dir=None if args.no_gallery else args.out / "gallery",
    )
    result.write(args.out)
    print(result.summary().to_string(index=False))
    return EXIT_OK


def build_parser():
    import argparse

    parser = argparse.ArgumentParser(description="Aspect-ratio-aware orthogonal graph layout")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def common(sub):
        sub.add_argument("--config", type=Path, help="TOML or JSON file overriding layout defaults")
        sub.add_argument("--seed", type=int, help="Random seed (falls back to ARCOL_SEED, then 42)")
        sub.add_argument("--restarts", type=int, help="Number of shuffled stress restarts")
        sub.add_argument("--no-refine", action="store_true", help="Skip the final bounded rescale")
        sub.add_argument(
            "--largest-component", action="store_true", help="Keep the largest component of disconnected inputs"
        )

    layout = subparsers.add_parser("layout", help="Lay out one graph")
    common(layout)
    layout.add_argument("--input", type=Path, required=True, help="Graph file")
    layout.add_argument("--format", choices=["json", "dot", "graphml"], help="Graph format (default: from suffix)")
    layout.add_argument("--ar", type=str, help="Target aspect ratio, e.g. 16:9 or 1.777")
    layout.add_argument("--out", type=Path, help="Layout JSON output (default: stdout)")
    layout.add_argument("--svg", type=Path, help="SVG output")
    layout.add_argument("--svg-scale", type=float, default=1.0, help="SVG pixels per layout unit")
    layout.add_argument("--force-fit", action="store_true", help="Scale the result to the target exactly")
    layout.add_argument("--baseline", action="store_true", help="Switch every aspect-ratio mechanism off")
    layout.add_argument("--post-scale", type=str, help="Force-fit the finished layout to this aspect ratio")
    layout.add_argument("--dump-decomposition", type=Path, help="Write the core/tree split as JSON")
    layout.add_argument(
        "--trace-stress", type=str, help="Per-restart stress trace CSV path with a {restart} placeholder"
    )
    layout.add_argument("--dump-grid", type=Path, help="Write the snapped grid positions as JSON")
    layout.add_argument("--dump-placements", type=Path, help="Write every scored tree placement as JSON")
    layout.set_defaults(run=run_layout)

    metrics = subparsers.add_parser("metrics", help="Measure a layout")
    metrics.add_argument("--input", type=Path, required=True, help="Layout JSON")
    metrics.add_argument("--graph", type=Path, help="Graph file the layout must belong to")
    metrics.add_argument("--format", choices=["json", "dot", "graphml"], help="Graph format (default: from suffix)")
    metrics.add_argument("--csv", type=Path, help="Append a metrics row to this CSV")
    metrics.set_defaults(run=run_metrics)

    comparison = subparsers.add_parser("compare", help="Compare against the baselines over a corpus")
    common(comparison)
    comparison.add_argument("--corpus", type=Path, required=True, help="Directory of graph files")
    comparison.add_argument("--ars", type=str, default=",".join(DEFAULT_TARGETS), help="Comma-separated targets")
    comparison.add_argument("--out", type=Path, required=True, help="Report directory")
    comparison.add_argument(
        "--include-scaled-arcol", action="store_true", help="Also report aware layouts force-fitted to the target"
    )
    comparison.add_argument("--no-gallery", action="store_true", help="Skip the SVG gallery")
    comparison.set_defaults(run=run_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except PipelineError as e:
        logger.error(f"Pipeline failed in stage {e.stage}: {e.__cause__ or e}")
        return EXIT_PIPELINE
    except (GraphParseError, GraphValidationError, ValidationError, ValueError, OSError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
