import math
import re
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import pandas as pd
from loguru import logger
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from lib import metrics
from lib.layout import PipelineError, force_fit, post_scale_baseline, run_pipeline
from lib.models import AspectRatioTarget, Graph, GraphValidationError, LayoutConfig, LayoutState, graph_distances
from lib.render import RenderOptions, render_gallery

DEFAULT_TARGETS = ("1:3", "9:16", "1:1", "4:3", "16:9", "21:9", "32:9")
METRIC_COLUMNS = ["ar", "ksm", "eld", "nr", "nu", "np", "ec"]
SIZE_BUCKET = 10

ARCOL = "arcol"
ARCOL_SCALED = "arcol-post-scaled"
BASELINE = "baseline"
BASELINE_SCALED = "baseline-post-scaled"


def size_bucket(nodes: int) -> str:
    "Node-count bucket label of width 10, e.g. 20-29"
    lo = (nodes // SIZE_BUCKET) * SIZE_BUCKET
    return f"{lo}-{lo + SIZE_BUCKET - 1}"


class CompareResult(BaseModel):
    """
    Rows of a comparison sweep.

    `rows` hold one metric record per (graph, target, method), `timings` one record
    per pipeline run and `errors` one record per failed cell.
    """

    model_config = ConfigDict(frozen=True)

    rows: List[dict] = []
    timings: List[dict] = []
    errors: List[dict] = []

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def summary(self) -> pd.DataFrame:
        "Corpus means per (target, method), followed by an `avg` group per method over all targets"
        df = self.to_frame()
        if df.empty:
            return df
        per_target = df.groupby(["target", "method"], sort=False)[METRIC_COLUMNS].mean().reset_index()
        overall = df.groupby("method", sort=False)[METRIC_COLUMNS].mean().reset_index()
        overall.insert(0, "target", "avg")
        return pd.concat([per_target, overall], ignore_index=True)

    def by_size(self) -> pd.DataFrame:
        "Metric means per node-count bucket and method"
        df = self.to_frame()
        if df.empty:
            return df
        return df.groupby(["size_bucket", "method"])[METRIC_COLUMNS].mean().reset_index()

    def deltas(self, method: str = BASELINE_SCALED) -> pd.DataFrame:
        "ARCOL metrics minus those of `method` per (graph, target)"
        df = self.to_frame()
        if df.empty:
            return df
        indexed = df.set_index(["graph", "target", "method"])[METRIC_COLUMNS]
        arcol = indexed.xs(ARCOL, level="method")
        other = indexed.xs(method, level="method")
        return (arcol - other).dropna(how="all").reset_index()

    def timing_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.timings)

    def write(self, out_dir: Path):
        "Write metrics.csv, summary.csv, by_size.csv, timings.csv and, when any, errors.csv"
        out_dir.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(out_dir / "metrics.csv", index=False)
        self.summary().to_csv(out_dir / "summary.csv", index=False)
        self.by_size().to_csv(out_dir / "by_size.csv", index=False)
        self.timing_frame().to_csv(out_dir / "timings.csv", index=False)
        if self.errors:
            pd.DataFrame(self.errors).to_csv(out_dir / "errors.csv", index=False)
        logger.info(f"Wrote comparison tables to {out_dir}")


def _row(name: str, graph: Graph, target: AspectRatioTarget, method: str, report) -> dict:
    return {
        "graph": name,
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "size_bucket": size_bucket(len(graph.nodes)),
        "target": str(target),
        "target_ar": target.value,
        "method": method,
        **report.model_dump(),
        "ar_error": abs(math.log(report.ar / target.value)) if 0 < report.ar < math.inf else math.inf,
    }


def _timing(name: str, target: Optional[AspectRatioTarget], method: str, timings: Dict[str, float]) -> dict:
    return {
        "graph": name,
        "target": str(target) if target is not None else "",
        "method": method,
        **timings,
        "total": sum(timings.values()),
    }


def _error(name: str, target: Optional[AspectRatioTarget], method: str, e: Exception) -> dict:
    logger.error(f"{name} [{target or 'own'}] {method} failed: {e}")
    return {
        "graph": name,
        "target": str(target) if target is not None else "",
        "method": method,
        "stage": getattr(e, "stage", ""),
        "error": str(e),
    }


def _gallery_name(name: str, target: AspectRatioTarget) -> str:
    return re.sub(r"[^\w.-]+", "_", f"{name}_{target}") + ".svg"


def compare(
    graphs: Mapping[str, Graph],
    targets: Sequence[Union[str, float, AspectRatioTarget]] = DEFAULT_TARGETS,
    cfg: Optional[LayoutConfig] = None,
    include_scaled_arcol: bool = False,
    gallery_dir: Optional[Path] = None,
    render_options: Optional[RenderOptions] = None,
) -> CompareResult:
    """
    Compare aspect-ratio-aware layouts with the unconstrained and post-scaled baselines.

    Every graph gets one unconstrained baseline run, which is post-scaled to each
    target. Every (graph, target) cell gets an aspect-ratio-aware run. All runs share
    the seed and every other setting of `cfg`. A failing cell is recorded and the
    sweep carries on.

    Args:
        graphs (Mapping[str, Graph]): Graphs by name, processed in the given order.
        targets (Sequence): Aspect ratio targets ("W:H", decimals or parsed targets).
        cfg (LayoutConfig, optional): Shared settings; its own target is ignored.
        include_scaled_arcol (bool): Also report the aware layout force-fitted to the target.
        gallery_dir (Path, optional): Where to write one side-by-side SVG per cell.
        render_options (RenderOptions, optional): Styling of the gallery.

    Returns:
        CompareResult: Metric rows, timings and errors.
    """
    cfg = cfg or LayoutConfig()
    parsed = [AspectRatioTarget.parse(t) for t in targets]
    rows: List[dict] = []
    timings: List[dict] = []
    errors: List[dict] = []
    faster = cells = 0
    if gallery_dir is not None:
        gallery_dir.mkdir(parents=True, exist_ok=True)

    for name, graph in tqdm(graphs.items(), desc="Comparing", unit="graphs", leave=False):
        try:
            distances = graph_distances(graph, cfg.ideal_edge_length)
        except GraphValidationError as e:
            errors.append(_error(name, None, "all", e))
            continue

        baseline: Optional[LayoutState] = None
        baseline_report = None
        baseline_time = math.inf
        try:
            result = run_pipeline(graph, cfg.model_copy(update={"baseline": True}))
            baseline, baseline_report = result.layout, result.metrics
            baseline_time = sum(result.timings.values())
            timings.append(_timing(name, None, BASELINE, result.timings))
        except PipelineError as e:
            errors.append(_error(name, None, BASELINE, e))

        for target in parsed:
            panels = []
            arcol_time = math.inf
            try:
                result = run_pipeline(graph, cfg.model_copy(update={"target_ar": target, "baseline": False}))
                arcol_time = sum(result.timings.values())
                timings.append(_timing(name, target, ARCOL, result.timings))
                rows.append(_row(name, graph, target, ARCOL, result.metrics))
                panels.append((f"{ARCOL} {target}", result.layout, target))
                if include_scaled_arcol:
                    scaled = force_fit(result.layout, target)
                    rows.append(
                        _row(name, graph, target, ARCOL_SCALED, metrics.report(scaled, distances))
                    )
            except (PipelineError, ValueError) as e:
                errors.append(_error(name, target, ARCOL, e))

            if baseline is not None:
                rows.append(_row(name, graph, target, BASELINE, baseline_report))
                try:
                    scaled = post_scale_baseline(baseline, target)
                    rows.append(_row(name, graph, target, BASELINE_SCALED, metrics.report(scaled, distances)))
                    panels.append((f"{BASELINE_SCALED} {target}", scaled, target))
                except ValueError as e:
                    errors.append(_error(name, target, BASELINE_SCALED, e))

            if math.isfinite(arcol_time) and math.isfinite(baseline_time):
                cells += 1
                faster += baseline_time < arcol_time
            if gallery_dir is not None and panels:
                (gallery_dir / _gallery_name(name, target)).write_bytes(render_gallery(panels, render_options))

    if cells:
        logger.info(f"Baseline was faster in {faster} of {cells} cells ({100 * faster / cells:.0f}%)")
    if errors:
        logger.warning(f"{len(errors)} comparison cells failed")
    logger.success(f"Compared {len(graphs)} graphs at {len(parsed)} targets: {len(rows)} metric rows")
    return CompareResult(rows=rows, timings=timings, errors=errors)
