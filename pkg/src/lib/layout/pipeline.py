import math
import time
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict

from lib import metrics
from lib.models import (
    AspectRatioTarget,
    Decomposition,
    Graph,
    LayoutConfig,
    LayoutState,
    MetricsReport,
    RefineReport,
    bounding_box,
)

from .decompose import layout_trees, peel_trees
from .distribution import RunResult, TraceCallback, distribution_runs
from .orthogonalize import GridLayout, orthogonalize_core
from .refine import force_fit_with_report, refine_layout
from .tree_attach import attach_trees, compact_and_route

STAGES = ("decompose", "distribution", "orthogonalize", "attach", "compact", "refine", "metrics")


class PipelineError(RuntimeError):
    "A failure inside one pipeline stage; the original exception is chained as the cause"

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class PipelineResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    layout: LayoutState
    metrics: MetricsReport
    refine: Optional[RefineReport] = None
    decomposition: Decomposition
    grid: Optional[GridLayout] = None
    placements: List[dict] = []
    timings: Dict[str, float] = {}
    restart: int = 0


class _Finished(BaseModel):
    "One restart carried through to the refined drawing"

    model_config = ConfigDict(frozen=True)

    layout: LayoutState
    refine: Optional[RefineReport] = None
    grid: Optional[GridLayout] = None
    placements: List[dict] = []
    restart: int = 0


@contextmanager
def _stage(name: str, timings: Dict[str, float]) -> Iterator[None]:
    started = time.perf_counter()
    with logger.contextualize(stage=name):
        try:
            yield
        except PipelineError:
            raise
        except Exception as e:
            logger.error(f"Stage {name} failed: {e}")
            raise PipelineError(name, str(e)) from e
        finally:
            timings[name] = timings.get(name, 0.0) + time.perf_counter() - started


def _finish(
    run: RunResult,
    decomposition: Decomposition,
    cfg: LayoutConfig,
    first_dummy_id: int,
    post_scale: Optional[AspectRatioTarget],
    timings: Dict[str, float],
) -> _Finished:
    placements: List[dict] = []
    refine_report: Optional[RefineReport] = None

    with _stage("orthogonalize", timings):
        core, planar = orthogonalize_core(run.layout, cfg, first_dummy_id=first_dummy_id)

    with _stage("attach", timings):
        state = attach_trees(decomposition, core, planar, cfg, placements=placements)

    with _stage("compact", timings):
        state = compact_and_route(state, cfg)

    with _stage("refine", timings):
        if cfg.force_fit and not cfg.baseline:
            state, refine_report = force_fit_with_report(state, cfg.target_ar)
        elif cfg.refine and not cfg.baseline:
            state, refine_report = refine_layout(state, cfg)
        if post_scale is not None:
            state, refine_report = force_fit_with_report(state, post_scale)
            state = state.model_copy(update={"baseline": cfg.baseline})

    return _Finished(
        layout=state, refine=refine_report, grid=planar.grid, placements=placements, restart=run.restart
    )


def _final_error(finished: _Finished, target: float) -> float:
    return abs(math.log(bounding_box(finished.layout).aspect_ratio / target))


def run_pipeline(
    graph: Graph,
    cfg: LayoutConfig,
    post_scale: Optional[AspectRatioTarget] = None,
    trace: Optional[TraceCallback] = None,
) -> PipelineResult:
    """
    Lay out a connected graph end to end.

    Peel trees, place the core by stress, orthogonalize it, hang the trees back on,
    compact, then refine toward the target (or force-fit it exactly) and measure.
    With `cfg.select_on_final_ar` every restart is carried to the end and the drawing
    closest to the target wins, ties going to the restart ranked first by the
    distribution phase. A baseline config switches every aspect-ratio mechanism off
    and finishes only its lowest-stress restart; `post_scale` then force-fits the
    finished baseline layout to a target after the fact.

    Args:
        graph (Graph): The input graph.
        cfg (LayoutConfig): The layout config.
        post_scale (AspectRatioTarget, optional): Target for post-scaling a finished layout.
        trace (callable, optional): Per-iteration stress trace callback.

    Raises:
        PipelineError: When a stage fails; `stage` names it.

    Returns:
        PipelineResult: The layout, its metrics and per-stage artifacts.
    """
    timings: Dict[str, float] = {}

    with _stage("decompose", timings):
        decomposition = layout_trees(peel_trees(graph), cfg.ideal_edge_length)

    with _stage("distribution", timings):
        runs = distribution_runs(decomposition.core, cfg, trace=trace)
    if cfg.baseline or not cfg.select_on_final_ar:
        runs = runs[:1]

    # Dummy ids must not collide with the peeled tree nodes
    first_dummy_id = max(graph.node_ids) + 1
    target = (post_scale or cfg.target_ar).value
    finished: List[Tuple[float, int, _Finished]] = []
    for rank, run in enumerate(runs):
        done = _finish(run, decomposition, cfg, first_dummy_id, post_scale, timings)
        finished.append((round(_final_error(done, target), 9), rank, done))
    _, rank, best = min(finished, key=lambda item: item[:2])
    if rank:
        logger.info(f"Restart {best.restart} finished closest to the target, ranked {rank + 1} after distribution")

    with _stage("metrics", timings):
        report = metrics.report(best.layout, ideal_edge_length=cfg.ideal_edge_length)

    logger.success(
        f"Laid out {len(graph.nodes)} nodes in {cfg.restarts} restarts: ar {report.ar:.3f} "
        f"(target {cfg.target_ar}), {sum(timings.values()):.2f}s"
    )
    return PipelineResult(
        layout=best.layout,
        metrics=report,
        refine=best.refine,
        decomposition=decomposition,
        grid=best.grid,
        placements=best.placements,
        timings=timings,
        restart=best.restart,
    )
