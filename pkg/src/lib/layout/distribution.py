import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict

from lib.models import AspectRatioTarget, Graph, LayoutConfig, LayoutState, Stage, graph_distances

from .geometry import EPSILON

# (restart, iteration, stress, ar_proxy)
TraceCallback = Callable[[int, int, float, float], None]

MAX_OVERLAP_SWEEPS = 50
CONVERGENCE_WINDOW = 3


class SpreadStats(BaseModel):
    "Centroid and coordinate spread of a layout; sigma_x / sigma_y stands in for its aspect ratio"

    model_config = ConfigDict(frozen=True)

    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    sigma_x: float
    sigma_y: float
    ar_proxy: float
    degenerate: bool = False


class NormalizationScale(BaseModel):
    model_config = ConfigDict(frozen=True)

    s_x: float
    s_y: float

    @classmethod
    def toward(cls, ar_current: float, target: float) -> "NormalizationScale":
        "Fourth-root damped scale that removes half of the log aspect-ratio error"
        s_x = (target / ar_current) ** 0.25
        return cls(s_x=s_x, s_y=1.0 / s_x)


class RunResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    layout: LayoutState
    final_stress: float
    final_ar: float
    ar_error: float
    restart: int = 0
    iterations: int = 0
    residual_overlaps: int = 0


def _spread(coordinates: np.ndarray, eps: float) -> SpreadStats:
    mean_x, mean_y = coordinates.mean(axis=0)
    var_x, var_y = coordinates.var(axis=0)
    degenerate = bool(var_x < eps or var_y < eps)
    return SpreadStats(
        mean_x=float(mean_x),
        mean_y=float(mean_y),
        var_x=float(var_x),
        var_y=float(var_y),
        sigma_x=float(math.sqrt(var_x)),
        sigma_y=float(math.sqrt(var_y)),
        ar_proxy=float(math.sqrt(max(var_x, eps) / max(var_y, eps))),
        degenerate=degenerate,
    )


def _variance_floor(ideal_edge_length: float) -> float:
    return 1e-9 * ideal_edge_length**2


def spread_stats(state: LayoutState, ideal_edge_length: float = 40.0) -> SpreadStats:
    """
    Population means and variances of the node centres.

    Args:
        state (LayoutState): A layout with at least two nodes.
        ideal_edge_length (float): Sets the variance floor below which the spread is degenerate.

    Returns:
        SpreadStats: The statistics, flagged degenerate when either variance is below the floor.
    """
    if len(state.positions) < 2:
        raise ValueError("Spread statistics need at least two nodes")
    return _spread(state.position_array(), _variance_floor(ideal_edge_length))


def _normalize(coordinates: np.ndarray, target: float, eps: float) -> Tuple[np.ndarray, bool]:
    stats = _spread(coordinates, eps)
    if stats.degenerate:
        return coordinates, False
    scale = NormalizationScale.toward(stats.ar_proxy, target)
    center = np.array([stats.mean_x, stats.mean_y])
    return center + (coordinates - center) * np.array([scale.s_x, scale.s_y]), True


def normalize_ar(state: LayoutState, target: AspectRatioTarget, ideal_edge_length: float = 40.0) -> LayoutState:
    """
    Rescale a layout about its centroid so its spread ratio moves halfway (in log space)
    toward the target. The product of the two standard deviations is kept.
    """
    coordinates, applied = _normalize(state.position_array(), target.value, _variance_floor(ideal_edge_length))
    if not applied:
        logger.warning("Skipping aspect-ratio normalization of a degenerate layout")
        return state
    return state.with_array(coordinates)


def _weights(distances: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        weights = np.where(distances > 0, 1.0 / distances**2, 0.0)
    np.fill_diagonal(weights, 0.0)
    return weights


def _pairwise_norms(coordinates: np.ndarray) -> np.ndarray:
    delta = coordinates[:, None, :] - coordinates[None, :, :]
    return np.sqrt((delta**2).sum(axis=-1))


def _stress(coordinates: np.ndarray, distances: np.ndarray, weights: np.ndarray) -> float:
    residual = _pairwise_norms(coordinates) - distances
    return float((weights * residual**2)[np.triu_indices(len(coordinates), k=1)].sum())


def stress(state: LayoutState, distances: np.ndarray) -> float:
    "Weighted stress sum over i<j of d^-2 (|p_i - p_j| - d)^2"
    return _stress(state.position_array(), distances, _weights(distances))


def _laplacian_pinv(weights: np.ndarray) -> np.ndarray:
    laplacian = -weights.copy()
    np.fill_diagonal(laplacian, weights.sum(axis=1))
    return np.linalg.pinv(laplacian)


def _guttman(coordinates: np.ndarray, distances: np.ndarray, weights: np.ndarray, v_pinv: np.ndarray) -> np.ndarray:
    norms = _pairwise_norms(coordinates)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(norms > 0, -weights * distances / norms, 0.0)
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(b, -b.sum(axis=1))
    return v_pinv @ b @ coordinates + coordinates.mean(axis=0)


def stress_minimize_step(state: LayoutState, distances: np.ndarray) -> LayoutState:
    "One stress-majorization (Guttman transform) update; the centroid is kept"
    weights = _weights(distances)
    coordinates = _guttman(state.position_array(), distances, weights, _laplacian_pinv(weights))
    return state.with_array(coordinates)


def _overlap_sweep(coordinates: np.ndarray, sizes: np.ndarray) -> int:
    """
    Resolve overlapping pairs in place along their axis of least penetration, splitting
    the move equally. Returns the number of pairs moved.
    """
    moved = 0
    n = len(coordinates)
    for i in range(n):
        for j in range(i + 1, n):
            dx = coordinates[j, 0] - coordinates[i, 0]
            dy = coordinates[j, 1] - coordinates[i, 1]
            pen_x = (sizes[i, 0] + sizes[j, 0]) / 2 - abs(dx)
            pen_y = (sizes[i, 1] + sizes[j, 1]) / 2 - abs(dy)
            if pen_x <= EPSILON or pen_y <= EPSILON:
                continue
            axis, pen, delta = (0, pen_x, dx) if pen_x <= pen_y else (1, pen_y, dy)
            # The lower id moves toward negative coordinates on exact coincidence
            direction = 1.0 if delta >= 0 else -1.0
            coordinates[i, axis] -= direction * pen / 2
            coordinates[j, axis] += direction * pen / 2
            moved += 1
    return moved


def _count_overlaps(coordinates: np.ndarray, sizes: np.ndarray) -> int:
    delta = np.abs(coordinates[:, None, :] - coordinates[None, :, :])
    reach = (sizes[:, None, :] + sizes[None, :, :]) / 2
    overlapping = ((reach - delta) > EPSILON).all(axis=-1)
    return int(np.triu(overlapping, k=1).sum())


def _separate(coordinates: np.ndarray, sizes: np.ndarray, max_sweeps: int = MAX_OVERLAP_SWEEPS) -> Tuple[np.ndarray, int]:
    coordinates = coordinates.copy()
    for _ in range(max_sweeps):
        if not _overlap_sweep(coordinates, sizes):
            return coordinates, 0
    return coordinates, _count_overlaps(coordinates, sizes)


def _size_array(graph: Graph) -> np.ndarray:
    return np.array([graph.size(node) for node in graph.node_ids], dtype=float).reshape(-1, 2)


def remove_overlaps(state: LayoutState) -> LayoutState:
    """
    Push overlapping node boxes apart with pairwise sweeps.

    Gives up after 50 sweeps and returns the best-effort layout; the number of pairs
    still overlapping is logged.
    """
    coordinates, residual = _separate(state.position_array(), _size_array(state.graph))
    if residual:
        logger.warning(f"Overlap removal did not converge: {residual} overlapping pairs remain")
    return state.with_array(coordinates)


def _converged(history: List[float], tolerance: float) -> bool:
    if len(history) <= CONVERGENCE_WINDOW:
        return False
    recent = history[-CONVERGENCE_WINDOW - 1 :]
    return all(abs(b - a) / max(a, EPSILON) < tolerance for a, b in zip(recent, recent[1:]))


def run_from(
    core: Graph,
    initial: np.ndarray,
    cfg: LayoutConfig,
    restart: int = 0,
    trace: Optional[TraceCallback] = None,
    distances: Optional[np.ndarray] = None,
) -> RunResult:
    """
    One optimization run from given initial coordinates (in `core.node_ids` order).

    Args:
        core (Graph): The connected graph to place.
        initial (np.ndarray): (N, 2) starting coordinates.
        cfg (LayoutConfig): Target, iteration limits and the baseline switch.
        restart (int): Index reported to the trace callback.
        trace (callable, optional): Receives (restart, iteration, stress, ar_proxy) per iteration.
        distances (np.ndarray, optional): Precomputed graph distances.

    Returns:
        RunResult: The overlap-free layout with its stress and aspect-ratio error.
    """
    if distances is None:
        distances = graph_distances(core, cfg.ideal_edge_length)
    weights = _weights(distances)
    v_pinv = _laplacian_pinv(weights)
    sizes = _size_array(core)
    eps = _variance_floor(cfg.ideal_edge_length)
    target = cfg.target_ar.value
    normalize = not cfg.baseline

    coordinates = np.array(initial, dtype=float).reshape(-1, 2)
    history: List[float] = []
    skipped = 0
    iteration = 0
    for iteration in range(1, cfg.max_stress_iterations + 1):
        coordinates = _guttman(coordinates, distances, weights, v_pinv)
        if normalize:
            coordinates, applied = _normalize(coordinates, target, eps)
            skipped += not applied
        history.append(_stress(coordinates, distances, weights))
        if trace is not None:
            trace(restart, iteration, history[-1], _spread(coordinates, eps).ar_proxy)
        if _converged(history, cfg.stress_tolerance):
            break

    # Overlap removal, keeping the aspect ratio steered between sweeps
    for _ in range(MAX_OVERLAP_SWEEPS):
        if not _overlap_sweep(coordinates, sizes):
            break
        if normalize:
            coordinates, applied = _normalize(coordinates, target, eps)
            skipped += not applied
    coordinates, residual = _separate(coordinates, sizes)

    if skipped:
        logger.warning(f"Restart {restart}: skipped {skipped} normalizations of a degenerate spread")
    if residual:
        logger.warning(f"Restart {restart}: {residual} overlapping pairs remain after overlap removal")

    stats = _spread(coordinates, eps)
    final_ar = stats.ar_proxy
    layout = LayoutState(
        graph=core,
        positions={node: (float(x), float(y)) for node, (x, y) in zip(core.node_ids, coordinates)},
        stage=Stage.DISTRIBUTED,
        baseline=cfg.baseline,
    )
    return RunResult(
        layout=layout,
        final_stress=_stress(coordinates, distances, weights),
        final_ar=final_ar,
        ar_error=abs(math.log(final_ar / target)),
        restart=restart,
        iterations=iteration,
        residual_overlaps=residual,
    )


def _selection_key(result: RunResult, baseline: bool):
    if baseline:
        return (result.final_stress, result.restart)
    return (round(result.ar_error, 9), result.final_stress, result.restart)


def distribution_runs(core: Graph, cfg: LayoutConfig, trace: Optional[TraceCallback] = None) -> List[RunResult]:
    """
    Stress-minimizing placements of the core from several shuffled starts, best first.

    Every restart draws its start uniformly in a square of side sqrt(N) times the ideal
    edge length from its own generator spawned off `cfg.seed`. Runs closest to the
    target aspect ratio come first, ties broken by lower stress; baseline runs are
    ordered by stress alone.

    Args:
        core (Graph): The connected core.
        cfg (LayoutConfig): The layout config.
        trace (callable, optional): Per-iteration trace callback.

    Returns:
        list[RunResult]: One result per restart, in selection order.
    """
    if len(core.nodes) == 1:
        node = core.node_ids[0]
        layout = LayoutState(graph=core, positions={node: (0.0, 0.0)}, baseline=cfg.baseline)
        return [
            RunResult(layout=layout, final_stress=0.0, final_ar=1.0, ar_error=abs(math.log(1.0 / cfg.target_ar.value)))
        ]

    distances = graph_distances(core, cfg.ideal_edge_length)
    side = math.sqrt(len(core.nodes)) * cfg.ideal_edge_length
    results: List[RunResult] = []
    for restart, seed in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)):
        rng = np.random.default_rng(seed)
        initial = rng.uniform(0.0, side, size=(len(core.nodes), 2))
        result = run_from(core, initial, cfg, restart=restart, trace=trace, distances=distances)
        logger.debug(
            f"Restart {restart}: stress {result.final_stress:.4f}, "
            f"ar {result.final_ar:.4f} after {result.iterations} iterations"
        )
        results.append(result)
    return sorted(results, key=lambda r: _selection_key(r, cfg.baseline))


def distribution_phase(core: Graph, cfg: LayoutConfig, trace: Optional[TraceCallback] = None) -> RunResult:
    "The selected restart of `distribution_runs`: closest spread ratio, then lowest stress"
    results = distribution_runs(core, cfg, trace=trace)
    best = results[0]
    logger.info(
        f"Selected restart {best.restart} of {len(results)}: ar {best.final_ar:.4f} "
        f"(target {cfg.target_ar}), stress {best.final_stress:.4f}"
    )
    return best
