import math
from typing import Tuple

from loguru import logger
from scipy.optimize import brentq

from lib.models import AspectRatioTarget, LayoutConfig, LayoutState, RefineReport, Stage, bounding_box

from .geometry import overlapping_pairs, scale_about

MAX_LOG_SCALE = 50.0


def _within_tolerance(ar: float, target: float, cfg: LayoutConfig) -> bool:
    return abs(math.log(ar / target)) <= math.log(1 + cfg.refine_tolerance)


def _bounded_factors(
    ar: float, target: float, cfg: LayoutConfig, applied: Tuple[float, float] = (1.0, 1.0)
) -> Tuple[float, float, bool]:
    """
    Next (s_x, s_y) toward the target and whether the cap cut them short.

    Each axis moves `refine_fraction` of the way toward the full correction; the
    product with the factors already `applied` is clamped to the cap.
    """
    s_x_full = math.sqrt(target / ar)
    s_y_full = 1 / s_x_full
    lo, hi = 1 - cfg.refine_cap, 1 + cfg.refine_cap
    total_x = applied[0] * (1 + cfg.refine_fraction * (s_x_full - 1))
    total_y = applied[1] * (1 + cfg.refine_fraction * (s_y_full - 1))
    capped = not (lo <= total_x <= hi and lo <= total_y <= hi)
    total_x, total_y = min(hi, max(lo, total_x)), min(hi, max(lo, total_y))
    return total_x / applied[0], total_y / applied[1], capped


def _skipped(state: LayoutState, ar: float) -> Tuple[LayoutState, RefineReport]:
    refined = state.model_copy(update={"stage": Stage.REFINED})
    return refined, RefineReport(ar_before=ar, ar_after=ar, skipped=True)


def final_rescale(state: LayoutState, cfg: LayoutConfig) -> Tuple[LayoutState, RefineReport]:
    """
    Bounded anisotropic rescale toward the target aspect ratio.

    Layouts within the tolerance (measured symmetrically in log space) are left alone.
    Otherwise each axis moves a fraction of the way toward the full correction and is
    capped, scaling about the bounding-box centre. Node boxes keep their size.

    Args:
        state (LayoutState): The attached, compacted layout.
        cfg (LayoutConfig): Supplies the target, tolerance, fraction and cap.

    Returns:
        tuple[LayoutState, RefineReport]: The rescaled layout and what was applied.
    """
    box = bounding_box(state)
    ar_before = box.aspect_ratio
    target = cfg.target_ar.value
    if _within_tolerance(ar_before, target, cfg):
        logger.debug(f"Aspect ratio {ar_before:.4f} within tolerance of {target:.4f}, refinement skipped")
        return _skipped(state, ar_before)

    s_x, s_y, capped = _bounded_factors(ar_before, target, cfg)
    refined = scale_about(state, s_x, s_y, box.center).model_copy(update={"stage": Stage.REFINED})
    report = RefineReport(
        ar_before=ar_before,
        ar_after=bounding_box(refined).aspect_ratio,
        s_x_applied=s_x,
        s_y_applied=s_y,
        capped=capped,
        residual_overlaps=len(overlapping_pairs(refined)),
        passes=1,
    )
    logger.info(
        f"Refined aspect ratio {report.ar_before:.4f} -> {report.ar_after:.4f} "
        f"(s_x {s_x:.4f}, s_y {s_y:.4f}{', capped' if capped else ''})"
    )
    return refined, report


def refine_layout(state: LayoutState, cfg: LayoutConfig) -> Tuple[LayoutState, RefineReport]:
    """
    Repeat the bounded rescale until the layout is within tolerance, the cap is spent
    or `cfg.refine_passes` passes have run.

    The cap bounds the accumulated factors, so the report's s_x_applied and s_y_applied
    stay within it however many passes ran. One pass is exactly `final_rescale`.

    Args:
        state (LayoutState): The attached, compacted layout.
        cfg (LayoutConfig): Supplies the target, tolerance, fraction, cap and pass limit.

    Returns:
        tuple[LayoutState, RefineReport]: The rescaled layout and the accumulated factors.
    """
    ar_before = bounding_box(state).aspect_ratio
    target = cfg.target_ar.value
    if _within_tolerance(ar_before, target, cfg):
        logger.debug(f"Aspect ratio {ar_before:.4f} within tolerance of {target:.4f}, refinement skipped")
        return _skipped(state, ar_before)

    refined = state
    applied = (1.0, 1.0)
    capped = False
    passes = 0
    while passes < cfg.refine_passes:
        box = bounding_box(refined)
        if passes and _within_tolerance(box.aspect_ratio, target, cfg):
            break
        s_x, s_y, hit = _bounded_factors(box.aspect_ratio, target, cfg, applied)
        capped = capped or hit
        if math.isclose(s_x, 1.0, abs_tol=1e-12) and math.isclose(s_y, 1.0, abs_tol=1e-12):
            break
        refined = scale_about(refined, s_x, s_y, box.center)
        applied = (applied[0] * s_x, applied[1] * s_y)
        passes += 1

    refined = refined.model_copy(update={"stage": Stage.REFINED})
    report = RefineReport(
        ar_before=ar_before,
        ar_after=bounding_box(refined).aspect_ratio,
        s_x_applied=applied[0],
        s_y_applied=applied[1],
        capped=capped,
        residual_overlaps=len(overlapping_pairs(refined)),
        passes=passes,
    )
    logger.info(
        f"Refined aspect ratio {report.ar_before:.4f} -> {report.ar_after:.4f} in {passes} passes "
        f"(s_x {applied[0]:.4f}, s_y {applied[1]:.4f}{', capped' if capped else ''})"
    )
    return refined, report


def _log_ratio_error(state: LayoutState, center, target: float):
    def error(t: float) -> float:
        return math.log(bounding_box(scale_about(state, math.exp(t), math.exp(-t), center)).aspect_ratio / target)

    return error


def force_fit_with_report(state: LayoutState, target: AspectRatioTarget) -> Tuple[LayoutState, RefineReport]:
    """
    Exact anisotropic scale so the bounding box has the target aspect ratio.

    Positions and routes are scaled by (e^t, e^-t) about the bounding-box centre with
    node boxes kept at their size; t is found by root bracketing. Layouts whose ratio
    cannot reach the target (every node on one line) get the closest ratio and a warning.
    """
    box = bounding_box(state)
    ar_before = box.aspect_ratio
    error = _log_ratio_error(state, box.center, target.value)

    t = 0.0
    if error(0.0) != 0.0:
        lo, hi = -1.0, 1.0
        while error(lo) > 0 and lo > -MAX_LOG_SCALE:
            lo *= 2
        while error(hi) < 0 and hi < MAX_LOG_SCALE:
            hi *= 2
        if error(lo) <= 0 <= error(hi):
            t = brentq(error, lo, hi, xtol=1e-14, maxiter=500)
        else:
            t = lo if abs(error(lo)) < abs(error(hi)) else hi
            logger.warning(f"Cannot force a degenerate layout to aspect ratio {target}, using the closest reachable")

    s_x, s_y = math.exp(t), math.exp(-t)
    fitted = scale_about(state, s_x, s_y, box.center).model_copy(update={"stage": Stage.REFINED})
    residual = len(overlapping_pairs(fitted))
    if residual:
        logger.warning(f"Force-fit left {residual} overlapping node pairs")
    return fitted, RefineReport(
        ar_before=ar_before,
        ar_after=bounding_box(fitted).aspect_ratio,
        s_x_applied=s_x,
        s_y_applied=s_y,
        forced=True,
        residual_overlaps=residual,
    )


def force_fit(state: LayoutState, target: AspectRatioTarget) -> LayoutState:
    return force_fit_with_report(state, target)[0]


def post_scale_baseline(state: LayoutState, target: AspectRatioTarget) -> LayoutState:
    "Force-fit an unconstrained layout after the fact, tagged as a baseline"
    return force_fit(state, target).model_copy(update={"baseline": True})
