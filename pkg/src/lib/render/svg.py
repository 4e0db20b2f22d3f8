from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from pydantic import BaseModel, ConfigDict, Field

from lib.layout.geometry import simplify_route
from lib.models import AspectRatioTarget, BoundingBox, LayoutState, Point, bounding_box

CAPTION_HEIGHT = 24
PANEL_GAP = 20


class RenderOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    node_fill: str = "#dbe8f6"
    node_stroke: str = "#1f3b5a"
    edge_stroke: str = "#333333"
    frame_stroke: str = "#c0392b"
    show_frame: bool = True
    scale: float = Field(default=1.0, gt=0)
    margin: float = Field(default=10.0, ge=0)
    show_labels: bool = False


def _num(value: float) -> str:
    "Six decimals, trailing zeros dropped"
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def _attributes(style: Dict[str, object]) -> str:
    return "".join(' %s="%s"' % (k, escape(str(v), {'"': "&quot;"})) for k, v in style.items())


def rect(x: float, y: float, w: float, h: float, style: Dict[str, object] = {}) -> str:
    default = {"stroke": "black", "stroke-width": 1, "fill": "none"}
    return '<rect x="%s" y="%s" width="%s" height="%s"%s/>' % (
        _num(x),
        _num(y),
        _num(w),
        _num(h),
        _attributes({**default, **style}),
    )


def path(points: Sequence[Point], style: Dict[str, object] = {}) -> str:
    default = {"stroke": "black", "stroke-width": 1, "fill": "none"}
    d = "M %s,%s" % tuple(map(_num, points[0])) + "".join(" L %s,%s" % tuple(map(_num, p)) for p in points[1:])
    return '<path d="%s"%s/>' % (d, _attributes({**default, **style}))


def text(x: float, y: float, t: str, style: Dict[str, object] = {}) -> str:
    default = {"font-family": "sans-serif", "font-size": 12, "text-anchor": "middle"}
    return '<text x="%.2f" y="%.2f"%s>%s</text>' % (x, y, _attributes({**default, **style}), escape(t))


def target_frame(box: BoundingBox, target: AspectRatioTarget) -> BoundingBox:
    "Smallest box of the target aspect ratio centred on `box` and containing it"
    width, height = box.width, box.height
    if width >= height * target.value:
        height = width / target.value
    else:
        width = height * target.value
    if width == 0:
        width, height = target.value, 1.0
    return BoundingBox.around(box.center, (width, height))


def _panel(state: LayoutState, opts: RenderOptions, target: Optional[AspectRatioTarget]) -> Tuple[List[str], float, float]:
    "SVG elements of one layout with its pixel width and height"
    box = bounding_box(state)
    frame = target_frame(box, target) if opts.show_frame and target is not None else None
    view = box.union(frame) if frame is not None else box

    def to_px(point: Point) -> Point:
        x, y = point
        return (opts.margin + (x - view.min_x) * opts.scale, opts.margin + (view.max_y - y) * opts.scale)

    elements = []
    if frame is not None:
        x, y = to_px((frame.min_x, frame.max_y))
        elements.append(
            rect(
                x,
                y,
                frame.width * opts.scale,
                frame.height * opts.scale,
                {"class": "frame", "stroke": opts.frame_stroke, "stroke-dasharray": "6,4"},
            )
        )
    for edge, route in state.all_routes().items():
        elements.append(
            path([to_px(p) for p in simplify_route(route)], {"class": "edge", "stroke": opts.edge_stroke})
        )
    for node in state.graph.node_ids:
        if state.graph.is_dummy(node):
            continue
        node_box = state.node_box(node)
        x, y = to_px((node_box.min_x, node_box.max_y))
        elements.append(
            rect(
                x,
                y,
                node_box.width * opts.scale,
                node_box.height * opts.scale,
                {"class": "node", "fill": opts.node_fill, "stroke": opts.node_stroke},
            )
        )
        if opts.show_labels:
            cx, cy = to_px(state.positions[node])
            elements.append(text(cx, cy + 4, str(node)))
    return elements, view.width * opts.scale + 2 * opts.margin, view.height * opts.scale + 2 * opts.margin


def _document(width: float, height: float, body: List[str]) -> bytes:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="%.2f" height="%.2f" viewBox="0 0 %.2f %.2f">'
        % (width, height, width, height)
    )
    return "\n".join([head, *body, "</svg>\n"]).encode("utf-8")


def render_svg(
    state: LayoutState, opts: Optional[RenderOptions] = None, target: Optional[AspectRatioTarget] = None
) -> bytes:
    """
    Draw a layout as an SVG 1.1 document.

    Nodes become rectangles at their boxes and edges polyline paths; dummy nodes are
    not drawn. With a target and `show_frame`, a dashed rectangle of the target aspect
    ratio circumscribes the drawing. Layout y grows upward, so it is flipped.

    Args:
        state (LayoutState): A routed layout.
        opts (RenderOptions, optional): Colours, scale and margin.
        target (AspectRatioTarget, optional): The aspect ratio to frame.

    Returns:
        bytes: The UTF-8 encoded document.
    """
    opts = opts or RenderOptions()
    elements, width, height = _panel(state, opts, target)
    return _document(width, height, elements)


def render_gallery(
    panels: Sequence[Tuple[str, LayoutState, Optional[AspectRatioTarget]]], opts: Optional[RenderOptions] = None
) -> bytes:
    "Captioned layouts side by side in one document, left to right in the given order"
    opts = opts or RenderOptions()
    body: List[str] = []
    offset = 0.0
    height = 0.0
    for caption, state, target in panels:
        elements, width, panel_height = _panel(state, opts, target)
        body.append('<g transform="translate(%.2f,%.2f)">' % (offset, CAPTION_HEIGHT))
        body.append(text(width / 2, -8, caption))
        body.extend(elements)
        body.append("</g>")
        offset += width + PANEL_GAP
        height = max(height, panel_height + CAPTION_HEIGHT)
    return _document(max(0.0, offset - PANEL_GAP), height, body)
