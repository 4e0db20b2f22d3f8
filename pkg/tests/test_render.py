import re
import xml.etree.ElementTree as ET

import pytest
from pydantic import ValidationError

from lib.models import AspectRatioTarget, bounding_box
from lib.render import RenderOptions, render_gallery, render_svg, target_frame

SVG = "{http://www.w3.org/2000/svg}"


def _parse(document: bytes) -> ET.Element:
    return ET.fromstring(document)


def test_square_draws_every_node_and_edge(c4_square):
    root = _parse(render_svg(c4_square))
    assert root.tag == f"{SVG}svg"
    assert len(root.findall(f"{SVG}rect")) == 4
    assert len(root.findall(f"{SVG}path")) == 4


def test_frame_has_the_target_ratio(c4_square):
    root = _parse(render_svg(c4_square, target=AspectRatioTarget.parse("16:9")))
    (frame,) = [r for r in root.findall(f"{SVG}rect") if r.get("class") == "frame"]
    ratio = float(frame.get("width")) / float(frame.get("height"))
    assert ratio == pytest.approx(16 / 9, abs=1e-6)


def test_frame_contains_the_drawing(c4_square):
    box = bounding_box(c4_square)
    for text in ("16:9", "1:3", "1:1"):
        frame = target_frame(box, AspectRatioTarget.parse(text))
        assert frame.min_x <= box.min_x and frame.max_x >= box.max_x
        assert frame.min_y <= box.min_y and frame.max_y >= box.max_y
        assert frame.center == pytest.approx(box.center)


def test_frame_can_be_hidden(c4_square):
    root = _parse(render_svg(c4_square, RenderOptions(show_frame=False), AspectRatioTarget.parse("16:9")))
    assert all(r.get("class") != "frame" for r in root.findall(f"{SVG}rect"))


def test_y_axis_points_down(c4_square):
    root = _parse(render_svg(c4_square, RenderOptions(margin=0)))
    nodes = {(float(r.get("x")), float(r.get("y"))) for r in root.findall(f"{SVG}rect")}
    # Node 3 sits above node 0 in the layout, so its rect starts at the top edge
    assert (0.0, 0.0) in nodes
    assert (0.0, 40.0) in nodes


def test_labels_are_optional(c4_square):
    assert b"<text" not in render_svg(c4_square)
    labelled = _parse(render_svg(c4_square, RenderOptions(show_labels=True)))
    assert sorted(t.text for t in labelled.findall(f"{SVG}text")) == ["0", "1", "2", "3"]


def test_gallery_has_a_group_per_panel(c4_square):
    target = AspectRatioTarget.parse("4:3")
    document = render_gallery([("arcol", c4_square, target), ("baseline", c4_square, None)])
    root = _parse(document)
    groups = root.findall(f"{SVG}g")
    assert len(groups) == 2
    assert [g.find(f"{SVG}text").text for g in groups] == ["arcol", "baseline"]
    assert re.search(rb'translate\(0\.00,', document)


def test_scale_must_be_positive():
    with pytest.raises(ValidationError):
        RenderOptions(scale=0)
