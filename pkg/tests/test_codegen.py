"""Codegen contracts: both modes, tagging heuristic, asset binding, validity."""
from __future__ import annotations

import json

import pytest

from figforge.codegen import (
    FAITHFUL_ABSOLUTE,
    RESPONSIVE_FLOW,
    CodegenConfig,
    GeneratedPage,
    TagContext,
    choose_semantic_tag,
    generate,
)
from figforge.errors import EmptyIr, MissingAsset
from figforge.htmlmodel import is_complete_page, parse_html
from figforge.ir import IrNode, TextContent, UiIr, to_ir
from figforge.metrics import evaluate
from figforge.model import Rect, parse_document

from conftest import doc, frame, image_fill, node, solid, text


def parse(raw: dict):
    return parse_document(json.dumps(raw))


def column_page_ir() -> UiIr:
    raw = doc(frame(
        text("Title", box=(20, 20, 360, 40), size=32.0, weight=700,
             fills=[solid(0, 0, 0)]),
        node("RECTANGLE", name="hero", box=(20, 80, 360, 200),
             fills=[image_fill("assets/hero.png")]),
        box=(0, 0, 400, 320), layoutMode="VERTICAL", itemSpacing=20.0))
    return to_ir(parse(raw))


def test_column_ir_yields_h1_and_img():
    page = generate(column_page_ir(), CodegenConfig(mode=RESPONSIVE_FLOW))
    model = parse_html(page.html)
    h1 = model.find_first("h1")
    img = model.find_first("img")
    assert h1 is not None and h1.text == "Title"
    assert img is not None and img.attributes["src"] == "assets/hero.png"
    body = model.body
    assert "flex" in body.class_names() and "flex-col" in body.class_names()
    assert page.asset_refs_used == {"assets/hero.png"}


def test_empty_ir_yields_skeleton_with_empty_body():
    ir = to_ir(parse(doc(frame(box=(0, 0, 100, 100)))))
    for mode in (FAITHFUL_ABSOLUTE, RESPONSIVE_FLOW):
        page = generate(ir, CodegenConfig(mode=mode))
        assert page.html.startswith("<!DOCTYPE html>")
        model = parse_html(page.html)
        assert is_complete_page(model)
        assert model.body.children == []


def test_missing_root_raises_empty_ir():
    with pytest.raises(EmptyIr):
        generate(UiIr(root=None, page_size=(0, 0)))


def none_layout_design() -> UiIr:
    # clean vertical stack without auto-layout: inference can recover it
    raw = doc(frame(
        node("RECTANGLE", box=(50, 20, 700, 80), fills=[solid(0.2, 0.4, 0.9)]),
        node("RECTANGLE", box=(50, 120, 700, 200), fills=[solid(0.9, 0.9, 0.9)]),
        text("Caption", box=(50, 340, 700, 30), size=18.0, fills=[solid(0, 0, 0)]),
        box=(0, 0, 800, 400)))
    return to_ir(parse(raw))


def test_faithful_mode_is_absolute_and_unitless():
    ir = none_layout_design()
    page = generate(ir, CodegenConfig(mode=FAITHFUL_ABSOLUTE))
    report = evaluate(page.html)
    assert report.apr.value >= 0.5
    assert report.rur.value == 0.0
    assert "absolute" in page.html
    assert "flex" not in page.html


def test_responsive_mode_flows_the_same_design():
    ir = none_layout_design()
    page = generate(ir, CodegenConfig(mode=RESPONSIVE_FLOW))
    report = evaluate(page.html)
    assert report.apr.value <= 0.05
    assert report.fu.value >= 0.3
    assert "absolute" not in page.html


def test_faithful_mode_emits_no_semantic_text_tags():
    page = generate(column_page_ir(), CodegenConfig(mode=FAITHFUL_ABSOLUTE))
    model = parse_html(page.html)
    assert model.find_first("h1") is None
    assert model.find_first("img") is not None  # binding still uses img


def test_image_src_is_exact_manifest_path():
    ir = column_page_ir()
    for mode in (FAITHFUL_ABSOLUTE, RESPONSIVE_FLOW):
        page = generate(ir, CodegenConfig(mode=mode))
        model = parse_html(page.html)
        srcs = {e.attributes["src"] for e in model.iter() if e.tag == "img"}
        assert srcs == set(ir.asset_manifest) & page.asset_refs_used == {"assets/hero.png"}


def test_unknown_asset_path_raises():
    ir = column_page_ir()
    ir.root.children[1].image_path = "assets/ghost.png"
    with pytest.raises(MissingAsset):
        generate(ir, CodegenConfig(mode=RESPONSIVE_FLOW))


def test_generation_is_byte_deterministic():
    ir = column_page_ir()
    config = CodegenConfig(mode=RESPONSIVE_FLOW)
    assert generate(ir, config).html == generate(ir, config).html
    config = CodegenConfig(mode=FAITHFUL_ABSOLUTE)
    assert generate(ir, config).html == generate(ir, config).html


def test_single_head_body_and_cdn_only_external():
    page = generate(column_page_ir())
    model = parse_html(page.html)
    assert is_complete_page(model)
    externals = [e.attributes.get("src", "") for e in model.iter() if e.tag == "script"]
    assert externals == ["https://cdn.tailwindcss.com"]
    assert "http" not in page.html.replace("https://cdn.tailwindcss.com", "")


def test_text_content_is_escaped():
    raw = doc(frame(
        text("<b>5 & 6</b>", box=(0, 0, 100, 20), fills=[solid(0, 0, 0)]),
        box=(0, 0, 200, 100), layoutMode="VERTICAL"))
    page = generate(to_ir(parse(raw)))
    assert "&lt;b&gt;5 &amp; 6&lt;/b&gt;" in page.html


# -- choose_semantic_tag -------------------------------------------------------

def ctx(**kw) -> TagContext:
    defaults = dict(page_size=(800.0, 600.0), font_sizes_desc=[32.0, 18.0, 14.0])
    defaults.update(kw)
    return TagContext(**defaults)


def container(w, h, children=()) -> IrNode:
    return IrNode(role="CONTAINER", box=Rect(0, 0, w, h), children=list(children))


def test_top_full_width_bar_is_header():
    tag = choose_semantic_tag(container(800, 60), ctx(abs_pos=(0.0, 0.0), is_root_child=True))
    assert tag == "header"


def test_bottom_band_is_footer():
    tag = choose_semantic_tag(container(800, 50), ctx(abs_pos=(0.0, 550.0), is_root_child=True))
    assert tag == "footer"


def test_largest_central_container_is_main():
    tag = choose_semantic_tag(
        container(700, 400),
        ctx(abs_pos=(50.0, 120.0), is_root_child=True, is_largest_root_child=True))
    assert tag == "main"


def test_four_equal_cards_become_ul_with_li():
    cards = [container(180, 120) for _ in range(4)]
    parent = container(800, 140, children=cards)
    assert choose_semantic_tag(parent, ctx(abs_pos=(0.0, 200.0))) == "ul"
    assert choose_semantic_tag(cards[0], ctx(parent_tag="ul")) == "li"


def test_generic_box_is_div():
    assert choose_semantic_tag(container(100, 100), ctx(abs_pos=(30.0, 200.0))) == "div"


def test_text_font_rank_bands():
    def text_node(size):
        return IrNode(role="TEXT", box=Rect(0, 0, 10, 10),
                      text=TextContent(content="x", font_size=size))
    assert choose_semantic_tag(text_node(32.0), ctx()) == "h1"
    assert choose_semantic_tag(text_node(18.0), ctx()) == "h2"
    assert choose_semantic_tag(text_node(14.0), ctx()) == "h3"
    assert choose_semantic_tag(text_node(12.0), ctx()) == "p"


def test_ul_li_emission_end_to_end():
    raw = doc(frame(
        frame(node("RECTANGLE", box=(20, 20, 700, 100), fills=[solid(1, 1, 1)]),
              box=(0, 0, 760, 180), name="content"),
        frame(*[node("RECTANGLE", box=(10 + i * 190, 210, 180, 120),
                     fills=[solid(0.9, 0.9, 0.9)]) for i in range(4)],
              box=(0, 200, 800, 140)),
        box=(0, 0, 800, 600)))
    page = generate(to_ir(parse(raw)), CodegenConfig(mode=RESPONSIVE_FLOW))
    model = parse_html(page.html)
    ul = model.find_first("ul")
    assert ul is not None
    assert [c.tag for c in ul.children] == ["li", "li", "li", "li"]


def test_mode_contract_row_column_subtrees_never_absolute():
    raw = doc(frame(
        frame(
            node("RECTANGLE", box=(0, 0, 100, 50), fills=[solid(1, 0, 0)]),
            node("RECTANGLE", box=(0, 60, 100, 50), fills=[solid(0, 1, 0)]),
            box=(0, 0, 800, 120), layoutMode="VERTICAL"),
        node("RECTANGLE", box=(0, 300, 37, 41), fills=[solid(0, 0, 1)]),
        node("RECTANGLE", box=(17, 290, 57, 80), fills=[solid(0, 0, 0.5)]),
        box=(0, 0, 800, 600)))
    page = generate(to_ir(parse(raw)), CodegenConfig(mode=RESPONSIVE_FLOW))
    assert "absolute" not in page.html and "fixed" not in page.html


def test_spacing_snap_in_responsive_only():
    raw = doc(frame(
        node("RECTANGLE", box=(0, 0, 128, 64), fills=[solid(0.5, 0.5, 0.5)]),
        node("RECTANGLE", box=(0, 100, 123, 64), fills=[solid(0.4, 0.4, 0.4)]),
        box=(0, 0, 800, 600)))
    ir = to_ir(parse(raw))
    responsive = generate(ir, CodegenConfig(mode=RESPONSIVE_FLOW)).html
    assert "w-32" in responsive          # 128px snaps to the scale
    assert "w-[123px]" in responsive     # 123px stays arbitrary
    faithful = generate(ir, CodegenConfig(mode=FAITHFUL_ABSOLUTE)).html
    assert "w-[128px]" in faithful       # faithful never snaps geometry
    assert "w-32" not in faithful


def test_color_snapping_to_palette():
    raw = doc(frame(
        node("RECTANGLE", box=(0, 0, 100, 100),
             fills=[{"type": "SOLID", "color": {"r": 59 / 255, "g": 130 / 255, "b": 246 / 255, "a": 1}}]),
        node("RECTANGLE", box=(0, 200, 100, 100),
             fills=[{"type": "SOLID", "color": {"r": 0.05, "g": 0.77, "b": 0.13, "a": 1}}]),
        box=(0, 0, 800, 600)))
    html = generate(to_ir(parse(raw)), CodegenConfig(mode=RESPONSIVE_FLOW)).html
    assert "bg-blue-500" in html
    assert "bg-[#0dc421]" in html
