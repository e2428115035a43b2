"""HTML parsing and metric-suite contracts, with hand-counted expectations."""
from __future__ import annotations

import random

import pytest

from figforge.errors import UnparsableDocument
from figforge.htmlmodel import is_complete_page, parse_html
from figforge.metrics import SEMANTIC_TAGS, evaluate
from figforge.tailwind import ARBITRARY_VALUE, SCALE_UTILITY


def page(body_html: str, body_attrs: str = "") -> str:
    return f"<!DOCTYPE html><html><head><title>t</title></head><body{body_attrs}>{body_html}</body></html>"


# -- parse_html ----------------------------------------------------------------

def test_parse_classes_tokenized():
    model = parse_html(page('<div class="flex w-1/2"></div>'))
    div = model.find_first("div")
    assert [t.kind for t in div.classes] == [SCALE_UTILITY, SCALE_UTILITY]


def test_parse_empty_body_structure():
    model = parse_html("<html><head></head><body></body></html>")
    tags = [e.tag for e in model.iter()]
    assert tags == ["html", "head", "body"]


def test_parse_arbitrary_value_class():
    model = parse_html(page('<div class="w-[123px]"></div>'))
    assert model.find_first("div").classes[0].kind == ARBITRARY_VALUE


def test_parse_inline_style_declarations():
    model = parse_html(page('<div style="width: 50%; color:red"></div>'))
    assert model.find_first("div").inline_style == [("width", "50%"), ("color", "red")]


def test_parse_rejects_non_html():
    with pytest.raises(UnparsableDocument):
        parse_html("I am not HTML, sorry.")
    with pytest.raises(UnparsableDocument):
        parse_html("   ")


def test_parse_collects_text_and_void_elements():
    model = parse_html(page('<p>Hello <b>world</b></p><img src="assets/x.png">'))
    p = model.find_first("p")
    assert p.text == "Hello"
    assert model.find_first("img").attributes["src"] == "assets/x.png"
    assert model.find_first("img").children == []


def test_is_complete_page():
    assert is_complete_page(parse_html(page("<div></div>")))
    assert not is_complete_page(parse_html("<div>fragment</div>"))


def test_parse_recovers_from_stray_close_tag():
    model = parse_html(page("<div><span>x</span></p></div>"))
    assert model.find_first("div") is not None


# -- individual metrics ----------------------------------------------------------

def test_rur_half_relative():
    report = evaluate(page('<div class="w-1/2"></div><div class="w-[500px]"></div>'))
    assert report.rur.value == 0.5
    assert (report.rur.numerator, report.rur.denominator) == (1, 2)


def test_rur_degenerate_flagged():
    report = evaluate(page('<div class="flex"></div>'))
    assert report.rur.value == 0.0
    assert report.rur.flag == "RUR_DEGENERATE"


def test_rur_all_relative_is_one():
    report = evaluate(page('<div class="w-full p-4 h-1/3"></div>'))
    assert report.rur.value == 1.0


def test_rur_counts_inline_layout_declarations():
    report = evaluate(page('<div style="width:50%"></div><div style="width:500px"></div>'))
    assert (report.rur.numerator, report.rur.denominator) == (1, 2)


def test_apr_two_absolute_one_relative():
    report = evaluate(page(
        '<div class="absolute"></div><div class="absolute"></div><div class="relative"></div>'))
    assert report.apr.value == pytest.approx(2 / 3)


def test_apr_flex_only_degenerate():
    report = evaluate(page('<div class="flex"><span></span></div>'))
    assert report.apr.value == 0.0
    assert report.apr.flag == "APR_DEGENERATE"


def test_apr_all_absolute_overlay():
    report = evaluate(page('<div class="fixed"></div><div class="absolute"></div>'))
    assert report.apr.value == 1.0


def test_apr_counts_inline_position():
    report = evaluate(page('<div style="position:absolute"></div><div style="position:sticky"></div>'))
    assert report.apr.value == 0.5


def test_fu_flex_body():
    report = evaluate(page("<div></div><div></div>", body_attrs=' class="flex"'))
    assert (report.fu.numerator, report.fu.denominator) == (1, 1)
    assert report.fu.value == 1.0


def test_fu_childless_page_degenerate():
    report = evaluate("<html><head></head><body></body></html>")
    assert report.fu.value == 0.0
    assert report.fu.flag == "FU_DEGENERATE"


def test_fu_nested_flex_in_plain_markup():
    report = evaluate(page('<div class="flex"><span>x</span><span>y</span></div>'))
    # containers: body and the flex div
    assert (report.fu.numerator, report.fu.denominator) == (1, 2)


def test_bc_two_of_four_bands():
    report = evaluate(page('<div class="sm:flex lg:hidden"></div>'))
    assert report.bc.value == 0.5


def test_bc_zero_without_responsive_constructs():
    report = evaluate(page('<div class="flex"></div>'))
    assert report.bc.value == 0.0


def test_bc_full_coverage():
    report = evaluate(page('<div class="sm:flex md:flex lg:flex xl:flex"></div>'))
    assert report.bc.value == 1.0


def test_bc_xl_and_2xl_share_a_band():
    report = evaluate(page('<div class="xl:flex 2xl:hidden"></div>'))
    assert report.bc.value == 0.25


def test_bc_media_query_in_style_block():
    html = ("<!DOCTYPE html><html><head><style>"
            "@media (min-width: 768px) { .x { display: flex } }"
            "</style></head><body><div></div></body></html>")
    report = evaluate(html)
    assert report.bc.value == 0.25
    assert report.bc.numerator == 1


def test_str_two_of_three():
    report = evaluate(page("<header></header><div></div><p>x</p>"))
    assert report.str.value == pytest.approx(2 / 3)


def test_str_all_div_page():
    report = evaluate(page("<div></div><div></div>"))
    assert report.str.value == 0.0


def test_str_button_beats_div():
    low = evaluate(page('<div></div><div onclick="go()">Go</div>'))
    high = evaluate(page("<div></div><button>Go</button>"))
    assert high.str.value > low.str.value


def test_avu_one_of_two():
    report = evaluate(page('<div class="w-[123px] flex"></div>'))
    assert report.avu.value == 0.5


def test_avu_degenerate_without_classes():
    report = evaluate(page("<div></div>"))
    assert report.avu.flag == "AVU_DEGENERATE"


def test_avu_all_arbitrary():
    report = evaluate(page('<div class="w-[1px] h-[2px]"></div>'))
    assert report.avu.value == 1.0


def test_isr_quarter():
    report = evaluate(page(
        '<div style="color:red;"></div><div></div><div></div><div></div>'))
    assert report.isr.value == 0.25


def test_isr_counts_element_once_regardless_of_declarations():
    report = evaluate(page('<div style="color:red; border:1px solid black;"></div>'))
    assert (report.isr.numerator, report.isr.denominator) == (1, 1)


def test_ccr_half_reused():
    buttons = "".join(f'<button class="btn">b{i}</button>' for i in range(10))
    report = evaluate(page(f'{buttons}<div class="hero"></div>'))
    assert (report.ccr.numerator, report.ccr.denominator) == (1, 2)
    assert report.ccr.value == 0.5


def test_ccr_degenerate_without_custom_classes():
    report = evaluate(page('<div class="flex"></div>'))
    assert report.ccr.flag == "CCR_DEGENERATE"


def test_ccr_every_custom_reused():
    report = evaluate(page('<div class="card"></div><div class="card"></div>'))
    assert report.ccr.value == 1.0


# -- evaluate ----------------------------------------------------------------------

GROK_STYLE = page(
    '<div class="relative w-[1440px] h-[900px] bg-[#f8f8f8]">'
    '<div class="absolute left-[100px] top-[50px] w-[300px] h-[80px] bg-[#3b82f6]"></div>'
    '<div class="absolute left-[100px] top-[200px] w-[500px] h-[24px] text-[18px]">Title</div>'
    '<div class="absolute left-[100px] top-[300px] w-[1240px] h-[500px] bg-[#ffffff]"></div>'
    "</div>"
)

GOLDEN_STYLE = page(
    '<header class="flex items-center justify-between p-4 bg-blue-500">'
    '<h1 class="text-xl font-bold">Title</h1></header>'
    '<main class="flex flex-col gap-4 p-4"><p>Hello</p>'
    '<button class="bg-blue-500 p-2">Go</button></main>',
    body_attrs=' class="flex flex-col"',
)


def test_overlay_snippet_scores_worse_than_golden():
    grok = evaluate(GROK_STYLE)
    golden = evaluate(GOLDEN_STYLE)
    assert grok.apr.value > golden.apr.value
    assert grok.avu.value > golden.avu.value
    assert grok.str.value < golden.str.value


def test_empty_body_all_zero_with_flags():
    report = evaluate("<html><head></head><body></body></html>")
    for name in ("rur", "apr", "fu", "bc", "str", "avu", "isr", "ccr"):
        assert getattr(report, name).value == 0.0
    assert report.flags


def test_fraction_reproduces_numerator_denominator():
    for html in (GROK_STYLE, GOLDEN_STYLE):
        report = evaluate(html)
        for name in ("rur", "apr", "fu", "bc", "str", "avu", "isr", "ccr"):
            metric = getattr(report, name)
            if metric.denominator > 0:
                assert abs(metric.value - metric.numerator / metric.denominator) < 1e-12
            assert 0.0 <= metric.value <= 1.0


def test_evaluate_is_attribute_order_independent():
    a = page('<div class="absolute w-[5px]" style="color:red" id="x"></div>')
    b = page('<div id="x" style="color:red" class="absolute w-[5px]"></div>')
    assert evaluate(a).as_dict() == evaluate(b).as_dict()


# -- randomized monotonicity against a naive recount oracle -------------------------

def _random_page(rng: random.Random) -> tuple[str, dict]:
    """Build a flat random body; return (html, counts derived from the descriptors)."""
    tags = []
    n = rng.randint(1, 30)
    for _ in range(n):
        tag = rng.choice(["div", "header", "p", "span", "button"])
        pos = rng.choice([None, "absolute", "relative", None, None])
        classes = ([] if pos is None else [pos]) + rng.sample(
            ["flex", "w-[5px]", "w-1/2", "btn", "btn", "p-4"], k=rng.randint(0, 3))
        tags.append((tag, classes))
    html = page("".join(
        f'<{tag} class="{" ".join(classes)}"></{tag}>' if classes else f"<{tag}></{tag}>"
        for tag, classes in tags))
    semantic = sum(1 for tag, _ in tags if tag in SEMANTIC_TAGS)
    absolute = sum(1 for _, classes in tags if "absolute" in classes)
    positioned = sum(1 for _, classes in tags if "absolute" in classes or "relative" in classes)
    return html, {"n": n, "semantic": semantic, "absolute": absolute, "positioned": positioned}


def test_apr_str_match_naive_recount_and_are_monotone():
    rng = random.Random(13)
    for _ in range(25):
        html, expected = _random_page(rng)
        report = evaluate(html)
        assert report.str.numerator == expected["semantic"]
        assert report.str.denominator == expected["n"]
        assert report.apr.numerator == expected["absolute"]
        assert report.apr.denominator == expected["positioned"]

        with_abs = html.replace("<body>", '<body><i class="absolute"></i>', 1)
        assert evaluate(with_abs).apr.value >= report.apr.value
        with_semantic = html.replace("<body>", "<body><nav></nav>", 1)
        assert evaluate(with_semantic).str.value >= report.str.value
