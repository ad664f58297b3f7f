import json
import xml.dom.minidom

from conftest import RULES
from ecorelint.export import export_docs, export_svg
from ecorelint.jsonio import export_json, parse_json
from ecorelint.layout import parse_layout
from ecorelint.xmi import serialize_xmi

LAYOUT = json.dumps({
    "nodes": [{"path": "/library/Book", "x": 0, "y": 0, "w": 120, "h": 70},
              {"path": "/library/Item", "x": 0, "y": 150, "w": 120, "h": 50},
              {"path": "/library/Ghost", "x": 300, "y": 0, "w": 10, "h": 10}],
    "edges": [{"path": "/library/Book", "kind": "supertype",
               "source": "/library/Book", "target": "/library/Item"}],
    "labels": [{"path": "/library/Book", "x": 130, "y": 0, "w": 30, "h": 10}]})


def test_svg_is_deterministic_and_well_formed(corpus):
    lib = corpus["library"]
    layout = parse_layout(LAYOUT, lib)
    svg = export_svg(lib, layout)
    assert svg == export_svg(lib, parse_layout(LAYOUT, lib))
    dom = xml.dom.minidom.parseString(svg)
    groups = [g.getAttribute("class") for g in dom.getElementsByTagName("g")]
    assert "classifier abstract" in groups
    assert b"Ghost" not in svg
    text = svg.decode()
    assert "pages : EInt" in text and "tags : EString [0..*]" in text
    assert 'class="edge-supertype"' in text


def test_docs_cover_documentation(corpus):
    text = export_docs(corpus["library"]).decode()
    assert text.startswith("# library\n\nNamespace: `http://example.org/library`\n")
    assert "## Library\n\n`/library/Library` (EClass)\n\nThe root of every library document." in text
    assert "1 of " in text and "- `/library/Book/pages`" in text


def test_json_round_trip(corpus):
    for model in corpus.values():
        again = parse_json(export_json(model))
        assert serialize_xmi(again) == serialize_xmi(model)
