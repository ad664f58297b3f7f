import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import MODELS
from oracles import random_model_doc
from ecorelint.errors import XmiFormatError, XmiSyntaxError
from ecorelint.jsonio import export_json, parse_json
from ecorelint.metamodel import ElementPath
from ecorelint.xmi import load_model, parse_xmi, serialize_xmi

HEAD = (b'<?xml version="1.0" encoding="UTF-8"?>\n'
        b'<ecore:EPackage xmi:version="2.0" xmlns:xmi="http://www.omg.org/XMI" '
        b'xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" '
        b'xmlns:ecore="http://www.eclipse.org/emf/2002/Ecore" name="p" nsURI="http://x/p" nsPrefix="p">\n')
TAIL = b"</ecore:EPackage>\n"


def doc(body: bytes) -> bytes:
    return HEAD + body + TAIL


def without_extras(value):
    if isinstance(value, dict):
        return {k: without_extras(v) for k, v in value.items() if k != "extras"}
    if isinstance(value, list):
        return [without_extras(v) for v in value]
    return value


@pytest.mark.parametrize("path", sorted(MODELS.glob("*.ecore")), ids=lambda p: p.stem)
def test_canonical_files_round_trip(path):
    data = path.read_bytes()
    model, _, extras = parse_xmi(data)
    assert serialize_xmi(model, extras) == data
    assert serialize_xmi(model) == data


def test_source_map_positions():
    model, smap, _ = parse_xmi((MODELS / "library.ecore").read_bytes())
    book = smap[ElementPath.parse("/library/Book")]
    assert (book.line, book.column) == (19, 3)
    assert smap[ElementPath.parse("/library")].line == 2
    assert model.location_of(model.lookup("/library/Book/pages")) == (20, 5)


def test_unknown_content_survives_edits():
    model = load_model(MODELS / "extras.ecore")
    model.lookup("/extras/Entry").name = "Record"
    model.reindex()
    out = serialize_xmi(model).decode()
    assert "<!-- hand-edited; keep the tool-specific bits -->" in out
    assert 'ext:owner="modeling-team"' in out
    assert 'ext:hint="short"' in out
    assert '<eGenericType eTypeParameter="#//Container/T"/>' in out
    assert 'name="Record" xmi:id="e1"' in out


def test_escaped_values_round_trip():
    data = doc(b'  <eClassifiers xsi:type="ecore:EClass" name="A">\n'
               b'    <eAnnotations source="s">\n'
               b'      <details key="k" value="a &lt; b &amp; &quot;c&quot;&#xA;d"/>\n'
               b'    </eAnnotations>\n'
               b'  </eClassifiers>\n')
    model, _, _ = parse_xmi(data)
    ann = model.lookup("/p/A").annotations[0]
    assert ann.detail("k") == 'a < b & "c"\nd'
    assert serialize_xmi(model) == data


def test_malformed_xml_reports_position():
    with pytest.raises(XmiSyntaxError) as err:
        parse_xmi(doc(b'  <eClassifiers xsi:type="ecore:EClass" name="A">\n'))
    assert err.value.line == 4


def test_unknown_encoding_is_syntax_error():
    with pytest.raises(XmiSyntaxError):
        parse_xmi(b'<?xml version="1.0" encoding="x-nope"?><a/>')


@pytest.mark.parametrize("data, fragment", [
    (b'<?xml version="1.0"?>\n<foo/>\n', "root element"),
    (b'<?xml version="1.0"?>\n<ecore:EPackage xmlns:ecore="http://wrong" name="p"/>\n',
     "namespace"),
    (doc(b'  <eClassifiers xsi:type="ecore:EClass" name="A" abstract="maybe"/>\n'),
     "not a boolean"),
    (doc(b'  <eClassifiers xsi:type="ecore:EClass" name="A">\n'
         b'    <eStructuralFeatures xsi:type="ecore:EAttribute" name="a" upperBound="x"/>\n'
         b'  </eClassifiers>\n'), "not an integer"),
    (doc(b'  <eClassifiers xsi:type="ecore:EClass" name="A" xmi:id="i"/>\n'
         b'  <eClassifiers xsi:type="ecore:EClass" name="B" xmi:id="i"/>\n'), "duplicate xmi:id"),
    (doc(b'  <eClassifiers name="A"/>\n'), "lacks"),
])
def test_format_errors(data, fragment):
    with pytest.raises(XmiFormatError) as err:
        parse_xmi(data)
    assert fragment in str(err.value)


def test_format_error_location():
    with pytest.raises(XmiFormatError) as err:
        parse_xmi(doc(b'  <eClassifiers xsi:type="ecore:EClass" name="A" abstract="maybe"/>\n'))
    assert (err.value.line, err.value.column) == (3, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_json_and_xmi_agree(seed):
    rng = random.Random(seed)
    model = parse_json(json.dumps(random_model_doc(rng)))
    xmi = serialize_xmi(model)
    again, _, _ = parse_xmi(xmi)
    assert without_extras(json.loads(export_json(again))) == \
        without_extras(json.loads(export_json(model)))
    assert serialize_xmi(again) == xmi
