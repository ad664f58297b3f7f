import pytest

from ecorelint.errors import ElementNotFound
from ecorelint.metamodel import (
    ElementPath,
    FilterQuery,
    all_features,
    conforms_to,
    filter_selection,
    subclasses,
    super_closure,
)
from ecorelint.xmi import parse_xmi

DUPES = b"""<?xml version="1.0" encoding="UTF-8"?>
<ecore:EPackage xmi:version="2.0" xmlns:xmi="http://www.omg.org/XMI" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xmlns:ecore="http://www.eclipse.org/emf/2002/Ecore" name="p" nsURI="http://x/p" nsPrefix="p">
  <eClassifiers xsi:type="ecore:EClass" name="A"/>
  <eClassifiers xsi:type="ecore:EClass" name="A"/>
  <eClassifiers xsi:type="ecore:EClass" name="odd/name"/>
  <eClassifiers xsi:type="ecore:EClass" name="Loop" eSuperTypes="#//Loop"/>
</ecore:EPackage>
"""


def test_path_parse_and_render():
    p = ElementPath.parse("/library/Book/pages")
    assert p.segments == ("library", "Book", "pages")
    assert str(p) == "/library/Book/pages"
    assert p.parent == ElementPath.parse("/library/Book")
    assert ElementPath.parse("/library").parent is None
    assert p.child("x") == ElementPath.parse("/library/Book/pages/x")


def test_path_name_strips_suffixes():
    assert ElementPath.parse("/p/A[2]").name == "A"
    assert ElementPath.parse("/p/Shape/area()").name == "area"
    assert ElementPath.parse("/p/odd%2Fname").name == "odd/name"


def test_path_requires_leading_slash():
    with pytest.raises(ValueError):
        ElementPath.parse("library/Book")


def test_duplicate_names_get_ordinals():
    model, _, _ = parse_xmi(DUPES)
    paths = [str(p) for p in model.element_index]
    assert paths[:3] == ["/p", "/p/A", "/p/A[2]"]
    assert "/p/odd%2Fname" in paths
    assert model.lookup("/p/A[2]") is not model.lookup("/p/A")


def test_operations_render_with_parens(corpus):
    shapes = corpus["shapes"]
    op = shapes.lookup("/shapes/Shape/moveBy()")
    assert op.name == "moveBy"
    assert shapes.lookup("/shapes/Shape/moveBy()/dx").name == "dx"


def test_lookup_missing_raises(corpus):
    lib = corpus["library"]
    with pytest.raises(ElementNotFound):
        lib.lookup("/library/Nope")
    with pytest.raises(ElementNotFound):
        lib.lookup("no-slash")
    with pytest.raises(ElementNotFound):
        lib.find_class("/library/Book/pages")
    with pytest.raises(KeyError):
        lib.find_class("Ghost")


def test_types_resolve(corpus):
    lib = corpus["library"]
    books = lib.lookup("/library/Library/books")
    assert books.e_type.resolved is lib.lookup("/library/Book")
    pages = lib.lookup("/library/Book/pages")
    assert pages.e_type.resolved.name == "EInt"
    nested = corpus["nested"]
    staff = nested.lookup("/company/Company/staff")
    assert staff.e_type.resolved is nested.lookup("/company/people/Person")


def test_super_closure_diamond(corpus):
    dia = corpus["diamond"]
    d = dia.find_class("D")
    ancestors, cycle = super_closure(d)
    assert [c.name for c in ancestors] == ["B", "A", "C"]
    assert cycle is None


def test_self_loop_cycle():
    model, _, _ = parse_xmi(DUPES)
    loop = model.find_class("Loop")
    assert [c.name for c in super_closure(loop).cycle] == ["Loop"]


def test_all_features_own_first(corpus):
    d = corpus["diamond"].find_class("D")
    names = [(f.name, owner.name) for f, owner in all_features(d)]
    assert names == [("bottom", "D"), ("left", "B"), ("id", "A"), ("right", "C")]


def test_conforms_and_subclasses(corpus):
    dia = corpus["diamond"]
    a, b, c, d = (dia.find_class(n) for n in "ABCD")
    assert conforms_to(d, a) and conforms_to(b, b)
    assert not conforms_to(a, d)
    assert {x.name for x in subclasses(dia, a)} == {"B", "C", "D"}
    assert [x.name for x in subclasses(dia, a, transitive=False)] == ["B", "C"]


@pytest.mark.parametrize("query, expected", [
    ("supertypes-of:Book", {"/library/Book", "/library/Item"}),
    ("subtypes-of:Item", {"/library/Item", "/library/Book"}),
    ("related-by-reference:Loan", {"/library/Loan", "/library/Member", "/library/Book",
                                   "/library/Library"}),
    ("by-kind:EEnum", {"/library/Genre"}),
    ("by-name-pattern:*oan*", {"/library/Loan", "/library/Library/loans",
                               "/library/Member/loans"}),
])
def test_filter_selection(corpus, query, expected):
    got = filter_selection(corpus["library"], FilterQuery.parse(query))
    assert {str(p) for p in got} == expected


def test_filter_query_rejects_unknown_kind():
    with pytest.raises(ValueError):
        FilterQuery.parse("kind:EClass")
    with pytest.raises(ValueError):
        FilterQuery.parse("by-kind")


def test_copy_is_independent(corpus):
    lib = corpus["library"]
    clone = lib.copy()
    clone.lookup("/library/Book").name = "Volume"
    clone.reindex()
    assert "/library/Volume" in {str(p) for p in clone.element_index}
    assert lib.lookup("/library/Book").name == "Book"
