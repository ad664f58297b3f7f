import json

import pytest

from conftest import MODELS
from ecorelint.compare import (
    ConflictList,
    ReplaceError,
    ReplaceScope,
    copy_elements,
    diff,
    import_package,
    render_changelog,
    search_replace,
)
from ecorelint.errors import EcoreError
from ecorelint.rules import run_rules
from ecorelint.xmi import load_model, parse_xmi, serialize_xmi


def edited(model, path, **fields):
    clone = model.copy()
    node = clone.lookup(path)
    for key, value in fields.items():
        setattr(node, key, value)
    clone.reindex()
    return clone


def test_identical_models_have_empty_delta(corpus):
    for model in corpus.values():
        assert diff(model, model).is_empty()
    assert render_changelog(diff(corpus["library"], corpus["library"])) == b"no changes\n"


def test_field_change_reported_at_new_path(corpus):
    lib = corpus["library"]
    changed = edited(lib, "/library/Book/pages", lower_bound=1)
    delta = diff(lib, changed)
    assert not delta.additions and not delta.deletions
    assert [(str(c.path), c.field, c.old, c.new) for c in delta.changes] == \
        [("/library/Book/pages", "lowerBound", 0, 1)]


def test_added_and_removed_elements(corpus):
    people, lib = corpus["people"], corpus["library"]
    delta = diff(people, lib)
    assert "/library/Book" in [str(p) for p in delta.additions]
    assert "/people/Human" in [str(p) for p in delta.deletions]


def test_rename_is_delete_plus_add(corpus):
    people = corpus["people"]
    renamed, _ = search_replace(people, "Human", "Person")
    delta = diff(people, renamed)
    assert [str(p) for p in delta.deletions] == ["/people/Human", "/people/Human/name",
                                                 "/people/Human/friends"]
    assert [str(p) for p in delta.additions] == ["/people/Person", "/people/Person/name",
                                                 "/people/Person/friends"]
    assert [(str(c.path), c.field, c.new) for c in delta.changes] == \
        [("/people/Household/members", "eType", "#//Person")]


def test_changelog_formats(corpus):
    lib = corpus["library"]
    delta = diff(lib, edited(lib, "/library/Item", abstract=False))
    text = render_changelog(delta).decode()
    assert text == "Added (0)\nRemoved (0)\nChanged (1)\n  ~ /library/Item abstract: true -> false\n"
    doc = json.loads(render_changelog(delta, "json"))
    assert doc == {"added": [], "removed": [],
                   "changed": [{"path": "/library/Item", "field": "abstract",
                                "old": True, "new": False}]}
    with pytest.raises(ValueError):
        render_changelog(delta, "yaml")


def test_replace_follows_references(corpus):
    people = corpus["people"]
    out, changes = search_replace(people, "Human", "Person")
    assert [(str(c.path), c.field, c.new) for c in changes.renames] == [
        ("/people/Human", "name", "Person"),
        ("/people/Human/friends", "eType", "#//Person"),
        ("/people/Household/members", "eType", "#//Person")]
    assert out.lookup("/people/Household/members").e_type.raw == "#//Person"
    assert list(run_rules(out)) == []
    assert people.lookup("/people/Human").name == "Human"


def test_regex_replace_with_group_reference(corpus):
    out, changes = search_replace(corpus["people"], r"(.*)ived$", "$1ive", regex=True)
    assert sorted(c.new for c in changes.renames) == ["archive", "receive"]
    assert out.lookup("/people/Household/archive") is not None


def test_replace_scope_and_case(corpus):
    people = corpus["people"]
    _, changes = search_replace(people, "human", "Person", case_sensitive=False,
                                scope=ReplaceScope(kinds=("EReference",)))
    assert len(changes) == 0
    _, changes = search_replace(people, "human", "Person", case_sensitive=False)
    assert [c.old for c in changes.renames if c.field == "name"] == ["Human"]


def test_dry_run_returns_input(corpus):
    people = corpus["people"]
    out, changes = search_replace(people, "Human", "Person", dry_run=True)
    assert out is people and len(changes) == 3


def test_replace_errors(corpus):
    with pytest.raises(ReplaceError):
        search_replace(corpus["people"], "(", "x", regex=True)
    with pytest.raises(ReplaceError):
        search_replace(corpus["people"], "", "x")
    with pytest.raises(ReplaceError):
        ReplaceScope(fields=("color",))
    with pytest.raises(ReplaceError):
        search_replace(corpus["people"], "(H)uman", "$2", regex=True)


def test_replace_documentation(corpus):
    out, changes = search_replace(corpus["library"], "lending", "public",
                                  scope=ReplaceScope(fields=("documentation",)))
    assert len(changes) == 1
    assert out.root_package.documentation() == "A small public library."


def test_import_conflicts_then_merge(corpus):
    lib, shop = corpus["library"], corpus["shop"]
    clash = import_package(lib, lib)
    assert isinstance(clash, ConflictList)
    assert clash.names()[:2] == ["Library", "Item"]
    merged = import_package(lib, corpus["people"])
    assert {"/library/Human", "/library/Household"} <= {str(p) for p in merged.element_index}
    assert merged.lookup("/library/Household/members").e_type.resolved is \
        merged.lookup("/library/Human")
    assert list(run_rules(merged)) == []
    again, _, _ = parse_xmi(serialize_xmi(merged))
    assert diff(merged, again).is_empty()
    assert not isinstance(import_package(shop, corpus["people"]), ConflictList)


def test_copy_rewrites_references(corpus):
    lib, people = corpus["library"], corpus["people"]
    out = copy_elements(lib, ["/library/Book", "/library/Item"], people)
    book = out.lookup("/people/Book")
    assert book.super_types[0].raw == "#//Item"
    assert book.super_types[0].resolved is out.lookup("/people/Item")
    # Genre stayed behind, so the reference points back into the library
    assert out.lookup("/people/Book/genre").e_type.raw == "http://example.org/library#//Genre"


def test_copy_feature_into_class(corpus):
    lib, people = corpus["library"], corpus["people"]
    out = copy_elements(lib, ["/library/Member/fullName"], people, into="/people/Human")
    assert out.lookup("/people/Human/fullName").name == "fullName"
    clash = copy_elements(lib, ["/library/Library/name"], people, into="/people/Human")
    assert isinstance(clash, ConflictList) and clash.names() == ["name"]


def test_copy_rejects_bad_targets(corpus):
    lib, people = corpus["library"], corpus["people"]
    with pytest.raises(EcoreError):
        copy_elements(lib, ["/library/Member/fullName"], people)
    with pytest.raises(EcoreError):
        copy_elements(lib, ["/library/Book"], people, into="/people/Human")
    with pytest.raises(EcoreError):
        copy_elements(lib, ["/library/Genre/fiction"], people)


def test_diff_survives_serialization(corpus):
    lib = corpus["library"]
    raw = (MODELS / "library.ecore").read_bytes().replace(b'name="Loan"', b'name="Lending"')
    other = load_model(MODELS / "library.ecore")
    changed, _, _ = parse_xmi(raw)
    delta = diff(other, changed)
    assert not diff(lib, other).changes
    assert str(delta.additions[0]) == "/library/Lending"
    assert str(delta.deletions[0]) == "/library/Loan"
