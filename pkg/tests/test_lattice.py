import pytest

from wifn.errors import ParseError
from wifn.lattice import ALL, TOP, SecurityLevel, geq, join, meet, meet_all, parse_level

L = SecurityLevel.of


def test_meet_is_union():
    assert meet(L("A"), L("B")) == L("A", "B")
    assert meet(ALL, L("A")) == ALL
    assert meet(L("A", "C", "D"), L("A", "B")) == L("A", "B", "C", "D")


def test_join_is_intersection():
    assert join(L("A", "B"), L("B", "C")) == L("B")
    assert join(ALL, L("A")) == L("A")
    assert join(TOP, L("A")) == TOP


def test_order():
    assert geq(L("B"), L("A", "B"))
    assert not geq(L("A", "B", "S"), L("A", "S"))
    assert geq(L("A"), ALL) and geq(ALL, ALL)
    assert geq(TOP, L("A")) and not geq(ALL, L("A"))


def test_empty_meet_is_top():
    assert meet_all([]) == TOP


def test_text_and_json_forms():
    assert str(ALL) == "ALL" and str(TOP) == "{}" and str(L("B", "A")) == "{A,B}"
    assert L("B").to_json() == ["B"] and ALL.to_json() == "ALL"
    assert SecurityLevel.from_json(["A", "B"]) == L("A", "B")
    assert parse_level("{ A , B }") == L("A", "B")
    assert parse_level("ALL") == ALL and parse_level("{}") == TOP


def test_all_only_from_keyword():
    assert parse_level("{A, B, I}") != ALL


@pytest.mark.parametrize("bad", ["A, B", "{A,,B}", "{1A}", "all"])
def test_bad_levels(bad):
    with pytest.raises(ParseError):
        parse_level(bad)
