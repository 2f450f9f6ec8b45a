import pytest

from twcat.scalars import get_field
from twcat.textio import TwcParseError, builtin, dump, parse, same_workspace

from conftest import workspace


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_bundled_files_parse(name):
    ws = workspace(name)
    assert ws.objects and ws.algebra.idems


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_dump_parse_round_trip(name):
    ws = workspace(name)
    text = dump(ws)
    again = parse(text)
    assert same_workspace(ws, again)
    assert dump(again) == text


def test_field_override():
    ws = builtin("e1", get_field("Fp:5"))
    assert ws.field.spec == "Fp:5"


def test_unknown_example():
    with pytest.raises(KeyError):
        builtin("e9")


def test_unit_must_have_degree_minus_one():
    src = "field Q\nidempotents 0\nbasis e 0 0 0 unit\n"
    with pytest.raises(TwcParseError) as info:
        parse(src)
    assert info.value.line == 3


def test_missing_idempotents():
    with pytest.raises(TwcParseError, match="idempotents"):
        parse("field Q\n")


def test_unknown_statement_location():
    src = "field Q\nidempotents 0\n  frobnicate x\n"
    with pytest.raises(TwcParseError) as info:
        parse(src)
    assert (info.value.line, info.value.col) == (3, 3)


def test_bad_character_location():
    src = "field Q\nidempotents 0\nbasis e 0 0 -1 unit\ntw X { module = [(0,0):2] } $\n"
    with pytest.raises(TwcParseError) as info:
        parse(src)
    assert info.value.line == 4 and info.value.col == 29


def test_bn_arity_mismatch():
    src = "field Q\nidempotents 0\nbasis e 0 0 -1 unit\nbasis a 0 0 0\nbn 3: [a, a] -> 1*a\n"
    with pytest.raises(TwcParseError, match="factors"):
        parse(src)


def test_unknown_object_name():
    src = "field Q\nidempotents 0\nbasis e 0 0 -1 unit\nmor f : X -> X = []\n"
    with pytest.raises(TwcParseError, match="unknown name 'X'"):
        parse(src)


def test_duplicate_name():
    src = "field Q\nidempotents 0\nbasis e 0 0 -1 unit\ntw X { module = [(0,0):1] }\ntw X { module = [(0,0):1] }\n"
    with pytest.raises(TwcParseError, match="already defined"):
        parse(src)


def test_invalid_object_reported_with_line():
    # delta of degree -1 instead of 0
    src = (
        "field Q\nidempotents 0\nbasis e 0 0 -1 unit\n"
        "tw X { module = [(0,0):2], delta = [ (nu^0 * e * nu^0, [[0, 1], [0, 0]]) ] }\n"
    )
    with pytest.raises(TwcParseError) as info:
        parse(src)
    assert info.value.line == 4


def test_multiline_statement_and_comments():
    src = (
        "# header\nfield Fp:7\nidempotents 0\nbasis e 0 0 -1 unit\n"
        "tw X { module = [(0,0):1,\n   (1,0):1] }  # trailing\n"
    )
    ws = parse(src)
    assert ws.field.spec == "Fp:7" and len(ws.objects["X"].module.items) == 2
