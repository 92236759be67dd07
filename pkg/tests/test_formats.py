import numpy as np
import pytest

from tiltbench.algebra import FieldSpec, validate_algebra
from tiltbench.data import BUILTINS, KX2_TEXT, builtin_text, load, load_text
from tiltbench.formats import GroupInput, ParseError, format_algebra, format_group, parse

KX2_BAD = KX2_TEXT.replace("END\n", "")


def test_parse_kx2():
    raw = parse(KX2_TEXT)
    a = validate_algebra(raw)
    assert a.dim == 2 and a.simples == ["1"]
    assert a.mul(np.array([0, 1]), np.array([0, 1])).tolist() == [0, 0]


def test_missing_end_reports_line():
    with pytest.raises(ParseError, match="unexpected end of file") as exc:
        parse(KX2_BAD)
    assert exc.value.line == 10


def test_empty_input():
    with pytest.raises(ParseError, match="unexpected end of file"):
        parse("# only a comment\n")


@pytest.mark.parametrize(
    "edit,message",
    [
        (("MULT x 1 = 1*x", "MULT 1 x = 1*x"), "duplicate MULT"),
        (("ONE 1,0", "ONE 3,0"), "out of range"),
        (("ONE 1,0", "ONE a,0"), "bad scalar"),
        (("DIM 2", "DIM two"), "DIM needs an integer"),
        (("BASIS 1 x", "BASIS 1 x y"), "BASIS has 3 labels"),
        (("END", "FROB\nEND"), "unknown keyword"),
        (("END", "END\nDIM 2"), "content after END"),
        (("FIELD p=3 e=1", "FIELD p=4 e=1"), "not prime"),
    ],
)
def test_parse_errors(edit, message):
    old, new = edit
    with pytest.raises(ParseError, match=message) as exc:
        parse(KX2_TEXT.replace(old, new))
    assert exc.value.line is not None
    assert str(exc.value).startswith(f"line {exc.value.line}: ")


def test_negative_scalars_are_additive_inverses():
    text = KX2_TEXT.replace("MULT x 1 = 1*x", "MULT x 1 = -2*x")
    a = validate_algebra(parse(text))
    assert a.mult[1, 0, 1] == 1  # -2 = 1 in GF(3)


def test_comments_and_blank_lines_are_ignored():
    text = "# header\n\n" + KX2_TEXT.replace("DIM 2", "DIM 2   # two basis vectors")
    assert validate_algebra(parse(text)).dim == 2


def test_extension_field_default_modulus():
    text = KX2_TEXT.replace("FIELD p=3 e=1", "FIELD p=2 e=2")
    raw = parse(text)
    assert raw.field.p == 2 and raw.field.e == 2 and raw.field.modulus == (1, 1, 1)


def test_unknown_label_in_mult_is_a_validation_error():
    from tiltbench.algebra import ValidationError

    with pytest.raises(ValidationError, match="unknown label"):
        validate_algebra(parse(KX2_TEXT.replace("MULT x 1 = 1*x", "MULT x 1 = 1*z")))


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_round_trip(name):
    loaded = load(name)
    a = loaded.algebra
    text = format_algebra(a)
    b = validate_algebra(parse(text))
    assert b.labels == a.labels and np.array_equal(b.mult, a.mult) and np.array_equal(b.one, a.one)
    assert format_algebra(b) == text


def test_group_round_trip():
    parsed = parse(builtin_text("ex1"))
    assert isinstance(parsed, GroupInput) and parsed.group.order == 18
    again = parse(format_group(parsed.group, parsed.field))
    assert np.array_equal(again.group.table, parsed.group.table)
    assert again.field == FieldSpec(3)


def test_group_errors():
    base = "GROUP c2\nFIELD p=2\nORDER 2\nELEMENTS e a\nTABLE\n0 1\n1 0\nEND\n"
    assert load_text(base).algebra.dim == 2
    with pytest.raises(ParseError, match="integer indices"):
        parse(base.replace("1 0\nEND", "1 x\nEND"))
    with pytest.raises(ParseError, match="ORDER needs an integer"):
        parse(base.replace("ORDER 2", "ORDER two"))
    with pytest.raises(ParseError, match="expected ALGEBRA or GROUP"):
        parse("RING r\n")


def test_load_builtins_and_alias(tmp_path):
    assert load("exa4").algebra.dim == 12
    assert load("EX1").source == "ex1"
    p = tmp_path / "kx2.txt"
    p.write_text(KX2_TEXT)
    loaded = load(str(p))
    assert loaded.kind == "algebra" and loaded.digest == load_text(KX2_TEXT).digest
    with pytest.raises(FileNotFoundError):
        load(str(tmp_path / "missing.txt"))
