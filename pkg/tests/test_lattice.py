import json

import pytest

from grad.algebra import get_semiring
from grad.exceptions import SemiringConfigError
from grad.lattice import find_lattice, load_lattice, parse_lattice

DIAMOND = {
    "name": "diamond",
    "elements": ["Private", "A", "B", "Public"],
    "covers": [["Private", "A"], ["Private", "B"], ["A", "Public"], ["B", "Public"]],
    "private": "Private",
    "public": "Public",
}


def test_parse_diamond():
    s = parse_lattice(DIAMOND)
    assert s.name == "diamond"
    assert s.add("A", "B") == "Public"
    assert s.mul("A", "B") == "Private"
    assert s.leq("Private", "A")
    assert not s.leq("A", "B")
    assert s.zero == "Private"
    assert s.one == "Public"


def test_shipped_diamond():
    s = get_semiring("diamond")
    assert s.add("A", "Private") == "A"
    assert find_lattice("diamond") is s


@pytest.mark.parametrize("key", ("elements", "covers", "private", "public"))
def test_missing_key(key):
    data = {k: v for k, v in DIAMOND.items() if k != key}
    with pytest.raises(SemiringConfigError):
        parse_lattice(data)


def test_not_a_lattice():
    # two incomparable tops
    data = dict(
        DIAMOND,
        elements=["Private", "A", "B"],
        covers=[["Private", "A"], ["Private", "B"]],
        public="A",
    )
    with pytest.raises(SemiringConfigError):
        parse_lattice(data)


def test_bad_covers():
    with pytest.raises(SemiringConfigError):
        parse_lattice(dict(DIAMOND, covers=[["Private"]]))


def test_load_lattice(tmp_path):
    filename = tmp_path / "levels.json"
    data = {k: v for k, v in DIAMOND.items() if k != "name"}
    filename.write_text(json.dumps(data))
    s = load_lattice(str(filename))
    assert s.name == "levels"
    assert s.parse_grade("0") == "Private"


@pytest.mark.parametrize("content", ("{not json", "[1, 2]"))
def test_load_lattice_invalid(tmp_path, content):
    filename = tmp_path / "broken.json"
    filename.write_text(content)
    with pytest.raises(SemiringConfigError):
        load_lattice(str(filename))


def test_load_lattice_missing(tmp_path):
    with pytest.raises(SemiringConfigError):
        load_lattice(str(tmp_path / "nowhere.json"))
