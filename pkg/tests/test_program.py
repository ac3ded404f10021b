import pytest

from grad.algebra import linearity, naturals
from grad.corpus import CORPUS, get_program
from grad.exceptions import TypeCheckError
from grad.parser import parse_program
from grad.printer import pretty
from grad.program import check_program, load


@pytest.mark.parametrize("entry", CORPUS, ids=lambda p: p.name)
def test_corpus_checks(entry):
    loaded = entry.load()
    assert loaded.main_type is not None
    # stuck fixes an allowance below what main needs
    assert loaded.is_compatible() == (entry.expected == "value")


def test_get_program():
    assert get_program("heap_ex").semiring_name == "nat"
    with pytest.raises(KeyError):
        get_program("nothing")


def test_allowances_run_backwards():
    loaded = get_program("heap_ex").load()
    assert [u.grades().entries for u in loaded.embedded] == [(), (2,), (1, 2)]
    assert loaded.allowances().entries == (7, 3, 1)


def test_fixed_allowance():
    loaded = get_program("stuck").load()
    assert loaded.allowances().entries == (2, 1)
    assert not loaded.is_compatible()


def test_polymorphic_main():
    loaded = get_program("poly_id").load()
    assert pretty(loaded.main_type, resugar=True) == "Pi y :1 Unit. Unit"
    assert len(loaded.plain) == 0


def test_definitions_in_types():
    program = parse_program(
        """
        def T : Type = Unit
        def x : T = unit
        main : T = x
        """,
        linearity(),
    )
    loaded = check_program(program)
    assert loaded.main_usage.grades().entries == ("0", "1")
    assert loaded.allowances().entries == ("0", "1")


def test_rejected_definition():
    program = parse_program("def x : Unit = (unit, unit)", naturals())
    with pytest.raises(TypeCheckError):
        check_program(program)


def test_no_main():
    loaded = check_program(parse_program("def x : Unit = unit", naturals()))
    assert loaded.main_type is None
    assert loaded.usage().grades().entries == (0,)
    with pytest.raises(TypeCheckError) as exc:
        loaded.main
    assert exc.value.kind == "cannot-infer"


def test_simple_system_rejects_type():
    program = parse_program("main = (\\x :0 Type. unit) Unit", linearity())
    with pytest.raises(TypeCheckError):
        check_program(program, system="simple")


def test_load(tmp_path):
    filename = tmp_path / "pair.grad"
    filename.write_text("def x : Unit = unit\nmain : Unit * Unit = (x, x)\n")
    loaded = load(str(filename), naturals())
    assert loaded.allowances().entries == (2,)
    assert loaded.heap().names == ("x",)
