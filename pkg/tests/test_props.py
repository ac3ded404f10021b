import pytest

from grad.corpus import get_program
from grad.heap import Verdict
from grad.printer import pretty
from grad.props import (
    MUTATIONS,
    SUITES,
    CaseResult,
    conservation_cases,
    gc_cases,
    mutate,
    noninterference_cases,
    run_suite,
    single_pointer_cases,
)


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suite_holds(suite):
    results = run_suite(suite, seed=0)
    assert results
    failed = [str(r) for r in results if not r.verdict]
    assert failed == []
    assert [r.case_id for r in results] == sorted(r.case_id for r in results)


def test_case_result_str():
    assert str(CaseResult("gc", "heap_ex", Verdict.ok())) == "gc heap_ex holds"
    assert str(CaseResult("gc", "heap_ex", Verdict.fail("no"))) == "gc heap_ex fails: no"


@pytest.mark.parametrize("seed", (0, 7))
def test_cases_depend_on_seed_only(seed):
    first = [case_id for case_id, _ in conservation_cases(seed, runs=5)]
    second = [case_id for case_id, _ in conservation_cases(seed, runs=5)]
    assert first == second
    first = [case_id for case_id, _ in noninterference_cases(seed, swaps=4, controls=2)]
    second = [case_id for case_id, _ in noninterference_cases(seed, swaps=4, controls=2)]
    assert first == second
    assert len(first) == 6


def test_semiring_filter():
    assert [case_id for case_id, _ in gc_cases(0, "trivial")] == ["trivial-flags"]
    assert [case_id for case_id, _ in single_pointer_cases(0, "linearity")] == [
        "single_pointer-x",
        "single_pointer-y",
    ]
    assert all("-nat-" in case_id for case_id, _ in conservation_cases(0, "nat", runs=3))


def test_semiring_without_cases():
    assert gc_cases(0, "five-point") == []


@pytest.mark.parametrize("choice", range(len(MUTATIONS)))
def test_mutation_keeps_type(choice):
    loaded = get_program("intro_trace").load()
    mutated = mutate(loaded, [choice])
    assert mutated.main_type == loaded.main_type
    assert mutated.main != loaded.main
    assert mutated.is_compatible()


def test_mutations_nest():
    loaded = get_program("heap_ex").load()
    mutated = mutate(loaded, [0, 3, 5])
    assert pretty(mutated.main_type) == pretty(loaded.main_type)
