import pytest

from grad.algebra import get_semiring
from grad.analysis import (
    bisim_check,
    check_conservation,
    determinism_check,
    gc_candidates,
    noninterference,
    reachable,
    single_pointer,
    source_paths,
    swap_traces_agree,
    trace_report,
    zero_dead_check,
)
from grad.contexts import UsageCtx
from grad.corpus import get_program
from grad.exceptions import AnalysisError, FlagsError, PreconditionViolated
from grad.heap import Heap, HeapEntry, IsValue, memory_graph, multi_step
from grad.props import SWAP_TYPE, swap_heap
from grad.syntax import Inj1, Inj2, UnitElim, UnitVal, Unit, Var


def _loaded(name):
    loaded = get_program(name).load()
    return loaded.heap(), loaded.usage(), loaded


def _run(name):
    h, _, loaded = _loaded(name)
    return multi_step(h, loaded.main, system=loaded.system)


class TestTraceReport:
    @pytest.mark.parametrize("name", ("intro_trace", "heap_ex"))
    def test_sound_and_conserving(self, name):
        h, usage, loaded = _loaded(name)
        run = multi_step(h, loaded.main)
        report = trace_report(run, usage, loaded.main_type, exact=True)
        assert report.classification == "value"
        assert report.conservation
        assert len(report.soundness) == len(run.steps)
        assert report.sound
        assert report.verdict()

    def test_conservation_is_exact_under_nat(self):
        report = trace_report(_run("intro_trace"))
        assert check_conservation(report, exact=True)
        assert report.soundness == ()

    def test_stuck_run(self):
        h, usage, loaded = _loaded("stuck")
        run = multi_step(h, loaded.main)
        report = trace_report(run, usage, loaded.main_type)
        assert report.classification == "stuck(resource-exhausted x)"
        assert check_conservation(report, exact=True)
        # x is allowed less than main needs
        assert not report.sound
        assert report.soundness[0].reason.startswith("initial configuration")

    def test_out_of_fuel(self):
        h, _, loaded = _loaded("heap_ex")
        report = trace_report(multi_step(h, loaded.main, fuel=2))
        assert report.classification == "fuel"


class TestZeroDead:
    def test_irrelevant_entry_is_never_read(self):
        assert zero_dead_check(_run("irrelevant_app"))

    def test_needs_unusable_zero(self):
        s = get_semiring("trivial")
        run = multi_step(Heap(s), UnitVal())
        with pytest.raises(FlagsError):
            zero_dead_check(run)


class TestNoninterference:
    @pytest.mark.parametrize("semiring,grade", (("linearity", "0"), ("nat", 0), ("diamond", "A")))
    @pytest.mark.parametrize(
        "body", (Var("y"), UnitElim(Var("y"), Var("y"))), ids=("y", "let-unit")
    )
    def test_unusable_entry_does_not_interfere(self, semiring, grade, body):
        s = get_semiring(semiring)
        h = swap_heap(s, grade, Inj1(UnitVal()))
        assert noninterference(h, 0, Inj2(UnitVal()), h.entries[0].context, SWAP_TYPE, body)

    def test_usable_grade_is_refused(self):
        s = get_semiring("linearity")
        h = swap_heap(s, "1", Inj1(UnitVal()))
        with pytest.raises(PreconditionViolated):
            noninterference(h, 0, Inj2(UnitVal()), h.entries[0].context, SWAP_TYPE, Var("y"))

    def test_swapping_a_read_entry_is_noticed(self):
        s = get_semiring("linearity")
        h = swap_heap(s, "1", Inj1(UnitVal()))
        verdict = swap_traces_agree(
            h, 0, Inj2(UnitVal()), h.entries[0].context, SWAP_TYPE, Var("x")
        )
        assert not verdict


class TestMemoryGraph:
    def test_reachable(self):
        h, usage, _ = _loaded("heap_ex")
        graph = memory_graph(h, usage)
        assert reachable(graph) == {"x1", "x2", "x3"}
        assert len(source_paths(graph, "x1")) == 3
        assert len(source_paths(graph, "x3")) == 1

    def test_gc(self):
        h, usage, loaded = _loaded("heap_ex")
        assert gc_candidates(h, usage, loaded.system) == frozenset()
        h, usage, loaded = _loaded("irrelevant_app")
        assert gc_candidates(h, usage, loaded.system) == {"x"}

    def test_gc_needs_flags(self):
        s = get_semiring("trivial")
        with pytest.raises(FlagsError):
            gc_candidates(Heap(s), UsageCtx(s))

    def test_zero_allowance_can_be_read_when_zero_is_usable(self):
        s = get_semiring("trivial")
        h = Heap(s, (HeapEntry("x", s.zero, UsageCtx(s), UnitVal(), Unit()),))
        run = multi_step(h, Var("x"))
        assert isinstance(run.outcome, IsValue)
        assert len(run.steps) == 1
        with pytest.raises(FlagsError):
            gc_candidates(h, UsageCtx(s).extend("x", s.one, Unit(), UnitVal()))

    def test_gc_needs_compatible_heap(self):
        h, usage, loaded = _loaded("heap_ex")
        with pytest.raises(AnalysisError):
            gc_candidates(h.replace_allowed(0, 6), usage, loaded.system)

    @pytest.mark.parametrize("var", ("x", "y"))
    def test_single_pointer(self, var):
        h, usage, loaded = _loaded("single_pointer")
        assert single_pointer(h, usage, var, loaded.system)

    def test_single_pointer_needs_allowance_one(self):
        h, usage, loaded = _loaded("heap_ex")
        with pytest.raises(PreconditionViolated):
            single_pointer(h, usage, "x1", loaded.system)
        with pytest.raises(AnalysisError):
            single_pointer(h, usage, "x9", loaded.system)

    def test_single_pointer_needs_linear_semiring(self):
        s = get_semiring("boolean")
        h = Heap(s, (HeapEntry("x", s.one, UsageCtx(s), UnitVal(), Unit()),))
        usage = UsageCtx(s).extend("x", s.one, Unit(), UnitVal())
        with pytest.raises(FlagsError):
            single_pointer(h, usage, "x")


@pytest.mark.parametrize("name", ("intro_trace", "heap_ex", "graded_pair", "case_sum", "unwise"))
def test_bisimulation(name):
    h, _, loaded = _loaded(name)
    assert bisim_check(h, loaded.main, system=loaded.system)


def test_bisimulation_fails_when_stuck():
    h, _, loaded = _loaded("stuck")
    verdict = bisim_check(h, loaded.main)
    assert not verdict
    assert "stuck" in verdict.reason


@pytest.mark.parametrize("name", ("intro_trace", "heap_ex", "irrelevant_app", "stuck"))
def test_determinism(name):
    h, _, loaded = _loaded(name)
    assert determinism_check(h, loaded.main, system=loaded.system)
