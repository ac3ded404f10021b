"""
Checks over heap machine runs.

Everything here works from recorded data: a `HeapRun` and the heaps and
contexts it carries. The machine's own bookkeeping is never taken on trust;
each verdict recomputes the quantities it compares.

"""
from __future__ import annotations

import dataclasses
import logging
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .algebra import GradeVector, vec_mat_mul
from .contexts import UsageCtx
from .evaluation import evaluate, step
from .exceptions import AnalysisError, FlagsError, FuelExhausted, GradError, PreconditionViolated
from .heap import (
    SOURCE,
    Heap,
    HeapRun,
    IsValue,
    MemoryGraph,
    OutOfFuel,
    Stuck,
    Verdict,
    compat,
    fit_context,
    make_checker,
    memory_graph,
    multi_step,
    same_configuration,
    transformation_matrix,
)
from .settings import GRAD_FUEL
from .syntax import NameSupply, Term, all_names, alpha_eq

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class TraceReport:
    run: HeapRun
    conservation: Verdict
    # one verdict per step checked, when an initial context was given
    soundness: Tuple[Verdict, ...] = ()

    @property
    def classification(self) -> str:
        outcome = self.run.outcome
        if isinstance(outcome, IsValue):
            return "value"
        if isinstance(outcome, Stuck):
            return f"stuck({outcome})"
        return "fuel"

    @property
    def sound(self) -> bool:
        return all(self.soundness)

    def verdict(self) -> Verdict:
        """Combine the conservation and soundness verdicts."""
        if not self.conservation:
            return self.conservation
        for k, v in enumerate(self.soundness, start=1):
            if not v:
                return Verdict.fail(f"step {k}: {v.reason}")
        return Verdict.ok()


def _conservation(run: HeapRun, exact: bool) -> Verdict:
    used = run.final_heap.allowances() + run.consumed
    available = run.initial.allowances().concat(run.added.grades())
    holds = used == available if exact else used.leq(available)
    if holds:
        return Verdict.ok()
    relation = "=" if exact else "≤"
    return Verdict.fail(f"H̄' + u' = {used} is not {relation} H̄ ⋄ Γ̄' = {available}")


def check_conservation(report: TraceReport, exact: bool = False) -> Verdict:
    """
    Check H̄' + u' ≤ H̄ ⋄ Γ̄' for the whole run.

    With `exact` the two sides must be equal, which is what a discrete order
    gives.

    """
    return _conservation(report.run, exact)


def _soundness_step(
    before: Heap,
    usage: UsageCtx,
    record_heap: Heap,
    consumed: GradeVector,
    added: UsageCtx,
    reduct: Term,
    type_: Term,
    system: str,
    fuel: int,
) -> Tuple[Verdict, Optional[UsageCtx]]:
    s = before.semiring
    checker = make_checker(s, record_heap.erase(), system, fuel)
    try:
        demand = checker.check(reduct, type_)
    except GradError as ex:
        return Verdict.fail(f"reduct {reduct} does not check: {ex}"), None
    fitted = fit_context(record_heap, demand)
    if fitted is None:
        return Verdict.fail(f"no context compatible with the heap covers {demand}"), None
    matrix = transformation_matrix(record_heap)
    fresh = GradeVector.zeros(s, len(before)).concat(added.grades())
    left = fitted.grades() + consumed + vec_mat_mul(fresh, matrix)
    right = usage.grades().extend(len(record_heap)) + vec_mat_mul(consumed, matrix) + fresh
    if not left.leq(right):
        return Verdict.fail(f"resources {left} exceed {right}"), None
    verdict = compat(record_heap, fitted, system, fuel)
    if not verdict:
        return Verdict.fail(f"compatibility is lost: {verdict.reason}"), None
    return Verdict.ok(), fitted


def trace_report(
    run: HeapRun,
    usage: Optional[UsageCtx] = None,
    type_: Optional[Term] = None,
    system: str = "dep",
    fuel: int = GRAD_FUEL,
    exact: bool = False,
) -> TraceReport:
    """
    Build the report of a run.

    Given the compatible context and the type of the initial configuration,
    every step is also checked to keep the reduct typed at that type with a
    context that fits the new heap and stays within the resources of the old
    one. Checking stops at the first step that fails.

    """
    conservation = _conservation(run, exact)
    if usage is None or type_ is None:
        return TraceReport(run, conservation)
    initial = compat(run.initial, usage, system, fuel)
    if not initial:
        return TraceReport(
            run, conservation, (Verdict.fail(f"initial configuration: {initial.reason}"),)
        )
    verdicts: List[Verdict] = []
    heap, current = run.initial, usage
    for record in run.steps:
        verdict, fitted = _soundness_step(
            heap,
            current,
            record.heap,
            record.consumed,
            record.added,
            record.reduct,
            type_,
            system,
            fuel,
        )
        verdicts.append(verdict)
        if fitted is None:
            logger.debug("Soundness fails after %s: %s", record.rule, verdict.reason)
            break
        heap, current = record.heap, fitted
    return TraceReport(run, conservation, tuple(verdicts))


def zero_dead_check(run: HeapRun) -> Verdict:
    """Check that entries allowed 0 are never consumed from and stay at 0."""
    s = run.initial.semiring
    if not s.classify().zero_unusable:
        raise FlagsError(f"0 is usable in {s}")
    heap = run.initial
    for k, record in enumerate(run.steps, start=1):
        for i, entry in enumerate(heap):
            if entry.allowed != s.zero:
                continue
            if record.consumed[i] != s.zero:
                return Verdict.fail(f"step {k} consumes {entry.name}, which is allowed 0")
            if record.heap.entries[i].allowed != s.zero:
                return Verdict.fail(f"step {k} raises the allowance of {entry.name}")
        heap = record.heap
    return Verdict.ok()


def swap_entry(h: Heap, index: int, term: Term, context: UsageCtx, type_: Term) -> Heap:
    """Return h with entry `index` holding a different term."""
    entries = list(h.entries)
    entries[index] = dataclasses.replace(
        entries[index], term=term, context=context, type=type_
    )
    return Heap(h.semiring, tuple(entries))


def _compare_runs(run1: HeapRun, run2: HeapRun, index: int) -> Verdict:  # noqa: C901
    if len(run1.steps) != len(run2.steps):
        return Verdict.fail(f"{len(run1.steps)} steps against {len(run2.steps)}")
    for k, (r1, r2) in enumerate(zip(run1.steps, run2.steps), start=1):
        if not alpha_eq(r1.reduct, r2.reduct):
            return Verdict.fail(f"step {k} reducts differ: {r1.reduct} and {r2.reduct}")
        if r1.consumed != r2.consumed:
            return Verdict.fail(f"step {k} consumes {r1.consumed} and {r2.consumed}")
        if r1.heap.names != r2.heap.names:
            return Verdict.fail(f"step {k} allocates differently")
        if r1.heap.allowances() != r2.heap.allowances():
            return Verdict.fail(
                f"step {k} allowances differ: {r1.heap.allowances()} and {r2.heap.allowances()}"
            )
        if r1.added.grades() != r2.added.grades():
            return Verdict.fail(f"step {k} adds {r1.added} and {r2.added}")
        for i, ((x, t1), (_, t2)) in enumerate(zip(r1.heap.bare(), r2.heap.bare())):
            if i != index and not alpha_eq(t1, t2):
                return Verdict.fail(f"step {k} assigns {x} differently")
    o1, o2 = run1.outcome, run2.outcome
    if type(o1) is not type(o2):
        return Verdict.fail(f"outcomes differ: {o1} and {o2}")
    if isinstance(o1, IsValue) and isinstance(o2, IsValue) and not alpha_eq(o1.term, o2.term):
        return Verdict.fail(f"values differ: {o1.term} and {o2.term}")
    if isinstance(o1, Stuck) and o1 != o2:
        return Verdict.fail(f"stuck differently: {o1} and {o2}")
    return Verdict.ok()


def swap_traces_agree(
    h: Heap,
    index: int,
    alt_term: Term,
    alt_ctx: UsageCtx,
    alt_type: Term,
    b: Term,
    fuel: int = GRAD_FUEL,
    system: str = "dep",
) -> Verdict:
    """Run b under h and under h with entry `index` swapped, and compare the runs."""
    swapped = swap_entry(h, index, alt_term, alt_ctx, alt_type)
    support = frozenset(h.support() | swapped.support() | all_names(b))
    run1 = multi_step(h, b, support=support, fuel=fuel, names=NameSupply(), system=system)
    run2 = multi_step(swapped, b, support=support, fuel=fuel, names=NameSupply(), system=system)
    return _compare_runs(run1, run2, index)


def noninterference(
    h: Heap,
    index: int,
    alt_term: Term,
    alt_ctx: UsageCtx,
    alt_type: Term,
    b: Term,
    fuel: int = GRAD_FUEL,
    system: str = "dep",
) -> Verdict:
    """
    Check that an entry whose allowance is unusable does not influence a run.

    Raises PreconditionViolated when the allowance g admits some q with
    q + 1 ≤ g.

    """
    s = h.semiring
    entry = h.entries[index]
    if s.is_usable(entry.allowed):
        raise PreconditionViolated(
            f"{entry.name} is allowed {s.show(entry.allowed)}, which is usable in {s}"
        )
    return swap_traces_agree(h, index, alt_term, alt_ctx, alt_type, b, fuel, system)


def _require(h: Heap, *flags: str) -> None:
    s = h.semiring
    available = s.classify().as_dict()
    missing = [flag for flag in flags if not available[flag]]
    if missing:
        raise FlagsError(f"{s} is not {', '.join(missing)}")


def _require_compat(h: Heap, usage: UsageCtx, system: str) -> None:
    verdict = compat(h, usage, system)
    if not verdict:
        raise AnalysisError(f"heap is not compatible with {usage}: {verdict.reason}")


def reachable(graph: MemoryGraph) -> FrozenSet[str]:
    """Return the nodes with a path from the source."""
    seen: Set[str] = set()
    todo = [SOURCE]
    while todo:
        node = todo.pop()
        for source, target, _ in graph.edges:
            if source == node and target not in seen:
                seen.add(target)
                todo.append(target)
    return frozenset(seen)


def gc_candidates(h: Heap, usage: UsageCtx, system: str = "dep") -> FrozenSet[str]:
    """
    Return the entries that can be garbage collected.

    These are the entries allowed 0. Each must also be cut off from the
    source of the memory graph, else AnalysisError is raised.

    """
    _require(h, "zero_unusable", "zerosumfree", "entire", "zero_minimal")
    _require_compat(h, usage, system)
    s = h.semiring
    dead = frozenset(e.name for e in h if e.allowed == s.zero)
    live = dead & reachable(memory_graph(h, usage))
    if live:
        raise AnalysisError(f"entries allowed 0 are reachable: {', '.join(sorted(live))}")
    return dead


def source_paths(graph: MemoryGraph, target: str) -> List[Tuple[Tuple[str, str, object], ...]]:
    """Return every path of edges from the source to target."""
    outgoing: Dict[str, List[Tuple[str, str, object]]] = {}
    for edge in graph.edges:
        outgoing.setdefault(edge[0], []).append(edge)
    paths: List[Tuple[Tuple[str, str, object], ...]] = []

    def walk(node: str, path: Tuple[Tuple[str, str, object], ...]) -> None:
        if node == target:
            paths.append(path)
            return
        for edge in outgoing.get(node, []):
            walk(edge[1], path + (edge,))

    walk(SOURCE, ())
    return paths


def single_pointer(h: Heap, usage: UsageCtx, var: str, system: str = "dep") -> Verdict:
    """Check that an entry allowed 1 is reached by exactly one path, of weight 1 throughout."""
    _require(
        h, "zero_unusable", "zerosumfree", "entire", "linear", "zero_minimal", "one_minimal"
    )
    _require_compat(h, usage, system)
    s = h.semiring
    i = h.index(var)
    if i is None:
        raise AnalysisError(f"{var} is not in the heap")
    if h.entries[i].allowed != s.one:
        raise PreconditionViolated(f"{var} is allowed {s.show(h.entries[i].allowed)}, not 1")
    graph = memory_graph(h, usage)
    paths = source_paths(graph, var)
    if len(paths) != 1:
        return Verdict.fail(f"{len(paths)} paths reach {var}")
    (path,) = paths
    for source, target, weight in path:
        if weight != s.one:
            return Verdict.fail(f"edge {source} -> {target} has weight {weight}")
        if target != var and len(source_paths(graph, target)) != 1:
            return Verdict.fail(f"{target} is shared on the way to {var}")
    return Verdict.ok()


def bisim_check(h: Heap, a: Term, fuel: int = GRAD_FUEL, system: str = "dep") -> Verdict:
    """
    Run the heap machine and substitution evaluation side by side.

    After flattening the heap into the term, each machine step is either
    invisible or one substitution step, and both semantics end at the same
    value.

    """
    run = multi_step(h, a, fuel=fuel, system=system)
    heap, term = h, a
    for k, record in enumerate(run.steps, start=1):
        before = heap.flatten(term)
        after = record.heap.flatten(record.reduct)
        if not alpha_eq(before, after):
            expected = step(before)
            if expected is None or not alpha_eq(expected, after):
                return Verdict.fail(f"step {k} ({record.rule}) reaches {after} from {before}")
        heap, term = record.heap, record.reduct
    if isinstance(run.outcome, Stuck):
        return Verdict.fail(f"heap machine is stuck: {run.outcome}")
    if isinstance(run.outcome, OutOfFuel):
        return Verdict.fail(f"heap machine ran out of fuel after {run.outcome.steps} steps")
    try:
        value, _ = evaluate(h.flatten(a), fuel)
    except FuelExhausted as ex:
        return Verdict.fail(str(ex))
    final = run.final_heap.flatten(run.final_term)
    if not alpha_eq(value, final):
        return Verdict.fail(f"substitution gives {value}, the heap machine {final}")
    return Verdict.ok()


def determinism_check(
    h: Heap, a: Term, fuel: int = GRAD_FUEL, system: str = "dep", offsets: Sequence[int] = (0, 1000)
) -> Verdict:
    """Run the machine with differently started name supplies and compare every step."""
    first, second = (
        multi_step(h, a, fuel=fuel, names=NameSupply(offset), system=system) for offset in offsets[:2]
    )
    if len(first.steps) != len(second.steps):
        return Verdict.fail(f"{len(first.steps)} steps against {len(second.steps)}")
    for k, (r1, r2) in enumerate(zip(first.steps, second.steps), start=1):
        if not same_configuration(r1.heap, r1.reduct, r2.heap, r2.reduct):
            return Verdict.fail(f"configurations differ after step {k}")
    if type(first.outcome) is not type(second.outcome):
        return Verdict.fail(f"outcomes differ: {first.outcome} and {second.outcome}")
    return Verdict.ok()
