"""
The resource-annotated heap machine.

A heap is an ordered list of assignments `x ↦^q (Γ ⊢ a : A)`: the assignee,
its allowed usage q, the embedded context the assigned term was checked in,
the term and its type. Evaluation is call-by-name: beta rules load the
argument into the heap under a fresh name instead of substituting it, and a
variable lookup copies the assigned term while taking the copy quantity off
the allowance. A lookup the allowance cannot pay for is stuck.

Every step reports the new heap, the consumption vector u' (one grade per
entry of the new heap), the added context Γ4 describing the fresh entries
together with their definitions, and the reduct.

"""
from __future__ import annotations

import dataclasses
import logging
from typing import AbstractSet, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .algebra import Grade, GradeMatrix, GradeVector, Semiring, vec_mat_mul
from .contexts import PlainCtx, PlainEntry, UsageCtx, flatten_defs
from .dep_checker import DependentChecker, canonical, defeq, whnf
from .evaluation import Fuel, is_value
from .exceptions import ContextError, FuelExhausted, GradError, SemiringConfigError, StuckError
from .printer import pretty
from .settings import GRAD_FUEL
from .simple_checker import SimpleChecker
from .syntax import (
    Ann,
    App,
    Box,
    Case,
    Inj1,
    Inj2,
    Lam,
    LetBox,
    NameSupply,
    Pair,
    Sigma,
    SigmaElim,
    Term,
    UnitElim,
    UnitVal,
    Var,
    all_names,
    alpha_eq,
    alpha_eq_modulo,
    free_vars,
    subst,
    unannotate,
)

logger = logging.getLogger(__name__)

SYSTEMS = ("simple", "dep")

Checker = Union[SimpleChecker, DependentChecker]


def make_checker(
    semiring: Semiring, plain: PlainCtx, system: str = "dep", fuel: int = GRAD_FUEL
) -> Checker:
    """Return the checker of the given system over a plain context."""
    if system == "simple":
        return SimpleChecker(semiring, plain)
    if system == "dep":
        return DependentChecker(semiring, plain, Fuel(fuel))
    raise SemiringConfigError(f"Unknown system '{system}' (expected simple or dep)")


@dataclasses.dataclass(frozen=True)
class Verdict:
    """The outcome of a check, with the reason it failed."""

    holds: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds

    def __str__(self) -> str:
        return "holds" if self.holds else f"fails: {self.reason}"

    @classmethod
    def ok(cls) -> Verdict:
        return cls(True)

    @classmethod
    def fail(cls, reason: str) -> Verdict:
        return cls(False, reason)


@dataclasses.dataclass(frozen=True)
class HeapEntry:
    name: str
    allowed: Grade
    # embedded context over the entries before this one
    context: UsageCtx
    term: Term
    type: Optional[Term] = None

    def __str__(self) -> str:
        s = self.context.semiring
        return f"{self.name} ↦^{s.show(self.allowed)} {pretty(self.term, semiring=s)}"


@dataclasses.dataclass(frozen=True)
class Heap:
    """
    An ordered, proper and acyclic list of heap entries.

    Proper: no assignee appears twice. Acyclic: an entry's term refers to
    earlier assignees only.

    """

    semiring: Semiring
    entries: Tuple[HeapEntry, ...] = ()

    def __post_init__(self) -> None:
        seen: List[str] = []
        for e in self.entries:
            if e.name in seen:
                raise ContextError(f"Heap assigns {e.name} twice")
            later = free_vars(e.term) & ({e.name} | self._names_after(e.name))
            if later:
                raise ContextError(
                    f"Heap entry {e.name} refers to itself or later entries: "
                    f"{', '.join(sorted(later))}"
                )
            seen.append(e.name)

    def _names_after(self, name: str) -> AbstractSet[str]:
        names = self.names
        return set(names[names.index(name) + 1 :])

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[HeapEntry]:
        return iter(self.entries)

    def __str__(self) -> str:
        return ", ".join(str(e) for e in self.entries)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    def index(self, name: str) -> Optional[int]:
        for i, e in enumerate(self.entries):
            if e.name == name:
                return i
        return None

    def allowances(self) -> GradeVector:
        """Return H̄, the vector of allowed usages."""
        return GradeVector(self.semiring, tuple(e.allowed for e in self.entries))

    def erase(self) -> PlainCtx:
        """Return ⌊H⌋ as a plain context whose definitions are the assigned terms."""
        return PlainCtx(tuple(PlainEntry(e.name, e.type, e.term) for e in self.entries))

    def bare(self) -> Tuple[Tuple[str, Term], ...]:
        """Return ⌊⌊H⌋⌋, the assignments alone."""
        return tuple((e.name, e.term) for e in self.entries)

    def support(self) -> AbstractSet[str]:
        names = set(self.names)
        for e in self.entries:
            names |= all_names(e.term)
        return names

    def flatten(self, a: Term) -> Term:
        """Return a{H}: the heap's terms substituted into a, last entry first."""
        return flatten_defs(a, self.erase())

    def append(self, *entries: HeapEntry) -> Heap:
        return Heap(self.semiring, self.entries + tuple(entries))

    def replace_allowed(self, index: int, q: Grade) -> Heap:
        entries = list(self.entries)
        entries[index] = dataclasses.replace(entries[index], allowed=q)
        return Heap(self.semiring, tuple(entries))


@dataclasses.dataclass(frozen=True)
class StepRecord:
    heap: Heap
    consumed: GradeVector
    added: UsageCtx
    reduct: Term
    copy: Grade
    rule: str = ""


@dataclasses.dataclass(frozen=True)
class Stuck:
    reason: str
    var: Optional[str] = None

    def __str__(self) -> str:
        return f"{self.reason} {self.var}" if self.var else self.reason

    def error(self) -> StuckError:
        return StuckError(self.reason, self.var)


@dataclasses.dataclass(frozen=True)
class IsValue:
    term: Term


@dataclasses.dataclass(frozen=True)
class OutOfFuel:
    steps: int


Outcome = Union[IsValue, Stuck, OutOfFuel]


@dataclasses.dataclass(frozen=True)
class HeapRun:
    """A whole multi-step run of the machine."""

    initial: Heap
    term: Term
    copy: Grade
    steps: Tuple[StepRecord, ...]
    consumed: GradeVector
    added: UsageCtx
    outcome: Outcome

    @property
    def final_heap(self) -> Heap:
        return self.steps[-1].heap if self.steps else self.initial

    @property
    def final_term(self) -> Term:
        return self.steps[-1].reduct if self.steps else self.term

    def raise_for_outcome(self) -> None:
        """Raise StuckError or FuelExhausted unless the run reached a value."""
        if isinstance(self.outcome, Stuck):
            raise self.outcome.error()
        if isinstance(self.outcome, OutOfFuel):
            raise FuelExhausted(self.outcome.steps)


def type_entry(
    h: Heap, term: Term, expected: Optional[Term], system: str = "dep"
) -> Tuple[UsageCtx, Optional[Term]]:
    """
    Type a term being loaded into the heap, over the heap's erased context.

    Returns the embedded context and the type. A term the checker rejects is
    loaded with a zero embedded context and no type.

    """
    plain = h.erase()
    checker = make_checker(h.semiring, plain, system)
    try:
        if expected is None:
            type_, usage = checker.infer(term)
        else:
            type_, usage = expected, checker.check(term, expected)
    except GradError as ex:
        logger.debug("Loading %s untyped: %s", term, ex)
        return UsageCtx.zero(h.semiring, plain), None
    return UsageCtx.from_plain(plain, usage), type_


class _Machine:
    def __init__(
        self, semiring: Semiring, support: AbstractSet[str], names: NameSupply, system: str
    ) -> None:
        self.semiring = semiring
        self.support = support
        self.names = names
        self.system = system

    def fresh(self, h: Heap, a: Term, base: str) -> str:
        return self.names.fresh(base, set(self.support) | h.support() | all_names(a))

    def step(self, h: Heap, a: Term, copy: Grade) -> Union[StepRecord, Stuck, IsValue]:  # noqa: C901
        s = self.semiring
        zeros = GradeVector.zeros(s, len(h))
        no_additions = UsageCtx(s)
        if is_value(a):
            return IsValue(a)
        if isinstance(a, Var):
            return self.lookup(h, a.name, copy)
        if isinstance(a, Ann):
            return StepRecord(h, zeros, no_additions, a.term, copy, "Ann")
        if isinstance(a, App):
            fun = unannotate(a.fun)
            if isinstance(fun, Lam):
                return self.load(
                    h, a, [(fun.binder, s.mul(copy, fun.grade), a.arg, fun.annotation)],
                    fun.body, copy, "AppBeta",
                )
            return self.congruence(h, a, "fun", copy, copy, "AppL")
        if isinstance(a, UnitElim):
            if isinstance(unannotate(a.scrutinee), UnitVal):
                return StepRecord(h, zeros, no_additions, a.body, copy, "UnitBeta")
            return self.congruence(h, a, "scrutinee", copy, copy, "UnitL")
        if isinstance(a, Case):
            injection = unannotate(a.scrutinee)
            if isinstance(injection, Inj1):
                return StepRecord(h, zeros, no_additions, App(a.branch1, injection.term), copy, "CaseOne")
            if isinstance(injection, Inj2):
                return StepRecord(h, zeros, no_additions, App(a.branch2, injection.term), copy, "CaseTwo")
            return self.congruence(h, a, "scrutinee", s.mul(copy, a.grade), copy, "CaseL")
        if isinstance(a, LetBox):
            box = unannotate(a.scrutinee)
            if isinstance(box, Box):
                return self.load(
                    h, a, [(a.binder, s.mul(copy, box.grade), box.term, None)],
                    a.body, copy, "LetBoxBeta",
                )
            return self.congruence(h, a, "scrutinee", copy, copy, "LetBoxL")
        if isinstance(a, SigmaElim):
            pair = unannotate(a.scrutinee)
            if isinstance(pair, Pair):
                return self.spread(h, a, pair, copy)
            return self.congruence(h, a, "scrutinee", copy, copy, "SpreadL")
        return Stuck("ill-formed")

    def lookup(self, h: Heap, name: str, copy: Grade) -> Union[StepRecord, Stuck]:
        s = self.semiring
        i = h.index(name)
        if i is None:
            return Stuck("unbound", name)
        if not s.leq(s.one, copy):
            return Stuck("copy-not-relevant", name)
        entry = h.entries[i]
        remaining = s.decrement(entry.allowed, copy)
        if remaining is None:
            logger.debug("Lookup of %s at %s exhausts its allowance", name, s.show(entry.allowed))
            return Stuck("resource-exhausted", name)
        logger.debug(
            "Lookup %s: %s -> %s", name, s.show(entry.allowed), s.show(remaining)
        )
        return StepRecord(
            h.replace_allowed(i, remaining),
            GradeVector.single(s, len(h), i, copy),
            UsageCtx(s),
            entry.term,
            copy,
            "Var",
        )

    def load(
        self,
        h: Heap,
        a: Term,
        bindings: Sequence[Tuple[str, Grade, Term, Optional[Term]]],
        body: Term,
        copy: Grade,
        rule: str,
    ) -> StepRecord:
        """Allocate one fresh entry per binding and rename the binders in body."""
        added = UsageCtx(self.semiring)
        renamed: Dict[str, str] = {}
        heap = h
        for binder, allowed, term, type_ in bindings:
            fresh = self.fresh(heap, a, binder)
            if type_ is not None:
                for old, new in renamed.items():
                    type_ = subst(type_, Var(new), old, self.names)
            context, type_ = type_entry(heap, term, type_, self.system)
            heap = heap.append(HeapEntry(fresh, allowed, context, term, type_))
            added = added.extend(fresh, allowed, type_, term)
            renamed[binder] = fresh
            logger.debug("Allocated %s ↦^%s %s", fresh, self.semiring.show(allowed), term)
        for old, new in renamed.items():
            body = subst(body, Var(new), old, self.names)
        return StepRecord(
            heap, GradeVector.zeros(self.semiring, len(heap)), added, body, copy, rule
        )

    def spread(self, h: Heap, a: SigmaElim, pair: Pair, copy: Grade) -> StepRecord:
        s = self.semiring
        grade, first_type, second_type = s.one, None, None
        annotation = a.scrutinee.annotation if isinstance(a.scrutinee, Ann) else None
        if annotation is not None:
            sigma = canonical(whnf(h.flatten(annotation), Fuel(GRAD_FUEL), s), s)
            if isinstance(sigma, Sigma):
                grade = sigma.grade
                first_type = sigma.first
                second_type = subst(sigma.second, Var(a.binder1), sigma.binder, self.names)
        return self.load(
            h,
            a,
            [
                (a.binder1, s.mul(copy, grade), pair.first, first_type),
                (a.binder2, copy, pair.second, second_type),
            ],
            a.body,
            copy,
            "SpreadBeta",
        )

    def congruence(
        self, h: Heap, a: Term, field: str, inner_copy: Grade, copy: Grade, rule: str
    ) -> Union[StepRecord, Stuck]:
        result = self.step(h, getattr(a, field), inner_copy)
        if isinstance(result, IsValue):
            return Stuck("ill-formed")
        if isinstance(result, Stuck):
            return result
        reduct = dataclasses.replace(a, **{field: result.reduct})
        return dataclasses.replace(result, reduct=reduct, copy=copy, rule=f"{rule}/{result.rule}")


def heap_step(
    h: Heap,
    a: Term,
    copy: Optional[Grade] = None,
    support: AbstractSet[str] = frozenset(),
    names: Optional[NameSupply] = None,
    system: str = "dep",
) -> Union[StepRecord, Stuck, IsValue]:
    """
    Take one machine step of `copy` copies of a in heap h.

    Fresh names avoid `support`, every name in the heap and every name in a.
    Returns IsValue for values and Stuck when no rule applies or a lookup
    cannot be paid for.

    """
    copy = h.semiring.one if copy is None else copy
    machine = _Machine(h.semiring, support, names or NameSupply(), system)
    return machine.step(h, a, copy)


def multi_step(
    h: Heap,
    a: Term,
    copy: Optional[Grade] = None,
    support: AbstractSet[str] = frozenset(),
    fuel: int = GRAD_FUEL,
    names: Optional[NameSupply] = None,
    system: str = "dep",
) -> HeapRun:
    """
    Step until a value, a stuck configuration or the end of the fuel.

    Consumption vectors are zero-extended to the growing heap and summed;
    added contexts are concatenated.

    """
    s = h.semiring
    copy = s.one if copy is None else copy
    machine = _Machine(s, support, names or NameSupply(), system)
    heap, term = h, a
    consumed = GradeVector.zeros(s, len(h))
    added = UsageCtx(s)
    steps: List[StepRecord] = []
    while True:
        if len(steps) >= fuel:
            outcome: Outcome = OutOfFuel(len(steps))
            break
        result = machine.step(heap, term, copy)
        if isinstance(result, (IsValue, Stuck)):
            outcome = result
            break
        steps.append(result)
        consumed = consumed.extend(len(result.heap)) + result.consumed
        added = added.concat(result.added)
        heap, term = result.heap, result.reduct
    logger.debug("Heap run: %d steps, outcome %s", len(steps), outcome)
    return HeapRun(h, a, copy, tuple(steps), consumed, added, outcome)


def compat(
    h: Heap,
    usage: UsageCtx,
    system: str = "dep",
    fuel: int = GRAD_FUEL,
    plain: Optional[PlainCtx] = None,
) -> Verdict:
    """
    Decide H ⊢ Δ; Γ by peeling entries from the end.

    Δ defaults to ⌊Γ⌋. The context grade of each entry must equal its
    allowance and the context type must convert to the entry's type; the
    assigned term must check at its type in the heap prefix within its
    embedded context, and a definition in the context must be the assigned
    term. The embedded context, scaled by the allowance, is then added to the
    prefix's demand.

    """
    if plain is None:
        plain = usage.erase()
    elif plain != usage.erase():
        return Verdict.fail(f"context {usage} does not erase to {plain}")
    if h.names != usage.names:
        return Verdict.fail(f"heap assigns ({', '.join(h.names)}) but context has "
                            f"({', '.join(usage.names)})")
    s = h.semiring
    erased = h.erase()
    demand = usage.grades()
    for i in reversed(range(len(h))):
        entry = h.entries[i]
        if demand[i] != entry.allowed:
            return Verdict.fail(
                f"{entry.name}: context needs {s.show(demand[i])} "
                f"but the heap allows {s.show(entry.allowed)}"
            )
        definition = usage.entries[i].definition
        if definition is not None and not alpha_eq(definition, entry.term):
            return Verdict.fail(f"{entry.name}: context defines it as {definition}")
        if entry.type is None:
            return Verdict.fail(f"{entry.name}: assigned term is untyped")
        prefix = erased.prefix(i)
        expected = plain.entries[i].type
        if expected is not None and not _same_type(prefix, expected, entry.type, s, system, fuel):
            return Verdict.fail(
                f"{entry.name}: context types it as {expected}, the heap as {entry.type}"
            )
        if entry.context.erase() != prefix:
            return Verdict.fail(f"{entry.name}: embedded context does not match the heap")
        verdict = _check_entry(entry, prefix, s, system, fuel)
        if not verdict:
            return verdict
        demand = demand.truncate(i) + entry.context.grades().scale(entry.allowed)
    return Verdict.ok()


def _same_type(
    prefix: PlainCtx, a: Term, b: Term, s: Semiring, system: str, fuel: int
) -> bool:
    if system == "simple":
        return alpha_eq(a, b)
    try:
        return defeq(prefix, a, b, s, fuel)
    except FuelExhausted:
        return False


def _check_entry(
    entry: HeapEntry, prefix: PlainCtx, s: Semiring, system: str, fuel: int
) -> Verdict:
    assert entry.type is not None
    checker = make_checker(s, prefix, system, fuel)
    try:
        usage = checker.check(entry.term, entry.type)
    except GradError as ex:
        return Verdict.fail(f"{entry.name}: {ex}")
    if not usage.leq(entry.context.grades()):
        return Verdict.fail(
            f"{entry.name}: uses {usage} beyond its embedded context {entry.context.grades()}"
        )
    return Verdict.ok()


def fit_context(h: Heap, demand: GradeVector) -> Optional[UsageCtx]:
    """
    Return a context compatible with h whose grades are at least demand.

    Working from the last entry back, each grade is the least c above the
    demand with c plus the inflow from later entries equal to the allowance.
    Returns None if some entry has no such grade.

    """
    s = h.semiring
    n = len(h)
    grades: List[Grade] = [s.zero] * n
    for i in reversed(range(n)):
        inflow = s.sum(
            s.mul(h.entries[j].allowed, h.entries[j].context.grades()[i]) for j in range(i + 1, n)
        )
        c = s.residual(h.entries[i].allowed, inflow, demand[i])
        if c is None:
            logger.debug("No context grade fits %s", h.entries[i].name)
            return None
        grades[i] = c
    return UsageCtx.from_plain(h.erase(), GradeVector(s, tuple(grades)))


def transformation_matrix(h: Heap) -> GradeMatrix:
    """Return ⟨H⟩, whose row i holds the embedded grades of entry i padded with zeros."""
    n = len(h)
    return GradeMatrix(
        h.semiring, tuple(e.context.grades().extend(n).entries for e in h.entries)
    )


def count_balance(h: Heap, usage: UsageCtx) -> bool:
    """Return True if H̄ = H̄ × ⟨H⟩ + Γ̄."""
    allowed = h.allowances()
    return allowed == vec_mat_mul(allowed, transformation_matrix(h)) + usage.grades()


SOURCE = "vg"


@dataclasses.dataclass(frozen=True)
class MemoryGraph:
    semiring: Semiring
    # topological order: the source, then the entries from last to first
    nodes: Tuple[str, ...]
    edges: Tuple[Tuple[str, str, Grade], ...]


def memory_graph(h: Heap, usage: UsageCtx) -> MemoryGraph:
    s = h.semiring
    edges: List[Tuple[str, str, Grade]] = [
        (SOURCE, name, q) for name, q in zip(reversed(h.names), reversed(usage.grades().entries))
    ]
    for e in reversed(h.entries):
        for target, q in reversed(tuple(zip(e.context.names, e.context.grades()))):
            edges.append((e.name, target, q))
    return MemoryGraph(
        s,
        (SOURCE,) + tuple(reversed(h.names)),
        tuple(edge for edge in edges if edge[2] != s.zero),
    )


def path_sums(graph: MemoryGraph) -> Dict[str, Grade]:
    """Return, per node, the sum over all source paths of the product of their weights."""
    s = graph.semiring
    flow: Dict[str, Grade] = {node: s.zero for node in graph.nodes}
    flow[SOURCE] = s.one
    for node in graph.nodes:
        for source, target, q in graph.edges:
            if source == node:
                flow[target] = s.add(flow[target], s.mul(flow[node], q))
    del flow[SOURCE]
    return flow


def to_dot(graph: MemoryGraph) -> str:
    show = graph.semiring.show
    lines = ["digraph memory {"]
    lines += [f'  "{node}";' for node in graph.nodes]
    lines += [
        f'  "{source}" -> "{target}" [label="{show(q)}"];' for source, target, q in graph.edges
    ]
    lines.append("}")
    return "\n".join(lines) + "\n"


def same_configuration(h1: Heap, a1: Term, h2: Heap, a2: Term) -> bool:
    """Return True if the machine views (⌊⌊H⌋⌋, a) agree up to renaming of assignees."""
    if len(h1) != len(h2):
        return False
    renaming: List[Tuple[str, str]] = []
    for (x, t1), (y, t2) in zip(h1.bare(), h2.bare()):
        if not alpha_eq_modulo(t1, t2, renaming):
            return False
        renaming.append((x, y))
    return alpha_eq_modulo(a1, a2, renaming)


def format_step(h: Heap, a: Term, record: StepRecord) -> str:
    """Render one step as `[H] a ⇒^r [H'; u'; Γ4] a'`."""
    s = h.semiring
    added = ", ".join(
        f"{e.name} :^{s.show(e.grade)} {e.type if e.type is not None else '?'}"
        for e in record.added
    )
    return (
        f"[{h}] {pretty(a, semiring=s)} ⇒^{s.show(record.copy)} "
        f"[{record.heap}; {record.consumed}; {added}] {pretty(record.reduct, semiring=s)}"
    )
