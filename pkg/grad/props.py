"""
Seeded property suites over the corpus and randomly built configurations.

A suite is a list of named cases. Cases are drawn up front from a
`random.Random(seed)`, run on a thread pool and reported sorted by case id,
so the output depends only on the seed.

"""
from __future__ import annotations

import dataclasses
import functools
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .algebra import FiniteSemiring, Grade, Semiring, get_semiring
from .analysis import (
    bisim_check,
    determinism_check,
    gc_candidates,
    noninterference,
    single_pointer,
    swap_traces_agree,
    trace_report,
)
from .contexts import UsageCtx
from .corpus import CORPUS, CorpusProgram, get_program
from .exceptions import FlagsError, GradError
from .heap import Heap, HeapEntry, Verdict, multi_step, type_entry
from .parser import load_program
from .program import LoadedProgram, check_program
from .settings import (
    GRAD_CONSERVATION_RUNS,
    GRAD_NONINTERFERENCE_CONTROLS,
    GRAD_NONINTERFERENCE_SWAPS,
    GRAD_PROPS_SEED,
    GRAD_PROPS_WORKERS,
)
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
    SigmaElim,
    Sum,
    Term,
    Unit,
    UnitElim,
    UnitVal,
    Var,
    all_names,
)

logger = logging.getLogger(__name__)

SuiteCase = Tuple[str, Callable[[], Verdict]]

CONSERVATION_SEMIRINGS = ("nat", "linearity", "boolean-ordered")
NONINTERFERENCE_SEMIRINGS = ("linearity", "nat", "diamond")


@dataclasses.dataclass(frozen=True)
class CaseResult:
    suite: str
    case_id: str
    verdict: Verdict

    def __str__(self) -> str:
        return f"{self.suite} {self.case_id} {self.verdict}"


def _expect_flags_error(check: Callable[[], object]) -> Verdict:
    try:
        check()
    except FlagsError:
        return Verdict.ok()
    return Verdict.fail("no flags error was raised")


# type-preserving wrappers around main


def _identity(main: Term, type_: Term, s: Semiring, z: str, w: str) -> Term:
    return App(Lam(z, s.one, type_, Var(z)), main)


def _box(main: Term, type_: Term, s: Semiring, z: str, w: str) -> Term:
    return LetBox(z, Box(s.one, main), Var(z))


def _unit(main: Term, type_: Term, s: Semiring, z: str, w: str) -> Term:
    return UnitElim(UnitVal(), main)


def _pair(main: Term, type_: Term, s: Semiring, z: str, w: str) -> Term:
    return SigmaElim(z, w, Pair(main, UnitVal()), UnitElim(Var(w), Var(z)))


def _irrelevant(main: Term, type_: Term, s: Semiring, z: str, w: str) -> Term:
    return App(Lam(z, s.zero, Unit(), main), UnitVal())


def _case(main: Term, type_: Term, s: Semiring, z: str, w: str) -> Term:
    branch = Lam(z, s.one, Unit(), UnitElim(Var(z), main))
    return Case(s.one, Ann(Inj1(UnitVal()), Sum(Unit(), Unit())), branch, branch)


MUTATIONS: Tuple[Callable[[Term, Term, Semiring, str, str], Term], ...] = (
    _identity,
    _box,
    _unit,
    _pair,
    _irrelevant,
    _case,
)


def mutate(loaded: LoadedProgram, choices: Sequence[int]) -> LoadedProgram:
    """Wrap main in the chosen mutations, innermost first, and check the result."""
    program = loaded.program
    main, type_ = loaded.main, loaded.main_type
    assert type_ is not None
    names = NameSupply()
    for choice in choices:
        avoid = set(program.names) | all_names(main) | all_names(type_)
        z = names.fresh("z", avoid)
        w = names.fresh("w", avoid | {z})
        main = MUTATIONS[choice](main, type_, program.semiring, z, w)
    mutated = dataclasses.replace(program, main=main, main_type=type_)
    return check_program(mutated, loaded.system)


def _loadable(semiring: Semiring) -> List[Tuple[CorpusProgram, LoadedProgram]]:
    """Return the corpus programs that check under a semiring they were not written for."""
    found = []
    for entry in CORPUS:
        if entry.expected != "value":
            continue
        try:
            loaded = check_program(load_program(entry.path, semiring), entry.system)
        except GradError as ex:
            logger.debug("%s does not load under %s: %s", entry.name, semiring, ex)
            continue
        if loaded.program.main is not None and loaded.is_compatible():
            found.append((entry, loaded))
    return found


def _conserves(loaded: LoadedProgram, choices: Sequence[int], exact: bool) -> Verdict:
    mutated = mutate(loaded, choices)
    run = multi_step(mutated.heap(), mutated.main, system=mutated.system)
    return trace_report(run, exact=exact).conservation


def conservation_cases(
    seed: int, semiring: Optional[str] = None, runs: int = GRAD_CONSERVATION_RUNS
) -> List[SuiteCase]:
    """
    Draw mutated corpus programs and check that their runs conserve resources.

    Under the naturals the order is discrete, so both sides must be equal.

    """
    rng = random.Random(seed)
    semirings = (semiring,) if semiring else CONSERVATION_SEMIRINGS
    pools = {name: _loadable(get_semiring(name)) for name in semirings}
    names = sorted(name for name, pool in pools.items() if pool)
    if not names:
        return [("none", lambda: Verdict.fail("no corpus program loads"))]
    cases: List[SuiteCase] = []
    for i in range(runs):
        semiring_name = rng.choice(names)
        entry, loaded = rng.choice(pools[semiring_name])
        choices = [rng.randrange(len(MUTATIONS)) for _ in range(rng.randint(1, 3))]
        check = functools.partial(_conserves, loaded, choices, semiring_name == "nat")
        cases.append((f"{i:04d}-{semiring_name}-{entry.name}", check))
    return cases


SWAP_TYPE = Sum(Unit(), Unit())


def _swap_values(s: Semiring) -> Tuple[Term, ...]:
    return (
        Inj1(UnitVal()),
        Inj2(UnitVal()),
        Inj1(App(Lam("u", s.one, Unit(), Var("u")), UnitVal())),
    )


def _swap_bodies(s: Semiring) -> Tuple[Term, ...]:
    branch = Lam("z", s.one, Unit(), Var("z"))
    return (
        Var("y"),
        UnitElim(Var("y"), Var("x")),
        App(Lam("z", s.zero, SWAP_TYPE, Var("y")), Var("x")),
        Case(s.one, Var("x"), branch, branch),
        Pair(Var("x"), Var("y")),
        LetBox("z", Box(s.zero, Var("x")), Var("y")),
    )


def swap_heap(s: Semiring, allowed: Grade, value: Term) -> Heap:
    """Return the heap x ↦^allowed value, y ↦^1 unit."""
    empty = Heap(s)
    context, _ = type_entry(empty, value, SWAP_TYPE)
    h = empty.append(HeapEntry("x", allowed, context, value, SWAP_TYPE))
    context, _ = type_entry(h, UnitVal(), Unit())
    return h.append(HeapEntry("y", s.one, context, UnitVal(), Unit()))


def _unusable(s: Semiring) -> Tuple[Grade, ...]:
    if isinstance(s, FiniteSemiring):
        return tuple(q for q in s.elements if not s.is_usable(q))
    return (s.zero,)


def _swap(s: Semiring, g: Grade, first: Term, second: Term, b: Term) -> Verdict:
    h = swap_heap(s, g, first)
    return noninterference(h, 0, second, h.entries[0].context, SWAP_TYPE, b)


def _control(s: Semiring, first: Term, second: Term) -> Verdict:
    h = swap_heap(s, s.one, first)
    if swap_traces_agree(h, 0, second, h.entries[0].context, SWAP_TYPE, Var("x")):
        return Verdict.fail("swapping an entry that is looked up went unnoticed")
    return Verdict.ok()


def noninterference_cases(
    seed: int,
    semiring: Optional[str] = None,
    swaps: int = GRAD_NONINTERFERENCE_SWAPS,
    controls: int = GRAD_NONINTERFERENCE_CONTROLS,
) -> List[SuiteCase]:
    """
    Swap the value of an entry allowed an unusable grade and compare the runs.

    The controls swap an entry allowed 1 under a term that looks it up, and
    hold when the runs differ.

    """
    rng = random.Random(seed)
    semirings = [get_semiring(name) for name in ((semiring,) if semiring else NONINTERFERENCE_SEMIRINGS)]
    candidates = [(s, _unusable(s)) for s in semirings]
    candidates = [(s, grades) for s, grades in candidates if grades]
    if not candidates:
        return [("none", lambda: Verdict.fail("no semiring has an unusable grade"))]
    cases: List[SuiteCase] = []
    for i in range(swaps):
        s, grades = rng.choice(candidates)
        first, second = rng.sample(_swap_values(s), 2)
        check = functools.partial(
            _swap, s, rng.choice(grades), first, second, rng.choice(_swap_bodies(s))
        )
        cases.append((f"swap-{i:04d}-{s}", check))
    for i in range(controls):
        s = semirings[i % len(semirings)]
        first, second = rng.sample(_swap_values(s)[:2], 2)
        cases.append((f"control-{i:03d}-{s}", functools.partial(_control, s, first, second)))
    return cases


def _corpus(semiring: Optional[str], expected: Optional[str] = None) -> List[CorpusProgram]:
    return [
        p
        for p in CORPUS
        if semiring in (None, p.semiring_name) and expected in (None, p.expected)
    ]


def _loaded(entry: CorpusProgram) -> Tuple[Heap, UsageCtx, LoadedProgram]:
    loaded = entry.load()
    return loaded.heap(), loaded.usage(), loaded


def _collects(name: str, expected: FrozenSet[str], extra: bool = False) -> Verdict:
    h, usage, loaded = _loaded(get_program(name))
    if extra:
        context, type_ = type_entry(h, UnitVal(), Unit(), loaded.system)
        h = h.append(HeapEntry("x4", h.semiring.zero, context, UnitVal(), type_))
        usage = usage.extend("x4", h.semiring.zero, type_, UnitVal())
    found = gc_candidates(h, usage, loaded.system)
    if found != expected:
        return Verdict.fail(f"collects {', '.join(sorted(found)) or 'nothing'}")
    return Verdict.ok()


def _trivial_gc() -> Verdict:
    s = get_semiring("trivial")
    return _expect_flags_error(lambda: gc_candidates(Heap(s), UsageCtx(s)))


def gc_cases(seed: int, semiring: Optional[str] = None) -> List[SuiteCase]:
    cases = [
        ("heap_ex", "nat", functools.partial(_collects, "heap_ex", frozenset())),
        ("heap_ex-dead", "nat", functools.partial(_collects, "heap_ex", frozenset({"x4"}), True)),
        ("irrelevant_app", "linearity", functools.partial(_collects, "irrelevant_app", frozenset({"x"}))),
        ("trivial-flags", "trivial", _trivial_gc),
    ]
    return [(case_id, check) for case_id, name, check in cases if semiring in (None, name)]


def _single(var: str) -> Verdict:
    h, usage, loaded = _loaded(get_program("single_pointer"))
    return single_pointer(h, usage, var, loaded.system)


def _boolean_single() -> Verdict:
    s = get_semiring("boolean")
    h = Heap(s, (HeapEntry("x", s.one, UsageCtx(s), UnitVal(), Unit()),))
    usage = UsageCtx(s).extend("x", s.one, Unit(), UnitVal())
    return _expect_flags_error(lambda: single_pointer(h, usage, "x"))


def single_pointer_cases(seed: int, semiring: Optional[str] = None) -> List[SuiteCase]:
    cases = [
        ("single_pointer-x", "linearity", functools.partial(_single, "x")),
        ("single_pointer-y", "linearity", functools.partial(_single, "y")),
        ("boolean-flags", "boolean", _boolean_single),
    ]
    return [(case_id, check) for case_id, name, check in cases if semiring in (None, name)]


def _bisim(entry: CorpusProgram) -> Verdict:
    h, _, loaded = _loaded(entry)
    return bisim_check(h, loaded.main, system=loaded.system)


def _sound(entry: CorpusProgram) -> Verdict:
    h, usage, loaded = _loaded(entry)
    run = multi_step(h, loaded.main, system=loaded.system)
    return trace_report(run, usage, loaded.main_type, loaded.system).verdict()


def _deterministic(entry: CorpusProgram) -> Verdict:
    h, _, loaded = _loaded(entry)
    return determinism_check(h, loaded.main, system=loaded.system)


def bisim_cases(seed: int, semiring: Optional[str] = None) -> List[SuiteCase]:
    return [(p.name, functools.partial(_bisim, p)) for p in _corpus(semiring, "value")]


def soundness_cases(seed: int, semiring: Optional[str] = None) -> List[SuiteCase]:
    return [(p.name, functools.partial(_sound, p)) for p in _corpus(semiring, "value")]


def determinism_cases(seed: int, semiring: Optional[str] = None) -> List[SuiteCase]:
    return [(p.name, functools.partial(_deterministic, p)) for p in _corpus(semiring)]


SUITES: Dict[str, Callable[[int, Optional[str]], List[SuiteCase]]] = {
    "bisim": bisim_cases,
    "conservation": conservation_cases,
    "determinism": determinism_cases,
    "gc": gc_cases,
    "noninterference": noninterference_cases,
    "single-pointer": single_pointer_cases,
    "soundness": soundness_cases,
}


def _run_case(suite: str, case: SuiteCase) -> CaseResult:
    case_id, check = case
    try:
        verdict = check()
    except GradError as ex:
        verdict = Verdict.fail(f"{ex.__class__.__name__}: {ex}")
    logger.debug("%s %s: %s", suite, case_id, verdict)
    return CaseResult(suite, case_id, verdict)


def run_suite(
    suite: str,
    seed: int = GRAD_PROPS_SEED,
    semiring: Optional[str] = None,
    workers: int = GRAD_PROPS_WORKERS,
) -> List[CaseResult]:
    """Run every case of a suite and return the results sorted by case id."""
    cases = SUITES[suite](seed, semiring)
    logger.debug("Running %d %s cases with seed %d", len(cases), suite, seed)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(functools.partial(_run_case, suite), cases))
    return sorted(results, key=lambda r: r.case_id)
