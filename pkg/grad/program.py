"""
Load a parsed program for checking and evaluation.

Definitions are checked in order, each one in the context of the definitions
before it, so the program becomes a telescope of defined variables. The usage
each definition synthesizes is its embedded context in the initial heap.

Heap allowances are computed from the last definition back: an entry must
provide what main uses of it directly plus what every later entry uses of it,
scaled by that entry's own allowance. That makes the initial configuration
compatible with main's usage. `def x ^q` fixes an allowance instead.

"""
from __future__ import annotations

import dataclasses
import logging
from typing import List, Optional, Tuple

from .algebra import Grade, GradeVector, Semiring
from .contexts import PlainCtx, UsageCtx
from .exceptions import TypeCheckError
from .heap import Heap, HeapEntry, compat, make_checker
from .parser import Program, load_program
from .settings import GRAD_FUEL
from .syntax import Term

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class LoadedProgram:
    program: Program
    system: str
    # the definitions as a context, with their types and definiens
    plain: PlainCtx
    # synthesized usage of each definition over the definitions before it
    embedded: Tuple[UsageCtx, ...]
    main_type: Optional[Term]
    main_usage: Optional[UsageCtx]

    @property
    def semiring(self) -> Semiring:
        return self.program.semiring

    @property
    def main(self) -> Term:
        if self.program.main is None:
            raise TypeCheckError("cannot-infer", "program has no main")
        return self.program.main

    def allowances(self) -> GradeVector:
        """Return the heap allowance of every definition."""
        s = self.semiring
        demand = (
            self.main_usage.grades()
            if self.main_usage is not None
            else GradeVector.zeros(s, len(self.plain))
        )
        n = len(self.plain)
        allowed: List[Grade] = [s.zero] * n
        for i in reversed(range(n)):
            fixed = self.program.definitions[i].allowance
            if fixed is not None:
                allowed[i] = fixed
                continue
            allowed[i] = s.add(
                demand[i],
                s.sum(s.mul(allowed[j], self.embedded[j].grades()[i]) for j in range(i + 1, n)),
            )
        return GradeVector(s, tuple(allowed))

    def heap(self) -> Heap:
        """Return the initial heap holding every definition."""
        entries = tuple(
            HeapEntry(d.name, q, embedded, d.term, d.type)
            for d, q, embedded in zip(self.program.definitions, self.allowances(), self.embedded)
        )
        return Heap(self.semiring, entries)

    def usage(self) -> UsageCtx:
        """Return main's usage over the definitions, with their definiens."""
        if self.main_usage is None:
            return UsageCtx.zero(self.semiring, self.plain)
        return self.main_usage

    def is_compatible(self) -> bool:
        return bool(compat(self.heap(), self.usage(), self.system))


def check_program(
    program: Program, system: str = "dep", fuel: int = GRAD_FUEL
) -> LoadedProgram:
    """
    Check every definition and main.

    Raises TypeCheckError for the first definition or main that does not check.

    """
    s = program.semiring
    plain = PlainCtx()
    embedded: List[UsageCtx] = []
    for definition in program.definitions:
        checker = make_checker(s, plain, system, fuel)
        checker.check_type(definition.type)
        usage = checker.check(definition.term, definition.type)
        logger.debug("Checked %s with usage %s", definition.name, usage)
        embedded.append(UsageCtx.from_plain(plain, usage))
        plain = plain.extend(definition.name, definition.type, definition.term)
    main_type: Optional[Term] = None
    main_usage: Optional[UsageCtx] = None
    if program.main is not None:
        checker = make_checker(s, plain, system, fuel)
        if program.main_type is not None:
            checker.check_type(program.main_type)
            main_type = program.main_type
            grades = checker.check(program.main, main_type)
        else:
            main_type, grades = checker.infer(program.main)
        main_usage = UsageCtx.from_plain(plain, grades)
    return LoadedProgram(program, system, plain, tuple(embedded), main_type, main_usage)


def load(
    filename: str, semiring: Semiring, system: str = "dep", fuel: int = GRAD_FUEL
) -> LoadedProgram:
    """Parse and check a `.grad` file."""
    return check_program(load_program(filename, semiring), system, fuel)
