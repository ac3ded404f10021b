"""
Print terms in the `.grad` surface syntax.

The output re-parses to an alpha-equal term. Precedence levels, loosest first:
binders (lambda, Pi, Sigma, let, case), arrows, sums, tensors, application and
prefix forms, atoms.

"""
from __future__ import annotations

from typing import Optional

from .algebra import Grade, Semiring
from .syntax import (
    Ann,
    App,
    Arrow,
    Box,
    BoxType,
    Case,
    Inj1,
    Inj2,
    Lam,
    LetBox,
    Pair,
    Pi,
    Sigma,
    SigmaElim,
    Sum,
    Tensor,
    Term,
    TypeSort,
    Unit,
    UnitElim,
    UnitVal,
    Var,
    free_vars,
)

BINDER, ARROW, SUM, TENSOR, APP, ATOM = range(6)


def pretty(a: Term, resugar: bool = False, semiring: Optional[Semiring] = None) -> str:
    """
    Return the surface text of a term.

    With `resugar`, a Sigma whose second component is Unit and does not use
    its binder is printed as the box type it encodes. Grades are written with
    the semiring's `show` when one is given.

    """
    return _Printer(resugar, semiring).show(a, BINDER)


class _Printer:
    def __init__(self, resugar: bool, semiring: Optional[Semiring]) -> None:
        self.resugar = resugar
        self.semiring = semiring

    def grade(self, q: Grade) -> str:
        return self.semiring.show(q) if self.semiring is not None else str(q)

    def show(self, a: Term, level: int) -> str:
        text, own = self._show(a)
        return f"({text})" if own < level else text

    def _show(self, a: Term) -> tuple:  # noqa: C901
        s = self.show
        g = self.grade
        if isinstance(a, Var):
            return a.name, ATOM
        if isinstance(a, TypeSort):
            return "Type", ATOM
        if isinstance(a, Unit):
            return "Unit", ATOM
        if isinstance(a, UnitVal):
            return "unit", ATOM
        if isinstance(a, Pair):
            return f"({s(a.first, BINDER)}, {s(a.second, BINDER)})", ATOM
        if isinstance(a, Ann):
            return f"({s(a.term, BINDER)} : {s(a.annotation, BINDER)})", ATOM
        if isinstance(a, Inj1):
            return f"inj1 {s(a.term, ATOM)}", APP
        if isinstance(a, Inj2):
            return f"inj2 {s(a.term, ATOM)}", APP
        if isinstance(a, Box):
            return f"box {g(a.grade)} {s(a.term, ATOM)}", APP
        if isinstance(a, BoxType):
            return f"Box {g(a.grade)} {s(a.contents, ATOM)}", APP
        if isinstance(a, App):
            return f"{s(a.fun, APP)} {s(a.arg, ATOM)}", APP
        if isinstance(a, Tensor):
            return f"{s(a.left, APP)} * {s(a.right, TENSOR)}", TENSOR
        if isinstance(a, Sum):
            return f"{s(a.left, TENSOR)} + {s(a.right, SUM)}", SUM
        if isinstance(a, Arrow):
            return f"{s(a.domain, SUM)} -{g(a.grade)}> {s(a.codomain, ARROW)}", ARROW
        if isinstance(a, Lam):
            return f"\\{a.binder} :{g(a.grade)} {s(a.annotation, ARROW)}. {s(a.body, BINDER)}", BINDER
        if isinstance(a, Pi):
            return f"Pi {a.binder} :{g(a.grade)} {s(a.domain, ARROW)}. {s(a.codomain, BINDER)}", BINDER
        if isinstance(a, Sigma):
            if (
                self.resugar
                and isinstance(a.second, Unit)
                and a.binder not in free_vars(a.second)
            ):
                return f"Box {g(a.grade)} {s(a.first, ATOM)}", APP
            return f"Sigma {a.binder} :{g(a.grade)} {s(a.first, ARROW)}. {s(a.second, BINDER)}", BINDER
        if isinstance(a, UnitElim):
            return f"let unit = {s(a.scrutinee, BINDER)} in {s(a.body, BINDER)}", BINDER
        if isinstance(a, LetBox):
            return f"let box {a.binder} = {s(a.scrutinee, BINDER)} in {s(a.body, BINDER)}", BINDER
        if isinstance(a, SigmaElim):
            return (
                f"let ({a.binder1}, {a.binder2}) = {s(a.scrutinee, BINDER)} in "
                f"{s(a.body, BINDER)}",
                BINDER,
            )
        if isinstance(a, Case):
            return (
                f"case {g(a.grade)} {s(a.scrutinee, BINDER)} of "
                f"{s(a.branch1, BINDER)} ; {s(a.branch2, BINDER)}",
                BINDER,
            )
        raise TypeError(f"Cannot print {a!r}")
