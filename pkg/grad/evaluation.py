"""
Call-by-name small-step evaluation by substitution.

One evaluator serves both the simple and the dependent system. Values are the
introduction forms and the (closed) type formers; annotations are transparent
to every beta rule and otherwise step to their body.

"""
from __future__ import annotations

import dataclasses
import logging
from typing import Iterator, Optional, Tuple

from .exceptions import FuelExhausted
from .settings import GRAD_FUEL
from .syntax import (
    TYPE_FORMERS,
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
    Term,
    UnitElim,
    UnitVal,
    Var,
    subst,
    subst_many,
    unannotate,
)

logger = logging.getLogger(__name__)

VALUE_FORMS = (UnitVal, Lam, Box, Pair, Inj1, Inj2) + TYPE_FORMERS

VALUE = "value"
STEPS = "steps"
STUCK = "stuck"


@dataclasses.dataclass
class Fuel:
    """
    Step budget shared by everything one call does.

    `tick` raises FuelExhausted once the budget is spent.

    """

    budget: int = GRAD_FUEL
    spent: int = 0

    def tick(self) -> None:
        if self.spent >= self.budget:
            raise FuelExhausted(self.spent)
        self.spent += 1

    @property
    def remaining(self) -> int:
        return self.budget - self.spent


def is_value(a: Term) -> bool:
    return isinstance(a, VALUE_FORMS)


def step(a: Term, names: Optional[NameSupply] = None) -> Optional[Term]:  # noqa: C901
    """Return the call-by-name reduct of a, or None for values and stuck terms."""
    names = names or NameSupply()
    if isinstance(a, Ann):
        return a.term
    if isinstance(a, App):
        fun = unannotate(a.fun)
        if isinstance(fun, Lam):
            return subst(fun.body, a.arg, fun.binder, names)
        reduct = step(a.fun, names)
        return None if reduct is None else App(reduct, a.arg)
    if isinstance(a, UnitElim):
        if isinstance(unannotate(a.scrutinee), UnitVal):
            return a.body
        reduct = step(a.scrutinee, names)
        return None if reduct is None else UnitElim(reduct, a.body)
    if isinstance(a, SigmaElim):
        pair = unannotate(a.scrutinee)
        if isinstance(pair, Pair):
            return subst_many(
                a.body, [(a.binder1, pair.first), (a.binder2, pair.second)], names
            )
        reduct = step(a.scrutinee, names)
        return None if reduct is None else dataclasses.replace(a, scrutinee=reduct)
    if isinstance(a, Case):
        injection = unannotate(a.scrutinee)
        if isinstance(injection, Inj1):
            return App(a.branch1, injection.term)
        if isinstance(injection, Inj2):
            return App(a.branch2, injection.term)
        reduct = step(a.scrutinee, names)
        return None if reduct is None else dataclasses.replace(a, scrutinee=reduct)
    if isinstance(a, LetBox):
        box = unannotate(a.scrutinee)
        if isinstance(box, Box):
            return subst(a.body, box.term, a.binder, names)
        reduct = step(a.scrutinee, names)
        return None if reduct is None else dataclasses.replace(a, scrutinee=reduct)
    return None


def head(a: Term) -> Term:
    """Return the sub-term evaluation of a is currently blocked on or working at."""
    while True:
        if isinstance(a, App):
            if isinstance(unannotate(a.fun), Lam):
                return a
            a = a.fun
        elif isinstance(a, (UnitElim, SigmaElim, Case, LetBox)):
            scrutinee = unannotate(a.scrutinee)
            if is_value(scrutinee):
                return a
            a = a.scrutinee
        else:
            return a


def classify(a: Term) -> str:
    """Return "value", "steps" or "stuck"."""
    if is_value(a):
        return VALUE
    return STEPS if step(a) is not None else STUCK


def stuck_reason(a: Term) -> Tuple[str, Optional[str]]:
    """Describe why a stuck term cannot step."""
    blocked = head(a)
    if isinstance(blocked, Var):
        return "unbound", blocked.name
    return "ill-formed", None


def reductions(a: Term, fuel: Optional[Fuel] = None) -> Iterator[Term]:
    """Yield each successive reduct of a until it stops stepping."""
    fuel = fuel or Fuel()
    names = NameSupply()
    while True:
        reduct = step(a, names)
        if reduct is None:
            return
        fuel.tick()
        a = reduct
        yield a


def evaluate(a: Term, fuel: int = GRAD_FUEL) -> Tuple[Term, int]:
    """
    Step a until it no longer steps.

    Returns the final term and the number of steps taken. Raises FuelExhausted
    when the budget runs out first. A final term that is not a value is stuck.

    """
    result, steps = a, 0
    for result in reductions(a, Fuel(fuel)):
        steps += 1
    logger.debug("Evaluated in %d steps to %s", steps, classify(result))
    return result, steps
