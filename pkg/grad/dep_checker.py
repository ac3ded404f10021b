"""
Usage checking for the graded dependent calculus.

Terms and types share one syntax and `Type : Type`. As in the simple checker,
checking is bidirectional with usage as an output. Usage in type positions
(annotations, domains, motives) is checked but discarded: only runtime uses of
a variable are counted.

Conversion substitutes the context's definitions, then compares terms by
weak-head reduction and structural descent. Grades must match exactly. The
simple type forms are read as their dependent encodings: `A -q> B` is a
non-dependent Pi, `A * B` a non-dependent Sigma at grade 1, and `Box q A`
is `Sigma _ :q A. Unit`.

"""
from __future__ import annotations

import dataclasses
import logging
from typing import Any, FrozenSet, Optional, Tuple, Union

from .algebra import Grade, GradeVector, Semiring
from .contexts import PlainCtx, UsageCtx, flatten_defs, join_usage
from .evaluation import Fuel, step
from .exceptions import ContextError, TypeCheckError
from .printer import pretty
from .settings import GRAD_FUEL
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
    NameSupply,
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
    all_names,
    alpha_eq,
    free_vars,
    subst,
)

logger = logging.getLogger(__name__)

FuelLike = Union[int, Fuel]


def _fuel(fuel: FuelLike) -> Fuel:
    return fuel if isinstance(fuel, Fuel) else Fuel(fuel)


def _anonymous(names: NameSupply, avoid: FrozenSet[str]) -> str:
    return "_" if "_" not in avoid else names.fresh("_", avoid)


def canonical(a: Term, semiring: Semiring, names: Optional[NameSupply] = None) -> Term:
    """Rewrite a simple type form at the head of a into its dependent encoding."""
    names = names or NameSupply()
    if isinstance(a, Arrow):
        return Pi(_anonymous(names, free_vars(a.codomain)), a.grade, a.domain, a.codomain)
    if isinstance(a, Tensor):
        return Sigma(_anonymous(names, free_vars(a.right)), semiring.one, a.left, a.right)
    if isinstance(a, BoxType):
        return Sigma("_", a.grade, a.contents, Unit())
    return a


def whnf(a: Term, fuel: FuelLike = GRAD_FUEL, semiring: Optional[Semiring] = None) -> Term:
    """
    Reduce a to weak head normal form by call-by-name steps.

    Raises FuelExhausted if the budget runs out; `Type : Type` lets terms
    diverge. When a semiring is given, simple type forms at the head are
    rewritten to their Pi / Sigma encodings.

    """
    budget = _fuel(fuel)
    names = NameSupply()
    while True:
        reduct = step(a, names)
        if reduct is None:
            break
        budget.tick()
        a = reduct
    return canonical(a, semiring, names) if semiring is not None else a


class _Conversion:
    def __init__(self, semiring: Semiring, fuel: Fuel) -> None:
        self.semiring = semiring
        self.fuel = fuel
        self.names = NameSupply()

    def whnf(self, a: Term) -> Term:
        return whnf(a, self.fuel, self.semiring)

    def convertible(self, a: Term, b: Term) -> bool:
        if alpha_eq(a, b):
            return True
        a, b = self.whnf(a), self.whnf(b)
        if type(a) is not type(b):
            return False
        if isinstance(a, Var) and isinstance(b, Var):
            return a.name == b.name
        if a.data() != b.data():
            return False
        if not all(self.convertible(getattr(a, f), getattr(b, f)) for f in a.open_fields):
            return False
        if not a.scoped_fields:
            return True
        avoid = all_names(a) | all_names(b)
        scoped_a = {f: getattr(a, f) for f in a.scoped_fields}
        scoped_b = {f: getattr(b, f) for f in b.scoped_fields}
        for x, y in zip(a.bound_names(), b.bound_names()):
            z = self.names.fresh(x, avoid)
            avoid |= {z}
            scoped_a = {f: subst(t, Var(z), x, self.names) for f, t in scoped_a.items()}
            scoped_b = {f: subst(t, Var(z), y, self.names) for f, t in scoped_b.items()}
        return all(self.convertible(scoped_a[f], scoped_b[f]) for f in a.scoped_fields)


def defeq(
    plain: PlainCtx, a: Term, b: Term, semiring: Semiring, fuel: FuelLike = GRAD_FUEL
) -> bool:
    """
    Return True if a and b are convertible once plain's definitions are substituted.

    Pi and Sigma grades must be equal, not merely related by the order.

    """
    conversion = _Conversion(semiring, _fuel(fuel))
    return conversion.convertible(flatten_defs(a, plain), flatten_defs(b, plain))


@dataclasses.dataclass(frozen=True)
class DepJudgement:
    """Δ; Γ ⊢ a : A, where Δ may carry definitions."""

    plain: PlainCtx
    usage: UsageCtx
    subject: Term
    type: Term

    def __post_init__(self) -> None:
        if self.usage.erase() != self.plain:
            raise ContextError("Usage context does not erase to the plain context")


class DependentChecker:
    def __init__(
        self, semiring: Semiring, plain: PlainCtx = PlainCtx(), fuel: FuelLike = GRAD_FUEL
    ) -> None:
        self.semiring = semiring
        self.plain = plain
        self.fuel = _fuel(fuel)
        self.names = NameSupply()

    def _zero(self) -> GradeVector:
        return GradeVector.zeros(self.semiring, len(self.plain))

    def _under(
        self, name: str, type_: Term, *bodies: Term
    ) -> Tuple[DependentChecker, str, Tuple[Term, ...]]:
        """Return a checker with name bound, renaming it in bodies if it is already bound."""
        if self.plain.lookup(name) is not None:
            avoid = set(self.plain.names)
            for body in bodies:
                avoid |= all_names(body)
            fresh = self.names.fresh(name, avoid)
            bodies = tuple(subst(body, Var(fresh), name, self.names) for body in bodies)
            name = fresh
        inner = DependentChecker(self.semiring, self.plain.extend(name, type_), self.fuel)
        inner.names = self.names
        return inner, name, bodies

    @staticmethod
    def _split(usage: GradeVector, count: int) -> Tuple[GradeVector, Tuple[Grade, ...]]:
        n = len(usage) - count
        return usage.truncate(n), usage.entries[n:]

    def defeq(self, a: Term, b: Term) -> bool:
        return defeq(self.plain, a, b, self.semiring, self.fuel)

    def reduce(self, a: Term) -> Term:
        """Expose the head constructor of a type, unfolding definitions."""
        return whnf(flatten_defs(a, self.plain), self.fuel, self.semiring)

    def _bound_usage(self, name: str, used: Grade, declared: Grade, subject: Term) -> None:
        if not self.semiring.leq(used, declared):
            raise TypeCheckError(
                "declared-usage-insufficient",
                f"{name} is used {self.semiring.show(used)} times in {subject} "
                f"but declared {self.semiring.show(declared)}",
            )

    def _convert(self, subject: Term, actual: Term, expected: Term) -> None:
        if not self.defeq(actual, expected):
            flat_actual = flatten_defs(actual, self.plain)
            flat_expected = flatten_defs(expected, self.plain)
            logger.debug("Conversion failed: %s vs %s", flat_actual, flat_expected)
            raise TypeCheckError(
                "conversion-failure",
                f"{subject} has type {pretty(flat_actual, True, self.semiring)} but "
                f"{pretty(flat_expected, True, self.semiring)} was expected",
            )

    def _expect(self, subject: Term, type_: Term, former: type, what: str) -> Any:
        reduced = self.reduce(type_)
        if not isinstance(reduced, former):
            raise TypeCheckError("type-mismatch", f"{subject} has type {type_}, not {what}")
        return reduced

    def check_type(self, a: Term) -> None:
        """Raise TypeCheckError unless a : Type."""
        actual, _ = self.infer(a)
        if not isinstance(self.reduce(actual), TypeSort):
            raise TypeCheckError("not-a-type", f"{a} has type {actual}, not Type")

    def _motive_free(self, subject: Term, result: Term, *bound: str) -> None:
        mentioned = free_vars(result) & set(bound)
        if mentioned:
            raise TypeCheckError(
                "ill-formed-motive",
                f"the type {result} of {subject} mentions {', '.join(sorted(mentioned))}",
            )

    def _undefined_var(self, a: Term) -> Optional[str]:
        """Return the name of a if it is a context variable without definition."""
        if isinstance(a, Var):
            entry = self.plain.lookup(a.name)
            if entry is not None and entry.definition is None:
                return a.name
        return None

    def infer(self, a: Term) -> Tuple[Term, GradeVector]:  # noqa: C901
        """Return the type of a and its runtime usage over the plain context."""
        if isinstance(a, Var):
            i = self.plain.index(a.name)
            if i is None:
                raise TypeCheckError("unbound-variable", a.name)
            type_ = self.plain.entries[i].type
            if type_ is None:
                raise TypeCheckError("cannot-infer", f"{a.name} has no known type")
            return type_, GradeVector.single(self.semiring, len(self.plain), i, self.semiring.one)
        if isinstance(a, (TypeSort, Unit)):
            return TypeSort(), self._zero()
        if isinstance(a, (Pi, Sigma)):
            domain = a.domain if isinstance(a, Pi) else a.first
            codomain = a.codomain if isinstance(a, Pi) else a.second
            self.check_type(domain)
            inner, _, (codomain,) = self._under(a.binder, domain, codomain)
            inner.check_type(codomain)
            return TypeSort(), self._zero()
        if isinstance(a, (Arrow, Sum, Tensor)):
            for f in a.open_fields:
                self.check_type(getattr(a, f))
            return TypeSort(), self._zero()
        if isinstance(a, BoxType):
            self.check_type(a.contents)
            return TypeSort(), self._zero()
        if isinstance(a, UnitVal):
            return Unit(), self._zero()
        if isinstance(a, Lam):
            self.check_type(a.annotation)
            inner, x, (body,) = self._under(a.binder, a.annotation, a.body)
            body_type, usage = inner.infer(body)
            usage, (used,) = self._split(usage, 1)
            self._bound_usage(x, used, a.grade, a)
            return Pi(x, a.grade, a.annotation, body_type), usage
        if isinstance(a, App):
            fun_type, u_fun = self.infer(a.fun)
            pi = self._expect(a.fun, fun_type, Pi, "a function")
            u_arg = self.check(a.arg, pi.domain)
            return subst(pi.codomain, a.arg, pi.binder, self.names), u_fun + u_arg.scale(pi.grade)
        if isinstance(a, Pair):
            first, u1 = self.infer(a.first)
            second, u2 = self.infer(a.second)
            binder = _anonymous(self.names, free_vars(second))
            return Sigma(binder, self.semiring.one, first, second), u1 + u2
        if isinstance(a, (Inj1, Inj2)):
            raise TypeCheckError("cannot-infer", f"{a} needs a type annotation")
        if isinstance(a, Box):
            contents, u = self.infer(a.term)
            return Sigma("_", a.grade, contents, Unit()), u.scale(a.grade)
        if isinstance(a, (UnitElim, SigmaElim, LetBox, Case)):
            return self._eliminate(a, None)
        if isinstance(a, Ann):
            self.check_type(a.annotation)
            return a.annotation, self.check(a.term, a.annotation)
        raise TypeCheckError("cannot-infer", f"no rule for {a}")

    def check(self, a: Term, expected: Term) -> GradeVector:  # noqa: C901
        """Return the runtime usage of a checked against the expected type."""
        if isinstance(a, Lam):
            pi = self.reduce(expected)
            if isinstance(pi, Pi):
                if a.grade != pi.grade:
                    raise TypeCheckError(
                        "type-mismatch", f"{a} is graded {a.grade}, expected {expected}"
                    )
                self.check_type(a.annotation)
                self._convert(a, a.annotation, pi.domain)
                inner, x, (body,) = self._under(a.binder, a.annotation, a.body)
                codomain = subst(pi.codomain, Var(x), pi.binder, self.names)
                usage, (used,) = self._split(inner.check(body, codomain), 1)
                self._bound_usage(x, used, a.grade, a)
                return usage
        if isinstance(a, Pair):
            sigma = self.reduce(expected)
            if isinstance(sigma, Sigma):
                u1 = self.check(a.first, sigma.first)
                u2 = self.check(a.second, subst(sigma.second, a.first, sigma.binder, self.names))
                return u1.scale(sigma.grade) + u2
        if isinstance(a, (Inj1, Inj2)):
            sum_type = self._expect(a, expected, Sum, "a sum")
            return self.check(a.term, sum_type.left if isinstance(a, Inj1) else sum_type.right)
        if isinstance(a, Box):
            sigma = self.reduce(expected)
            if isinstance(sigma, Sigma) and self.defeq(sigma.second, Unit()):
                if a.grade != sigma.grade:
                    raise TypeCheckError(
                        "type-mismatch", f"{a} is graded {a.grade}, expected {expected}"
                    )
                return self.check(a.term, sigma.first).scale(a.grade)
        if isinstance(a, (UnitElim, SigmaElim, LetBox, Case)):
            return self._eliminate(a, expected)[1]
        actual, usage = self.infer(a)
        self._convert(a, actual, expected)
        return usage

    def _body(
        self, checker: DependentChecker, body: Term, expected: Optional[Term]
    ) -> Tuple[Term, GradeVector]:
        if expected is None:
            return checker.infer(body)
        return expected, checker.check(body, expected)

    def _eliminate(self, a: Term, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        if isinstance(a, UnitElim):
            return self._unit_elim(a, expected)
        if isinstance(a, SigmaElim):
            return self._sigma_elim(a, expected)
        if isinstance(a, LetBox):
            return self._let_box(a, expected)
        assert isinstance(a, Case)
        return self._case(a, expected)

    def _motive(self, scrutinee: Term, expected: Optional[Term], replacement: Term) -> Optional[Term]:
        """Return the expected type with the scrutinee variable replaced, in check mode."""
        if expected is None:
            return None
        var = self._undefined_var(scrutinee)
        if var is None:
            return expected
        return subst(expected, replacement, var, self.names)

    def _unit_elim(self, a: UnitElim, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        u_s = self.check(a.scrutinee, Unit())
        body_type, u_b = self._body(self, a.body, self._motive(a.scrutinee, expected, UnitVal()))
        return (expected or body_type), u_s + u_b

    def _sigma_elim(self, a: SigmaElim, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        scrutinee_type, u_s = self.infer(a.scrutinee)
        sigma = self._expect(a.scrutinee, scrutinee_type, Sigma, "a pair")
        inner, x, (body,) = self._under(a.binder1, sigma.first, a.body)
        second = subst(sigma.second, Var(x), sigma.binder, self.names)
        inner, y, (body,) = inner._under(a.binder2, second, body)
        motive = self._motive(a.scrutinee, expected, Pair(Var(x), Var(y)))
        body_type, u_b = self._body(inner, body, motive)
        if expected is None:
            self._motive_free(a, body_type, x, y)
        u_b, (used_x, used_y) = self._split(u_b, 2)
        self._bound_usage(x, used_x, sigma.grade, a)
        self._bound_usage(y, used_y, self.semiring.one, a)
        return (expected or body_type), u_s + u_b

    def _let_box(self, a: LetBox, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        scrutinee_type, u_s = self.infer(a.scrutinee)
        sigma = self.reduce(scrutinee_type)
        if not isinstance(sigma, Sigma) or not self.defeq(sigma.second, Unit()):
            raise TypeCheckError(
                "type-mismatch", f"{a.scrutinee} has type {scrutinee_type}, not a box"
            )
        inner, x, (body,) = self._under(a.binder, sigma.first, a.body)
        motive = self._motive(a.scrutinee, expected, Box(sigma.grade, Var(x)))
        body_type, u_b = self._body(inner, body, motive)
        if expected is None:
            self._motive_free(a, body_type, x)
        u_b, (used,) = self._split(u_b, 1)
        self._bound_usage(x, used, sigma.grade, a)
        return (expected or body_type), u_s + u_b

    def _case(self, a: Case, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        if not self.semiring.leq(self.semiring.one, a.grade):
            raise TypeCheckError(
                "case-annotation", f"case grade {self.semiring.show(a.grade)} is not at least 1"
            )
        scrutinee_type, u_s = self.infer(a.scrutinee)
        sum_type = self._expect(a.scrutinee, scrutinee_type, Sum, "a sum")
        avoid = set(self.plain.names) | all_names(a) | all_names(expected or Unit())
        z = self.names.fresh("z", avoid)
        if expected is None:
            branch_type, _ = self.infer(a.branch1)
            pi = self._expect(a.branch1, branch_type, Pi, "a function")
            self._motive_free(a, pi.codomain, pi.binder)
            result = pi.codomain
            left = right = result
        else:
            result = expected
            left = self._motive(a.scrutinee, expected, Inj1(Var(z))) or expected
            right = self._motive(a.scrutinee, expected, Inj2(Var(z))) or expected
        u1 = self.check(a.branch1, Pi(z, a.grade, sum_type.left, left))
        u2 = self.check(a.branch2, Pi(z, a.grade, sum_type.right, right))
        return result, u_s.scale(a.grade) + join_usage(u1, u2)


def infer_dep(
    plain: PlainCtx, a: Term, semiring: Semiring, fuel: FuelLike = GRAD_FUEL
) -> Tuple[Term, GradeVector]:
    type_, usage = DependentChecker(semiring, plain, fuel).infer(a)
    logger.debug("Inferred %s : %s with usage %s", a, type_, usage)
    return type_, usage


def check_dep(j: DepJudgement, fuel: FuelLike = GRAD_FUEL) -> GradeVector:
    """
    Check a judgement, returning the synthesized usage.

    The type must itself check at Type, and the synthesized usage must be
    below the declared grades, else TypeCheckError("declared-usage-insufficient").

    """
    checker = DependentChecker(j.usage.semiring, j.plain, fuel)
    checker.check_type(j.type)
    usage = checker.check(j.subject, j.type)
    declared = j.usage.grades()
    if not usage.leq(declared):
        raise TypeCheckError(
            "declared-usage-insufficient",
            f"{j.subject} uses {usage} but {declared} was declared",
        )
    return usage


def regularity_check(
    plain: PlainCtx, a: Term, semiring: Semiring, fuel: FuelLike = GRAD_FUEL
) -> Term:
    """Infer the type of a and check that the type itself has type Type."""
    checker = DependentChecker(semiring, plain, fuel)
    type_, _ = checker.infer(a)
    checker.check_type(type_)
    return type_
