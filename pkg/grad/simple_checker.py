"""
Usage checking for the simply-typed graded calculus.

Checking is bidirectional and grades are an output: `infer` returns the type
of a term together with the least usage vector over the plain context that the
rules can derive. Declared grades (lambda binders, pattern variables, case
annotations) are compared against the synthesized usage with the semiring
order.

Type variables that the context does not bind are opaque base types. Type
equality is syntactic, grades included.

"""
from __future__ import annotations

import dataclasses
import logging
from typing import Optional, Tuple

from .algebra import Grade, GradeVector, Semiring
from .contexts import PlainCtx, UsageCtx, join_usage
from .exceptions import ContextError, TypeCheckError
from .syntax import (
    DEPENDENT_ONLY,
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
    SigmaElim,
    Sum,
    Tensor,
    Term,
    Unit,
    UnitElim,
    UnitVal,
    Var,
    all_names,
    alpha_eq,
    subst,
)

logger = logging.getLogger(__name__)

SIMPLE_TYPES = (Unit, Arrow, Tensor, Sum, BoxType)


@dataclasses.dataclass(frozen=True)
class SimpleJudgement:
    """Δ; Γ ⊢ a : A, with ⌊Γ⌋ = Δ."""

    plain: PlainCtx
    usage: UsageCtx
    subject: Term
    type: Term

    def __post_init__(self) -> None:
        if self.usage.erase() != self.plain:
            raise ContextError("Usage context does not erase to the plain context")


class SimpleChecker:
    def __init__(self, semiring: Semiring, plain: PlainCtx = PlainCtx()) -> None:
        self.semiring = semiring
        self.plain = plain
        self.names = NameSupply()

    def _zero(self) -> GradeVector:
        return GradeVector.zeros(self.semiring, len(self.plain))

    def _leq(self, q1: Grade, q2: Grade) -> bool:
        return self.semiring.leq(q1, q2)

    def _under(self, name: str, type_: Term, body: Term) -> Tuple[SimpleChecker, str, Term]:
        """Return a checker with name bound, renaming it if it is already bound."""
        if self.plain.lookup(name) is not None:
            fresh = self.names.fresh(name, set(self.plain.names) | all_names(body))
            body = subst(body, Var(fresh), name, self.names)
            name = fresh
        inner = SimpleChecker(self.semiring, self.plain.extend(name, type_))
        inner.names = self.names
        return inner, name, body

    def _split(self, usage: GradeVector, count: int) -> Tuple[GradeVector, Tuple[Grade, ...]]:
        n = len(usage) - count
        return usage.truncate(n), usage.entries[n:]

    def check_type(self, a: Term) -> None:
        """Raise TypeCheckError unless a is a simple type."""
        if isinstance(a, Var):
            if self.plain.lookup(a.name) is not None:
                raise TypeCheckError("not-a-type", f"{a} is a term variable")
            return
        if isinstance(a, DEPENDENT_ONLY):
            raise TypeCheckError("non-simple", f"{a} belongs to the dependent system")
        if not isinstance(a, SIMPLE_TYPES):
            raise TypeCheckError("not-a-type", f"{a} is not a type")
        for f in a.open_fields:
            self.check_type(getattr(a, f))

    def _same_type(self, a: Term, b: Term, subject: Term) -> None:
        if not alpha_eq(a, b):
            raise TypeCheckError("type-mismatch", f"{subject} has type {a}, expected {b}")

    def _bound_usage(self, name: str, used: Grade, declared: Grade, subject: Term) -> None:
        if not self._leq(used, declared):
            raise TypeCheckError(
                "declared-usage-insufficient",
                f"{name} is used {self.semiring.show(used)} times in {subject} "
                f"but declared {self.semiring.show(declared)}",
            )

    def infer(self, a: Term) -> Tuple[Term, GradeVector]:  # noqa: C901
        """Return the type of a and its usage over the plain context."""
        if isinstance(a, Var):
            i = self.plain.index(a.name)
            if i is None:
                raise TypeCheckError("unbound-variable", a.name)
            type_ = self.plain.entries[i].type
            if type_ is None:
                raise TypeCheckError("cannot-infer", f"{a.name} has no known type")
            return type_, GradeVector.single(self.semiring, len(self.plain), i, self.semiring.one)
        if isinstance(a, DEPENDENT_ONLY):
            raise TypeCheckError("non-simple", f"{a} belongs to the dependent system")
        if isinstance(a, UnitVal):
            return Unit(), self._zero()
        if isinstance(a, Lam):
            self.check_type(a.annotation)
            inner, x, body = self._under(a.binder, a.annotation, a.body)
            body_type, usage = inner.infer(body)
            usage, (used,) = self._split(usage, 1)
            self._bound_usage(x, used, a.grade, a)
            return Arrow(a.grade, a.annotation, body_type), usage
        if isinstance(a, App):
            fun_type, u_fun = self.infer(a.fun)
            if not isinstance(fun_type, Arrow):
                raise TypeCheckError("type-mismatch", f"{a.fun} has type {fun_type}, not a function")
            u_arg = self.check(a.arg, fun_type.domain)
            return fun_type.codomain, u_fun + u_arg.scale(fun_type.grade)
        if isinstance(a, UnitElim):
            u_s = self.check(a.scrutinee, Unit())
            body_type, u_b = self.infer(a.body)
            return body_type, u_s + u_b
        if isinstance(a, Pair):
            first, u1 = self.infer(a.first)
            second, u2 = self.infer(a.second)
            return Tensor(first, second), u1 + u2
        if isinstance(a, SigmaElim):
            return self._sigma_elim(a, None)
        if isinstance(a, (Inj1, Inj2)):
            raise TypeCheckError("cannot-infer", f"{a} needs a type annotation")
        if isinstance(a, Case):
            return self._case(a, None)
        if isinstance(a, Box):
            contents, u = self.infer(a.term)
            return BoxType(a.grade, contents), u.scale(a.grade)
        if isinstance(a, LetBox):
            return self._let_box(a, None)
        if isinstance(a, Ann):
            self.check_type(a.annotation)
            return a.annotation, self.check(a.term, a.annotation)
        raise TypeCheckError("not-a-type", f"{a} is a type, not a term")

    def check(self, a: Term, expected: Term) -> GradeVector:  # noqa: C901
        """Return the usage of a checked against the expected type."""
        if isinstance(a, Lam) and isinstance(expected, Arrow):
            if a.grade != expected.grade:
                raise TypeCheckError(
                    "type-mismatch", f"{a} is graded {a.grade}, expected {expected}"
                )
            self._same_type(a.annotation, expected.domain, a)
            inner, x, body = self._under(a.binder, a.annotation, a.body)
            usage, (used,) = self._split(inner.check(body, expected.codomain), 1)
            self._bound_usage(x, used, a.grade, a)
            return usage
        if isinstance(a, Pair) and isinstance(expected, Tensor):
            return self.check(a.first, expected.left) + self.check(a.second, expected.right)
        if isinstance(a, (Inj1, Inj2)):
            if not isinstance(expected, Sum):
                raise TypeCheckError("type-mismatch", f"{a} cannot have type {expected}")
            side = expected.left if isinstance(a, Inj1) else expected.right
            return self.check(a.term, side)
        if isinstance(a, Box) and isinstance(expected, BoxType):
            if a.grade != expected.grade:
                raise TypeCheckError(
                    "type-mismatch", f"{a} is graded {a.grade}, expected {expected}"
                )
            return self.check(a.term, expected.contents).scale(a.grade)
        if isinstance(a, UnitElim):
            return self.check(a.scrutinee, Unit()) + self.check(a.body, expected)
        if isinstance(a, SigmaElim):
            return self._sigma_elim(a, expected)[1]
        if isinstance(a, LetBox):
            return self._let_box(a, expected)[1]
        if isinstance(a, Case):
            return self._case(a, expected)[1]
        actual, usage = self.infer(a)
        self._same_type(actual, expected, a)
        return usage

    def _body(self, checker: SimpleChecker, body: Term, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        if expected is None:
            return checker.infer(body)
        return expected, checker.check(body, expected)

    def _sigma_elim(self, a: SigmaElim, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        scrutinee_type, u_s = self.infer(a.scrutinee)
        if not isinstance(scrutinee_type, Tensor):
            raise TypeCheckError(
                "type-mismatch", f"{a.scrutinee} has type {scrutinee_type}, not a tensor"
            )
        inner, x, body = self._under(a.binder1, scrutinee_type.left, a.body)
        inner, y, body = inner._under(a.binder2, scrutinee_type.right, body)
        body_type, u_b = self._body(inner, body, expected)
        u_b, (used_x, used_y) = self._split(u_b, 2)
        self._bound_usage(x, used_x, self.semiring.one, a)
        self._bound_usage(y, used_y, self.semiring.one, a)
        return body_type, u_s + u_b

    def _let_box(self, a: LetBox, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        scrutinee_type, u_s = self.infer(a.scrutinee)
        if not isinstance(scrutinee_type, BoxType):
            raise TypeCheckError(
                "type-mismatch", f"{a.scrutinee} has type {scrutinee_type}, not a box"
            )
        inner, x, body = self._under(a.binder, scrutinee_type.contents, a.body)
        body_type, u_b = self._body(inner, body, expected)
        u_b, (used,) = self._split(u_b, 1)
        self._bound_usage(x, used, scrutinee_type.grade, a)
        return body_type, u_s + u_b

    def _case(self, a: Case, expected: Optional[Term]) -> Tuple[Term, GradeVector]:
        if not self._leq(self.semiring.one, a.grade):
            raise TypeCheckError(
                "case-annotation", f"case grade {self.semiring.show(a.grade)} is not at least 1"
            )
        scrutinee_type, u_s = self.infer(a.scrutinee)
        if not isinstance(scrutinee_type, Sum):
            raise TypeCheckError(
                "type-mismatch", f"{a.scrutinee} has type {scrutinee_type}, not a sum"
            )
        if expected is None:
            type1, u1 = self.infer(a.branch1)
            if not isinstance(type1, Arrow):
                raise TypeCheckError("type-mismatch", f"{a.branch1} has type {type1}, not a function")
            result = type1.codomain
        else:
            result = expected
        u1 = self.check(a.branch1, Arrow(a.grade, scrutinee_type.left, result))
        u2 = self.check(a.branch2, Arrow(a.grade, scrutinee_type.right, result))
        return result, u_s.scale(a.grade) + join_usage(u1, u2)


def infer_simple(plain: PlainCtx, a: Term, semiring: Semiring) -> Tuple[Term, GradeVector]:
    type_, usage = SimpleChecker(semiring, plain).infer(a)
    logger.debug("Inferred %s : %s with usage %s", a, type_, usage)
    return type_, usage


def check_simple(j: SimpleJudgement) -> GradeVector:
    """
    Check a judgement, returning the synthesized usage.

    The synthesized usage must be below the declared grades of `j.usage`;
    otherwise TypeCheckError("declared-usage-insufficient") is raised.

    """
    checker = SimpleChecker(j.usage.semiring, j.plain)
    checker.check_type(j.type)
    usage = checker.check(j.subject, j.type)
    declared = j.usage.grades()
    if not usage.leq(declared):
        raise TypeCheckError(
            "declared-usage-insufficient",
            f"{j.subject} uses {usage} but {declared} was declared",
        )
    return usage
