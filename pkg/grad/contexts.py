"""
Typing contexts.

A `PlainCtx` (Δ) is an ordered telescope of variables with their types and
optional definitions. A `UsageCtx` (Γ) is the same telescope with a grade on
every entry; erasing the grades gives back the plain context. Context algebra
(scaling, addition, sub-usage) is only defined between contexts with the same
erasure.

"""
from __future__ import annotations

import dataclasses
from typing import Iterator, Optional, Sequence, Tuple, Union

from .algebra import Grade, GradeVector, Semiring
from .exceptions import ContextError, TypeCheckError
from .syntax import Term, subst


@dataclasses.dataclass(frozen=True)
class PlainEntry:
    name: str
    type: Optional[Term]
    definition: Optional[Term] = None


@dataclasses.dataclass(frozen=True)
class PlainCtx:
    entries: Tuple[PlainEntry, ...] = ()

    def __post_init__(self) -> None:
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ContextError(f"Duplicate names in context: {', '.join(names)}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PlainEntry]:
        return iter(self.entries)

    def __str__(self) -> str:
        return ", ".join(_show_entry(e.name, None, e.type, e.definition) for e in self)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    def extend(
        self, name: str, type_: Optional[Term], definition: Optional[Term] = None
    ) -> PlainCtx:
        return PlainCtx(self.entries + (PlainEntry(name, type_, definition),))

    def index(self, name: str) -> Optional[int]:
        for i, e in enumerate(self.entries):
            if e.name == name:
                return i
        return None

    def lookup(self, name: str) -> Optional[PlainEntry]:
        i = self.index(name)
        return None if i is None else self.entries[i]

    def prefix(self, length: int) -> PlainCtx:
        return PlainCtx(self.entries[:length])


@dataclasses.dataclass(frozen=True)
class UsageEntry:
    name: str
    grade: Grade
    type: Optional[Term]
    definition: Optional[Term] = None


@dataclasses.dataclass(frozen=True)
class UsageCtx:
    semiring: Semiring
    entries: Tuple[UsageEntry, ...] = ()

    def __post_init__(self) -> None:
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ContextError(f"Duplicate names in context: {', '.join(names)}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[UsageEntry]:
        return iter(self.entries)

    def __str__(self) -> str:
        return ", ".join(
            _show_entry(e.name, self.semiring.show(e.grade), e.type, e.definition)
            for e in self
        )

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    @classmethod
    def from_plain(cls, plain: PlainCtx, grades: GradeVector) -> UsageCtx:
        if len(plain) != len(grades):
            raise ContextError(
                f"Context has {len(plain)} entries but {len(grades)} grades were given"
            )
        return cls(
            grades.semiring,
            tuple(
                UsageEntry(e.name, q, e.type, e.definition) for e, q in zip(plain, grades)
            ),
        )

    @classmethod
    def zero(cls, semiring: Semiring, plain: PlainCtx) -> UsageCtx:
        return cls.from_plain(plain, GradeVector.zeros(semiring, len(plain)))

    def erase(self) -> PlainCtx:
        """Return ⌊Γ⌋, the context without its grades."""
        return PlainCtx(tuple(PlainEntry(e.name, e.type, e.definition) for e in self))

    def grades(self) -> GradeVector:
        return GradeVector(self.semiring, tuple(e.grade for e in self))

    def with_grades(self, grades: GradeVector) -> UsageCtx:
        return UsageCtx.from_plain(self.erase(), grades)

    def extend(
        self, name: str, grade: Grade, type_: Optional[Term], definition: Optional[Term] = None
    ) -> UsageCtx:
        return UsageCtx(self.semiring, self.entries + (UsageEntry(name, grade, type_, definition),))

    def concat(self, other: UsageCtx) -> UsageCtx:
        return UsageCtx(self.semiring, self.entries + other.entries)

    def prefix(self, length: int) -> UsageCtx:
        return UsageCtx(self.semiring, self.entries[:length])

    def lookup(self, name: str) -> Optional[UsageEntry]:
        for e in self.entries:
            if e.name == name:
                return e
        return None


def _show_entry(
    name: str, grade: Optional[str], type_: Optional[Term], definition: Optional[Term]
) -> str:
    text = name
    if definition is not None:
        text += f" = {definition}"
    text += f" :{grade}" if grade is not None else " :"
    return f"{text} {type_}" if type_ is not None else f"{text} ?"


def ctx_scale(q: Grade, g: UsageCtx) -> UsageCtx:
    """Return q·Γ."""
    return g.with_grades(g.grades().scale(q))


def ctx_add(g1: UsageCtx, g2: UsageCtx) -> UsageCtx:
    """Return Γ1 + Γ2; the contexts must have the same erasure."""
    if g1.erase() != g2.erase():
        raise ContextError(f"Cannot add contexts with different erasures: {g1} and {g2}")
    return g1.with_grades(g1.grades() + g2.grades())


def subusage(g1: UsageCtx, g2: UsageCtx) -> bool:
    """Return True if Γ1 ≤ Γ2: the same erasure and pointwise ≤."""
    return g1.erase() == g2.erase() and g1.grades().leq(g2.grades())


def grades_of(g: UsageCtx) -> GradeVector:
    return g.grades()


def flatten_defs(a: Term, d: Union[PlainCtx, Sequence[PlainEntry]]) -> Term:
    """Substitute every definition of d into a, last definition first."""
    for entry in reversed(tuple(d)):
        if entry.definition is not None:
            a = subst(a, entry.definition, entry.name)
    return a


def join_usage(u1: GradeVector, u2: GradeVector) -> GradeVector:
    """
    Join the usage of two case branches.

    Equal vectors join to themselves; otherwise the pointwise least upper
    bound is taken when the semiring has one. Raises TypeCheckError
    ("branch-join") when neither applies.

    """
    if u1 == u2:
        return u1
    s = u1.semiring
    if s.classify().has_lub:
        joined = [s.lub(a, b) for a, b in zip(u1, u2)]
        if all(q is not None for q in joined):
            return GradeVector(s, tuple(q for q in joined if q is not None))
    raise TypeCheckError("branch-join", f"cannot join branch usages {u1} and {u2}")
