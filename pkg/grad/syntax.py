"""
Terms and types share one syntax tree.

Every node is a frozen dataclass. The binding structure of a node is declared
on its class: `binders` names the fields holding bound names, `open_fields` the
sub-terms outside their scope and `scoped_fields` those inside it. Fields that
are none of these (grades) are plain data. Free variables, substitution and
alpha-equivalence are written once against that description.

"""
from __future__ import annotations

import dataclasses
from typing import (
    AbstractSet,
    ClassVar,
    Dict,
    FrozenSet,
    Iterable,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from .algebra import Grade


@dataclasses.dataclass
class NameSupply:
    """
    Caller-owned fresh-name counter.

    Fresh names are the base name's root with a `%k` suffix, where k comes
    from the counter; a name in the `avoid` set is never returned.

    """

    counter: int = 0

    def fresh(self, base: str, avoid: AbstractSet[str] = frozenset()) -> str:
        root = base.split("%", 1)[0] or "x"
        while True:
            self.counter += 1
            name = f"{root}%{self.counter}"
            if name not in avoid:
                return name


@dataclasses.dataclass(frozen=True)
class Term:
    binders: ClassVar[Tuple[str, ...]] = ()
    open_fields: ClassVar[Tuple[str, ...]] = ()
    scoped_fields: ClassVar[Tuple[str, ...]] = ()

    def __str__(self) -> str:
        from .printer import pretty

        return pretty(self)

    def bound_names(self) -> Tuple[str, ...]:
        return tuple(getattr(self, b) for b in self.binders)

    def data(self) -> Tuple:
        """Return the non-term, non-binder fields (grades)."""
        structural = set(self.binders + self.open_fields + self.scoped_fields)
        return tuple(
            getattr(self, f.name)
            for f in dataclasses.fields(self)
            if f.name not in structural
        )


@dataclasses.dataclass(frozen=True)
class TypeSort(Term):
    pass


@dataclasses.dataclass(frozen=True)
class Var(Term):
    name: str


@dataclasses.dataclass(frozen=True)
class Unit(Term):
    pass


@dataclasses.dataclass(frozen=True)
class UnitVal(Term):
    pass


@dataclasses.dataclass(frozen=True)
class UnitElim(Term):
    scrutinee: Term
    body: Term
    open_fields: ClassVar = ("scrutinee", "body")


@dataclasses.dataclass(frozen=True)
class Pi(Term):
    binder: str
    grade: Grade
    domain: Term
    codomain: Term
    binders: ClassVar = ("binder",)
    open_fields: ClassVar = ("domain",)
    scoped_fields: ClassVar = ("codomain",)


@dataclasses.dataclass(frozen=True)
class Lam(Term):
    binder: str
    grade: Grade
    annotation: Term
    body: Term
    binders: ClassVar = ("binder",)
    open_fields: ClassVar = ("annotation",)
    scoped_fields: ClassVar = ("body",)


@dataclasses.dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term
    open_fields: ClassVar = ("fun", "arg")


@dataclasses.dataclass(frozen=True)
class Sigma(Term):
    binder: str
    grade: Grade
    first: Term
    second: Term
    binders: ClassVar = ("binder",)
    open_fields: ClassVar = ("first",)
    scoped_fields: ClassVar = ("second",)


@dataclasses.dataclass(frozen=True)
class Pair(Term):
    first: Term
    second: Term
    open_fields: ClassVar = ("first", "second")


@dataclasses.dataclass(frozen=True)
class SigmaElim(Term):
    binder1: str
    binder2: str
    scrutinee: Term
    body: Term
    binders: ClassVar = ("binder1", "binder2")
    open_fields: ClassVar = ("scrutinee",)
    scoped_fields: ClassVar = ("body",)


@dataclasses.dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term
    open_fields: ClassVar = ("left", "right")


@dataclasses.dataclass(frozen=True)
class Inj1(Term):
    term: Term
    open_fields: ClassVar = ("term",)


@dataclasses.dataclass(frozen=True)
class Inj2(Term):
    term: Term
    open_fields: ClassVar = ("term",)


@dataclasses.dataclass(frozen=True)
class Case(Term):
    grade: Grade
    scrutinee: Term
    branch1: Term
    branch2: Term
    open_fields: ClassVar = ("scrutinee", "branch1", "branch2")


@dataclasses.dataclass(frozen=True)
class Box(Term):
    grade: Grade
    term: Term
    open_fields: ClassVar = ("term",)


@dataclasses.dataclass(frozen=True)
class BoxType(Term):
    grade: Grade
    contents: Term
    open_fields: ClassVar = ("contents",)


@dataclasses.dataclass(frozen=True)
class LetBox(Term):
    binder: str
    scrutinee: Term
    body: Term
    binders: ClassVar = ("binder",)
    open_fields: ClassVar = ("scrutinee",)
    scoped_fields: ClassVar = ("body",)


@dataclasses.dataclass(frozen=True)
class Arrow(Term):
    grade: Grade
    domain: Term
    codomain: Term
    open_fields: ClassVar = ("domain", "codomain")


@dataclasses.dataclass(frozen=True)
class Tensor(Term):
    left: Term
    right: Term
    open_fields: ClassVar = ("left", "right")


@dataclasses.dataclass(frozen=True)
class Ann(Term):
    term: Term
    annotation: Term
    open_fields: ClassVar = ("term", "annotation")


# type formers; closed ones are values in the dependent system
TYPE_FORMERS = (TypeSort, Unit, Pi, Sigma, Sum, Arrow, Tensor, BoxType)

# constructors the simply-typed system has no rules for
DEPENDENT_ONLY = (TypeSort, Pi, Sigma)


def free_vars(a: Term) -> FrozenSet[str]:
    if isinstance(a, Var):
        return frozenset((a.name,))
    result: Set[str] = set()
    for f in a.open_fields:
        result |= free_vars(getattr(a, f))
    bound = set(a.bound_names())
    for f in a.scoped_fields:
        result |= free_vars(getattr(a, f)) - bound
    return frozenset(result)


def all_names(a: Term) -> FrozenSet[str]:
    """Return every variable name occurring in a, free or bound."""
    if isinstance(a, Var):
        return frozenset((a.name,))
    result: Set[str] = set(a.bound_names())
    for f in a.open_fields + a.scoped_fields:
        result |= all_names(getattr(a, f))
    return frozenset(result)


def subst(body: Term, repl: Term, var: str, names: Optional[NameSupply] = None) -> Term:
    """Return body{repl/var}, renaming binders that would capture repl."""
    return _subst(body, repl, var, free_vars(repl), names or NameSupply())


def _subst(
    t: Term, repl: Term, var: str, repl_fv: FrozenSet[str], names: NameSupply
) -> Term:
    if isinstance(t, Var):
        return repl if t.name == var else t
    if var not in free_vars(t):
        return t
    changes: Dict[str, object] = {
        f: _subst(getattr(t, f), repl, var, repl_fv, names) for f in t.open_fields
    }
    bound = list(t.bound_names())
    if var in bound:
        return dataclasses.replace(t, **changes)
    scoped = {f: getattr(t, f) for f in t.scoped_fields}
    for field_name in t.binders:
        old = getattr(t, field_name)
        if old not in repl_fv:
            continue
        avoid: Set[str] = set(repl_fv) | {var} | set(bound)
        for child in scoped.values():
            avoid |= all_names(child)
        new = names.fresh(old, avoid)
        scoped = {
            f: _subst(child, Var(new), old, frozenset((new,)), names)
            for f, child in scoped.items()
        }
        changes[field_name] = new
        bound = [new if b == old else b for b in bound]
    for f, child in scoped.items():
        changes[f] = _subst(child, repl, var, repl_fv, names)
    return dataclasses.replace(t, **changes)


def subst_many(
    body: Term, pairs: Sequence[Tuple[str, Term]], names: Optional[NameSupply] = None
) -> Term:
    """Substitute several variables simultaneously."""
    names = names or NameSupply()
    avoid: Set[str] = set(all_names(body))
    for var, repl in pairs:
        avoid |= free_vars(repl) | {var}
    placeholders = []
    for var, repl in pairs:
        tmp = names.fresh(var, avoid)
        avoid.add(tmp)
        body = subst(body, Var(tmp), var, names)
        placeholders.append((tmp, repl))
    for tmp, repl in placeholders:
        body = subst(body, repl, tmp, names)
    return body


def rename_free(a: Term, renaming: Dict[str, str]) -> Term:
    """Rename free variables (the targets must not occur in a)."""
    return subst_many(a, [(old, Var(new)) for old, new in renaming.items() if old != new])


def alpha_eq(a: Term, b: Term) -> bool:
    """Return True if a and b differ only in the names of bound variables."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Term, b: Term, env_a: Dict[str, int], env_b: Dict[str, int], depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var) and isinstance(b, Var):
        level_a, level_b = env_a.get(a.name), env_b.get(b.name)
        if level_a is None and level_b is None:
            return a.name == b.name
        return level_a == level_b
    if a.data() != b.data():
        return False
    for f in a.open_fields:
        if not _alpha(getattr(a, f), getattr(b, f), env_a, env_b, depth):
            return False
    if not a.scoped_fields:
        return True
    inner_a, inner_b = dict(env_a), dict(env_b)
    for offset, (x, y) in enumerate(zip(a.bound_names(), b.bound_names())):
        inner_a[x] = depth + offset
        inner_b[y] = depth + offset
    inner_depth = depth + len(a.binders)
    return all(
        _alpha(getattr(a, f), getattr(b, f), inner_a, inner_b, inner_depth)
        for f in a.scoped_fields
    )


def alpha_eq_modulo(a: Term, b: Term, renaming: Sequence[Tuple[str, str]]) -> bool:
    """Return True if a and b are alpha-equal once each free x in a is paired with y in b."""
    env_a = {x: -(k + 1) for k, (x, _) in enumerate(renaming)}
    env_b = {y: -(k + 1) for k, (_, y) in enumerate(renaming)}
    return _alpha(a, b, env_a, env_b, 0)


def unannotate(a: Term) -> Term:
    """Strip any type annotations wrapped around a."""
    while isinstance(a, Ann):
        a = a.term
    return a


def subterms(a: Term) -> Iterable[Term]:
    """Yield a and every sub-term, outermost first."""
    yield a
    for f in a.open_fields + a.scoped_fields:
        yield from subterms(getattr(a, f))
