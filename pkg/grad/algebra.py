"""
Partially-ordered semirings and the grade vectors / matrices built over them.

A grade is a plain hashable value - a string literal for the finite carriers
("0", "1", "w", "Aff", lattice element names) and a non-negative int for the
naturals. Semirings are immutable once built; every operation on vectors and
matrices goes through the semiring the vector was built with.

"""
from __future__ import annotations

import dataclasses
import functools
import itertools
import logging
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .exceptions import CarrierTooLarge, GradeError, SemiringConfigError
from .settings import GRAD_ENUMERATION_LIMIT

logger = logging.getLogger(__name__)

Grade = Union[int, str]


@dataclasses.dataclass(frozen=True)
class SemiringFlags:
    zero_unusable: bool
    one_linear: bool
    zerosumfree: bool
    entire: bool
    linear: bool
    has_lub: bool
    zero_minimal: bool = True
    one_minimal: bool = True

    def as_dict(self) -> Dict[str, bool]:
        return dataclasses.asdict(self)


class Semiring:
    """Interface shared by the finite semirings and the naturals."""

    name: str
    zero: Grade
    one: Grade

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"<{type(self).__name__} name='{self.name}'>"

    def contains(self, q: Grade) -> bool:
        raise NotImplementedError

    def add(self, q1: Grade, q2: Grade) -> Grade:
        raise NotImplementedError

    def mul(self, q1: Grade, q2: Grade) -> Grade:
        raise NotImplementedError

    def leq(self, q1: Grade, q2: Grade) -> bool:
        raise NotImplementedError

    def parse_grade(self, text: str) -> Grade:
        raise NotImplementedError

    def decrement(self, q: Grade, r: Grade) -> Optional[Grade]:
        raise NotImplementedError

    def residual(self, q: Grade, inflow: Grade, at_least: Grade) -> Optional[Grade]:
        raise NotImplementedError

    def lub(self, q1: Grade, q2: Grade) -> Optional[Grade]:
        raise NotImplementedError

    def is_usable(self, g: Grade) -> bool:
        raise NotImplementedError

    def classify(self) -> SemiringFlags:
        raise NotImplementedError

    def relevant_grades(self) -> Tuple[Grade, ...]:
        """Return sample grades q with 1 ≤ q (used by program generators)."""
        raise NotImplementedError

    def show(self, q: Grade) -> str:
        return str(q)

    def sum(self, grades: Iterable[Grade]) -> Grade:
        return functools.reduce(self.add, grades, self.zero)


def _closure(elements: Sequence[str], pairs: Iterable[Tuple[str, str]]) -> FrozenSet:
    """Return the reflexive-transitive closure of a relation on elements."""
    order = {(e, e) for e in elements} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(order), repeat=2):
            if b == c and (a, d) not in order:
                order.add((a, d))
                changed = True
    return frozenset(order)


class FiniteSemiring(Semiring):
    """
    A semiring over an explicitly enumerated carrier.

    The operations are tabulated at construction, so the functions passed in
    are only ever called once per pair. The element order given is the fixed
    enumeration order used to break ties (e.g. in `decrement`).

    """

    def __init__(
        self,
        name: str,
        elements: Sequence[str],
        add: Callable[[str, str], str],
        mul: Callable[[str, str], str],
        leq: Callable[[str, str], bool],
        zero: str,
        one: str,
        aliases: Optional[Mapping[str, str]] = None,
    ) -> None:
        self.name = name
        self.elements: Tuple[str, ...] = tuple(elements)
        self.zero = zero
        self.one = one
        pairs = list(itertools.product(self.elements, repeat=2))
        self._add: Dict[Tuple[str, str], str] = {(a, b): add(a, b) for a, b in pairs}
        self._mul: Dict[Tuple[str, str], str] = {(a, b): mul(a, b) for a, b in pairs}
        self._leq: FrozenSet[Tuple[str, str]] = frozenset(
            (a, b) for a, b in pairs if leq(a, b)
        )
        literals = {e: e for e in self.elements}
        literals.setdefault("0", zero)
        literals.setdefault("1", one)
        literals.update(aliases or {})
        self._literals: Dict[str, str] = literals
        self._flags: Optional[SemiringFlags] = (
            self._compute_flags()
            if len(self.elements) <= GRAD_ENUMERATION_LIMIT
            else None
        )

    def contains(self, q: Grade) -> bool:
        return q in self.elements

    def _pair(self, q1: Grade, q2: Grade) -> Tuple[str, str]:
        if q1 not in self.elements or q2 not in self.elements:
            raise GradeError(f"Grade {q1!r} or {q2!r} is not in semiring {self.name}")
        return (str(q1), str(q2))

    def add(self, q1: Grade, q2: Grade) -> Grade:
        return self._add[self._pair(q1, q2)]

    def mul(self, q1: Grade, q2: Grade) -> Grade:
        return self._mul[self._pair(q1, q2)]

    def leq(self, q1: Grade, q2: Grade) -> bool:
        return self._pair(q1, q2) in self._leq

    def parse_grade(self, text: str) -> Grade:
        try:
            return self._literals[text]
        except KeyError:
            raise GradeError(f"'{text}' is not a grade of semiring {self.name}")

    def _maximal(self, candidates: List[str]) -> List[str]:
        return [
            c
            for c in candidates
            if not any(d != c and self.leq(c, d) for d in candidates)
        ]

    def _minimal(self, candidates: List[str]) -> List[str]:
        return [
            c
            for c in candidates
            if not any(d != c and self.leq(d, c) for d in candidates)
        ]

    def decrement(self, q: Grade, r: Grade) -> Optional[Grade]:
        """Return a maximal q' with q' + r ≤ q, or None if there is none."""
        candidates = [c for c in self.elements if self.leq(self.add(c, r), q)]
        maximal = self._maximal(candidates)
        if not maximal:
            return None
        if len(maximal) > 1:
            logger.debug("decrement(%s, %s): choosing %s of %s", q, r, maximal[0], maximal)
        return maximal[0]

    def residual(self, q: Grade, inflow: Grade, at_least: Grade) -> Optional[Grade]:
        """Return a least c with at_least ≤ c and c + inflow = q, if any."""
        candidates = [
            c
            for c in self.elements
            if self.leq(at_least, c) and self.add(c, inflow) == q
        ]
        minimal = self._minimal(candidates)
        return minimal[0] if minimal else None

    def lub(self, q1: Grade, q2: Grade) -> Optional[Grade]:
        upper = [c for c in self.elements if self.leq(q1, c) and self.leq(q2, c)]
        least = [c for c in upper if all(self.leq(c, d) for d in upper)]
        return least[0] if least else None

    def is_usable(self, g: Grade) -> bool:
        """Return True if some q satisfies q + 1 ≤ g ("positive or more")."""
        return any(self.leq(self.add(q, self.one), g) for q in self.elements)

    def relevant_grades(self) -> Tuple[Grade, ...]:
        return tuple(q for q in self.elements if self.leq(self.one, q))

    def _enumerable(self) -> None:
        if len(self.elements) > GRAD_ENUMERATION_LIMIT:
            raise CarrierTooLarge(
                f"Semiring {self.name} has {len(self.elements)} elements "
                f"(limit {GRAD_ENUMERATION_LIMIT})"
            )

    def classify(self) -> SemiringFlags:
        self._enumerable()
        if self._flags is None:
            raise CarrierTooLarge(f"Semiring {self.name} was not enumerated")
        return self._flags

    def _compute_flags(self) -> SemiringFlags:
        elements, zero, one = self.elements, self.zero, self.one
        pairs = list(itertools.product(elements, repeat=2))
        return SemiringFlags(
            zero_unusable=not self.is_usable(zero),
            one_linear=not any(
                q != zero and self.leq(self.add(q, one), one) for q in elements
            ),
            zerosumfree=all(
                q1 == zero and q2 == zero
                for q1, q2 in pairs
                if self.add(q1, q2) == zero
            ),
            entire=all(
                q1 == zero or q2 == zero for q1, q2 in pairs if self.mul(q1, q2) == zero
            ),
            linear=all(
                (q1, q2) in ((one, zero), (zero, one))
                for q1, q2 in pairs
                if self.add(q1, q2) == one
            )
            and all(
                q1 == one and q2 == one for q1, q2 in pairs if self.mul(q1, q2) == one
            ),
            has_lub=all(self.lub(q1, q2) is not None for q1, q2 in pairs),
            zero_minimal=not any(q != zero and self.leq(q, zero) for q in elements),
            one_minimal=not any(q != one and self.leq(q, one) for q in elements),
        )

    def check_laws(self) -> List[str]:  # noqa: C901
        """Return a description of every violated semiring / order law."""
        self._enumerable()
        add, mul, leq = self.add, self.mul, self.leq
        zero, one = self.zero, self.one
        failures: List[str] = []
        for a in self.elements:
            if add(a, zero) != a or add(zero, a) != a:
                failures.append(f"{a} + 0 != {a}")
            if mul(a, one) != a or mul(one, a) != a:
                failures.append(f"{a} · 1 != {a}")
            if mul(a, zero) != zero or mul(zero, a) != zero:
                failures.append(f"0 does not annihilate {a}")
            if not leq(a, a):
                failures.append(f"≤ is not reflexive at {a}")
        for a, b in itertools.product(self.elements, repeat=2):
            if add(a, b) != add(b, a):
                failures.append(f"{a} + {b} is not commutative")
            if a != b and leq(a, b) and leq(b, a):
                failures.append(f"≤ is not antisymmetric at {a}, {b}")
        for a, b, c in itertools.product(self.elements, repeat=3):
            if add(add(a, b), c) != add(a, add(b, c)):
                failures.append(f"+ is not associative at {a}, {b}, {c}")
            if mul(mul(a, b), c) != mul(a, mul(b, c)):
                failures.append(f"· is not associative at {a}, {b}, {c}")
            if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)):
                failures.append(f"· does not left-distribute at {a}, {b}, {c}")
            if mul(add(a, b), c) != add(mul(a, c), mul(b, c)):
                failures.append(f"· does not right-distribute at {a}, {b}, {c}")
            if leq(a, b) and leq(b, c) and not leq(a, c):
                failures.append(f"≤ is not transitive at {a}, {b}, {c}")
            if leq(a, b) and not (
                leq(add(a, c), add(b, c))
                and leq(mul(c, a), mul(c, b))
                and leq(mul(a, c), mul(b, c))
            ):
                failures.append(f"≤ is not compatible at {a} ≤ {b} with {c}")
        return failures


class NaturalSemiring(Semiring):
    """Natural numbers with the exact (discrete) order."""

    name = "nat"
    zero = 0
    one = 1

    def contains(self, q: Grade) -> bool:
        return isinstance(q, int) and not isinstance(q, bool) and q >= 0

    def _check(self, *grades: Grade) -> None:
        for q in grades:
            if not self.contains(q):
                raise GradeError(f"Grade {q!r} is not a natural number")

    def add(self, q1: Grade, q2: Grade) -> Grade:
        self._check(q1, q2)
        return int(q1) + int(q2)

    def mul(self, q1: Grade, q2: Grade) -> Grade:
        self._check(q1, q2)
        return int(q1) * int(q2)

    def leq(self, q1: Grade, q2: Grade) -> bool:
        self._check(q1, q2)
        return q1 == q2

    def parse_grade(self, text: str) -> Grade:
        if not text.isdigit():
            raise GradeError(f"'{text}' is not a natural number")
        return int(text)

    def decrement(self, q: Grade, r: Grade) -> Optional[Grade]:
        self._check(q, r)
        return int(q) - int(r) if int(q) >= int(r) else None

    def residual(self, q: Grade, inflow: Grade, at_least: Grade) -> Optional[Grade]:
        self._check(q, inflow, at_least)
        c = int(q) - int(inflow)
        return c if c == at_least else None

    def lub(self, q1: Grade, q2: Grade) -> Optional[Grade]:
        # max is used to join case branches even though the order is discrete
        self._check(q1, q2)
        return max(int(q1), int(q2))

    def is_usable(self, g: Grade) -> bool:
        self._check(g)
        return int(g) >= 1

    def classify(self) -> SemiringFlags:
        return SemiringFlags(
            zero_unusable=True,
            one_linear=True,
            zerosumfree=True,
            entire=True,
            linear=True,
            has_lub=True,
        )

    def relevant_grades(self) -> Tuple[Grade, ...]:
        return (1, 2, 3)


def lattice_semiring(
    name: str,
    elements: Sequence[str],
    covers: Iterable[Tuple[str, str]],
    private: str,
    public: str,
) -> FiniteSemiring:
    """
    Build the semiring of a security lattice.

    Addition is join and multiplication is meet; 0 is the Private element and
    1 the Public one, which must be the bottom and top of the lattice. Raises
    SemiringConfigError if the relation is not a (distributive) lattice.

    """
    elements = tuple(elements)
    for element in (private, public):
        if element not in elements:
            raise SemiringConfigError(f"{element} is not an element of lattice {name}")
    order = _closure(elements, covers)

    def bound(a: str, b: str, upper: bool) -> str:
        if upper:
            bounds = [c for c in elements if (a, c) in order and (b, c) in order]
            best = [c for c in bounds if all((c, d) in order for d in bounds)]
        else:
            bounds = [c for c in elements if (c, a) in order and (c, b) in order]
            best = [c for c in bounds if all((d, c) in order for d in bounds)]
        if len(best) != 1:
            kind = "join" if upper else "meet"
            raise SemiringConfigError(f"{a} and {b} have no {kind} in lattice {name}")
        return best[0]

    if not all((private, e) in order for e in elements):
        raise SemiringConfigError(f"{private} is not the bottom of lattice {name}")
    if not all((e, public) in order for e in elements):
        raise SemiringConfigError(f"{public} is not the top of lattice {name}")
    semiring = FiniteSemiring(
        name,
        elements,
        add=lambda a, b: bound(a, b, upper=True),
        mul=lambda a, b: bound(a, b, upper=False),
        leq=lambda a, b: (a, b) in order,
        zero=private,
        one=public,
    )
    failures = semiring.check_laws()
    if failures:
        raise SemiringConfigError(f"Lattice {name} is not a semiring: {failures[0]}")
    return semiring


@functools.lru_cache(maxsize=None)
def trivial() -> FiniteSemiring:
    return FiniteSemiring(
        "trivial",
        ("0",),
        add=lambda a, b: "0",
        mul=lambda a, b: "0",
        leq=lambda a, b: True,
        zero="0",
        one="0",
    )


def _or(a: str, b: str) -> str:
    return "1" if "1" in (a, b) else "0"


def _and(a: str, b: str) -> str:
    return "1" if a == b == "1" else "0"


@functools.lru_cache(maxsize=None)
def boolean() -> FiniteSemiring:
    return FiniteSemiring(
        "boolean", ("0", "1"), _or, _and, lambda a, b: a == b, zero="0", one="1"
    )


@functools.lru_cache(maxsize=None)
def boolean_ordered() -> FiniteSemiring:
    return FiniteSemiring(
        "boolean-ordered",
        ("0", "1"),
        _or,
        _and,
        lambda a, b: a == b or (a, b) == ("0", "1"),
        zero="0",
        one="1",
    )


def _linearity_add(a: str, b: str) -> str:
    if a == "0":
        return b
    if b == "0":
        return a
    return "w"


def _linearity_mul(a: str, b: str) -> str:
    if "0" in (a, b):
        return "0"
    if a == "1":
        return b
    if b == "1":
        return a
    return "w"


@functools.lru_cache(maxsize=None)
def linearity() -> FiniteSemiring:
    """{0, 1, ω}: ω means "more than one", and 0, 1 are incomparable."""
    return FiniteSemiring(
        "linearity",
        ("0", "1", "w"),
        _linearity_add,
        _linearity_mul,
        lambda a, b: a == b or (a, b) in {("0", "w"), ("1", "w")},
        zero="0",
        one="1",
        aliases={"ω": "w"},
    )


# usage intervals: (at least, at most) with 2 standing for "two or more"
_INTERVALS: Dict[str, Tuple[int, int]] = {
    "0": (0, 0),
    "1": (1, 1),
    "Aff": (0, 1),
    "Rel": (1, 2),
    "w": (0, 2),
}
_FROM_INTERVAL = {v: k for k, v in _INTERVALS.items()}

# the ordering as printed; it coincides with interval inclusion
_FIVE_POINT_COVERS = (("0", "Aff"), ("1", "Aff"), ("1", "Rel"), ("Aff", "w"), ("Rel", "w"))


def _interval_add(a: str, b: str) -> str:
    (lo1, hi1), (lo2, hi2) = _INTERVALS[a], _INTERVALS[b]
    return _FROM_INTERVAL[(min(1, lo1 + lo2), min(2, hi1 + hi2))]


def _interval_mul(a: str, b: str) -> str:
    (lo1, hi1), (lo2, hi2) = _INTERVALS[a], _INTERVALS[b]
    return _FROM_INTERVAL[(lo1 * lo2, min(2, hi1 * hi2))]


@functools.lru_cache(maxsize=None)
def five_point() -> FiniteSemiring:
    """{0, 1, Aff, Rel, ω}: exact, affine and relevant usage in one semiring."""
    order = _closure(tuple(_INTERVALS), _FIVE_POINT_COVERS)
    return FiniteSemiring(
        "five-point",
        tuple(_INTERVALS),
        _interval_add,
        _interval_mul,
        lambda a, b: (a, b) in order,
        zero="0",
        one="1",
        aliases={"ω": "w"},
    )


@functools.lru_cache(maxsize=None)
def naturals() -> NaturalSemiring:
    return NaturalSemiring()


@functools.lru_cache(maxsize=None)
def security() -> FiniteSemiring:
    return lattice_semiring(
        "security",
        ("Private", "Public"),
        [("Private", "Public")],
        private="Private",
        public="Public",
    )


BUILTIN_SEMIRINGS: Dict[str, Callable[[], Semiring]] = {
    "trivial": trivial,
    "boolean": boolean,
    "boolean-ordered": boolean_ordered,
    "linearity": linearity,
    "five-point": five_point,
    "nat": naturals,
    "security": security,
}


def get_semiring(name: str) -> Semiring:
    """Resolve a built-in semiring name or a security-lattice file."""
    if name in BUILTIN_SEMIRINGS:
        return BUILTIN_SEMIRINGS[name]()
    from .lattice import find_lattice

    return find_lattice(name)


def grade_add(semiring: Semiring, q1: Grade, q2: Grade) -> Grade:
    return semiring.add(q1, q2)


def grade_mul(semiring: Semiring, q1: Grade, q2: Grade) -> Grade:
    return semiring.mul(q1, q2)


def grade_leq(semiring: Semiring, q1: Grade, q2: Grade) -> bool:
    return semiring.leq(q1, q2)


def decrement(semiring: Semiring, q: Grade, r: Grade) -> Optional[Grade]:
    return semiring.decrement(q, r)


def classify(semiring: Semiring) -> SemiringFlags:
    return semiring.classify()


@dataclasses.dataclass(frozen=True)
class GradeVector:
    semiring: Semiring
    entries: Tuple[Grade, ...] = ()

    def __post_init__(self) -> None:
        for q in self.entries:
            if not self.semiring.contains(q):
                raise GradeError(f"Grade {q!r} is not in semiring {self.semiring}")

    def __str__(self) -> str:
        return "(" + ", ".join(self.semiring.show(q) for q in self.entries) + ")"

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Grade]:
        return iter(self.entries)

    def __getitem__(self, index: int) -> Grade:
        return self.entries[index]

    def __add__(self, other: GradeVector) -> GradeVector:
        return vec_affine(self, self.semiring.one, other)

    @classmethod
    def zeros(cls, semiring: Semiring, length: int) -> GradeVector:
        return cls(semiring, (semiring.zero,) * length)

    @classmethod
    def single(cls, semiring: Semiring, length: int, index: int, q: Grade) -> GradeVector:
        """Return the vector with q at index and 0 elsewhere."""
        entries = [semiring.zero] * length
        entries[index] = q
        return cls(semiring, tuple(entries))

    def scale(self, q: Grade) -> GradeVector:
        return vec_affine(GradeVector.zeros(self.semiring, len(self)), q, self)

    def concat(self, other: GradeVector) -> GradeVector:
        return GradeVector(self.semiring, self.entries + other.entries)

    def extend(self, length: int) -> GradeVector:
        """Zero-pad on the right up to length."""
        return self.concat(GradeVector.zeros(self.semiring, length - len(self)))

    def truncate(self, length: int) -> GradeVector:
        return GradeVector(self.semiring, self.entries[:length])

    def leq(self, other: GradeVector) -> bool:
        """Return True if pointwise ≤ (vectors of unequal length are unrelated)."""
        if len(self) != len(other):
            return False
        return all(self.semiring.leq(a, b) for a, b in zip(self, other))


@dataclasses.dataclass(frozen=True)
class GradeMatrix:
    semiring: Semiring
    rows: Tuple[Tuple[Grade, ...], ...] = ()

    def __post_init__(self) -> None:
        if any(len(row) != len(self.rows) for row in self.rows):
            raise GradeError("Grade matrix must be square")

    def __str__(self) -> str:
        show = self.semiring.show
        return "[" + ", ".join("[" + ", ".join(show(q) for q in r) + "]" for r in self.rows) + "]"

    def __len__(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: GradeMatrix) -> GradeMatrix:
        return mat_mul(self, other)

    @classmethod
    def zero(cls, semiring: Semiring, size: int) -> GradeMatrix:
        return cls(semiring, tuple((semiring.zero,) * size for _ in range(size)))

    @classmethod
    def identity(cls, semiring: Semiring, size: int) -> GradeMatrix:
        return cls(
            semiring,
            tuple(
                tuple(semiring.one if i == j else semiring.zero for j in range(size))
                for i in range(size)
            ),
        )

    @property
    def is_strictly_lower_triangular(self) -> bool:
        return all(
            self.rows[i][j] == self.semiring.zero
            for i in range(len(self))
            for j in range(i, len(self))
        )


def vec_affine(v0: GradeVector, q: Grade, v1: GradeVector) -> GradeVector:
    """Return v0 + q·v1 computed pointwise."""
    if len(v0) != len(v1):
        raise GradeError(f"Vector length mismatch: {len(v0)} != {len(v1)}")
    s = v0.semiring
    return GradeVector(s, tuple(s.add(a, s.mul(q, b)) for a, b in zip(v0, v1)))


def vec_mat_mul(v: GradeVector, m: GradeMatrix) -> GradeVector:
    """Return the row vector v × m."""
    if len(v) != len(m):
        raise GradeError(f"Dimension mismatch: vector {len(v)}, matrix {len(m)}")
    s = v.semiring
    return GradeVector(
        s,
        tuple(
            s.sum(s.mul(v[i], m.rows[i][j]) for i in range(len(v)))
            for j in range(len(m))
        ),
    )


def mat_mul(m1: GradeMatrix, m2: GradeMatrix) -> GradeMatrix:
    if len(m1) != len(m2):
        raise GradeError(f"Dimension mismatch: {len(m1)} != {len(m2)}")
    s, n = m1.semiring, len(m1)
    return GradeMatrix(
        s,
        tuple(
            tuple(s.sum(s.mul(m1.rows[i][k], m2.rows[k][j]) for k in range(n)) for j in range(n))
            for i in range(n)
        ),
    )
