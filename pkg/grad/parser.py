"""
Parse `.grad` source text.

A program is a sequence of items::

    -- comments run to the end of the line
    def x : Unit = unit
    def y ^2 : Unit * Unit = (x, x)
    main : Unit = let (a, b) = y in let unit = a in b

Grade literals are read by the active semiring, so the same text may be valid
under one semiring and rejected under another.

"""
from __future__ import annotations

import dataclasses
import functools
import logging
from typing import Any, Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from .algebra import Grade, Semiring
from .exceptions import GradeError, ParseError
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
)

logger = logging.getLogger(__name__)

GRAMMAR = r"""
program: item*

item: "def" NAME [allowance] ":" term "=" term  -> definition
    | "main" [":" term] "=" term                -> main_item

allowance: "^" grade

?term: "\\" NAME ":" grade arrow "." term                 -> lam
     | "Pi" NAME ":" grade arrow "." term                 -> pi
     | "Sigma" NAME ":" grade arrow "." term              -> sigma
     | "let" "unit" "=" term "in" term                    -> unit_elim
     | "let" "box" NAME "=" term "in" term                -> let_box
     | "let" "(" NAME "," NAME ")" "=" term "in" term     -> sigma_elim
     | "case" grade term "of" term ";" term               -> case
     | arrow

?arrow: sum "-" grade ">" arrow  -> graded_arrow
      | sum "->" arrow           -> plain_arrow
      | sum

?sum: tensor "+" sum  -> sum
    | tensor

?tensor: app "*" tensor  -> tensor
       | app

?app: app atom  -> app
    | prefix

?prefix: "inj1" atom       -> inj1
       | "inj2" atom       -> inj2
       | "box" grade atom  -> box
       | "Box" grade atom  -> box_type
       | atom

?atom: NAME                        -> var
     | "Type"                      -> type_sort
     | "Unit"                      -> unit_type
     | "unit"                      -> unit_value
     | "(" term ")"
     | "(" term "," term ")"       -> pair
     | "(" term ":" term ")"       -> ann

grade: NAME | NUMBER

NAME: /[A-Za-z_][A-Za-z0-9_']*(%[0-9]+)?/
NUMBER: /[0-9]+/
COMMENT.2: /--[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""


@dataclasses.dataclass(frozen=True)
class Definition:
    name: str
    type: Term
    term: Term
    # heap allowance fixed in the source (`def x ^q : A = a`), if any
    allowance: Optional[Grade] = None


@dataclasses.dataclass(frozen=True)
class Program:
    semiring: Semiring
    definitions: Tuple[Definition, ...] = ()
    main: Optional[Term] = None
    main_type: Optional[Term] = None

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(d.name for d in self.definitions)

    def definition(self, name: str) -> Definition:
        for d in self.definitions:
            if d.name == name:
                return d
        raise KeyError(name)


@functools.lru_cache(maxsize=None)
def _parser() -> Lark:
    return Lark(GRAMMAR, start=["program", "term"], parser="lalr", maybe_placeholders=True)


class _ToTerm(Transformer):
    def __init__(self, semiring: Semiring) -> None:
        super().__init__()
        self.semiring = semiring

    def grade(self, args: List[Token]) -> Grade:
        token = args[0]
        try:
            return self.semiring.parse_grade(str(token))
        except GradeError as ex:
            raise ParseError(str(ex), token.line, token.column)

    def allowance(self, args: List[Any]) -> Grade:
        return args[0]

    def var(self, args: List[Token]) -> Term:
        return Var(str(args[0]))

    def type_sort(self, args: List[Any]) -> Term:
        return TypeSort()

    def unit_type(self, args: List[Any]) -> Term:
        return Unit()

    def unit_value(self, args: List[Any]) -> Term:
        return UnitVal()

    def lam(self, args: List[Any]) -> Term:
        binder, q, annotation, body = args
        return Lam(str(binder), q, annotation, body)

    def pi(self, args: List[Any]) -> Term:
        binder, q, domain, codomain = args
        return Pi(str(binder), q, domain, codomain)

    def sigma(self, args: List[Any]) -> Term:
        binder, q, first, second = args
        return Sigma(str(binder), q, first, second)

    def unit_elim(self, args: List[Any]) -> Term:
        return UnitElim(*args)

    def let_box(self, args: List[Any]) -> Term:
        binder, scrutinee, body = args
        return LetBox(str(binder), scrutinee, body)

    def sigma_elim(self, args: List[Any]) -> Term:
        x, y, scrutinee, body = args
        if str(x) == str(y):
            raise ParseError(f"Pattern binds '{x}' twice", y.line, y.column)
        return SigmaElim(str(x), str(y), scrutinee, body)

    def case(self, args: List[Any]) -> Term:
        return Case(*args)

    def graded_arrow(self, args: List[Any]) -> Term:
        domain, q, codomain = args
        return Arrow(q, domain, codomain)

    def plain_arrow(self, args: List[Any]) -> Term:
        domain, codomain = args
        return Arrow(self.semiring.one, domain, codomain)

    def sum(self, args: List[Any]) -> Term:
        return Sum(*args)

    def tensor(self, args: List[Any]) -> Term:
        return Tensor(*args)

    def app(self, args: List[Any]) -> Term:
        return App(*args)

    def inj1(self, args: List[Any]) -> Term:
        return Inj1(args[0])

    def inj2(self, args: List[Any]) -> Term:
        return Inj2(args[0])

    def box(self, args: List[Any]) -> Term:
        return Box(*args)

    def box_type(self, args: List[Any]) -> Term:
        return BoxType(*args)

    def pair(self, args: List[Any]) -> Term:
        return Pair(*args)

    def ann(self, args: List[Any]) -> Term:
        return Ann(*args)

    def definition(self, args: List[Any]) -> Tuple[str, Any]:
        name, allowance, type_, term = args
        return ("def", (name, Definition(str(name), type_, term, allowance)))

    def main_item(self, args: List[Any]) -> Tuple[str, Any]:
        main_type, term = args
        return ("main", (main_type, term))

    def program(self, items: List[Tuple[str, Any]]) -> Program:
        definitions: Dict[str, Definition] = {}
        main: Optional[Tuple[Optional[Term], Term]] = None
        for kind, value in items:
            if kind == "main":
                if main is not None:
                    raise ParseError("Program has more than one main")
                main = value
                continue
            token, definition = value
            if definition.name in definitions:
                raise ParseError(
                    f"Duplicate definition '{definition.name}'", token.line, token.column
                )
            definitions[definition.name] = definition
        return Program(
            self.semiring,
            tuple(definitions.values()),
            main=main[1] if main else None,
            main_type=main[0] if main else None,
        )


def _parse(text: str, start: str, semiring: Semiring) -> Any:
    try:
        tree = _parser().parse(text, start=start)
    except UnexpectedEOF:
        raise ParseError("Unexpected end of input")
    except UnexpectedCharacters as ex:
        raise ParseError(f"Unexpected character {text[ex.pos_in_stream]!r}", ex.line, ex.column)
    except UnexpectedInput as ex:
        token = getattr(ex, "token", None)
        if token is not None and token.type == "$END":
            raise ParseError("Unexpected end of input")
        raise ParseError(f"Unexpected {str(token)!r}", ex.line, ex.column)
    try:
        return _ToTerm(semiring).transform(tree)
    except VisitError as ex:
        raise ex.orig_exc


def parse_term(text: str, semiring: Semiring) -> Term:
    """Parse a single term."""
    return _parse(text, "term", semiring)


def parse_program(text: str, semiring: Semiring) -> Program:
    program = _parse(text, "program", semiring)
    logger.debug(
        "Parsed program with %d definitions (main: %s)",
        len(program.definitions),
        program.main is not None,
    )
    return program


def load_program(filename: str, semiring: Semiring) -> Program:
    """Read and parse a `.grad` file."""
    try:
        with open(filename, encoding="utf-8") as f:
            text = f.read()
    except OSError as ex:
        raise ParseError(f"Cannot read {filename}: {ex}")
    return parse_program(text, semiring)
