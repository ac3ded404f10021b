"""The shipped `.grad` programs, with the semiring and system each is written for."""
from __future__ import annotations

import dataclasses
from os import path
from typing import Tuple

from ..algebra import Semiring, get_semiring
from ..program import LoadedProgram, load
from ..settings import GRAD_CORPUS_DIR, GRAD_FUEL


@dataclasses.dataclass(frozen=True)
class CorpusProgram:
    name: str
    semiring_name: str
    system: str = "dep"
    # "value" or "stuck"
    expected: str = "value"

    @property
    def path(self) -> str:
        return path.join(GRAD_CORPUS_DIR, f"{self.name}.grad")

    @property
    def semiring(self) -> Semiring:
        return get_semiring(self.semiring_name)

    def load(self, fuel: int = GRAD_FUEL) -> LoadedProgram:
        return load(self.path, self.semiring, self.system, fuel)


CORPUS: Tuple[CorpusProgram, ...] = (
    CorpusProgram("box", "linearity", "simple"),
    CorpusProgram("case_sum", "linearity"),
    CorpusProgram("graded_pair", "linearity"),
    CorpusProgram("heap_ex", "nat"),
    CorpusProgram("intro_trace", "nat"),
    CorpusProgram("irrelevant_app", "linearity", "simple"),
    CorpusProgram("irrelevant_secret", "diamond"),
    CorpusProgram("poly_id", "linearity"),
    CorpusProgram("single_pointer", "linearity", "simple"),
    CorpusProgram("stuck", "nat", expected="stuck"),
    CorpusProgram("unwise", "linearity"),
)


def get_program(name: str) -> CorpusProgram:
    for program in CORPUS:
        if program.name == name:
            return program
    raise KeyError(name)
