from __future__ import annotations

import logging
from typing import Any, Callable, Dict

from django.core.management.base import BaseCommand, CommandError, CommandParser

from grad.algebra import Semiring, get_semiring
from grad.contexts import UsageCtx, flatten_defs
from grad.evaluation import VALUE, classify, evaluate, stuck_reason
from grad.exceptions import (
    FuelExhausted,
    GradError,
    StuckError,
    TypeCheckError,
)
from grad.heap import SYSTEMS, format_step, memory_graph, multi_step, to_dot
from grad.printer import pretty
from grad.program import LoadedProgram, load
from grad.props import SUITES, run_suite
from grad.settings import (
    GRAD_EVAL_MODE,
    GRAD_FUEL,
    GRAD_PROPS_SEED,
    GRAD_SEMIRING,
    GRAD_SYSTEM,
)

logger = logging.getLogger(__name__)

# exit codes
TYPE_ERROR = 1
STUCK = 2
OUT_OF_FUEL = 3
USAGE_ERROR = 4


class GradCommandError(CommandError):
    """A failure already reported as `grad:{code}:{reason}`."""


def _usage(usage: UsageCtx) -> str:
    s = usage.semiring
    return ", ".join(f"{e.name}:{s.show(e.grade)}" for e in usage) or "-"


class Command(BaseCommand):
    help = "Check, evaluate and analyse graded programs."
    requires_system_checks = []  # type: ignore

    def add_arguments(self, parser: CommandParser) -> None:
        actions = parser.add_subparsers(dest="action", required=True)

        check = actions.add_parser("check", help="Print the type and usage of main.")
        self._program_arguments(check)

        run = actions.add_parser("eval", help="Evaluate main.")
        self._program_arguments(run)
        run.add_argument("--mode", choices=("subst", "heap"), default=GRAD_EVAL_MODE)
        run.add_argument("--trace", action="store_true", help="Print every machine step.")

        graph = actions.add_parser("graph", help="Write the memory graph of the initial heap.")
        self._program_arguments(graph)
        graph.add_argument("--dot", required=True, help="Output file, or - for stdout.")

        props = actions.add_parser("props", help="Run a property suite.")
        props.add_argument("--suite", choices=sorted(SUITES), required=True)
        props.add_argument("--seed", type=int, default=GRAD_PROPS_SEED)
        props.add_argument("--semiring", default=None)

    def _program_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("file")
        parser.add_argument("--semiring", default=GRAD_SEMIRING)
        parser.add_argument("--system", choices=SYSTEMS, default=GRAD_SYSTEM)
        parser.add_argument("--fuel", type=int, default=GRAD_FUEL)

    def fail(self, code: int, reason: str) -> None:
        self.stderr.write(f"grad:{code}:{reason}")
        raise GradCommandError(reason, returncode=code)

    def handle(self, *args: Any, **options: Any) -> None:
        handlers: Dict[str, Callable[[Dict[str, Any]], None]] = {
            "check": self.check,
            "eval": self.evaluate,
            "graph": self.graph,
            "props": self.props,
        }
        if options.get("fuel", 1) <= 0:
            self.fail(USAGE_ERROR, "usage fuel must be positive")
        try:
            handlers[options["action"]](options)
        except TypeCheckError as ex:
            self.fail(TYPE_ERROR, str(ex))
        except StuckError as ex:
            self.fail(STUCK, str(ex))
        except FuelExhausted as ex:
            self.fail(OUT_OF_FUEL, str(ex))
        except GradError as ex:
            self.fail(USAGE_ERROR, str(ex))

    def load(self, options: Dict[str, Any]) -> LoadedProgram:
        semiring: Semiring = get_semiring(options["semiring"])
        return load(options["file"], semiring, options["system"], options["fuel"])

    def check(self, options: Dict[str, Any]) -> None:
        loaded = self.load(options)
        if loaded.main_type is None or loaded.main_usage is None:
            for entry in loaded.plain:
                assert entry.type is not None
                self.stdout.write(f"{entry.name} : {pretty(entry.type, True, loaded.semiring)}")
            return
        self.stdout.write(pretty(loaded.main_type, True, loaded.semiring))
        self.stdout.write(f"usage: {_usage(loaded.main_usage)}")

    def evaluate(self, options: Dict[str, Any]) -> None:
        loaded = self.load(options)
        if options["mode"] == "heap":
            self.evaluate_heap(loaded, options)
            return
        result, steps = evaluate(flatten_defs(loaded.main, loaded.plain), options["fuel"])
        if classify(result) != VALUE:
            raise StuckError(*stuck_reason(result))
        self.stdout.write(pretty(result, semiring=loaded.semiring))
        self.stdout.write(f"steps: {steps}")

    def evaluate_heap(self, loaded: LoadedProgram, options: Dict[str, Any]) -> None:
        run = multi_step(
            loaded.heap(), loaded.main, fuel=options["fuel"], system=loaded.system
        )
        if options["trace"]:
            heap, term = run.initial, run.term
            for record in run.steps:
                self.stdout.write(format_step(heap, term, record))
                heap, term = record.heap, record.reduct
        run.raise_for_outcome()
        s = loaded.semiring
        allowed = ", ".join(f"{e.name}:{s.show(e.allowed)}" for e in run.final_heap) or "-"
        self.stdout.write(pretty(run.final_term, semiring=loaded.semiring))
        self.stdout.write(f"steps: {len(run.steps)}")
        self.stdout.write(f"allowed: {allowed}")
        self.stdout.write(f"consumed: {run.consumed}")

    def graph(self, options: Dict[str, Any]) -> None:
        loaded = self.load(options)
        dot = to_dot(memory_graph(loaded.heap(), loaded.usage()))
        if options["dot"] == "-":
            self.stdout.write(dot, ending="")
            return
        try:
            with open(options["dot"], "w", encoding="utf-8") as f:
                f.write(dot)
        except OSError as ex:
            self.fail(USAGE_ERROR, f"usage cannot write {options['dot']}: {ex}")
        logger.debug("Wrote memory graph to %s", options["dot"])

    def props(self, options: Dict[str, Any]) -> None:
        if options["semiring"] is not None:
            get_semiring(options["semiring"])
        results = run_suite(options["suite"], options["seed"], options["semiring"])
        for result in results:
            self.stdout.write(str(result))
        failed = [r for r in results if not r.verdict]
        if failed:
            self.fail(
                TYPE_ERROR,
                f"props {options['suite']} failed {len(failed)} of {len(results)} cases",
            )
