from __future__ import annotations

from os import path
from typing import Any

from django.conf import settings


def _setting(key: str, default: Any) -> Any:
    return getattr(settings, key, default)


# name of the semiring used when none is given on the command line - one of the
# built-in names (trivial, boolean, boolean-ordered, linearity, five-point, nat,
# security) or a security-lattice file.
GRAD_SEMIRING: str = _setting("GRAD_SEMIRING", "linearity")

# which checker to run: "simple" (box/tensor/sum calculus) or "dep" (Pi/Sigma with
# Type:Type and definitions).
GRAD_SYSTEM: str = _setting("GRAD_SYSTEM", "dep")

# evaluator used by `grad eval`: "subst" (call-by-name substitution) or "heap"
# (the resource-annotated heap machine).
GRAD_EVAL_MODE: str = _setting("GRAD_EVAL_MODE", "subst")

# Upper bound on evaluation / normalisation steps. Type:Type admits diverging
# terms, so every evaluator and every conversion check runs on a budget. The
# budget is per call - a single `check` shares it across all of its conversions.
GRAD_FUEL: int = _setting("GRAD_FUEL", 10000)

# Finite semirings are classified by enumerating every pair / triple of
# elements. Carriers larger than this are refused rather than enumerated.
GRAD_ENUMERATION_LIMIT: int = _setting("GRAD_ENUMERATION_LIMIT", 64)

# Number of worker threads used by `grad props` to run cases.
GRAD_PROPS_WORKERS: int = _setting("GRAD_PROPS_WORKERS", 4)

# Default random seed for `grad props`.
GRAD_PROPS_SEED: int = _setting("GRAD_PROPS_SEED", 0)

# Case counts for the randomised property suites.
GRAD_CONSERVATION_RUNS: int = _setting("GRAD_CONSERVATION_RUNS", 1000)
GRAD_NONINTERFERENCE_SWAPS: int = _setting("GRAD_NONINTERFERENCE_SWAPS", 200)
GRAD_NONINTERFERENCE_CONTROLS: int = _setting("GRAD_NONINTERFERENCE_CONTROLS", 20)

# Directory holding the shipped `.grad` programs and lattice files.
GRAD_CORPUS_DIR: str = _setting(
    "GRAD_CORPUS_DIR", path.join(path.dirname(path.abspath(__file__)), "corpus")
)
