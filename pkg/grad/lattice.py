"""
Security-lattice files.

A lattice file is a JSON object::

    {
        "name": "diamond",
        "elements": ["Private", "A", "B", "Public"],
        "covers": [["Private", "A"], ["Private", "B"], ["A", "Public"], ["B", "Public"]],
        "private": "Private",
        "public": "Public"
    }

`covers` lists (lower, upper) pairs; the order is their reflexive-transitive
closure.

"""
from __future__ import annotations

import functools
import json
import logging
from os import path
from typing import Any, Dict

from .algebra import FiniteSemiring, lattice_semiring
from .exceptions import SemiringConfigError
from .settings import GRAD_CORPUS_DIR

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ("elements", "covers", "private", "public")


def parse_lattice(data: Dict[str, Any], default_name: str = "lattice") -> FiniteSemiring:
    missing = [key for key in REQUIRED_KEYS if key not in data]
    if missing:
        raise SemiringConfigError(f"Lattice definition is missing {', '.join(missing)}")
    try:
        covers = [(str(lower), str(upper)) for lower, upper in data["covers"]]
    except (TypeError, ValueError):
        raise SemiringConfigError("Lattice covers must be [lower, upper] pairs")
    return lattice_semiring(
        str(data.get("name", default_name)),
        [str(e) for e in data["elements"]],
        covers,
        private=str(data["private"]),
        public=str(data["public"]),
    )


def load_lattice(filename: str) -> FiniteSemiring:
    """Read and validate a lattice file."""
    logger.debug("Loading security lattice from %s", filename)
    try:
        with open(filename, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as ex:
        raise SemiringConfigError(f"Cannot read lattice file {filename}: {ex}")
    except json.JSONDecodeError as ex:
        raise SemiringConfigError(f"Invalid lattice file {filename}: {ex}")
    if not isinstance(data, dict):
        raise SemiringConfigError(f"Lattice file {filename} must hold a JSON object")
    name = path.splitext(path.basename(filename))[0]
    return parse_lattice(data, default_name=name)


@functools.lru_cache(maxsize=None)
def find_lattice(name: str) -> FiniteSemiring:
    """Resolve a lattice by file path, or by name within the corpus directory."""
    if path.isfile(name):
        return load_lattice(name)
    shipped = path.join(GRAD_CORPUS_DIR, f"{name}.json")
    if path.isfile(shipped):
        return load_lattice(shipped)
    raise SemiringConfigError(f"Unknown semiring '{name}'")
