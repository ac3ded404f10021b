"""
Console entry point for the `grad` command.

The command itself is a Django management command, so it also runs as
`python manage.py grad ...` inside a project that installs the app. Outside a
project this module configures a minimal settings object first.

"""
from __future__ import annotations

import sys
from typing import IO, Any, Dict, Optional, Sequence

import django
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError

STANDALONE_SETTINGS: Dict[str, Any] = {
    "INSTALLED_APPS": ["grad"],
    "LOGGING": {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"simple": {"format": "%(levelname)s %(name)s %(message)s"}},
        "handlers": {
            "console": {"class": "logging.StreamHandler", "formatter": "simple"}
        },
        "loggers": {"grad": {"handlers": ["console"], "level": "WARNING"}},
    },
}


def configure() -> None:
    if not settings.configured:
        settings.configure(**STANDALONE_SETTINGS)
    django.setup()


def run(
    argv: Sequence[str],
    stdout: Optional[IO[str]] = None,
    stderr: Optional[IO[str]] = None,
) -> int:
    """Run `grad` with the given arguments and return its exit code."""
    configure()
    from .management.commands.grad import USAGE_ERROR, Command, GradCommandError

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        call_command(Command(), *argv, stdout=stdout, stderr=stderr)
    except GradCommandError as ex:
        return ex.returncode
    except CommandError as ex:
        # argument parsing errors
        stderr.write(f"grad:{USAGE_ERROR}:usage {ex}\n")
        return USAGE_ERROR
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))
