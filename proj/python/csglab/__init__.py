"""Coalition structure solvers with anytime instrumentation.

Instances, solutions, and reports are plain dicts and lists; see the
docstrings on the functions re-exported here.
"""

from ._csglab import (
    GuardViolation,
    coalition_value,
    generate_instance,
    race,
    solve_instance,
    structure_value,
    tail_check,
)

__all__ = [
    "GuardViolation",
    "coalition_value",
    "generate_instance",
    "race",
    "solve_instance",
    "structure_value",
    "tail_check",
    "cli_path",
]

__version__ = "1.0.0"


def cli_path():
    """Path to the bundled command-line binary."""
    from pathlib import Path

    from . import _csglab

    # Anchor on the compiled module: in editable installs the Python sources
    # stay in the source tree while installed artifacts (including bin/) sit
    # next to the extension.
    return str(Path(_csglab.__file__).resolve().parent / "bin" / "csglab")
