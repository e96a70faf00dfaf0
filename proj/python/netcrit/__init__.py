"""Critical values of eikonal Hamilton-Jacobi equations on networks."""

import json

from ._netcrit import (
    Case,
    NetcritError,
    case_names,
    make_case,
    network_case,
)
from ._netcrit import compare as _compare
from ._netcrit import run as _run

__all__ = [
    "Case",
    "NetcritError",
    "case_names",
    "compare",
    "make_case",
    "network_case",
    "run",
]


def _as_json(spec):
    return spec if isinstance(spec, str) else json.dumps(spec)


def run(spec):
    """Execute a run spec (dict or JSON text); returns one dict per dx."""
    return _run(_as_json(spec))


def compare(spec_a, spec_b):
    """Iteration counts of two sweeps over the same dx list."""
    return _compare(_as_json(spec_a), _as_json(spec_b))
