"""Discrete Higgs-field / harmonic-map numerics (compiled core in ``_core``)."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import HsmodError, run_experiment as _run_experiment


def run(config):
    """Run an experiment from a dict; returns (report dict, exit code)."""
    text, code = _run_experiment(_json.dumps(config))
    return _json.loads(text), code


__all__ = [name for name in dir() if not name.startswith("_")] + ["HsmodError"]
