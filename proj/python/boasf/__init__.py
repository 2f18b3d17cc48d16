"""Bayesian optimization with adaptive successive filtering.

Spaces are lists of parameter dicts in the same shape as the ``hpo.space``
section of a run configuration::

    [{"name": "x", "type": "continuous", "low": 0, "high": 1},
     {"name": "n", "type": "categorical", "values": [2, 3, 4, 5]}]
"""

import json

from . import _core
from ._core import (
    BRANIN_MINIMUM,
    ConfigError,
    NoSuccessError,
    SpaceError,
    advance_probabilities,
    allocate_resources,
    balanced_accuracy,
    branin,
    gaussian_ucb,
    kfold_split,
    sphere,
)

__all__ = [
    "BRANIN_MINIMUM",
    "ConfigError",
    "NoSuccessError",
    "SpaceError",
    "advance_probabilities",
    "allocate_resources",
    "balanced_accuracy",
    "branin",
    "gaussian_ucb",
    "kfold_split",
    "optimize",
    "partition",
    "run",
    "sphere",
]


def partition(space, k):
    """Split every parameter into k intervals; returns one space per sub-space."""
    return [json.loads(s) for s in _core.partition(json.dumps(space), k)]


def run(config, seed=None, parallelism=None):
    """Execute a run from a configuration dict (or JSON text).

    Returns the best evaluation plus the parsed trace events under "trace".
    """
    text = config if isinstance(config, str) else json.dumps(config)
    result = _core.run(text, seed=seed, parallelism=parallelism)
    result["config"] = json.loads(result["config"])
    result["trace"] = [json.loads(line) for line in result["trace"].splitlines() if line]
    return result


def optimize(objective, space, budget, rounds=3, ucb_c=2.0, partition_k=2, seed=0,
             minimize=False, bounds=(0.0, 1.0)):
    """Run the bandit over the partitioned space with a Python objective.

    ``objective`` receives a configuration dict and returns a number; values
    are mapped onto [0, 1] using ``bounds``. Exceptions count as failed
    evaluations.
    """
    lo, hi = bounds
    result = _core.optimize(objective, json.dumps(space), float(budget), rounds, ucb_c,
                            partition_k, seed, minimize, float(lo), float(hi))
    result["config"] = json.loads(result["config"])
    return result
