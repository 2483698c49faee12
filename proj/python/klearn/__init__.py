"""K-learning: Bayesian exploration for episodic tabular MDPs and bandits."""

import json as _json

from . import _klearn
from ._klearn import (
    BeliefState,
    ConfigError,
    KSolution,
    LayeredMdp,
    Layout,
    NumericError,
    ValidationError,
    bandit_schedule_tau,
    build_deepsea,
    objective,
    optimize_tau,
    performance,
    schedule_tau,
    solve_k,
    solve_optimal,
)


def _text(config):
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def validate_config(config):
    """Raises ConfigError if `config` (dict or JSON text) is not a valid experiment."""
    _klearn.validate_config(_text(config))


def run_experiment(config):
    """Runs every (agent, run) pair; returns a list of {agent, run, rows} dicts."""
    return _klearn.run_experiment(_text(config))


def run_experiment_csv(config, path):
    _klearn.run_experiment_csv(_text(config), str(path))


def report(runs_csv, summary_csv):
    """Writes the summary CSV and returns the text table."""
    return _klearn.report(str(runs_csv), str(summary_csv))
