# SPDX-License-Identifier: Apache-2.0
"""mmWave beam-training crowd sensing.

Configurations are plain dicts in the JSON schema read by the ``mmsense``
command-line tool (sections ``seed``, ``scenario``, ``channel``, ``protocol``,
``train``, ``behavior``). Missing sections keep their defaults.
"""

import csv
import io
import json

from . import _core
from ._core import (
    ContainerError,
    Dataset,
    DivergenceError,
    SamplingError,
    beam_width,
    derive_seed,
    repetition_seed,
    scenario_names,
)

__all__ = [
    "ContainerError",
    "Dataset",
    "DivergenceError",
    "SamplingError",
    "beam_width",
    "config",
    "derive_seed",
    "evaluate",
    "generate",
    "ingest",
    "report",
    "repetition_seed",
    "rl_experiment",
    "scenario_names",
    "sweep",
]


def _dump(obj):
    return "" if obj is None else json.dumps(obj)


def config(overrides=None):
    """Full configuration dict after applying ``overrides`` to the defaults."""
    return json.loads(_core.resolve_config(_dump(overrides)))


def generate(config=None, scale="desk", threads=0):
    """Simulates a labeled snapshot dataset.

    ``scale`` is "desk" (40+40 arrangements x 50 trainings), "paper"
    (200+200 x 200) or "config" (counts taken from the config).
    """
    return _core.generate(_dump(config), scale, threads)


def ingest(container, labels, n_tx=None, n_rx=None, pairs=None):
    """Reads an external container and label file; expected dimensions are checked when given."""
    return _core.ingest(str(container), str(labels), n_tx, n_rx, pairs)


def evaluate(dataset, config=None):
    """Split, standardize, train one classifier per alert area and score the test split."""
    return json.loads(_core.evaluate(dataset, _dump(config)))


def sweep(grid=None, config=None, scale="desk", threads=0, cache_dir=""):
    """Runs the accuracy grid and returns its rows as dicts (CSV column names)."""
    text = _core.sweep(_dump(grid), _dump(config), scale, threads, str(cache_dir))
    return list(csv.DictReader(io.StringIO(text))), text


def report(sweep_csv):
    """Long-format mean/std/min/max/n table from sweep CSV text."""
    return list(csv.DictReader(io.StringIO(_core.report(sweep_csv))))


def rl_experiment(config=None, scale="desk", episodes=5000, critic="cnn", critic_arrangements=4000,
                  critic_holdout=400, series_length=30, window=200):
    """Supervised baseline, critic pre-training and alert episodes; returns curves and scores."""
    return json.loads(_core.rl_experiment(_dump(config), scale, episodes, critic, critic_arrangements,
                                          critic_holdout, series_length, window))
