"""Adaptive CoMP zero-forcing simulator."""

import json as _json

from ._adacomp import (
    ConfigError,
    DurationModel,
    LinkState,
    NumericError,
    __version__,
    classify,
    cos_count_pmf,
    cos_probability,
    cos_time_fraction,
    cos_time_fraction_mc,
    delta_factor,
    distance_ratio_moment,
    expected_delta,
    optimize_window,
    quantization_scale,
    scenarios,
)
from . import _adacomp


def preset(scenario):
    return _json.loads(_adacomp.preset(scenario))


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def validate(config):
    return _adacomp.validate(_text(config))


def run(config):
    return _adacomp.run(_text(config))


def run_csv(config):
    return _adacomp.run_csv(_text(config))
