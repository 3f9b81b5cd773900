"""Python access to the Perona-Malik laboratory."""

import json as _json

from ._core import (
    ConfigError,
    DerivedConstants,
    Error,
    NonlinearityProfile,
    RangeError,
    coeff_g,
    coeff_g_closed_pm,
    constants,
    convexity_margin,
    criteria_for,
    find_min_n,
    h_inverse,
    hypotheses_hold,
    scenario_names,
    vt_origin,
)
from . import _core


def default_config(scenario):
    return _json.loads(_core._default_config(scenario))


def run_scenario(config):
    """Run a scenario from a dict; returns the report as a dict."""
    return _json.loads(_core._run_scenario(_json.dumps(config)))


__all__ = [
    "ConfigError",
    "DerivedConstants",
    "Error",
    "NonlinearityProfile",
    "RangeError",
    "coeff_g",
    "coeff_g_closed_pm",
    "constants",
    "convexity_margin",
    "criteria_for",
    "default_config",
    "find_min_n",
    "h_inverse",
    "hypotheses_hold",
    "run_scenario",
    "scenario_names",
    "vt_origin",
]
