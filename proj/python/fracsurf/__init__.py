"""Fractional Laplace-Beltrami solver on the unit sphere."""
import json

from ._core import (
    Discretization,
    __version__,
    choose_truncation,
    exact_solution,
    sinc_apply,
    step_coefficients,
)
from . import _core


def default_config():
    return json.loads(_core.default_config())


def run_convergence(**overrides):
    cfg = default_config()
    cfg.update(overrides)
    return json.loads(_core.run_convergence(json.dumps(cfg)))


def run_sigma_study(**overrides):
    cfg = default_config()
    cfg.update(overrides)
    return _core.run_sigma_study(json.dumps(cfg))


__all__ = [
    "Discretization",
    "choose_truncation",
    "default_config",
    "exact_solution",
    "run_convergence",
    "run_sigma_study",
    "sinc_apply",
    "step_coefficients",
    "__version__",
]
