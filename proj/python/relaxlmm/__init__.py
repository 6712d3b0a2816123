"""Relaxation and projection for linear multistep and Runge-Kutta methods."""

from ._relaxlmm import (
    ConfigError,
    ConvergenceRow,
    Error,
    NumericalError,
    RunResult,
    StepTooLarge,
    coefficients,
    loglog_slope,
    methods,
    order_condition,
    problems,
)
from . import _relaxlmm

__all__ = [
    "ConfigError",
    "ConvergenceRow",
    "Error",
    "NumericalError",
    "RunResult",
    "StepTooLarge",
    "coefficients",
    "compare",
    "convergence",
    "loglog_slope",
    "methods",
    "order_condition",
    "problems",
    "run",
    "settings",
]

# Keyword shortcuts for the common settings; anything else can be given as
# a dotted "section.key" through the `extra` mapping.
_KEYS = {
    "problem": "problem.name",
    "n": "problem.n",
    "length": "problem.length",
    "amplitude": "problem.amplitude",
    "eps": "problem.eps",
    "flux": "problem.flux",
    "eccentricity": "problem.eccentricity",
    "kepler_start": "problem.start",
    "sigma": "problem.sigma",
    "method": "method.name",
    "starter": "method.starter",
    "starter_method": "method.starter_method",
    "starter_mode": "method.starter_mode",
    "mode": "relaxation.mode",
    "estimator": "relaxation.estimator",
    "m": "relaxation.m",
    "nu": "relaxation.nu",
    "gauss_nodes": "relaxation.gauss_nodes",
    "coefficients": "relaxation.coefficients",
    "target": "relaxation.target",
    "gamma_offset": "relaxation.gamma_offset",
    "root_tol": "relaxation.root_tol",
    "newton_tol": "relaxation.newton_tol",
    "dt": "time.dt",
    "t_final": "time.t_final",
    "state": "output.state",
}


def _text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def settings(extra=None, **kwargs):
    """Flat settings dict from keyword shortcuts plus dotted keys in `extra`."""
    out = {k: _text(v) for k, v in (extra or {}).items()}
    for key, value in kwargs.items():
        if key not in _KEYS:
            raise TypeError(f"unknown setting {key!r}")
        out[_KEYS[key]] = _text(value)
    return out


def run(extra=None, **kwargs):
    """Integrate one configuration, e.g. run(problem="kepler", method="ebdf3", dt=0.01)."""
    return _relaxlmm.run(settings(extra, **kwargs))


def convergence(dts, extra=None, **kwargs):
    """Error and EOC rows for successively halved step sizes `dts`."""
    return _relaxlmm.convergence(settings(extra, **kwargs), [float(d) for d in dts])


def compare(modes=("baseline", "projection", "relaxation"), extra=None, **kwargs):
    """One run per mode with identical starting values."""
    return _relaxlmm.compare(settings(extra, **kwargs), list(modes))
