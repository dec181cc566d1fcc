"""Electron MHD ray tracing, dyadic norms, solvers and certificates."""

import json

from . import _emhd
from ._emhd import (
    cone_half_angle,
    ell1_hs_norm,
    fit_slope,
    group_velocity,
    hf_cv_check,
    principal_symbol,
    propagate_constant,
    sample_field,
    shell_norms,
    solve,
    trace_ray,
    version,
)

__version__ = _emhd.version()


def _spec(field):
    return field if isinstance(field, str) else json.dumps(field)


def resolve_config(command, config=None):
    return json.loads(_emhd.resolve_config(command, json.dumps(config or {})))


def certify(field, n=32, lambda_=2.0, s=2.0, targets=None):
    return json.loads(_emhd.certify(_spec(field), n, lambda_, s, targets or {}))


def measure_smoothing(background, n, lambda_, ks, T, frames=65):
    return json.loads(_emhd.measure_smoothing(_spec(background), n, lambda_, list(ks), T, frames))


def field(spec, n, lambda_):
    return sample_field(_spec(spec), n, lambda_)


def ray(spec, x, xi, **kwargs):
    return trace_ray(_spec(spec), list(x), list(xi), **kwargs)


__all__ = [
    "certify",
    "cone_half_angle",
    "ell1_hs_norm",
    "field",
    "fit_slope",
    "group_velocity",
    "hf_cv_check",
    "measure_smoothing",
    "principal_symbol",
    "propagate_constant",
    "ray",
    "resolve_config",
    "sample_field",
    "shell_norms",
    "solve",
    "trace_ray",
    "version",
]
