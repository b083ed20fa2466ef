"""Locally conformally symplectic variational integrators."""

import json

from ._core import (
    DomainError,
    InvalidArgument,
    NumericalError,
    a_matrix,
    builtin_systems,
    cocycle_deviation,
    default_sigma_params,
    del_step,
    discrete_legendre,
    dlcel_step,
    lcs_two_form_matrix,
)
from . import _core

__all__ = [
    "DomainError",
    "InvalidArgument",
    "NumericalError",
    "a_matrix",
    "builtin_systems",
    "cocycle_deviation",
    "convergence",
    "default_sigma_params",
    "del_step",
    "discrete_legendre",
    "dlcel_step",
    "integrate",
    "lcs_two_form_matrix",
    "verify",
]


def integrate(config):
    """Run an experiment config (dict, same schema as the CLI) and return its columns."""
    return _core.integrate_json(json.dumps(config))


def convergence(config, hs, h_ref=None):
    return json.loads(_core.convergence_json(json.dumps(config), list(hs), h_ref))


def verify(system, seed=0):
    return json.loads(_core.verify_json(system, seed))
