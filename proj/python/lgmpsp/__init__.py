"""Lie-group MPSP toolkit: MPSP, iLQR and TPBVP attitude-flip solvers."""

import json
import os

from ._core import (
    LgmpspError,
    euler_to_rotation,
    exp_so3,
    hat,
    is_rotation,
    log_so3,
    log_so3_resolved,
    right_jacobian_so3,
    rotation_to_euler,
    vee,
    vpq_omega_dot,
    vpq_reference_inertia,
)
from . import _core

__all__ = [
    "LgmpspError",
    "certify",
    "compare",
    "default_config",
    "euler_to_rotation",
    "exp_so3",
    "hat",
    "is_rotation",
    "log_so3",
    "log_so3_resolved",
    "maneuver",
    "monte_carlo",
    "right_jacobian_so3",
    "rotation_to_euler",
    "solve",
    "vee",
    "vpq_omega_dot",
    "vpq_reference_inertia",
]


def _load(config):
    if config is None:
        return "{}", "."
    if isinstance(config, (str, os.PathLike)):
        path = os.fspath(config)
        with open(path) as f:
            return f.read(), os.path.dirname(os.path.abspath(path))
    return json.dumps(config), "."


def default_config():
    """Full configuration with every default filled in."""
    return json.loads(_core._default_config())


def solve(config=None, paper_matrices=False):
    """Run the configured solver; returns the report with the trajectory inline. Nothing is written."""
    text, base = _load(config)
    return json.loads(_core._solve(text, base, paper_matrices))


def _command(fn, config, paper_matrices):
    text, base = _load(config)
    report, code = fn(text, base, paper_matrices)
    return json.loads(report), code


def maneuver(config=None, paper_matrices=False):
    """Same as `lgmpsp maneuver`; returns (report, exit_code)."""
    return _command(_core._maneuver, config, paper_matrices)


def compare(config=None, paper_matrices=False):
    """Same as `lgmpsp compare`; returns (report, exit_code)."""
    return _command(_core._compare, config, paper_matrices)


def certify(config=None, paper_matrices=False):
    """Same as `lgmpsp certify`; returns (report, exit_code)."""
    return _command(_core._certify, config, paper_matrices)


def monte_carlo(config=None, paper_matrices=False):
    """Same as `lgmpsp monte-carlo`; returns (report, exit_code)."""
    return _command(_core._monte_carlo, config, paper_matrices)
