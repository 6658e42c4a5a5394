"""Two-stage principal-agent contract analysis."""

import json

from . import _core
from ._core import (
    ConfigError,
    ContractConfig,
    CostModel,
    DomainError,
    Incentive,
    best_response,
    best_response_value,
    build_fee,
    consistency_curve,
    run_command,
)

__version__ = _core.__version__


def validate_cost(cost, samples=100):
    return json.loads(_core.validate_cost(cost, samples))


def deviation_search(cfg, u2, theta):
    return json.loads(_core.deviation_search(cfg, u2, theta))


def check_bregman(cfg, u2, grid=256):
    return json.loads(_core.check_bregman(cfg, u2, grid))


def design_step(cfg, theta_L, theta_H, u_L, u_H):
    return json.loads(_core.design_step(cfg, theta_L, theta_H, u_L, u_H))


def solve_complete_info(cfg, k, theta):
    return json.loads(_core.solve_complete_info(cfg, k, theta))


__all__ = [
    "ConfigError",
    "ContractConfig",
    "CostModel",
    "DomainError",
    "Incentive",
    "best_response",
    "best_response_value",
    "build_fee",
    "check_bregman",
    "consistency_curve",
    "design_step",
    "deviation_search",
    "run_command",
    "solve_complete_info",
    "validate_cost",
]
