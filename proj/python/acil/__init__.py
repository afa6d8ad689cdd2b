"""Safe actor-critic controller simulator.

Thin python layer over the native core: benchmark systems, barrier
constructions, the softplus multiplier machinery, and the closed-loop
episode runner.
"""

from acil._core import (  # noqa: F401
    BarrierFn,
    BasisFn,
    SoftplusParams,
    SystemModel,
    basis_by_name,
    c_s_hat,
    default_mine_layout,
    estimate_gamma,
    lambda_hat,
    lambda_naive,
    lambda_star_oracle,
    make_ball_log,
    make_box_log,
    make_inverse_obstacle,
    make_minefield,
    make_quartic_ratio,
    make_softplus_params,
    r_bf,
    run,
    run_config_file,
    safe_feasible_control,
    softplus,
    softplus_params_for,
    system_by_name,
    write_csv,
)

__all__ = [
    "BarrierFn",
    "BasisFn",
    "SoftplusParams",
    "SystemModel",
    "basis_by_name",
    "c_s_hat",
    "default_mine_layout",
    "estimate_gamma",
    "lambda_hat",
    "lambda_naive",
    "lambda_star_oracle",
    "make_ball_log",
    "make_box_log",
    "make_inverse_obstacle",
    "make_minefield",
    "make_quartic_ratio",
    "make_softplus_params",
    "r_bf",
    "run",
    "run_config_file",
    "safe_feasible_control",
    "softplus",
    "softplus_params_for",
    "system_by_name",
    "write_csv",
]

__version__ = "0.1.0"
