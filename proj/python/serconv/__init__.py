"""Bayesian convergence detector for infinite series."""

from ._serconv import (
    SerconvError,
    beta_posterior,
    calibrate_c1,
    classify,
    envelope_rate,
    normalize_plan,
    oracle,
    posterior_trajectory,
    run_plan,
    sweep,
    transform,
)

__all__ = [
    "SerconvError",
    "beta_posterior",
    "calibrate_c1",
    "classify",
    "envelope_rate",
    "normalize_plan",
    "oracle",
    "plan_text",
    "posterior_trajectory",
    "run",
    "run_plan",
    "sweep",
    "transform",
]


def plan_text(**keys):
    """Plan config text from keyword arguments, e.g. plan_text(family="rds", p=0.7)."""
    lines = []
    for key, value in keys.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def run(**keys):
    """run_plan(plan_text(**keys))."""
    return run_plan(plan_text(**keys))
