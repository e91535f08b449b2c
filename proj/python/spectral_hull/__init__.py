from ._core import (
    Example,
    NumericalError,
    ValidationError,
    cmd_converge,
    cmd_diff,
    cmd_pvm_demo,
    cmd_shift,
    diff,
    fourier_series_check,
    from_json,
    g0,
    gaussian_reference,
    metric_registry,
    pvm_demo,
    set_thread_count,
    shift,
    staircase_lp_error,
)

__all__ = [
    "Example",
    "NumericalError",
    "ValidationError",
    "cmd_converge",
    "cmd_diff",
    "cmd_pvm_demo",
    "cmd_shift",
    "diff",
    "fourier_series_check",
    "from_json",
    "g0",
    "gaussian_reference",
    "metric_registry",
    "pvm_demo",
    "set_thread_count",
    "shift",
    "staircase_lp_error",
]
