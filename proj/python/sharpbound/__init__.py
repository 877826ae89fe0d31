from ._sharpbound import (  # noqa: F401
    activation_eval,
    activation_profile,
    grad_total,
    hessian_total,
    lambda_sup,
    macro_f1,
    mann_whitney_u,
    param_dim,
    spectrum,
    total_loss,
    trace_bounds,
    traces,
)

__all__ = [
    "activation_eval",
    "activation_profile",
    "grad_total",
    "hessian_total",
    "lambda_sup",
    "macro_f1",
    "mann_whitney_u",
    "param_dim",
    "spectrum",
    "total_loss",
    "trace_bounds",
    "traces",
]
