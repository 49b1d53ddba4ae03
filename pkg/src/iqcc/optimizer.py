"""Smooth unconstrained minimization of the amplitude objective.

A thin wrapper around scipy's limited-memory BFGS with our convergence
contract: converged means the gradient infinity-norm at the returned point is
at or below the configured tolerance.  The objective is smooth and 2*pi
periodic per coordinate; no bounds are imposed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import OptimizationError


@dataclass(frozen=True)
class OptimizationConfig:
    gradient_tolerance: float = 1e-8
    max_evaluations: int = 200
    memory_depth: int = 10

    def __post_init__(self):
        if self.gradient_tolerance <= 0 or self.max_evaluations <= 0 or self.memory_depth <= 0:
            raise ValueError("optimization settings must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    t_opt: np.ndarray
    energy: float
    evaluations: int
    converged: bool


def minimize(
    objective,
    gradient,
    t0,
    cfg: OptimizationConfig | None = None,
    *,
    value_and_gradient=None,
) -> OptimizationResult:
    """L-BFGS from t0; either (objective, gradient) or a fused callable.

    ``value_and_gradient(v) -> (float, array)`` lets callers share work
    between the two evaluations.  Non-finite objective values abort with the
    offending point attached.
    """
    cfg = cfg or OptimizationConfig()
    t0 = np.asarray(t0, dtype=float)
    if t0.size == 0:
        raise ValueError("empty amplitude vector")
    if not np.all(np.isfinite(t0)):
        raise OptimizationError("non-finite starting point", point=t0)

    if value_and_gradient is None:
        def value_and_gradient(v):
            return objective(v), np.asarray(gradient(v), dtype=float)

    def fused(v):
        e, g = value_and_gradient(v)
        if not np.isfinite(e) or not np.all(np.isfinite(g)):
            raise OptimizationError(f"non-finite objective at {v!r}", point=v.copy())
        return e, np.asarray(g, dtype=float)

    res = _scipy_minimize(
        fused,
        t0,
        jac=True,
        method="L-BFGS-B",
        options={
            "maxfun": cfg.max_evaluations,
            "maxcor": cfg.memory_depth,
            "gtol": cfg.gradient_tolerance,
            "ftol": 1e-15,
        },
    )
    grad_norm = float(np.max(np.abs(res.jac))) if res.jac is not None else np.inf
    return OptimizationResult(
        t_opt=np.asarray(res.x, dtype=float),
        energy=float(res.fun),
        evaluations=int(res.nfev),
        converged=grad_norm <= cfg.gradient_tolerance,
    )
