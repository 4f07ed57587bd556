"""Inverse map from a unit twist direction to a load on the 1-level set.

Solve ``grad H(F) = V`` by Gauss-Newton on ``G(F) = 1/2 ||grad H(F) - V||^2``
(step ``Hess H(F)^-1 (grad H(F) - V)``), then rescale the solution onto
``H = 1``; homogeneity keeps the gradient direction.  For convex H the step
is also a descent direction for G, so backtracking on G is always possible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidParameterError
from .poly import PolyModel, evaluate, gradient, hessian

UNIT_TOL = 1e-9


@dataclass(frozen=True)
class InversionOptions:
    max_iterations: int = 100
    step_tolerance: float = 1e-12
    residual_tolerance: float = 1e-10
    damping: float = 0.0
    max_condition: float = 1e12
    angle_tolerance: float = 1e-8

    def __post_init__(self):
        if min(self.step_tolerance, self.residual_tolerance, self.angle_tolerance) <= 0:
            raise InvalidParameterError("tolerances must be positive")


DEFAULT_OPTIONS = InversionOptions()


def _angle(u, v) -> float:
    # atan2 form stays accurate for tiny angles
    return float(np.arctan2(np.linalg.norm(np.cross(u, v)), np.dot(u, v)))


def gauss_newton_trace(model: PolyModel, V, opts: InversionOptions = DEFAULT_OPTIONS):
    """Run the iteration; returns (F_T, list of G values at accepted iterates)."""
    V = np.asarray(V, dtype=float)
    F = V.copy()
    r = gradient(model, F) - V
    G = 0.5 * float(r @ r)
    trace = [G]
    for _ in range(opts.max_iterations):
        if np.sqrt(2.0 * G) <= opts.residual_tolerance:
            return F, trace
        g = gradient(model, F)
        if _angle(g, V) <= 0.1 * opts.angle_tolerance:
            return F, trace
        Hs = hessian(model, F)
        lam = opts.damping
        if np.linalg.cond(Hs) > opts.max_condition:
            lam = max(lam, 1e-8 * np.linalg.norm(Hs, 2))
        try:
            step = np.linalg.solve(Hs + lam * np.eye(3), r)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(Hs + max(lam, 1e-12) * np.eye(3), r, rcond=None)[0]
        t = 1.0
        while True:
            F_new = F - t * step
            r_new = gradient(model, F_new) - V
            G_new = 0.5 * float(r_new @ r_new)
            if G_new < G or t < 1e-12:
                break
            t *= 0.5
        if G_new >= G:
            break
        F, r, G = F_new, r_new, G_new
        trace.append(G)
        if t * np.linalg.norm(step) <= opts.step_tolerance * max(1.0, np.linalg.norm(F)):
            break
    return F, trace


def invert(model: PolyModel, V, opts: InversionOptions = DEFAULT_OPTIONS) -> np.ndarray:
    """Load ``F`` with ``H(F) = 1`` whose gradient points along unit ``V``."""
    V = np.asarray(V, dtype=float).reshape(3)
    if abs(np.linalg.norm(V) - 1.0) > UNIT_TOL:
        raise InvalidParameterError("query twist must be a unit vector")
    F, trace = gauss_newton_trace(model, V, opts)
    h = evaluate(model, F)
    if not h > 0:
        raise ConvergenceError("iterate left the region where H > 0", best=F, info={"trace": trace})
    F_hat = F * h ** (-1.0 / model.degree)
    ang = _angle(gradient(model, F_hat), V)
    if ang > opts.angle_tolerance:
        raise ConvergenceError(
            f"inversion stopped {ang:.2e} rad from the target direction",
            best=F_hat,
            info={"trace": trace, "angle": ang},
        )
    return F_hat


def invert_many(model: PolyModel, Vs, opts: InversionOptions = DEFAULT_OPTIONS) -> np.ndarray:
    return np.array([invert(model, v, opts) for v in np.asarray(Vs, dtype=float).reshape(-1, 3)])
