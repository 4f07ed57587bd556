"""Fitting polynomial limit-surface models to force/motion pairs.

The fit objective is

    ||a||^2 + sum_i eta1 * alpha_i(a) + eta2 * beta_i(a)

with ``alpha_i`` the squared component of grad H(F_i) orthogonal to the
measured unit twist V_i and ``beta_i = (H(F_i) - 1)^2``.  Both are quadratic
in ``a`` because H is linear in its coefficients.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InvalidParameterError
from .metrics import angular_error
from .oracle import Dataset
from .poly import MonomialBasis, PolyModel, evaluate, monomial_basis, monomial_gradients, monomial_values
from .solver import (
    QuadraticObjective,
    SolverOptions,
    solve_quadratic_psd,
    solve_sdp,
    solve_unconstrained,
)
from .sos import build_constraints

log = logging.getLogger(__name__)

KINDS = ("poly4-cvx", "poly4", "quad")
DEFAULT_GRID = tuple(itertools.product((0.1, 1.0, 10.0, 100.0), repeat=2))
UNIT_TOL = 1e-9
DEFAULT_EPSILON = 1e-4
# convexity margins tried when the margin is cross-validated, relative to median-normalized loads
DEFAULT_EPSILON_GRID = (1e-4, 0.5, 2.0)


@dataclass(frozen=True)
class FitConfig:
    kind: str = "poly4-cvx"
    eta1: float = 1.0
    eta2: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    cv_grid: tuple | None = DEFAULT_GRID
    solver: SolverOptions = field(default_factory=SolverOptions)
    epsilon_grid: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        if self.eta1 < 0 or self.eta2 < 0 or not self.epsilon > 0:
            raise InvalidParameterError("eta1, eta2 must be >= 0 and epsilon > 0")
        if self.cv_grid is not None and len(self.cv_grid) == 0:
            raise InvalidParameterError("cross-validation grid is empty")
        if self.epsilon_grid is not None and (len(self.epsilon_grid) == 0 or min(self.epsilon_grid) <= 0):
            raise InvalidParameterError("epsilon grid must be non-empty and positive")

    @property
    def grid(self) -> tuple:
        return tuple(self.cv_grid) if self.cv_grid is not None else ((self.eta1, self.eta2),)

    @property
    def epsilons(self) -> tuple:
        # the unconstrained model has no margin to tune
        if self.kind == "poly4" or self.epsilon_grid is None:
            return (self.epsilon,)
        return tuple(self.epsilon_grid)

    @property
    def degree(self) -> int:
        return 2 if self.kind == "quad" else 4


@dataclass
class FitResult:
    model: PolyModel
    config: FitConfig
    eta: tuple
    train_error: float
    validation_error: float
    diagnostics: dict
    grid_errors: list


def assemble_objective(train: Dataset, basis: MonomialBasis, eta1: float, eta2: float) -> QuadraticObjective:
    """Exact quadratic form of the regularized fit objective in ``a``."""
    F, V = train.F, train.V
    if np.any(np.abs(np.linalg.norm(V, axis=1) - 1.0) > UNIT_TOL):
        raise InvalidParameterError("twists must be unit vectors; renormalize before fitting")
    m = len(basis)
    phi = monomial_values(basis, F)
    J = monomial_gradients(basis, F)
    # remove the component along V_i: (I - V V^T) J
    R = J - V[:, :, None] * np.einsum("ni,nim->nm", V, J)[:, None, :]
    P = np.eye(m) + eta1 * np.einsum("nim,nik->mk", R, R) + eta2 * phi.T @ phi
    c = eta2 * phi.sum(axis=0)
    return QuadraticObjective(0.5 * (P + P.T), c, eta2 * len(F))


def _solve_kind(kind, objective, epsilon, options):
    if kind == "poly4-cvx":
        return solve_sdp(objective, build_constraints(4), epsilon, options)
    if kind == "quad":
        return solve_quadratic_psd(objective, epsilon, options)
    return solve_unconstrained(objective)


def _load_scale(model: PolyModel, F_normalized, s0: float) -> float:
    med = float(np.median(evaluate(model, F_normalized)))
    if med > 0 and np.isfinite(med):
        return s0 * med ** (1.0 / model.degree)
    return s0


def fit(train: Dataset, validation: Dataset | None, config: FitConfig) -> FitResult:
    """Fit one model kind, choosing (eta1, eta2) by validation angular error.

    Loads are divided by their median norm before fitting so the result does
    not depend on the load units; ``load_scale`` restores them, chosen so the
    median of H over the training loads is 1.
    """
    if len(train) == 0:
        raise InvalidParameterError("training set is empty")
    val = validation if validation is not None and len(validation) else train
    s0 = float(np.median(np.linalg.norm(train.F, axis=1)))
    if not s0 > 0:
        raise InvalidParameterError("training loads are all zero")
    scaled = train.scaled(1.0 / s0)
    basis = monomial_basis(config.degree)

    best = None
    grid_errors = []
    for eps in config.epsilons:
        for eta1, eta2 in config.grid:
            objective = assemble_objective(scaled, basis, eta1, eta2)
            res = _solve_kind(config.kind, objective, eps, config.solver)
            point = {"eta": [eta1, eta2], "epsilon": eps, "status": res.status}
            if not res.converged:
                log.warning("fit %s eta=(%g, %g) eps=%g did not converge: %s", config.kind, eta1, eta2, eps, res.status)
                grid_errors.append({**point, "validation_error": None})
                continue
            cert = res.Q if config.kind != "poly4" else None
            model = PolyModel(basis, res.a, cert, 1.0, eps, train.metadata.get("rho"), config.kind)
            err = angular_error(model, val)
            grid_errors.append({**point, "validation_error": err})
            if best is None or err < best[0]:
                best = (err, (eta1, eta2), model, res)
    if best is None:
        raise ConvergenceError(f"{config.kind}: no grid point converged", info={"grid": grid_errors})
    err, eta, model, res = best
    c = _load_scale(model, scaled.F, s0)
    diagnostics = res.diagnostics()
    model = PolyModel(
        basis, model.coeffs, model.certificate, c, model.epsilon, model.rho, config.kind,
        {"eta": list(eta), "epsilon": model.epsilon, "solver": diagnostics},
    )
    return FitResult(model, config, eta, angular_error(model, train), err, diagnostics, grid_errors)


def cross_validate(train: Dataset, validation: Dataset, kinds=KINDS, grid=DEFAULT_GRID,
                   epsilon: float = DEFAULT_EPSILON, solver: SolverOptions | None = None,
                   epsilon_grid: tuple | None = None) -> dict:
    """One :class:`FitResult` per model kind on shared splits."""
    opts = solver or SolverOptions()
    return {
        kind: fit(train, validation, FitConfig(kind=kind, epsilon=epsilon, cv_grid=tuple(grid), solver=opts,
                                               epsilon_grid=epsilon_grid))
        for kind in kinds
    }
