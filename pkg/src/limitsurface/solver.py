"""Barrier-Newton interior point method for the two small fitting problems.

Both problems minimize a convex quadratic in the coefficient vector ``a``
subject to a linear matrix inequality ``M(x) >= eps I``:

* degree 4: ``x = (a, u)`` where ``u`` parametrizes the symmetric Gram
  matrix Q and the SOS equalities ``Tr(A_k Q) = b_k . a`` must hold;
* degree 2: ``x = a`` and ``M`` is the coefficient matrix A itself.

Equalities are eliminated once with an orthonormal null-space basis from a
QR factorization, so every iterate satisfies them to rounding.  Each barrier
stage minimizes ``f(x) - mu * logdet(M(x) - eps I)`` by damped Newton steps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import InfeasibleStartError, InvalidParameterError
from .poly import isotropic_model, monomial_basis, quad_coeffs_to_matrix, quad_matrix_to_coeffs
from .sos import GRAM_DIM, SosConstraintSystem, isotropic_gram

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadraticObjective:
    """``f(a) = a^T P a - 2 c^T a + const`` with P symmetric positive definite."""

    P: np.ndarray
    c: np.ndarray
    const: float = 0.0

    def __call__(self, a) -> float:
        a = np.asarray(a, dtype=float)
        return float(a @ self.P @ a - 2.0 * self.c @ a + self.const)

    def grad(self, a) -> np.ndarray:
        return 2.0 * (self.P @ a - self.c)

    @classmethod
    def regularizer(cls, m: int) -> "QuadraticObjective":
        return cls(np.eye(m), np.zeros(m), 0.0)


@dataclass(frozen=True)
class SolverOptions:
    mu0: float = 1.0
    mu_factor: float = 0.2
    gap_tol: float = 1e-7
    max_stages: int = 40
    newton_tol: float = 1e-9
    max_newton: int = 500
    alpha: float = 0.3
    beta: float = 0.5
    verbose: bool = False


@dataclass
class SolveResult:
    a: np.ndarray
    Q: np.ndarray | None
    objective: float
    iterations: int
    status: str
    kkt: dict = field(default_factory=dict)
    stage_objectives: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == "optimal"

    def diagnostics(self) -> dict:
        return {
            "status": self.status,
            "iterations": self.iterations,
            "objective": self.objective,
            **{k: float(v) for k, v in self.kkt.items()},
        }


def _sym_basis(n: int) -> np.ndarray:
    """(n*n, n(n+1)/2) map from upper-triangle parameters to vec of a symmetric matrix."""
    iu = np.triu_indices(n)
    E = np.zeros((n * n, len(iu[0])))
    for p, (i, j) in enumerate(zip(*iu)):
        E[i * n + j, p] = 1.0
        E[j * n + i, p] = 1.0
    return E


def _sym_params(M) -> np.ndarray:
    return M[np.triu_indices(len(M))]


@lru_cache(maxsize=None)
def _sdp_reduction(sys: SosConstraintSystem):
    """Null-space basis of the SOS equalities in (a, u) coordinates."""
    E = _sym_basis(GRAM_DIM)
    m = len(sys.basis)
    C = np.hstack([-sys.b, sys.A.reshape(sys.K, -1) @ E])
    Qf, R = scipy.linalg.qr(C.T, mode="full")
    d = np.abs(np.diag(R))
    rank = int(np.sum(d > 1e-12 * max(d.max(), 1.0)))
    N = Qf[:, rank:]
    return N[:m], N[m:], E @ N[m:], C


def feasible_start(sys: SosConstraintSystem, epsilon: float):
    """Scaled copy of ``(F . F)^2`` with its exact Gram matrix, ``lambda_min = 2 eps``."""
    if epsilon <= 0:
        raise InvalidParameterError("epsilon must be positive")
    Q0 = isotropic_gram()
    t = 2.0 * epsilon / np.linalg.eigvalsh(Q0)[0]
    return t * isotropic_model(sys.degree).coeffs, t * Q0


class _Barrier:
    """Objective, gradient and Hessian of one barrier stage in reduced coordinates."""

    def __init__(self, Pw, cw, const, G, dim, epsilon):
        self.Pw, self.cw, self.const = Pw, cw, const
        self.G, self.dim, self.eps = G, dim, epsilon
        self.Gp = np.ascontiguousarray(G.T.reshape(-1, dim, dim))

    def matrix(self, w):
        M = (self.G @ w).reshape(self.dim, self.dim)
        return 0.5 * (M + M.T)

    def slack_chol(self, w):
        S = self.matrix(w) - self.eps * np.eye(self.dim)
        try:
            return np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            return None

    def f(self, w):
        return float(w @ self.Pw @ w - 2.0 * self.cw @ w + self.const)

    def value(self, w, mu, L=None):
        L = self.slack_chol(w) if L is None else L
        if L is None:
            return np.inf
        return self.f(w) - 2.0 * mu * float(np.sum(np.log(np.diag(L))))

    def derivatives(self, w, mu, L):
        Linv = scipy.linalg.solve_triangular(L, np.eye(self.dim), lower=True)
        # S_p = L^-1 G_p L^-T, so tr(W G_p W G_q) = <S_p, S_q> with W = (M - eps I)^-1
        S = (Linv @ self.Gp @ Linv.T).reshape(len(self.Gp), -1)
        g = 2.0 * (self.Pw @ w - self.cw) - mu * S[:, :: self.dim + 1].sum(axis=1)
        H = 2.0 * self.Pw + mu * (S @ S.T)
        return g, 0.5 * (H + H.T)


def _run_barrier(bar: _Barrier, w, opts: SolverOptions):
    L = bar.slack_chol(w)
    if L is None:
        raise InfeasibleStartError("starting point violates M(x) > eps I")
    mu = opts.mu0
    total = 0
    stage_obj = []
    status = "optimal"
    proj_grad = np.inf
    for stage in range(opts.max_stages):
        for it in range(opts.max_newton):
            g, H = bar.derivatives(w, mu, L)
            try:
                dw = -scipy.linalg.cho_solve(scipy.linalg.cho_factor(H), g)
            except np.linalg.LinAlgError:
                dw = -np.linalg.lstsq(H, g, rcond=None)[0]
            dec = -float(g @ dw)
            proj_grad = float(np.linalg.norm(g))
            total += 1
            if dec / 2.0 <= opts.newton_tol or proj_grad <= opts.newton_tol:
                break
            s = 1.0
            Ln = bar.slack_chol(w + s * dw)
            while Ln is None and s > 1e-20:
                s *= opts.beta
                Ln = bar.slack_chol(w + s * dw)
            v0 = bar.value(w, mu, L)
            while s > 1e-20:
                if Ln is not None and bar.value(w + s * dw, mu, Ln) <= v0 - opts.alpha * s * dec:
                    break
                s *= opts.beta
                Ln = bar.slack_chol(w + s * dw)
            if s <= 1e-20:
                # no further progress possible at this mu; accept current point
                if dec > 1e-6 * max(1.0, abs(v0)):
                    status = "line_search_failure"
                break
            w = w + s * dw
            L = Ln
        else:
            status = "max_iterations"
        stage_obj.append(bar.f(w))
        if opts.verbose:
            log.info("stage %d mu=%.2e f=%.10g newton=%d", stage, mu, stage_obj[-1], total)
        if status != "optimal":
            break
        if bar.dim * mu <= opts.gap_tol:
            break
        mu *= opts.mu_factor
    else:
        status = "max_iterations"
    return w, mu, total, status, stage_obj, proj_grad


def solve_sdp(objective: QuadraticObjective, sys: SosConstraintSystem, epsilon: float = 1e-4,
              options: SolverOptions | None = None, start=None) -> SolveResult:
    """Minimize ``objective(a)`` subject to the SOS equalities and ``Q >= eps I``."""
    opts = options or SolverOptions()
    Na, Nu, G, C = _sdp_reduction(sys)
    m = len(sys.basis)
    if start is None:
        a0, Q0 = feasible_start(sys, epsilon)
        # slide along the isotropic ray (feasible for any larger scale) toward the objective's minimum
        t = float(objective.c @ a0) / float(a0 @ objective.P @ a0)
        if t > 1.0:
            a0, Q0 = t * a0, t * Q0
    else:
        a0, Q0 = (np.asarray(v, dtype=float) for v in start)
    x0 = np.concatenate([a0, _sym_params(Q0)])
    Nfull = np.vstack([Na, Nu])
    w0 = Nfull.T @ x0
    if np.linalg.norm(Nfull @ w0 - x0) > 1e-10 * max(1.0, np.linalg.norm(x0)):
        raise InfeasibleStartError("starting point violates the SOS equalities")
    bar = _Barrier(Na.T @ objective.P @ Na, Na.T @ objective.c, objective.const, G, GRAM_DIM, epsilon)
    w, mu, iters, status, stage_obj, pg = _run_barrier(bar, w0, opts)
    a = Na @ w
    Q = bar.matrix(w)
    u = _sym_params(Q)
    eq = float(np.max(np.abs(C @ np.concatenate([a, u])))) if len(C) else 0.0
    kkt = {
        "equality_residual": eq,
        "projected_gradient": pg,
        "duality_gap": GRAM_DIM * mu,
        "lambda_min": float(np.linalg.eigvalsh(Q)[0]),
    }
    return SolveResult(a, Q, objective(a), iters, status, kkt, stage_obj)


def solve_quadratic_psd(objective: QuadraticObjective, epsilon: float = 1e-4,
                        options: SolverOptions | None = None) -> SolveResult:
    """Degree-2 case: minimize over ``a`` with ``A(a) >= eps I`` directly."""
    opts = options or SolverOptions()
    basis = monomial_basis(2)
    # column n of G is vec of the symmetric matrix of monomial n
    G = np.zeros((9, len(basis)))
    for n in range(len(basis)):
        e = np.zeros(len(basis))
        e[n] = 1.0
        G[:, n] = quad_coeffs_to_matrix(e).reshape(-1)
    a_iso = quad_matrix_to_coeffs(np.eye(3))
    t = max(2.0 * epsilon, float(objective.c @ a_iso) / float(a_iso @ objective.P @ a_iso))
    bar = _Barrier(objective.P, objective.c, objective.const, G, 3, epsilon)
    w, mu, iters, status, stage_obj, pg = _run_barrier(bar, t * a_iso, opts)
    A = bar.matrix(w)
    kkt = {
        "equality_residual": 0.0,
        "projected_gradient": pg,
        "duality_gap": 3 * mu,
        "lambda_min": float(np.linalg.eigvalsh(A)[0]),
    }
    return SolveResult(w, A, objective(w), iters, status, kkt, stage_obj)


def solve_unconstrained(objective: QuadraticObjective) -> SolveResult:
    """Exact minimizer of the quadratic by one Cholesky solve."""
    a = scipy.linalg.cho_solve(scipy.linalg.cho_factor(objective.P), objective.c)
    g = objective.grad(a)
    return SolveResult(a, None, objective(a), 1, "optimal", {"projected_gradient": float(np.linalg.norm(g))})
