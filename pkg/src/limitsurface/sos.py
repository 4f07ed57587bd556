"""Linear constraints tying a degree-4 polynomial to an SOS Gram matrix.

For ``y = z (x) F`` (z-major, F-minor) the identity

    z^T Hess H(F; a) z  ==  y^T Q y        for all F, z

is a polynomial identity in (z, F).  Matching the coefficient of every
monomial ``z^alpha F^beta`` gives one linear equation ``Tr(A_k Q) = b_k . a``.
The equations are derived here by exponent bookkeeping rather than typed in.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import InvalidParameterError
from .poly import MonomialBasis, monomial_basis, monomial_hessians

GRAM_DIM = 9
PIVOT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SosConstraintSystem:
    degree: int
    basis: MonomialBasis
    keys: tuple  # (z exponent, F exponent) per constraint
    A: np.ndarray  # (K, 9, 9), symmetric 0/1/2 indicator matrices
    b: np.ndarray  # (K, m)
    n_raw: int
    gram_dim: int = GRAM_DIM

    @property
    def K(self) -> int:
        return len(self.keys)

    @property
    def matrix(self) -> np.ndarray:
        """(K, m + 81) matrix C with ``C @ [a, vec(Q)] = Tr(A_k Q) - b_k . a``."""
        return np.hstack([-self.b, self.A.reshape(self.K, -1)])

    def residuals(self, a, Q) -> np.ndarray:
        Q = np.asarray(Q, dtype=float)
        return np.einsum("kij,ji->k", self.A, Q) - self.b @ np.asarray(a, dtype=float)


def _unit(k):
    e = [0, 0, 0]
    e[k] += 1
    return e


def _add(*vs):
    return tuple(int(sum(c)) for c in zip(*vs))


@lru_cache(maxsize=None)
def build_constraints(degree: int = 4) -> SosConstraintSystem:
    """Coefficient-matching system for the Hessian Gram identity."""
    if degree != 4:
        raise InvalidParameterError("SOS Gram constraints are only built for degree 4")
    basis = monomial_basis(degree)
    m = len(basis)
    lhs: dict = {}
    rhs: dict = {}
    for n, e in enumerate(basis.exponents):
        for j in range(3):
            for k in range(3):
                ee = list(e)
                c = ee[j]
                ee[j] -= 1
                c *= ee[k]
                ee[k] -= 1
                if c == 0:
                    continue
                key = (_add(_unit(j), _unit(k)), tuple(ee))
                lhs.setdefault(key, np.zeros(m))[n] += c
    for p in range(GRAM_DIM):
        for q in range(GRAM_DIM):
            zp, fp = divmod(p, 3)
            zq, fq = divmod(q, 3)
            key = (_add(_unit(zp), _unit(zq)), _add(_unit(fp), _unit(fq)))
            rhs.setdefault(key, np.zeros((GRAM_DIM, GRAM_DIM)))[p, q] += 1
    keys = sorted(set(lhs) | set(rhs))
    A = np.array([rhs.get(k, np.zeros((GRAM_DIM, GRAM_DIM))) for k in keys])
    b = np.array([lhs.get(k, np.zeros(m)) for k in keys])

    # drop dependent equations: pivoted QR of the row space
    C = np.hstack([-b, A.reshape(len(keys), -1)])
    _, R, piv = scipy.linalg.qr(C.T, pivoting=True, mode="economic")
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > PIVOT_TOL * max(diag[0], 1.0)))
    keep = np.sort(piv[:rank])
    return SosConstraintSystem(
        degree=degree,
        basis=basis,
        keys=tuple(keys[i] for i in keep),
        A=A[keep],
        b=b[keep],
        n_raw=len(keys),
    )


def lift(F, z) -> np.ndarray:
    """``y(F, z) = z (x) F``; rows are handled independently."""
    F = np.asarray(F, dtype=float)
    z = np.asarray(z, dtype=float)
    return (z[..., :, None] * F[..., None, :]).reshape(*np.broadcast_shapes(F.shape, z.shape)[:-1], 9)


def isotropic_gram() -> np.ndarray:
    """Gram matrix of ``(F . F)^2``: its Hessian form is ``4|F|^2|z|^2 + 8 (F . z)^2``."""
    e = np.zeros(GRAM_DIM)
    e[[0, 4, 8]] = 1.0
    return 4.0 * np.eye(GRAM_DIM) + 8.0 * np.outer(e, e)


@dataclass
class CertificateReport:
    passed: bool
    max_constraint_residual: float
    min_eigenvalue: float
    max_identity_error: float
    epsilon: float
    failures: list

    def __bool__(self):
        return self.passed


def verify_certificate(sys: SosConstraintSystem, a, Q, n_samples=200, rng=None, epsilon=0.0,
                       residual_tol=1e-8, identity_tol=1e-8) -> CertificateReport:
    """Check a coefficient vector / Gram matrix pair three ways.

    Linear residuals, the PSD margin ``lambda_min(Q) >= epsilon``, and the
    polynomial identity at random (F, z).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    a = np.asarray(a, dtype=float)
    Q = np.asarray(Q, dtype=float)
    failures = []
    if not np.allclose(Q, Q.T, atol=1e-12, rtol=0):
        failures.append("Q is not symmetric")
    res = float(np.max(np.abs(sys.residuals(a, Q)))) if sys.K else 0.0
    if res > residual_tol:
        failures.append(f"linear constraint residual {res:.3e} > {residual_tol:.0e}")
    lam = float(np.linalg.eigvalsh(0.5 * (Q + Q.T))[0])
    if lam < epsilon - 1e-9:
        failures.append(f"lambda_min(Q) = {lam:.3e} < epsilon = {epsilon:.3e}")
    F = rng.standard_normal((n_samples, 3))
    z = rng.standard_normal((n_samples, 3))
    lhs = np.einsum("ni,nijk,k,nj->n", z, monomial_hessians(sys.basis, F), a, z)
    y = lift(F, z)
    rhs = np.einsum("ni,ij,nj->n", y, Q, y)
    err = np.abs(lhs - rhs) / (1.0 + np.abs(rhs))
    worst = float(err.max()) if n_samples else 0.0
    if worst > identity_tol:
        failures.append(f"Gram identity mismatch {worst:.3e} > {identity_tol:.0e}")
    return CertificateReport(not failures, res, lam, worst, epsilon, failures)
