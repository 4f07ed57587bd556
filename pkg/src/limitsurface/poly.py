"""Even-degree homogeneous polynomials in the three load components.

``H(F; a) = sum_i a_i Fx^e_i1 Fy^e_i2 Fz^e_i3`` with all monomials of total
degree ``d``.  Everything here is linear in ``a``, so the feature maps
(values, gradients, Hessians of the monomials) are exposed separately; the
identification code builds its quadratic objective from them.

All calculus acts on *normalized* loads.  ``load_scale`` converts a load on
the 1-level set to physical units; directions are unaffected by it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .errors import InvalidParameterError, UndefinedDirectionError

ORDERING = "grlex"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class MonomialBasis:
    degree: int
    exponents: tuple  # of (i1, i2, i3)

    def __len__(self):
        return len(self.exponents)

    @property
    def exps(self) -> np.ndarray:
        return np.array(self.exponents, dtype=int)


@lru_cache(maxsize=None)
def monomial_basis(degree: int) -> MonomialBasis:
    """All trivariate monomials of total ``degree`` in graded-lex order.

    Within one degree grlex reduces to lex with Fx > Fy > Fz, so (d, 0, 0)
    comes first and (0, 0, d) last.
    """
    if degree < 2 or degree % 2:
        raise InvalidParameterError(f"degree must be even and >= 2, got {degree}")
    exps = tuple(
        (i, j, degree - i - j) for i in range(degree, -1, -1) for j in range(degree - i, -1, -1)
    )
    assert len(exps) == comb(degree + 2, 2)
    return MonomialBasis(degree, exps)


def _as_rows(F):
    F = np.asarray(F, dtype=float)
    return F.reshape(-1, 3), F.ndim == 1


def _powers(F, degree):
    # P[n, k, e] = F[n, k] ** e for e = 0..degree
    return F[:, :, None] ** np.arange(degree + 1)


def monomial_values(basis: MonomialBasis, F) -> np.ndarray:
    """(n, m) matrix of monomials evaluated at each row of ``F``."""
    F, single = _as_rows(F)
    e = basis.exps
    P = _powers(F, basis.degree)
    out = P[:, 0, e[:, 0]] * P[:, 1, e[:, 1]] * P[:, 2, e[:, 2]]
    return out[0] if single else out


def monomial_gradients(basis: MonomialBasis, F) -> np.ndarray:
    """(n, 3, m) array: derivative of each monomial w.r.t. each load component."""
    F, single = _as_rows(F)
    e = basis.exps
    P = _powers(F, basis.degree)
    out = np.empty((len(F), 3, len(e)))
    for j in range(3):
        ed = e.copy()
        ed[:, j] = np.maximum(ed[:, j] - 1, 0)
        out[:, j] = e[:, j] * P[:, 0, ed[:, 0]] * P[:, 1, ed[:, 1]] * P[:, 2, ed[:, 2]]
    return out[0] if single else out


def monomial_hessians(basis: MonomialBasis, F) -> np.ndarray:
    """(n, 3, 3, m) array of second derivatives of each monomial."""
    F, single = _as_rows(F)
    e = basis.exps
    P = _powers(F, basis.degree)
    out = np.empty((len(F), 3, 3, len(e)))
    for j in range(3):
        for k in range(j, 3):
            ed = e.copy()
            if j == k:
                c = e[:, j] * (e[:, j] - 1)
                ed[:, j] = np.maximum(ed[:, j] - 2, 0)
            else:
                c = e[:, j] * e[:, k]
                ed[:, j] = np.maximum(ed[:, j] - 1, 0)
                ed[:, k] = np.maximum(ed[:, k] - 1, 0)
            out[:, j, k] = c * P[:, 0, ed[:, 0]] * P[:, 1, ed[:, 1]] * P[:, 2, ed[:, 2]]
            out[:, k, j] = out[:, j, k]
    return out[0] if single else out


@dataclass(frozen=True)
class PolyModel:
    """A fitted (or hand-built) homogeneous polynomial friction model.

    ``certificate`` is the Gram matrix Q (degree 4) or the coefficient matrix
    A itself (degree 2) when the model was fitted with convexity enforced.
    """

    basis: MonomialBasis
    coeffs: np.ndarray
    certificate: np.ndarray | None = None
    load_scale: float = 1.0
    epsilon: float | None = None
    rho: float | None = None
    kind: str = "custom"
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if a.shape != (len(self.basis),):
            raise InvalidParameterError(f"expected {len(self.basis)} coefficients, got {a.size}")
        if not np.all(np.isfinite(a)):
            raise InvalidParameterError("coefficients must be finite")
        if not self.load_scale > 0:
            raise InvalidParameterError("load_scale must be positive")
        object.__setattr__(self, "coeffs", a)
        if self.certificate is not None:
            object.__setattr__(self, "certificate", np.asarray(self.certificate, dtype=float))

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def certified(self) -> bool:
        return self.certificate is not None

    @classmethod
    def from_quadratic(cls, A, **kw) -> "PolyModel":
        """Model ``H(F) = F^T A F``; ``A`` is symmetrized."""
        A = np.asarray(A, dtype=float)
        A = 0.5 * (A + A.T)
        return cls(monomial_basis(2), quad_matrix_to_coeffs(A), **kw)

    def with_load_scale(self, load_scale: float) -> "PolyModel":
        return PolyModel(
            self.basis, self.coeffs, self.certificate, load_scale, self.epsilon, self.rho, self.kind, self.info
        )

    def physical_load(self, F) -> np.ndarray:
        return self.load_scale * np.asarray(F, dtype=float)

    def to_json(self) -> dict:
        Q = None if self.certificate is None else self.certificate.reshape(-1).tolist()
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "degree": self.degree,
            "ordering": ORDERING,
            "exponents": [list(e) for e in self.basis.exponents],
            "coeffs": self.coeffs.tolist(),
            "epsilon": self.epsilon,
            "Q": Q,
            "load_scale": self.load_scale,
            "rho": self.rho,
            "info": self.info,
        }

    @classmethod
    def from_json(cls, d: dict) -> "PolyModel":
        if d.get("ordering", ORDERING) != ORDERING:
            raise InvalidParameterError(f"unsupported monomial ordering {d['ordering']!r}")
        basis = monomial_basis(int(d["degree"]))
        Q = d.get("Q")
        if Q is not None:
            n = int(round(len(Q) ** 0.5))
            Q = np.array(Q, dtype=float).reshape(n, n)
        return cls(
            basis,
            np.array(d["coeffs"], dtype=float),
            Q,
            float(d.get("load_scale", 1.0)),
            d.get("epsilon"),
            d.get("rho"),
            d.get("kind", "custom"),
            d.get("info", {}),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def quad_matrix_to_coeffs(A) -> np.ndarray:
    basis = monomial_basis(2)
    a = np.empty(len(basis))
    for n, e in enumerate(basis.exponents):
        idx = [k for k in range(3) for _ in range(e[k])]
        a[n] = A[idx[0], idx[1]] * (1 if idx[0] == idx[1] else 2)
    return a


def quad_coeffs_to_matrix(a) -> np.ndarray:
    """Symmetric A with ``F^T A F`` equal to the degree-2 polynomial ``a``."""
    basis = monomial_basis(2)
    A = np.zeros((3, 3))
    for coef, e in zip(a, basis.exponents):
        idx = [k for k in range(3) for _ in range(e[k])]
        if idx[0] == idx[1]:
            A[idx[0], idx[0]] = coef
        else:
            A[idx[0], idx[1]] = A[idx[1], idx[0]] = coef / 2
    return A


def evaluate(model: PolyModel, F):
    out = monomial_values(model.basis, F) @ model.coeffs
    return float(out) if np.ndim(out) == 0 else out


def gradient(model: PolyModel, F) -> np.ndarray:
    return monomial_gradients(model.basis, F) @ model.coeffs


def hessian(model: PolyModel, F) -> np.ndarray:
    return monomial_hessians(model.basis, F) @ model.coeffs


def predict_velocity_direction(model: PolyModel, F) -> np.ndarray:
    """Unit gradient of H at ``F`` (rows of ``F`` are handled independently)."""
    g = gradient(model, F)
    n = np.linalg.norm(g, axis=-1, keepdims=True)
    if np.any(n == 0) or not np.all(np.isfinite(n)):
        raise UndefinedDirectionError("gradient vanishes; velocity direction undefined")
    return g / n


def isotropic_model(degree: int = 4, **kw) -> PolyModel:
    """``H(F) = (F . F)^(d/2)``, whose 1-level set is the unit sphere."""
    basis = monomial_basis(degree)
    half = degree // 2
    a = np.zeros(len(basis))
    # multinomial expansion of (x^2 + y^2 + z^2)^half
    for n, (i, j, k) in enumerate(basis.exponents):
        if i % 2 == 0 and j % 2 == 0 and k % 2 == 0:
            p, q, r = i // 2, j // 2, k // 2
            a[n] = comb(half, p) * comb(half - p, q)
    return PolyModel(basis, a, **kw)
