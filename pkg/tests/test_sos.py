import numpy as np
import pytest
import sympy as sp

from limitsurface.errors import InvalidParameterError
from limitsurface.poly import isotropic_model, monomial_basis, monomial_hessians
from limitsurface.solver import _sdp_reduction
from limitsurface.sos import build_constraints, isotropic_gram, lift, verify_certificate


@pytest.fixture(scope="module")
def sympy_system():
    """Coefficient equations of z^T Hess(H) z - y^T Q y, expanded by sympy."""
    F = sp.symbols("f0:3")
    z = sp.symbols("z0:3")
    basis = monomial_basis(4)
    a = sp.symbols("a0:15")
    q = sp.symbols("q0:45")
    iu = list(zip(*np.triu_indices(9)))
    Q = sp.zeros(9, 9)
    for s, (i, j) in zip(q, iu):
        Q[i, j] = Q[j, i] = s
    H = sum(c * F[0] ** i * F[1] ** j * F[2] ** k for c, (i, j, k) in zip(a, basis.exponents))
    zv = sp.Matrix(z)
    lhs = (zv.T * sp.hessian(H, F) * zv)[0]
    y = sp.Matrix([zi * fj for zi in z for fj in F])
    rhs = (y.T * Q * y)[0]
    poly = sp.Poly(sp.expand(lhs - rhs), *z, *F)
    unknowns = list(a) + list(q)
    rows = [[float(c.coeff(u)) for u in unknowns] for c in poly.coeffs()]
    return np.array(rows), iu


def test_constraint_count_and_rank_match_symbolic_expansion(sympy_system):
    M, _ = sympy_system
    sys = build_constraints(4)
    assert sys.n_raw == len(M) == 36
    assert np.linalg.matrix_rank(M) == sys.K == 36
    # same row space: stacking the two systems does not raise the rank
    _, _, _, C = _sdp_reduction(sys)
    assert np.linalg.matrix_rank(np.vstack([M, C])) == 36


def test_only_degree_four():
    for d in (2, 6):
        with pytest.raises(InvalidParameterError):
            build_constraints(d)


def test_cached():
    assert build_constraints(4) is build_constraints(4)


def test_indicator_matrices_symmetric():
    sys = build_constraints(4)
    assert np.array_equal(sys.A, np.transpose(sys.A, (0, 2, 1)))


def test_isotropic_gram_exact():
    sys = build_constraints(4)
    a = isotropic_model(4).coeffs
    Q = isotropic_gram()
    assert np.max(np.abs(sys.residuals(a, Q))) <= 1e-12
    assert np.linalg.eigvalsh(Q)[0] == pytest.approx(4.0)
    assert verify_certificate(sys, a, Q, epsilon=1.0).passed


def _identity_error(sys, a, Q, F, z):
    lhs = np.einsum("ni,nijk,k,nj->n", z, monomial_hessians(sys.basis, F), a, z)
    y = lift(F, z)
    rhs = np.einsum("ni,ij,nj->n", y, Q, y)
    return np.abs(lhs - rhs) / (1.0 + np.abs(rhs))


def test_random_feasible_pairs_satisfy_identity(rng):
    sys = build_constraints(4)
    Na, _, G, _ = _sdp_reduction(sys)
    F = rng.standard_normal((100, 3))
    z = rng.standard_normal((100, 3))
    worst = 0.0
    for w in rng.standard_normal((1000, Na.shape[1])):
        a = Na @ w
        Q = (G @ w).reshape(9, 9)
        worst = max(worst, _identity_error(sys, a, Q, F, z).max())
    assert worst <= 1e-8


def test_violating_pairs_are_exposed(rng):
    sys = build_constraints(4)
    Na, _, G, C = _sdp_reduction(sys)
    F = rng.standard_normal((100, 3))
    z = rng.standard_normal((100, 3))
    for _ in range(50):
        w = rng.standard_normal(Na.shape[1])
        a = Na @ w
        Q = (G @ w).reshape(9, 9)
        # shift along a direction normal to the feasible set
        k = rng.integers(len(C))
        d = C[k] / np.linalg.norm(C[k])
        a2 = a + 1e-3 * d[:15]
        u = d[15:]
        iu = np.triu_indices(9)
        D = np.zeros((9, 9))
        D[iu] = u
        D = D + D.T - np.diag(np.diag(D))
        Q2 = Q + 1e-3 * D
        assert _identity_error(sys, a2, Q2, F, z).max() >= 1e-6


def test_perturbed_gram_fails_verification(rng):
    sys = build_constraints(4)
    a = isotropic_model(4).coeffs
    P = rng.standard_normal((9, 9))
    P = P + P.T
    P *= 1e-3 / np.linalg.norm(P)
    report = verify_certificate(sys, a, isotropic_gram() + P)
    assert not report.passed
    assert report.max_constraint_residual > 1e-8
    assert any("constraint residual" in f for f in report.failures)


def test_zero_pair_fails_only_margin():
    sys = build_constraints(4)
    report = verify_certificate(sys, np.zeros(15), np.zeros((9, 9)), epsilon=1e-4)
    assert not report.passed
    assert report.max_identity_error == 0.0 and report.max_constraint_residual == 0.0
    assert len(report.failures) == 1 and "lambda_min" in report.failures[0]


def test_kronecker_norm_identity(rng):
    F = rng.standard_normal((200, 3))
    z = rng.standard_normal((200, 3))
    y = lift(F, z)
    assert np.allclose(np.sum(y**2, axis=1), np.sum(F**2, axis=1) * np.sum(z**2, axis=1))
    assert np.allclose(lift(F[0], z[0]), np.kron(z[0], F[0]))
