import numpy as np
import pytest
from scipy.optimize import linprog

from limitsurface.errors import InvalidParameterError
from limitsurface.poly import PolyModel, isotropic_model
from limitsurface.push import (
    COR,
    PushContact,
    classify_cors,
    composite_cone,
    cor_to_twist,
    is_stable_push,
    sample_cors,
)

SYMMETRIC = PushContact((-0.025, -0.1), (0.025, -0.1), (0.0, 1.0), 1.0)
FRICTIONLESS = PushContact((-0.025, -0.1), (0.025, -0.1), (0.0, 1.0), 0.0)


def in_cone_lp(W, F):
    """Cone membership by an LP feasibility problem (independent of NNLS)."""
    res = linprog(np.zeros(len(W)), A_eq=W.T, b_eq=F, bounds=[(0, None)] * len(W), method="highs")
    return res.status == 0


def test_cor_to_twist_examples():
    assert np.allclose(cor_to_twist(COR(0.0, 0.0, 1), 1.0), [0, 0, 1])
    # counterclockwise about a center far below: the body moves along -x
    far = cor_to_twist(COR(0.0, -1e6, 1), 1.0)
    assert np.allclose(far, [-1, 0, 0], atol=1e-5)
    assert np.allclose(cor_to_twist(COR(1.0, 0.0, 1), 1.0), np.array([0, -1, 1]) / np.sqrt(2))
    assert np.allclose(cor_to_twist(COR(1.0, 0.0, -1), 1.0), -np.array([0, -1, 1]) / np.sqrt(2))
    assert np.allclose(cor_to_twist(COR.pure_translation(0.0, 3.0), 0.2), [0, 1, 0])


def test_cor_twist_matches_rigid_motion(rng):
    # every point's velocity is perpendicular to its offset from the COR
    for cx, cy in rng.uniform(-1, 1, (20, 2)):
        V = cor_to_twist(COR(cx, cy, 1), 0.5)
        w = V[2] / 0.5
        for p in rng.uniform(-1, 1, (5, 2)):
            v = np.array([V[0] - w * p[1], V[1] + w * p[0]])
            assert abs(v @ (p - [cx, cy])) <= 1e-12


def test_composite_cone_geometry():
    W = composite_cone(SYMMETRIC, 0.2)
    assert W.shape == (4, 3)
    assert np.all(W[:, :2] @ np.array([0.0, 1.0]) > 0)
    assert in_cone_lp(W, np.array([0.0, 1.0, 0.0]))
    assert composite_cone(FRICTIONLESS, 0.2).shape == (2, 3)


def test_contact_validation():
    with pytest.raises(InvalidParameterError):
        PushContact((0, 0), (0, 0), (0, 1))
    with pytest.raises(InvalidParameterError):
        PushContact((0, 0), (1, 0), (0, 2))
    with pytest.raises(InvalidParameterError):
        PushContact((0, 0), (1, 0), (0, 1), -0.5)


def test_analytic_stable_case():
    model = isotropic_model(2, rho=0.2)
    v = is_stable_push(model, SYMMETRIC, COR.pure_translation(0.0, 1.0))
    assert v.stable and v.margin <= 1e-12
    assert np.allclose(v.load, [0, 1, 0])


def test_analytic_unstable_case():
    model = isotropic_model(2, rho=0.2)
    v = is_stable_push(model, FRICTIONLESS, COR(-0.025, -0.1, 1))
    assert not v.stable
    assert not in_cone_lp(composite_cone(FRICTIONLESS, 0.2), v.load)


def test_requires_rho():
    with pytest.raises(InvalidParameterError):
        is_stable_push(isotropic_model(2), SYMMETRIC, COR(0.0, 0.0, 1))


def test_nnls_agrees_with_lp(certified_models, rng):
    model = certified_models["legged-cvx"]
    contact = PushContact((-0.3, -0.5), (0.3, -0.5), (0.0, 1.0), 0.6)
    W = composite_cone(contact, model.rho)
    for cor in sample_cors(rng, 40, 1.0):
        for s in (1, -1):
            v = is_stable_push(model, contact, COR(cor.cx, cor.cy, s))
            if v.margin > 1e-4 or v.margin < 1e-9:
                assert v.stable == in_cone_lp(W, v.load / np.linalg.norm(v.load))


def test_sense_flip_negates_load(certified_models):
    model = certified_models["legged-quad"]
    a = is_stable_push(model, SYMMETRIC, COR(0.1, 0.3, 1))
    b = is_stable_push(model, SYMMETRIC, COR(0.1, 0.3, -1))
    assert np.allclose(a.load, -b.load, atol=1e-9)


def test_load_scale_invariance(certified_models, rng):
    cors = sample_cors(rng, 60, 0.2)
    for model in certified_models.values():
        scaled = model.with_load_scale(10.0 * model.load_scale)
        assert classify_cors(model, SYMMETRIC, cors, 0.2) == classify_cors(scaled, SYMMETRIC, cors, 0.2)


def test_classify_reports_both_senses():
    model = PolyModel.from_quadratic(np.diag([1.0, 1.0, 2.0]))
    rows = classify_cors(model, SYMMETRIC, [COR(0.0, 0.5, None), COR(0.0, 0.5, 1)], rho=0.2)
    assert [r[2] for r in rows] == [1, -1, 1]
    assert rows[0] == rows[2]
