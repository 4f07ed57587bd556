import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from limitsurface.errors import InvalidParameterError
from limitsurface.wrench import (
    BodyParams,
    GeneralizedLoad,
    GeneralizedVelocity,
    embed_twist,
    embed_wrench,
    power,
    unit,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
positive = st.floats(1e-3, 1e3)


@pytest.mark.parametrize("args, expected", [
    ((1, 0, 0, 2), (1, 0, 0)),
    ((0, 0, 3, 1.5), (0, 0, 2)),
    ((1, 1, 1, 1), (1, 1, 1)),
])
def test_embed_wrench(args, expected):
    assert tuple(embed_wrench(*args)) == expected


@pytest.mark.parametrize("args, expected", [
    ((0, 0, 2, 0.5), (0, 0, 1)),
    ((1, -1, 0, 3), (1, -1, 0)),
    ((1, 0, 1, 1), (1, 0, 1)),
])
def test_embed_twist(args, expected):
    assert tuple(embed_twist(*args)) == expected


@pytest.mark.parametrize("rho", [0.0, -1.0])
def test_embedding_rejects_bad_rho(rho):
    with pytest.raises(InvalidParameterError):
        embed_wrench(1, 0, 0, rho)
    with pytest.raises(InvalidParameterError):
        embed_twist(1, 0, 0, rho)


@pytest.mark.parametrize("F, V, expected", [
    ((1, 0, 0), (1, 0, 0), 1.0),
    ((0, 1, 0), (1, 0, 0), 0.0),
    ((1, 2, 3), (3, 2, 1), 10.0),
])
def test_power(F, V, expected):
    assert power(GeneralizedLoad(*F), GeneralizedVelocity(*V)) == expected


@given(finite, finite, finite, finite, finite, finite, positive)
def test_physical_power_is_rho_invariant(fx, fy, tau, vx, vy, w, rho):
    p = power(embed_wrench(fx, fy, tau, rho), embed_twist(vx, vy, w, rho))
    assert p == pytest.approx(fx * vx + fy * vy + tau * w, rel=1e-12, abs=1e-9)


@given(finite, finite, finite)
def test_direction_is_unit_and_idempotent(x, y, z):
    v = GeneralizedVelocity(x, y, z)
    if v.norm() == 0:
        with pytest.raises(InvalidParameterError):
            v.direction()
        return
    d = v.direction()
    assert abs(d.norm() - 1.0) <= 1e-12
    dd = d.direction()
    assert np.max(np.abs(np.array(dd) - np.array(d))) <= 1e-15


def test_non_finite_components_rejected():
    with pytest.raises(InvalidParameterError):
        GeneralizedLoad(1.0, math.nan, 0.0)
    with pytest.raises(InvalidParameterError):
        GeneralizedVelocity(math.inf, 0.0, 0.0)


def test_body_params_default_rho_is_radius_of_gyration():
    body = BodyParams(mass=2.0, inertia_z=0.08)
    assert body.rho == pytest.approx(0.2)


@pytest.mark.parametrize("kw", [
    {"mass": 0.0, "inertia_z": 1.0},
    {"mass": 1.0, "inertia_z": -1.0},
    {"mass": 1.0, "inertia_z": 1.0, "rho": 0.0},
    {"mass": 1.0, "inertia_z": 1.0, "mu_support": -0.1},
    {"mass": 1.0, "inertia_z": 1.0, "gravity": 0.0},
])
def test_body_params_validation(kw):
    with pytest.raises(InvalidParameterError):
        BodyParams(**kw)


def test_unit_rows_and_zero():
    out = unit([[3.0, 4.0, 0.0], [0.0, 0.0, 2.0]])
    assert np.allclose(out, [[0.6, 0.8, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(InvalidParameterError):
        unit([0.0, 0.0, 0.0])
