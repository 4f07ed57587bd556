"""Angular prediction error and confidence intervals."""

from __future__ import annotations

import math

import numpy as np

from .poly import PolyModel, gradient


def angular_errors(model: PolyModel, F, V):
    """Per-pair angle (degrees) between predicted and measured twist directions.

    Pairs whose gradient vanishes get 90 degrees; the boolean mask of such
    pairs is returned alongside.
    """
    g = gradient(model, np.asarray(F, dtype=float).reshape(-1, 3))
    n = np.linalg.norm(g, axis=1)
    undefined = ~(np.isfinite(n) & (n > 0))
    pred = g / np.where(undefined, 1.0, n)[:, None]
    V = np.asarray(V, dtype=float).reshape(-1, 3)
    # same angle as arccos of the dot product, without its loss of precision near 0 and 180 degrees
    cos = np.einsum("ij,ij->i", pred, V)
    sin = np.linalg.norm(np.cross(pred, V), axis=1)
    deg = np.degrees(np.arctan2(sin, cos))
    deg[undefined] = 90.0
    return deg, undefined


def angular_error(model: PolyModel, data) -> float:
    """Mean angular error over a dataset, in degrees."""
    if len(data) == 0:
        raise ValueError("angular error of an empty dataset")
    deg, _ = angular_errors(model, data.F, data.V)
    return float(deg.mean())


def confidence_halfwidth(values, z=1.96) -> float:
    """``z * sd / sqrt(n)`` with the sample (n - 1) standard deviation."""
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return 0.0
    return float(z * v.std(ddof=1) / math.sqrt(len(v)))
