"""Stable two-point pushing.

A push about a center of rotation (COR) is stable when the friction load
needed to slide the object with that twist, ``invert(model, V)``, can be
balanced by the pusher, i.e. lies in the nonnegative span of the edge
wrenches of both contact friction cones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import InvalidParameterError
from .inversion import invert
from .poly import PolyModel

CONE_TOL = 1e-6


@dataclass(frozen=True)
class PushContact:
    p1: tuple
    p2: tuple
    normal: tuple  # inward unit normal, the direction the pusher presses
    mu_contact: float = 1.0

    def __post_init__(self):
        p1, p2, n = (np.asarray(v, dtype=float).reshape(2) for v in (self.p1, self.p2, self.normal))
        if np.allclose(p1, p2):
            raise InvalidParameterError("contact points must differ")
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise InvalidParameterError("contact normal must be a unit vector")
        if self.mu_contact < 0:
            raise InvalidParameterError("contact friction must be non-negative")


@dataclass(frozen=True)
class COR:
    """Rotation center with rotation sense, or a pure translation.

    ``sense=None`` means "classify both senses".  A translation is given by
    ``translation=(dx, dy)`` and ignores the center.
    """

    cx: float = 0.0
    cy: float = 0.0
    sense: int | None = 1
    translation: tuple | None = None

    @classmethod
    def pure_translation(cls, dx, dy) -> "COR":
        d = np.array([dx, dy], dtype=float)
        d /= np.linalg.norm(d)
        return cls(translation=(float(d[0]), float(d[1])), sense=1)


def cor_to_twist(cor: COR, rho: float) -> np.ndarray:
    """Unit generalized velocity of rigid rotation about ``cor``."""
    if cor.translation is not None:
        dx, dy = cor.translation
        V = np.array([dx, dy, 0.0])
    else:
        s = 1 if cor.sense is None else cor.sense
        # body origin velocity: omega z x (0 - c)
        V = s * np.array([cor.cy, -cor.cx, rho])
    return V / np.linalg.norm(V)


def composite_cone(contact: PushContact, rho: float) -> np.ndarray:
    """Generalized edge wrenches (rows) spanning the pusher's composite cone."""
    n = np.asarray(contact.normal, dtype=float)
    t = np.array([-n[1], n[0]])
    edges = [n] if contact.mu_contact == 0 else [n + contact.mu_contact * t, n - contact.mu_contact * t]
    rows = []
    for p in (contact.p1, contact.p2):
        p = np.asarray(p, dtype=float)
        for f in edges:
            rows.append([f[0], f[1], (p[0] * f[1] - p[1] * f[0]) / rho])
    return np.array(rows)


@dataclass(frozen=True)
class PushVerdict:
    stable: bool
    margin: float
    load: np.ndarray
    twist: np.ndarray


def is_stable_push(model: PolyModel, contact: PushContact, cor: COR, rho: float | None = None) -> PushVerdict:
    """Classify one (COR, sense); ``margin`` is the cone-projection residual."""
    rho = model.rho if rho is None else rho
    if not rho or rho <= 0:
        raise InvalidParameterError("a positive rho is required (model.rho is unset)")
    V = cor_to_twist(cor, rho)
    F = invert(model, V)
    W = composite_cone(contact, rho)
    _, residual = nnls(W.T, F / np.linalg.norm(F))
    return PushVerdict(residual <= CONE_TOL, float(residual), F, V)


def classify_cors(model: PolyModel, contact: PushContact, cors, rho: float | None = None) -> list:
    """Rows ``(cx, cy, sense, stable, margin)``; unspecified senses yield two rows."""
    rows = []
    for cor in cors:
        senses = (1, -1) if cor.sense is None and cor.translation is None else (cor.sense,)
        for s in senses:
            c = COR(cor.cx, cor.cy, s, cor.translation)
            v = is_stable_push(model, contact, c, rho)
            rows.append((cor.cx, cor.cy, s, v.stable, v.margin))
    return rows


def sample_cors(rng, n: int, half_width: float) -> list:
    """``n`` CORs uniform in a square centered at the origin, sense left open."""
    xy = rng.uniform(-half_width, half_width, size=(n, 2))
    return [COR(float(x), float(y), None) for x, y in xy]
