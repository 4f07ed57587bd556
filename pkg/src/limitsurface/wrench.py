"""Normalized planar wrenches and twists.

Torque and angular rate are rescaled by a characteristic length ``rho`` so
that all three components share units: ``fz = tau / rho`` and
``vz = omega * rho``.  With the same ``rho`` on both sides the dot product is
the physical dissipated power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


def _check_finite(*values):
    if not all(math.isfinite(v) for v in values):
        raise InvalidParameterError(f"non-finite component in {values}")


@dataclass(frozen=True)
class GeneralizedLoad:
    fx: float
    fy: float
    fz: float

    def __post_init__(self):
        _check_finite(self.fx, self.fy, self.fz)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.fx, self.fy, self.fz], dtype=dtype)

    def __iter__(self):
        return iter((self.fx, self.fy, self.fz))

    @classmethod
    def from_array(cls, arr) -> "GeneralizedLoad":
        x, y, z = (float(c) for c in np.asarray(arr, dtype=float).reshape(3))
        return cls(x, y, z)


@dataclass(frozen=True)
class GeneralizedVelocity:
    vx: float
    vy: float
    vz: float

    def __post_init__(self):
        _check_finite(self.vx, self.vy, self.vz)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.vx, self.vy, self.vz], dtype=dtype)

    def __iter__(self):
        return iter((self.vx, self.vy, self.vz))

    @classmethod
    def from_array(cls, arr) -> "GeneralizedVelocity":
        x, y, z = (float(c) for c in np.asarray(arr, dtype=float).reshape(3))
        return cls(x, y, z)

    def norm(self) -> float:
        return math.sqrt(self.vx**2 + self.vy**2 + self.vz**2)

    def direction(self) -> "GeneralizedVelocity":
        """Unit twist along this one. Raises for the zero twist."""
        n = self.norm()
        if n == 0.0:
            raise InvalidParameterError("zero twist has no direction")
        if n == 1.0:
            return self
        return GeneralizedVelocity(self.vx / n, self.vy / n, self.vz / n)


@dataclass(frozen=True)
class BodyParams:
    mass: float
    inertia_z: float
    rho: float | None = None
    mu_support: float = 1.0
    gravity: float = 9.81

    def __post_init__(self):
        if not (self.mass > 0 and self.inertia_z > 0):
            raise InvalidParameterError("mass and inertia_z must be positive")
        if self.rho is None:
            object.__setattr__(self, "rho", self.radius_of_gyration)
        if not self.rho > 0:
            raise InvalidParameterError("rho must be positive")
        if self.mu_support < 0 or not self.gravity > 0:
            raise InvalidParameterError("mu_support must be >= 0 and gravity > 0")

    @property
    def radius_of_gyration(self) -> float:
        return math.sqrt(self.inertia_z / self.mass)


@dataclass(frozen=True)
class PoseSE2:
    """World-frame pose; ``theta`` is never wrapped."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0


def embed_wrench(fx, fy, tau, rho) -> GeneralizedLoad:
    if not rho > 0:
        raise InvalidParameterError(f"rho must be positive, got {rho}")
    return GeneralizedLoad(float(fx), float(fy), float(tau) / rho)


def embed_twist(vx, vy, omega, rho) -> GeneralizedVelocity:
    if not rho > 0:
        raise InvalidParameterError(f"rho must be positive, got {rho}")
    return GeneralizedVelocity(float(vx), float(vy), float(omega) * rho)


def power(F, V) -> float:
    return float(np.dot(np.asarray(F, dtype=float), np.asarray(V, dtype=float)))


def unit(v, tol=0.0) -> np.ndarray:
    """Normalize a 3-vector (or rows of an array)."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n <= tol):
        raise InvalidParameterError("cannot normalize a zero vector")
    return v / n
