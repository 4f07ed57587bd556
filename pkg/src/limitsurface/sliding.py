"""Free sliding of a rigid body on a uniform surface.

Body-frame dynamics in normalized coordinates: ``M dV/dt = -c * invert(V/|V|)``
with ``M = diag(m, m, I_z / rho^2)``; world pose follows from the twist.
Integrated with fixed-step classical RK4.  Sliding stops in finite time, and
the last step is shortened to land exactly on rest.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, LimitSurfaceError
from .inversion import invert
from .poly import PolyModel
from .wrench import BodyParams, GeneralizedVelocity, PoseSE2


@dataclass(frozen=True)
class GeneralizedMass:
    diagonal: tuple

    def __post_init__(self):
        if len(self.diagonal) != 3 or min(self.diagonal) <= 0:
            raise InvalidParameterError("generalized mass needs three positive entries")

    @classmethod
    def from_body(cls, body: BodyParams) -> "GeneralizedMass":
        return cls((body.mass, body.mass, body.inertia_z / body.rho**2))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.diagonal, dtype=float)


@dataclass(frozen=True)
class SlideState:
    pose: PoseSE2
    twist: GeneralizedVelocity
    time: float = 0.0


@dataclass
class Trajectory:
    t: np.ndarray
    pose: np.ndarray  # (n, 3) x, y, theta
    twist: np.ndarray  # (n, 3) body frame, normalized third component
    load: np.ndarray  # (n, 3) friction load in physical units
    rho: float
    at_rest: bool
    v_stop: float

    def __len__(self):
        return len(self.t)

    def kinetic_energy(self, mass: GeneralizedMass) -> np.ndarray:
        return 0.5 * np.einsum("ni,i,ni->n", self.twist, mass.array, self.twist)

    def state(self, i: int) -> SlideState:
        return SlideState(PoseSE2(*self.pose[i]), GeneralizedVelocity.from_array(self.twist[i]), float(self.t[i]))

    def rows(self):
        for t, (x, y, th), (vx, vy, vz), (fx, fy, fz) in zip(self.t, self.pose, self.twist, self.load):
            yield (t, x, y, th, vx, vy, vz / self.rho, fx, fy, fz)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "theta", "vx", "vy", "omega", "Fx", "Fy", "Fz"])
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])


def load_magnitude(model: PolyModel, body: BodyParams, units: str = "normalized") -> float:
    """Physical scale of the model's unit loads.

    Oracle-trained models live in units where total pressure and friction are
    one, so they scale with ``mu m g``; sensor-trained models are physical.
    """
    if units == "normalized":
        return model.load_scale * body.mu_support * body.mass * body.gravity
    if units == "physical":
        return model.load_scale
    raise InvalidParameterError(f"unknown load units {units!r}")


def simulate_sliding(model: PolyModel, body: BodyParams, state0: SlideState, step: float = 1e-3,
                     v_stop: float | None = None, units: str = "normalized", max_steps: int = 1_000_000,
                     coriolis: bool = False) -> Trajectory:
    """Integrate free sliding from ``state0`` until the object comes to rest.

    ``coriolis=True`` adds the rotating-frame term ``-omega z x v`` to the
    linear body-frame accelerations.
    """
    if step <= 0:
        raise InvalidParameterError("step must be positive")
    mass = GeneralizedMass.from_body(body).array
    rho = body.rho
    c = load_magnitude(model, body, units)
    V0 = np.array(state0.twist, dtype=float)
    v_stop = 1e-4 * np.linalg.norm(V0) if v_stop is None else v_stop

    def friction(V):
        n = np.linalg.norm(V)
        return c * invert(model, V / n)

    def rhs(y):
        th, V = y[2], y[3:]
        F = friction(V)
        acc = -F / mass
        if coriolis:
            w = V[2] / rho
            acc[0] += w * V[1]
            acc[1] -= w * V[0]
        ct, st = math.cos(th), math.sin(th)
        return np.array([ct * V[0] - st * V[1], st * V[0] + ct * V[1], V[2] / rho, *acc]), F

    y = np.array([state0.pose.x, state0.pose.y, state0.pose.theta, *V0])
    t = state0.time
    ts, ys, loads = [t], [y.copy()], []
    at_rest = False
    try:
        for _ in range(max_steps):
            V = y[3:]
            if np.linalg.norm(V) <= v_stop:
                y[3:] = 0.0
                ys[-1] = y.copy()
                loads.append(np.zeros(3))
                at_rest = True
                break
            k1, F = rhs(y)
            loads.append(F)
            # time to rest if the current deceleration held: 2E / dissipated power
            tau = float(V @ (mass * V)) / float(F @ V)
            if tau <= step:
                a = k1[3:]
                yn = y.copy()
                yn[:3] += k1[:3] * tau + 0.5 * tau**2 * _pose_accel(y, a, rho)
                yn[3:] = 0.0
                t += tau
                ts.append(t)
                ys.append(yn)
                loads.append(np.zeros(3))
                y = yn
                at_rest = True
                break
            k2, _ = rhs(y + 0.5 * step * k1)
            k3, _ = rhs(y + 0.5 * step * k2)
            k4, _ = rhs(y + step * k3)
            y = y + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += step
            ts.append(t)
            ys.append(y.copy())
        else:
            loads.append(friction(y[3:]))
    except LimitSurfaceError as exc:
        raise LimitSurfaceError(f"simulation aborted at t={t:.6g}: {exc}") from exc
    ys = np.array(ys)
    return Trajectory(np.array(ts), ys[:, :3], ys[:, 3:], np.array(loads), rho, at_rest, v_stop)


def _pose_accel(y, a, rho):
    # second derivative of (x, y, theta) for constant body-frame acceleration a
    th, V = y[2], y[3:]
    w = V[2] / rho
    ct, st = math.cos(th), math.sin(th)
    ax = ct * a[0] - st * a[1] + w * (-st * V[0] - ct * V[1])
    ay = st * a[0] + ct * a[1] + w * (ct * V[0] - st * V[1])
    return np.array([ax, ay, a[2] / rho])


def final_twist_direction(traj: Trajectory) -> np.ndarray:
    """Unit twist at the last sample still moving faster than ``v_stop``."""
    if not traj.at_rest:
        raise LimitSurfaceError("trajectory never came to rest")
    speed = np.linalg.norm(traj.twist, axis=1)
    moving = np.flatnonzero(speed > traj.v_stop)
    if len(moving) == 0:
        raise LimitSurfaceError("trajectory starts at rest")
    V = traj.twist[moving[-1]]
    return V / np.linalg.norm(V)
