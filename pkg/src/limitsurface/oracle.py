"""Point-support Coulomb friction oracle and simulated dataset generation.

Loads are computed in the normalized embedding of :mod:`limitsurface.wrench`
with the object's frame origin at the center of pressure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FacetDegeneracyError, InvalidParameterError

DEGENERACY_TOL = 1e-12
MIN_POINT_SEPARATION = 1e-6


@dataclass(frozen=True)
class SupportPoint:
    rx: float
    ry: float
    pressure: float

    def __post_init__(self):
        if self.pressure < 0:
            raise InvalidParameterError("support pressure must be non-negative")


@dataclass(frozen=True)
class SupportConfig:
    """Support points with pressures summing to one and COP at the origin."""

    positions: np.ndarray  # (n, 2)
    pressures: np.ndarray  # (n,)
    mu: float = 1.0
    rho: float = 1.0
    kind: str = "custom"

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        p = np.asarray(self.pressures, dtype=float).reshape(-1)
        if len(pos) != len(p) or len(p) == 0:
            raise InvalidParameterError("positions and pressures must match and be non-empty")
        if np.any(p < 0):
            raise InvalidParameterError("support pressure must be non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InvalidParameterError(f"pressures must sum to 1, got {p.sum()!r}")
        cop = p @ pos
        if np.any(np.abs(cop) > 1e-12):
            raise InvalidParameterError(f"center of pressure must be the origin, got {cop}")
        if not self.rho > 0 or self.mu < 0:
            raise InvalidParameterError("rho must be positive and mu non-negative")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "pressures", p)

    @property
    def points(self) -> list[SupportPoint]:
        return [SupportPoint(x, y, w) for (x, y), w in zip(self.positions, self.pressures)]

    @classmethod
    def from_points(cls, positions, pressures, mu=1.0, rho=None, kind="custom"):
        """Normalize pressures, move the origin to the COP, default rho.

        The default ``rho`` is the pressure-weighted radius of gyration about
        the COP.
        """
        pos = np.asarray(positions, dtype=float).reshape(-1, 2)
        p = np.asarray(pressures, dtype=float).reshape(-1)
        if np.any(p < 0) or p.sum() <= 0:
            raise InvalidParameterError("pressures must be non-negative with positive sum")
        p = p / p.sum()
        pos = pos - p @ pos
        # one more pass absorbs the rounding of the first subtraction
        pos = pos - p @ pos
        if rho is None:
            rho = math.sqrt(float(p @ np.sum(pos**2, axis=1)))
        return cls(pos, p, mu=mu, rho=rho, kind=kind)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "points": [[float(x), float(y), float(w)] for (x, y), w in zip(self.positions, self.pressures)],
        }


@dataclass(frozen=True)
class DataPair:
    F: np.ndarray
    V: np.ndarray


@dataclass
class Dataset:
    """Force/motion pairs stored column-wise as two (n, 3) arrays."""

    F: np.ndarray
    V: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.F = np.asarray(self.F, dtype=float).reshape(-1, 3)
        self.V = np.asarray(self.V, dtype=float).reshape(-1, 3)
        if self.F.shape != self.V.shape:
            raise InvalidParameterError("F and V must have the same number of rows")

    def __len__(self):
        return len(self.F)

    @property
    def pairs(self) -> list[DataPair]:
        return [DataPair(f, v) for f, v in zip(self.F, self.V)]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        return Dataset(self.F[idx], self.V[idx], dict(self.metadata))

    def scaled(self, load_factor: float) -> "Dataset":
        return Dataset(self.F * load_factor, self.V.copy(), dict(self.metadata))


def _point_velocities(cfg: SupportConfig, V) -> np.ndarray:
    omega = V[2] / cfg.rho
    r = cfg.positions
    return np.column_stack([V[0] - omega * r[:, 1], V[1] + omega * r[:, 0]])


def _loads_from_forces(cfg: SupportConfig, forces, positions=None) -> np.ndarray:
    r = cfg.positions if positions is None else positions
    torque = r[:, 0] * forces[:, 1] - r[:, 1] * forces[:, 0]
    return np.array([forces[:, 0].sum(), forces[:, 1].sum(), torque.sum() / cfg.rho])


def load_for_twist(cfg: SupportConfig, V, *, skip=None) -> np.ndarray:
    """Generalized friction load transmitted while sliding with twist ``V``.

    Every point contributes ``mu * p_i`` along its own velocity direction.
    ``skip`` excludes one point index (used for facet sampling).
    """
    V = np.asarray(V, dtype=float)
    vnorm = np.linalg.norm(V)
    if vnorm == 0:
        raise InvalidParameterError("twist must be nonzero")
    v = _point_velocities(cfg, V)
    speed = np.linalg.norm(v, axis=1)
    active = cfg.pressures > 0
    if skip is not None:
        active = active.copy()
        active[skip] = False
    if np.any(speed[active] < DEGENERACY_TOL * vnorm):
        raise FacetDegeneracyError(
            "a supporting point is (nearly) stationary under this twist; use sample_facet"
        )
    speed = np.where(active, speed, 1.0)
    forces = (cfg.mu * cfg.pressures * active / speed)[:, None] * v
    return _loads_from_forces(cfg, forces)


def pivot_twist(cfg: SupportConfig, pivot_index: int, sense: int) -> np.ndarray:
    """Unit twist of rotation about a support point."""
    if sense not in (1, -1):
        raise InvalidParameterError("sense must be +1 or -1")
    cx, cy = cfg.positions[pivot_index]
    V = sense * np.array([cy, -cx, cfg.rho])
    return V / np.linalg.norm(V)


def sample_facet(cfg: SupportConfig, pivot_index: int, sense: int, rng, pivot_force=None) -> DataPair:
    """Draw one (F, V) pair from the facet generated by rotating about a point.

    The pivot's friction is indeterminate: a force uniform over the disk of
    radius ``mu * p_pivot``.  ``pivot_force`` overrides the draw.
    """
    if len(cfg.pressures) < 3:
        raise InvalidParameterError("facet sampling needs at least 3 support points")
    p_piv = cfg.pressures[pivot_index]
    if p_piv <= 0:
        raise FacetDegeneracyError(f"pivot {pivot_index} carries no pressure")
    V = pivot_twist(cfg, pivot_index, sense)
    F = load_for_twist(cfg, V, skip=pivot_index)
    if pivot_force is None:
        radius = cfg.mu * p_piv * math.sqrt(rng.uniform())
        angle = rng.uniform(0.0, 2.0 * math.pi)
        f = radius * np.array([math.cos(angle), math.sin(angle)])
    else:
        f = np.asarray(pivot_force, dtype=float)
    r = cfg.positions[pivot_index]
    F = F + np.array([f[0], f[1], (r[0] * f[1] - r[1] * f[0]) / cfg.rho])
    return DataPair(F, V)


def gen_uniform_support(kind: str, n_points: int, mu=1.0, rho=None) -> SupportConfig:
    """Equal-pressure support: ``ring`` on the unit circle or ``square`` grid over [-1, 1]^2."""
    if n_points < 3:
        raise InvalidParameterError("need at least 3 support points")
    if kind == "ring":
        t = 2.0 * np.pi * np.arange(n_points) / n_points
        pos = np.column_stack([np.cos(t), np.sin(t)])
    elif kind == "square":
        side = int(round(math.sqrt(n_points)))
        if side * side != n_points:
            raise InvalidParameterError("square support needs a perfect-square point count")
        c = -1.0 + (2.0 * np.arange(side) + 1.0) / side
        gx, gy = np.meshgrid(c, c, indexing="ij")
        pos = np.column_stack([gx.ravel(), gy.ravel()])
    else:
        raise InvalidParameterError(f"unknown uniform support kind {kind!r}")
    return SupportConfig.from_points(pos, np.ones(n_points), mu=mu, rho=rho, kind=kind)


def gen_legged_support(rng, mu=1.0, rho=None) -> SupportConfig:
    """Three points on the unit circle with pressures uniform on the simplex."""
    while True:
        t = rng.uniform(0.0, 2.0 * math.pi, size=3)
        pos = np.column_stack([np.cos(t), np.sin(t)])
        gaps = [np.linalg.norm(pos[i] - pos[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
        pressures = rng.dirichlet(np.ones(3))
        if min(gaps) >= MIN_POINT_SEPARATION:
            return SupportConfig.from_points(pos, pressures, mu=mu, rho=rho, kind="legged")


def sample_sphere(rng, n: int) -> np.ndarray:
    g = rng.standard_normal((n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _uniform_pairs(cfg, n, rng):
    F = np.empty((n, 3))
    V = np.empty((n, 3))
    for i in range(n):
        while True:
            v = sample_sphere(rng, 1)[0]
            try:
                F[i] = load_for_twist(cfg, v)
            except FacetDegeneracyError:
                continue
            V[i] = v
            break
    return F, V


def gen_dataset(cfg: SupportConfig, protocol: str, n: int, rng, seed=None) -> Dataset:
    """Simulated force/motion dataset.

    ``uniform``: ``n`` isotropic twists paired with their loads.
    ``legged``: ``n // 2`` facet samples round-robin over every
    (pivot, sense) facet, the remainder as in ``uniform``.
    """
    if n < 2:
        raise InvalidParameterError("dataset needs at least 2 pairs")
    if protocol == "uniform":
        F, V = _uniform_pairs(cfg, n, rng)
    elif protocol == "legged":
        pivots = np.flatnonzero(cfg.pressures > 0)
        if len(pivots) == 0 or len(cfg.pressures) < 3:
            raise FacetDegeneracyError("configuration has no facets to sample")
        facets = [(int(i), s) for i in pivots for s in (1, -1)]
        n_facet = n // 2
        pairs = [sample_facet(cfg, *facets[k % len(facets)], rng) for k in range(n_facet)]
        Fu, Vu = _uniform_pairs(cfg, n - n_facet, rng)
        F = np.vstack([np.array([p.F for p in pairs]).reshape(-1, 3), Fu])
        V = np.vstack([np.array([p.V for p in pairs]).reshape(-1, 3), Vu])
    else:
        raise InvalidParameterError(f"unknown protocol {protocol!r}")
    meta = {
        "protocol": protocol,
        "rho": cfg.rho,
        "mu": cfg.mu,
        "sigma": 0.0,
        "seed": seed,
        "support": cfg.to_json(),
    }
    return Dataset(F, V, meta)


def add_noise(ds: Dataset, sigma: float, rng, seed=None) -> Dataset:
    """Gaussian noise on every component of F and V; V is renormalized."""
    if sigma < 0:
        raise InvalidParameterError("sigma must be non-negative")
    meta = dict(ds.metadata, sigma=float(sigma), noise_seed=seed)
    if sigma == 0:
        return Dataset(ds.F.copy(), ds.V.copy(), meta)
    F = ds.F + sigma * rng.standard_normal(ds.F.shape)
    V = np.empty_like(ds.V)
    for i, v in enumerate(ds.V):
        while True:
            w = v + sigma * rng.standard_normal(3)
            n = np.linalg.norm(w)
            if n > 1e-9:
                V[i] = w / n
                break
    return Dataset(F, V, meta)


@dataclass(frozen=True)
class SplitPlan:
    test: np.ndarray
    validation: np.ndarray
    pool: np.ndarray
    train: dict  # size -> indices, nested prefixes of ``pool``


def split_dataset(ds_or_n, fractions=(0.5, 0.2, 0.3), train_sizes=(7, 15, 22, 45), rng=None) -> SplitPlan:
    """Disjoint test / validation / training-pool index sets.

    Training subsets are prefixes of one shuffled pool, so smaller sets are
    contained in larger ones.
    """
    n = ds_or_n if isinstance(ds_or_n, int) else len(ds_or_n)
    if len(fractions) != 3 or abs(sum(fractions) - 1.0) > 1e-9 or min(fractions) < 0:
        raise InvalidParameterError("fractions must be three non-negative numbers summing to 1")
    n_test = int(round(fractions[0] * n))
    n_val = int(round(fractions[1] * n))
    n_pool = n - n_test - n_val
    if any(s > n_pool or s < 1 for s in train_sizes):
        raise InvalidParameterError(f"train sizes {tuple(train_sizes)} exceed the pool of {n_pool}")
    perm = rng.permutation(n) if rng is not None else np.arange(n)
    test, val, pool = perm[:n_test], perm[n_test : n_test + n_val], perm[n_test + n_val :]
    train = {int(s): pool[: int(s)] for s in sorted(train_sizes)}
    return SplitPlan(test, val, pool, train)

