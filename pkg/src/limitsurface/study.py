"""Simulation study: angular test error vs. training-set size, with 95% CIs."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidParameterError, LimitSurfaceError
from .identify import DEFAULT_EPSILON, DEFAULT_EPSILON_GRID, DEFAULT_GRID, KINDS, FitConfig, fit
from .metrics import angular_error, confidence_halfwidth
from .oracle import add_noise, gen_dataset, gen_legged_support, gen_uniform_support, split_dataset

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
SUPPORTS = ("legged", "ring", "square")


@dataclass(frozen=True)
class StudyConfig:
    support: str = "legged"
    n_trials: int = 50
    n_data: int = 150
    fractions: tuple = (0.5, 0.2, 0.3)
    train_sizes: tuple = (7, 15, 22, 45)
    sigma: float = 0.1
    kinds: tuple = KINDS
    seed: int = 0
    grid: tuple = DEFAULT_GRID
    epsilon: float = DEFAULT_EPSILON
    epsilon_grid: tuple | None = DEFAULT_EPSILON_GRID

    def __post_init__(self):
        if self.support not in SUPPORTS:
            raise InvalidParameterError(f"support must be one of {SUPPORTS}")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise InvalidParameterError("split fractions must sum to 1")
        pool = self.n_data - round(self.fractions[0] * self.n_data) - round(self.fractions[1] * self.n_data)
        if max(self.train_sizes) > pool:
            raise InvalidParameterError(f"train sizes exceed the training pool of {pool}")
        if self.n_trials < 1:
            raise InvalidParameterError("need at least one trial")


def run_trial(cfg: StudyConfig, trial: int) -> dict:
    """Test errors ``{kind: {size: degrees or None}}`` for one seeded trial."""
    rng = np.random.default_rng([cfg.seed, trial])
    if cfg.support == "legged":
        support = gen_legged_support(rng)
        protocol = "legged"
    else:
        support = gen_uniform_support(cfg.support, 360 if cfg.support == "ring" else 400)
        protocol = "uniform"
    ds = gen_dataset(support, protocol, cfg.n_data, rng)
    plan = split_dataset(ds, cfg.fractions, cfg.train_sizes, rng)
    pool = add_noise(ds.subset(plan.pool), cfg.sigma, rng)
    val = add_noise(ds.subset(plan.validation), cfg.sigma, rng)
    test = ds.subset(plan.test)
    out = {}
    for kind in cfg.kinds:
        fc = FitConfig(kind=kind, epsilon=cfg.epsilon, cv_grid=tuple(cfg.grid), epsilon_grid=cfg.epsilon_grid)
        out[kind] = {}
        for size in sorted(cfg.train_sizes):
            try:
                res = fit(pool.subset(np.arange(size)), val, fc)
                out[kind][size] = angular_error(res.model, test)
            except LimitSurfaceError as exc:
                log.warning("trial %d %s size %d failed: %s", trial, kind, size, exc)
                out[kind][size] = None
    return out


def _run_trial_args(args):
    return run_trial(*args)


@dataclass
class StudyReport:
    config: StudyConfig
    results: dict = field(default_factory=dict)  # kind -> size -> summary

    def mean(self, kind, size) -> float:
        return self.results[kind][size]["mean"]

    def halfwidth(self, kind, size) -> float:
        return self.results[kind][size]["halfwidth"]

    def to_json(self) -> dict:
        cfg = asdict(self.config)
        cfg["grid"] = [list(g) for g in self.config.grid]
        return {
            "format_version": FORMAT_VERSION,
            "config": cfg,
            "results": {k: {str(s): v for s, v in sizes.items()} for k, sizes in self.results.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def summarize(cfg: StudyConfig, trials: list) -> StudyReport:
    results = {}
    for kind in cfg.kinds:
        results[kind] = {}
        for size in sorted(cfg.train_sizes):
            raw = [t[kind][size] for t in trials]
            ok = [v for v in raw if v is not None]
            results[kind][size] = {
                "mean": float(np.mean(ok)) if ok else None,
                "halfwidth": confidence_halfwidth(ok),
                "n": len(ok),
                "failures": len(raw) - len(ok),
                "values": raw,
            }
    return StudyReport(cfg, results)


def run_study(cfg: StudyConfig, workers: int = 1) -> StudyReport:
    """Run every trial (optionally across processes) and aggregate.

    Each trial seeds its own generator from ``(seed, trial)``, so the report
    does not depend on ``workers``.
    """
    jobs = [(cfg, t) for t in range(cfg.n_trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(_run_trial_args, jobs))
    else:
        trials = [run_trial(*j) for j in jobs]
    return summarize(cfg, trials)
