import numpy as np
import pytest

from limitsurface.identify import FitConfig, fit
from limitsurface.oracle import gen_dataset, gen_legged_support, gen_uniform_support, split_dataset


def random_unit(rng, n=None):
    g = rng.standard_normal((n or 1, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g if n else g[0]


def _fit_on(support, protocol, kind, seed, size=45):
    rng = np.random.default_rng(seed)
    cfg = support(rng) if callable(support) else support
    ds = gen_dataset(cfg, protocol, 150, rng)
    plan = split_dataset(ds, rng=rng)
    res = fit(ds.subset(plan.train[size]), ds.subset(plan.validation), FitConfig(kind=kind))
    return res, ds.subset(plan.test), cfg


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture(scope="session")
def legged_cvx():
    return _fit_on(gen_legged_support, "legged", "poly4-cvx", seed=3)


@pytest.fixture(scope="session")
def legged_quad():
    return _fit_on(gen_legged_support, "legged", "quad", seed=3)


@pytest.fixture(scope="session")
def ring_cvx():
    return _fit_on(gen_uniform_support("ring", 360), "uniform", "poly4-cvx", seed=11)


@pytest.fixture(scope="session")
def certified_models(legged_cvx, legged_quad, ring_cvx):
    return {"legged-cvx": legged_cvx[0].model, "legged-quad": legged_quad[0].model, "ring-cvx": ring_cvx[0].model}


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance verdict; returns it so tests can assert on it."""

    def record(number, title, passed, detail=""):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {title}  [{detail}]"
        _CRITERIA[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
