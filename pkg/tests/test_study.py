import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitsurface.errors import InvalidParameterError
from limitsurface.metrics import angular_error, angular_errors, confidence_halfwidth
from limitsurface.oracle import Dataset, SupportConfig, load_for_twist
from limitsurface.poly import PolyModel, isotropic_model, monomial_basis
from limitsurface.study import StudyConfig, StudyReport, run_study, run_trial, summarize

from conftest import random_unit

TINY = dict(n_trials=2, n_data=40, train_sizes=(5, 8), grid=((1.0, 1.0), (10.0, 10.0)), epsilon_grid=(1e-4, 0.5))


def test_metric_examples(rng):
    sphere = isotropic_model(2)
    V = random_unit(rng, 20)
    assert angular_error(sphere, Dataset(V, V)) == pytest.approx(0.0, abs=1e-12)
    ortho = np.cross(V, random_unit(rng, 20))
    ortho /= np.linalg.norm(ortho, axis=1, keepdims=True)
    assert angular_error(sphere, Dataset(ortho, V)) == pytest.approx(90.0)
    # single point support under translation: loads are parallel to twists
    cfg = SupportConfig([[0.0, 0.0]], [1.0])
    t = rng.uniform(0, 2 * np.pi, 50)
    Vt = np.column_stack([np.cos(t), np.sin(t), np.zeros(50)])
    ds = Dataset([load_for_twist(cfg, v) for v in Vt], Vt)
    assert angular_error(sphere, ds) == pytest.approx(0.0, abs=1e-6)


def test_undefined_predictions_count_as_ninety_degrees():
    model = PolyModel(monomial_basis(4), np.zeros(15))
    deg, undefined = angular_errors(model, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[1.0, 0.0, 0.0]] * 2)
    assert np.all(undefined) and np.all(deg == 90.0)
    with pytest.raises(ValueError):
        angular_error(model, Dataset(np.zeros((0, 3)), np.zeros((0, 3))))


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_metric_bounds_and_negation(seed):
    rng = np.random.default_rng(seed)
    model = PolyModel(monomial_basis(4), rng.standard_normal(15))
    F = rng.standard_normal((30, 3))
    V = random_unit(rng, 30)
    d = angular_error(model, Dataset(F, V))
    assert 0.0 <= d <= 180.0
    assert angular_error(model, Dataset(-F, -V)) == pytest.approx(d, abs=1e-9)


def test_confidence_halfwidth_closed_form(rng):
    v = rng.standard_normal(50) + 10
    direct = 1.96 * math.sqrt(sum((x - v.mean()) ** 2 for x in v) / 49) / math.sqrt(50)
    assert confidence_halfwidth(v) == pytest.approx(direct, rel=1e-12)
    assert confidence_halfwidth([3.0]) == 0.0


@pytest.mark.parametrize("kw", [
    {"support": "disk"},
    {"fractions": (0.5, 0.3, 0.3)},
    {"train_sizes": (7, 50)},
    {"n_trials": 0},
])
def test_config_validation(kw):
    with pytest.raises(InvalidParameterError):
        StudyConfig(**kw)


def test_trial_structure():
    cfg = StudyConfig(support="ring", **TINY)
    out = run_trial(cfg, 0)
    assert set(out) == {"poly4-cvx", "poly4", "quad"}
    assert all(set(v) == {5, 8} for v in out.values())
    assert all(0 <= x <= 180 for v in out.values() for x in v.values())


def test_study_deterministic_and_worker_independent():
    cfg = StudyConfig(support="legged", seed=3, **TINY)
    serial = run_study(cfg).dumps()
    assert run_study(cfg).dumps() == serial
    assert run_study(cfg, workers=2).dumps() == serial
    d = json.loads(serial)
    assert d["format_version"] == 1
    assert d["config"]["epsilon_grid"] == [1e-4, 0.5]
    entry = d["results"]["quad"]["8"]
    assert entry["n"] == 2 and len(entry["values"]) == 2
    assert entry["halfwidth"] == pytest.approx(confidence_halfwidth(entry["values"]))


def test_summary_excludes_failures():
    cfg = StudyConfig(support="ring", kinds=("quad",), train_sizes=(7,), n_trials=3)
    trials = [{"quad": {7: 10.0}}, {"quad": {7: None}}, {"quad": {7: 14.0}}]
    rep = summarize(cfg, trials)
    assert isinstance(rep, StudyReport)
    assert rep.mean("quad", 7) == 12.0
    assert rep.results["quad"][7]["failures"] == 1 and rep.results["quad"][7]["n"] == 2
    assert rep.halfwidth("quad", 7) == pytest.approx(confidence_halfwidth([10.0, 14.0]))
