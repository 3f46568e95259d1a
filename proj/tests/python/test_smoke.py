import json

import numpy as np
import pytest

import latent_ut as ut


def bimodal(n=10000, seed=1):
    rng = np.random.default_rng(seed)
    left = rng.random(n) < 0.5
    return np.where(left, rng.normal(-3.0, 0.5, n), rng.normal(3.0, 0.5, n))


def test_kernel_and_bandwidth():
    assert ut.gaussian_kernel(1.0) == pytest.approx(0.241970724519143, abs=1e-12)
    x = np.random.default_rng(0).normal(size=500)
    assert ut.scott_bandwidth(2.0 * x) == pytest.approx(2.0 * ut.scott_bandwidth(x), rel=1e-12)


def test_density_integrates_to_one():
    grid, density, h = ut.estimate_density(np.random.default_rng(2).normal(size=2000))
    assert len(grid) == 1024 and h > 0
    assert np.trapezoid(density, grid) == pytest.approx(1.0, abs=0.01)


def test_fit_apply_invert_round_trip():
    z = np.column_stack([np.random.default_rng(3).normal(size=10000), bimodal()])
    model = ut.fit(z)
    assert [d.k for d in model.dimensions] == [1, 2]
    t = ut.apply(model, z)
    assert t.shape == z.shape and t.min() >= -4.0 and t.max() <= 4.0
    assert ut.ks_uniform(t[:, 1]) < 0.02
    np.testing.assert_allclose(ut.invert(model, t), z, atol=1e-8)


def test_model_json_round_trip(tmp_path):
    model = ut.fit(bimodal()[:, None])
    again = ut.Model.from_json(model.to_json())
    assert again.to_json() == model.to_json()
    path = tmp_path / "model.json"
    ut.write_model(model, path)
    assert ut.read_model(path).to_json() == model.to_json()
    assert json.loads(model.report())


def test_mixture_cdf_and_quantile():
    m = ut.Mixture([(1.0, 0.0, 1.0)])
    assert m.cdf(1.96) == pytest.approx(0.9750021048517795, abs=1e-12)
    assert m.quantile(0.9750021048517795) == pytest.approx(1.96, abs=1e-9)
    assert m.sample(100, 7).tolist() == m.sample(100, 7).tolist()


def test_metrics_on_copied_factors():
    rng = np.random.default_rng(4)
    y = rng.integers(0, 4, size=(10000, 2))
    z = np.column_stack([y, rng.normal(size=10000)]).astype(float)
    assert ut.mig(z, y) >= 0.95
    assert ut.factor_vae_score(z + 0.01 * rng.normal(size=z.shape), y, seed=1) >= 0.95
    heat = ut.correlation_heatmap(z, y)
    assert heat.shape == (3, 2) and heat[0, 0] == pytest.approx(1.0)
    assert ut.total_correlation(z[:, :1]) == 0.0


def test_synth_is_deterministic():
    spec = json.dumps({
        "n": 1000, "seed": 5,
        "factors": [{"cardinality": 3}],
        "dimensions": [{"type": "mixture", "components": [
            {"weight": 0.3, "mean": -2.0, "variance": 0.25},
            {"weight": 0.7, "mean": 2.0, "variance": 0.25}]},
                       {"type": "factor_copy", "factor": 0, "noise": 0.01}],
    })
    a, ya, truth = ut.synth(spec)
    b, yb, _ = ut.synth(spec)
    assert a.shape == (1000, 2) and ya.shape == (1000, 1)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(ya, yb)
    assert truth[0].k == 2 and truth[1] is None


def test_errors_are_typed():
    with pytest.raises(ut.UtError, match="row 2"):
        ut.fit(np.array([[0.0], [1.0], [np.nan], [2.0]]))
    with pytest.raises(ut.UtError):
        ut.synth("{not json")
