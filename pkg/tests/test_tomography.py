import numpy as np
import pytest

from qsi.linalg import IDENTITY, bloch_from_density, density_from_bloch, trace_distance
from qsi.maxent import maxent_qubit
from qsi.measurement import LEVEL_C, empirical_frequencies, simulate_outcomes
from qsi.tomography import linear_invert, tomography_equals_maxent


def test_linear_invert_examples():
    res = linear_invert({"x": 0.5, "y": 0.5, "z": 0.8})
    np.testing.assert_allclose(res.raw_bloch, [0, 0, 0.6], atol=1e-15)
    np.testing.assert_allclose(res.projected_rho, np.diag([0.8, 0.2]), atol=1e-15)
    assert res.physical
    res = linear_invert({"x": 1.0, "y": 1.0, "z": 1.0})
    assert not res.physical
    assert np.linalg.norm(res.raw_bloch) == pytest.approx(np.sqrt(3))
    np.testing.assert_allclose(bloch_from_density(res.projected_rho), np.ones(3) / np.sqrt(3), atol=1e-15)
    np.testing.assert_allclose(linear_invert({"x": 0.5, "y": 0.5, "z": 0.5}).projected_rho, IDENTITY / 2)


def test_linear_invert_accepts_frequency_pairs_and_validates():
    res = linear_invert({"x": (0.5, 0.5), "y": (0.5, 0.5), "z": (0.8, 0.2)})
    np.testing.assert_allclose(res.raw_bloch, [0, 0, 0.6], atol=1e-15)
    with pytest.raises(ValueError):
        linear_invert({"x": 0.5, "z": 0.5})
    with pytest.raises(ValueError):
        linear_invert({"x": 0.5, "y": 1.5, "z": 0.5})


@pytest.mark.parametrize("means", [(0, 0, 0.6), (0.3, 0.4, 0.5), (0, 0, 0)])
def test_tomography_equals_maxent(means):
    assert tomography_equals_maxent(dict(zip("xyz", means)))


def test_exact_means_identity_random():
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = rng.normal(size=3)
        v *= rng.random() ** (1 / 3) / np.linalg.norm(v)
        m = dict(zip("xyz", v))
        tomo = linear_invert({a: (1 + m[a]) / 2 for a in "xyz"}).projected_rho
        assert np.max(np.abs(tomo - maxent_qubit(m, LEVEL_C))) <= 1e-12


def test_statistical_error_scaling():
    true = density_from_bloch([0.3, 0.4, 0.5])
    med = []
    for n in (1000, 4000, 16000):
        d = [trace_distance(linear_invert({a: f[0] for a, f in empirical_frequencies(
            simulate_outcomes(true, LEVEL_C, n, seed)).items()}).projected_rho, true) for seed in range(20)]
        med.append(np.median(d))
    for a, b in zip(med, med[1:]):
        assert 0.5 * 0.7 <= b / a <= 0.5 * 1.3


def test_unphysical_results_for_near_pure_states():
    true = density_from_bloch([0, 0, 0.98])
    unphysical = 0
    for seed in range(100):
        freqs = {a: f[0] for a, f in empirical_frequencies(simulate_outcomes(true, LEVEL_C, 50, seed)).items()}
        res = linear_invert(freqs)
        unphysical += not res.physical
        assert abs(np.trace(res.projected_rho) - 1) < 1e-12
    assert unphysical >= 1
