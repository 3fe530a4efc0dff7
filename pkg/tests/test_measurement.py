import numpy as np
import pytest

from qsi.linalg import IDENTITY, density_from_bloch, random_density, tensor_product
from qsi.measurement import (FIRST, JOINT, LEVEL_A, LEVEL_C, SECOND, Dataset, Observable, ObservationLevel,
                             born_probability, born_probability_params, empirical_frequencies, projector,
                             simulate_outcomes)
from qsi.states import PurifiedParams, purified_density

ALL_OBS = [Observable(a, s) for a in "xyz" for s in (FIRST, SECOND)] + [
    Observable(a, JOINT, b) for a in "xyz" for b in "xyz"
]


def random_params(rng):
    a = rng.uniform(0, 1, 6) * np.array([np.pi, 2 * np.pi, 2 * np.pi, np.pi, 2 * np.pi, np.pi])
    return PurifiedParams(*a)


def test_projector_examples():
    np.testing.assert_array_equal(projector(Observable("z"), 1), np.diag([1, 1, 0, 0]))
    np.testing.assert_array_equal(projector(Observable("z", JOINT, "z"), 1), np.diag([1, 0, 0, 1]))
    for obs in ALL_OBS:
        p, m = projector(obs, 1), projector(obs, -1)
        np.testing.assert_allclose(p + m, np.eye(4))
        np.testing.assert_allclose(p @ p, p, atol=1e-15)


def test_observable_validation():
    with pytest.raises(ValueError):
        Observable("z", JOINT)
    with pytest.raises(ValueError):
        Observable("z", FIRST, "x")
    with pytest.raises(ValueError):
        Observable("q")


def test_observation_level_validation():
    with pytest.raises(ValueError):
        ObservationLevel([])
    with pytest.raises(ValueError):
        ObservationLevel(["z", "z"])
    assert LEVEL_C.complete and not LEVEL_A.complete


def test_born_examples():
    mixed = np.eye(4) / 4
    for obs in ALL_OBS:
        assert born_probability(mixed, obs, 1) == pytest.approx(0.5)
    rho = purified_density(PurifiedParams(0, 0.3, 0.2, 0, 1.0, 2.0))
    assert born_probability(rho, Observable("z"), 1) == pytest.approx(1.0, abs=1e-15)


def test_closed_form_matches_trace():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        p = random_params(rng)
        rho = purified_density(p)
        obs = ALL_OBS[rng.integers(len(ALL_OBS))]
        s = int(rng.choice([1, -1]))
        assert abs(born_probability(rho, obs, s) - born_probability_params(p, obs, s)) < 1e-10


def test_completeness():
    rng = np.random.default_rng(1)
    for _ in range(200):
        rho = random_density(rng, 4)
        for obs in ALL_OBS:
            assert abs(born_probability(rho, obs, 1) + born_probability(rho, obs, -1) - 1) < 1e-12


def test_simulate_pure_z():
    d = simulate_outcomes(np.diag([1.0, 0.0]), LEVEL_A, 500, seed=3)
    assert all(s == 1 for _, s in d.events)
    assert d.counts == {"z": (500, 0)}


def test_simulate_maximally_mixed():
    d = simulate_outcomes(IDENTITY / 2, LEVEL_C, 10**5, seed=11)
    for a, (fp, fm) in empirical_frequencies(d).items():
        assert abs(fp - 0.5) < 0.005
        assert fp + fm == 1


def test_simulate_round_robin_and_determinism():
    rho = density_from_bloch([0.2, -0.3, 0.5])
    d1 = simulate_outcomes(rho, LEVEL_C, {"z": 3, "x": 1, "y": 2}, seed=9)
    d2 = simulate_outcomes(rho, LEVEL_C, {"z": 3, "x": 1, "y": 2}, seed=9)
    assert [a for a, _ in d1.events] == ["z", "x", "y", "z", "y", "z"]
    assert d1.to_jsonl() == d2.to_jsonl()
    with pytest.raises(ValueError):
        simulate_outcomes(rho, LEVEL_C, -1, seed=0)


def test_empirical_frequencies():
    d = Dataset("z", [("z", 1)] * 8 + [("z", -1)] * 2)
    assert empirical_frequencies(d) == {"z": (0.8, 0.2)}
    assert empirical_frequencies(Dataset("z", [])) == {}
    d = simulate_outcomes(np.diag([0.8, 0.2]), LEVEL_A, 10**4, seed=5)
    assert abs(empirical_frequencies(d)["z"][0] - 0.8) <= 0.012


def test_dataset_rejects_foreign_observable():
    with pytest.raises(ValueError):
        Dataset("z", [("x", 1)])
    with pytest.raises(ValueError):
        Dataset("z", [("z", 0)])


def test_dataset_jsonl_round_trip():
    d = simulate_outcomes(density_from_bloch([0.1, 0.2, 0.3]), LEVEL_C, 20, seed=1)
    text = d.to_jsonl()
    header = text.splitlines()[0]
    assert '"level": ["z", "x", "y"]' in header and '"seed": 1' in header
    assert text.splitlines()[1].startswith('{"obs": "z", "s": ')
    back = Dataset.from_jsonl(text)
    assert back.events == d.events and tuple(back.level) == tuple(d.level)
    assert back.schedule == d.schedule


def test_frequency_convergence_rate():
    rho = density_from_bloch([0.3, -0.4, 0.5])
    born = {"x": 0.65, "y": 0.3, "z": 0.75}
    rms = []
    for n in (1000, 4000, 16000):
        dev = []
        for seed in range(20):
            f = empirical_frequencies(simulate_outcomes(rho, LEVEL_C, n, seed))
            dev.extend(f[a][0] - born[a] for a in "xyz")
        rms.append(np.sqrt(np.mean(np.square(dev))))
    # quadrupling N halves the RMS deviation, within sampling slack
    for a, b in zip(rms, rms[1:]):
        assert 0.35 < b / a < 0.7
