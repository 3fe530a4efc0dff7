import math

import numpy as np
import pytest

from qsi.linalg import IDENTITY, bloch_from_density, eigvals_hermitian, pauli, random_density, random_hermitian, von_neumann_entropy
from qsi.maxent import (CONSISTENT, INCONSISTENT, PURE_BOUNDARY, Constraint, InconsistentMeansError,
                        InfeasibleConstraintsError, MaxEntConvergenceError, check_consistency, dual_gradient,
                        dual_value, maxent_general, maxent_qubit, pauli_constraints)
from qsi.measurement import LEVEL_A, LEVEL_B, LEVEL_C


def random_interior_means(rng, radius=0.95):
    v = rng.normal(size=3)
    return dict(zip("xyz", v / np.linalg.norm(v) * radius * rng.random() ** (1 / 3)))


def test_maxent_qubit_examples():
    np.testing.assert_allclose(maxent_qubit({"z": 0.6}, LEVEL_A), np.diag([0.8, 0.2]), atol=1e-16)
    rho = maxent_qubit({"z": 0.3, "x": 0.4}, LEVEL_B)
    np.testing.assert_allclose(bloch_from_density(rho), [0.4, 0, 0.3], atol=1e-16)
    np.testing.assert_allclose(maxent_qubit({"x": 0, "y": 0, "z": 0}, LEVEL_C), IDENTITY / 2)


def test_maxent_qubit_ignores_unmeasured_axes_and_rejects_inconsistent():
    rho = maxent_qubit({"z": 0.5, "x": 0.9, "y": 0.1}, LEVEL_A)
    np.testing.assert_allclose(bloch_from_density(rho), [0, 0, 0.5], atol=1e-16)
    with pytest.raises(InconsistentMeansError):
        maxent_qubit({"x": 0.6, "y": 0.6, "z": 0.6}, LEVEL_C)
    with pytest.raises(ValueError):
        maxent_qubit({"z": 0.1}, LEVEL_B)


def test_check_consistency():
    assert check_consistency({"x": 0, "y": 0, "z": 0.6}) == CONSISTENT
    assert check_consistency({"x": 0, "y": 0, "z": 1}) == PURE_BOUNDARY
    assert check_consistency({"x": 0.6, "y": 0.6, "z": 0.6}) == INCONSISTENT
    assert check_consistency([0, 0, 1 + 1e-11]) == PURE_BOUNDARY


def test_general_single_constraint():
    sol = maxent_general([Constraint(pauli("z"), 0.6)])
    assert np.max(np.abs(sol.rho - maxent_qubit({"z": 0.6}, LEVEL_A))) < 1e-10
    assert sol.multipliers[0] == pytest.approx(-math.atanh(0.6), abs=1e-10)


def test_general_near_pure_boundary():
    sol = maxent_general(pauli_constraints({"x": 0, "y": 0, "z": 1 - 1e-6}))
    assert sol.entropy <= 1e-4
    assert np.linalg.norm(bloch_from_density(sol.rho)) >= 1 - 2e-6
    closed = maxent_qubit({"x": 0, "y": 0, "z": 1 - 1e-6}, LEVEL_C)
    assert np.max(np.abs(sol.rho - closed)) < 1e-10


def test_general_exact_boundary_is_classified():
    sol = maxent_general(pauli_constraints({"x": 0, "y": 0, "z": 1.0}))
    assert sol.classification == PURE_BOUNDARY
    assert np.max(np.abs(sol.rho - np.diag([1, 0]))) < 1e-10


def test_general_no_constraints():
    sol = maxent_general([])
    np.testing.assert_allclose(sol.rho, IDENTITY / 2)
    assert sol.entropy == pytest.approx(math.log(2))
    assert maxent_general([], dim=4).entropy == pytest.approx(math.log(4))


def test_general_infeasible():
    with pytest.raises(InfeasibleConstraintsError):
        maxent_general(pauli_constraints({"x": 0.8, "y": 0.0, "z": 0.8}))
    with pytest.raises(InfeasibleConstraintsError):
        Constraint(pauli("z"), 1.5)


def test_general_non_convergence_reports_last_iterate():
    with pytest.raises(MaxEntConvergenceError) as exc:
        maxent_general(pauli_constraints({"x": 0.3, "y": 0.4, "z": 0.5}), max_iter=1)
    assert exc.value.last is not None


def test_general_matches_closed_form_on_random_means():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m = random_interior_means(rng)
        for level in (LEVEL_A, LEVEL_B, LEVEL_C):
            sol = maxent_general(pauli_constraints(m, level))
            assert np.max(np.abs(sol.rho - maxent_qubit(m, level))) < 1e-10
            assert np.max(np.abs(sol.residuals)) <= 1e-12
            assert abs(sol.entropy - von_neumann_entropy(sol.rho)) < 1e-10


def test_dual_gradient_is_residual():
    rng = np.random.default_rng(1)
    for _ in range(20):
        rho = random_density(rng)
        cons = [Constraint(g, float(np.trace(rho @ g).real)) for g in (random_hermitian(rng), random_hermitian(rng))]
        sol = maxent_general(cons)
        np.testing.assert_allclose(dual_gradient(cons, sol.multipliers), sol.residuals, atol=1e-12)
        # finite differences of the dual agree with its analytic gradient
        lam = rng.normal(size=2)
        h = 1e-6
        fd = [(dual_value(cons, lam + h * e) - dual_value(cons, lam - h * e)) / (2 * h) for e in np.eye(2)]
        np.testing.assert_allclose(fd, dual_gradient(cons, lam), atol=1e-7)


def _tangent_perturbation(rng, ops):
    """Random Hermitian direction orthogonal (Hilbert-Schmidt) to identity and all constraint operators."""
    basis = []
    for g in [np.eye(ops[0].shape[0])] + list(ops):
        v = g.astype(complex)
        for b in basis:
            v = v - np.trace(b.conj().T @ v) * b
        n = math.sqrt(np.trace(v.conj().T @ v).real)
        if n > 1e-12:
            basis.append(v / n)
    d = random_hermitian(rng, ops[0].shape[0])
    for b in basis:
        d = d - np.trace(b.conj().T @ d) * b
    return d / math.sqrt(np.trace(d.conj().T @ d).real)


@pytest.mark.parametrize("dim", [2, 4])
def test_maximality_under_constraint_preserving_perturbations(dim):
    rng = np.random.default_rng(dim)
    n_sets = 100 if dim == 2 else 30
    for _ in range(n_sets):
        rho0 = random_density(rng, dim)
        k = 1 if dim == 2 else 3
        ops = [random_hermitian(rng, dim) for _ in range(k)]
        cons = [Constraint(g, float(np.trace(rho0 @ g).real)) for g in ops]
        sol = maxent_general(cons)
        for _ in range(50):
            d = _tangent_perturbation(rng, ops)
            trial = sol.rho + 1e-3 * d
            trial /= np.trace(trial).real
            if eigvals_hermitian(trial)[-1] < 0:
                continue
            for g, c in zip(ops, cons):
                assert abs(np.trace(trial @ g).real - c.target_mean) < 1e-9
            assert von_neumann_entropy(trial) <= sol.entropy + 1e-8


def test_entropy_decreases_with_mean():
    ent = [von_neumann_entropy(maxent_qubit({"z": m}, LEVEL_A)) for m in np.arange(10) / 10]
    assert all(b < a for a, b in zip(ent, ent[1:]))
