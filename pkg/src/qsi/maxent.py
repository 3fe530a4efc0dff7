"""Maximum-entropy (generalized canonical) density operators.

``maxent_general`` solves for rho = exp(-sum_v lam_v G_v) / Z by damped
Newton iteration on the convex dual ln Z(lam) + sum_v lam_v g_v, whose
gradient is the constraint residual and whose Hessian is the covariance
of the constraint observables under the current rho.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import AXES, _hermitize, bloch_from_density, density_from_bloch, eig_hermitian, pauli, von_neumann_entropy

CONSISTENT = "consistent"
PURE_BOUNDARY = "pure_boundary"
INCONSISTENT = "inconsistent"

CONSISTENCY_TOL = 1e-10
LAMBDA_CAP = 50.0
TIKHONOV = 1e-12


class InconsistentMeansError(ValueError):
    """Mean values lie outside the Bloch ball."""


class InfeasibleConstraintsError(ValueError):
    pass


class MaxEntConvergenceError(RuntimeError):
    def __init__(self, msg, last=None):
        super().__init__(msg)
        self.last = last


def _means_vector(means) -> np.ndarray:
    if isinstance(means, dict):
        return np.array([float(means.get(a, 0.0)) for a in AXES])
    return np.asarray(means, dtype=float)


def check_consistency(means, tol: float = CONSISTENCY_TOL) -> str:
    """Classify the squared length of the mean vector against the unit sphere."""
    m2 = float(np.sum(_means_vector(means) ** 2))
    if m2 < 1 - tol:
        return CONSISTENT
    if m2 <= 1 + tol:
        return PURE_BOUNDARY
    return INCONSISTENT


def level_bloch(means, level) -> np.ndarray:
    """Bloch vector with measured axes set to their means and the rest to zero."""
    r = np.zeros(3)
    for a in level:
        if a not in means:
            raise ValueError(f"no mean given for measured axis {a!r}")
        r[AXES.index(a)] = float(means[a])
    return r


def maxent_qubit(means: dict, level) -> np.ndarray:
    """Closed-form MaxEnt qubit state (1 + sum_{i in level} m_i sigma_i) / 2."""
    r = level_bloch(means, level)
    if check_consistency(r) == INCONSISTENT:
        raise InconsistentMeansError(f"sum of squared means {np.sum(r ** 2):.12g} exceeds 1")
    n = np.linalg.norm(r)
    if n > 1:
        r = r / n
    return density_from_bloch(r)


@dataclass(frozen=True)
class Constraint:
    observable: np.ndarray
    target_mean: float

    def __post_init__(self):
        g = _hermitize(self.observable)
        object.__setattr__(self, "observable", g)
        w = eig_hermitian(g)[0]
        if not w[-1] - 1e-12 <= self.target_mean <= w[0] + 1e-12:
            raise InfeasibleConstraintsError(
                f"target {self.target_mean} outside spectrum [{w[-1]:.6g}, {w[0]:.6g}]"
            )


@dataclass
class MaxEntSolution:
    rho: np.ndarray
    multipliers: np.ndarray
    entropy: float
    residuals: np.ndarray
    iterations: int
    boundary: bool = False

    @property
    def classification(self) -> str:
        return PURE_BOUNDARY if self.boundary else CONSISTENT


def pauli_constraints(means: dict, level=AXES) -> list:
    return [Constraint(pauli(a), float(means[a])) for a in level]


def _gibbs(ops: np.ndarray, lam: np.ndarray, dim: int):
    """rho and ln Z for exp(-sum lam_v G_v)."""
    h = np.tensordot(lam, ops, axes=1) if len(lam) else np.zeros((dim, dim), dtype=complex)
    w, v = eig_hermitian(h)
    shift = w[-1]
    p = np.exp(-(w - shift))
    z = p.sum()
    p /= z
    rho = (v * p) @ v.conj().T
    return rho, np.log(z) - shift


def dual_value(constraints, lam) -> float:
    ops, targets, dim = _unpack(constraints)
    lam = np.asarray(lam, dtype=float)
    _, log_z = _gibbs(ops, lam, dim)
    return float(log_z + lam @ targets)


def dual_gradient(constraints, lam) -> np.ndarray:
    """Gradient of the dual: target means minus means under the Gibbs state."""
    ops, targets, dim = _unpack(constraints)
    rho, _ = _gibbs(ops, np.asarray(lam, dtype=float), dim)
    return targets - _means(rho, ops)


def _means(rho, ops) -> np.ndarray:
    return np.einsum("ij,vji->v", rho, ops).real


def _unpack(constraints, dim=None):
    if constraints:
        ops = np.array([c.observable for c in constraints])
        targets = np.array([c.target_mean for c in constraints], dtype=float)
        dim = ops.shape[1]
    else:
        dim = dim or 2
        ops = np.zeros((0, dim, dim), dtype=complex)
        targets = np.zeros(0)
    return ops, targets, dim


def maxent_general(constraints, tol: float = 1e-12, max_iter: int = 500, dim: int | None = None) -> MaxEntSolution:
    """Entropy-maximizing density operator subject to ``Tr(rho G_v) = g_v``."""
    ops, targets, dim = _unpack(list(constraints), dim)
    m = len(targets)
    lam = np.zeros(m)
    rho, log_z = _gibbs(ops, lam, dim)
    dual = log_z
    resid = targets - _means(rho, ops)
    it = 0
    stalled = False
    while it < max_iter and np.max(np.abs(resid), initial=0.0) > tol:
        it += 1
        mean = _means(rho, ops)
        second = np.einsum("ij,vjk,wki->vw", rho, ops, ops).real
        cov = 0.5 * (second + second.T) - np.outer(mean, mean)
        step = -np.linalg.solve(cov + TIKHONOV * np.eye(m), resid)
        t = 1.0
        while True:
            trial = np.clip(lam + t * step, -LAMBDA_CAP, LAMBDA_CAP)
            rho_t, log_z_t = _gibbs(ops, trial, dim)
            dual_t = log_z_t + trial @ targets
            if dual_t <= dual + 1e-15 * max(1.0, abs(dual)):
                break
            t *= 0.5
            if t < 1e-12:
                stalled = True
                break
        if stalled or np.array_equal(trial, lam):
            stalled = True
            break
        lam, rho, dual = trial, rho_t, dual_t
        resid = targets - _means(rho, ops)

    worst = np.max(np.abs(resid), initial=0.0)
    capped = bool(np.any(np.abs(lam) >= LAMBDA_CAP))
    if worst > tol:
        if capped and worst > 1e-6:
            raise InfeasibleConstraintsError(
                f"constraints cannot be met by any density operator (residual {worst:.3e})"
            )
        if not capped:
            last = MaxEntSolution(rho, lam, von_neumann_entropy(rho), resid, it)
            raise MaxEntConvergenceError(f"no convergence after {it} iterations (residual {worst:.3e})", last)
    rho = 0.5 * (rho + rho.conj().T)
    boundary = dim == 2 and np.linalg.norm(bloch_from_density(rho)) > 1 - 1e-8
    return MaxEntSolution(rho, lam, von_neumann_entropy(rho), resid, it, bool(boundary))

