"""Small complex Hermitian matrix algebra for qubits and qubit pairs.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` with shape
``(2, 2)`` or ``(4, 4)``. Bloch vectors are real arrays of shape ``(3,)``.
"""
from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
BLOCH_TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
AXES = ("x", "y", "z")


class NotHermitianError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


def pauli(axis: str) -> np.ndarray:
    """Return the Pauli matrix for ``axis`` in the sigma_z eigenbasis."""
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown axis {axis!r}, expected one of {AXES}") from None


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor outer."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("tensor_product expects two 2x2 matrices")
    return np.kron(a, b)


def partial_trace_second(rho: np.ndarray) -> np.ndarray:
    """Trace out the second qubit of a 4x4 operator."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("partial_trace_second expects a 4x4 matrix")
    return np.einsum("ijkj->ik", rho.reshape(2, 2, 2, 2))


def _hermitize(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    drift = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if drift > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(h)))):
        raise NotHermitianError(f"matrix is not Hermitian (drift {drift:.3e})")
    return 0.5 * (h + h.conj().T)


def eig_hermitian(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with real eigenvalues sorted in descending
    order; ``vectors[:, i]`` belongs to ``values[i]``.
    """
    h = _hermitize(h)
    w, v = np.linalg.eigh(h)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def eigvals_hermitian(h: np.ndarray) -> np.ndarray:
    return eig_hermitian(h)[0]


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in nats, with 0 ln 0 taken as 0."""
    w = eigvals_hermitian(rho)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    if rho1.shape != rho2.shape:
        raise ValueError(f"dimension mismatch: {rho1.shape} vs {rho2.shape}")
    return float(0.5 * np.sum(np.abs(eigvals_hermitian(rho1 - rho2))))


def density_from_bloch(r) -> np.ndarray:
    """rho = (1 + r.sigma) / 2; rejects vectors outside the Bloch ball."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError("Bloch vector must have three components")
    if np.linalg.norm(r) > 1 + BLOCH_TOL:
        raise InvalidStateError(f"Bloch vector length {np.linalg.norm(r):.12g} exceeds 1")
    return 0.5 * (IDENTITY + r[0] * _PAULI["x"] + r[1] * _PAULI["y"] + r[2] * _PAULI["z"])


def bloch_from_density(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("bloch_from_density expects a 2x2 matrix")
    return np.array([
        2.0 * rho[0, 1].real,
        -2.0 * rho[0, 1].imag,
        (rho[0, 0] - rho[1, 1]).real,
    ])


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    return float(np.trace(np.asarray(op) @ np.asarray(rho)).real)


def check_density(rho: np.ndarray) -> np.ndarray:
    """Validate the density-operator invariants and return ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape not in ((2, 2), (4, 4)):
        raise InvalidStateError(f"unsupported density operator shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise InvalidStateError("density operator is not Hermitian")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise InvalidStateError(f"trace {np.trace(rho).real:.15g} differs from 1")
    if eigvals_hermitian(rho)[-1] < -PSD_TOL:
        raise InvalidStateError("density operator has a negative eigenvalue")
    return rho


def is_density(rho: np.ndarray) -> bool:
    try:
        check_density(rho)
    except (InvalidStateError, NotHermitianError):
        return False
    return True


def random_density(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Random full-rank density operator (Hilbert-Schmidt ensemble)."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_hermitian(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def density_to_json(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {"dim": int(rho.shape[0]), "re": rho.real.tolist(), "im": rho.imag.tolist()}


def density_from_json(obj: dict) -> np.ndarray:
    rho = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    if rho.shape != (obj["dim"], obj["dim"]):
        raise ValueError(f"matrix shape {rho.shape} does not match dim {obj['dim']}")
    return rho
