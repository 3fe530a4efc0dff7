"""Parameterizations of qubit and purified two-qubit pure states.

A mixed qubit state is represented as the reduced state of a pure state
of the qubit plus a one-qubit reservoir. The pure two-qubit manifold is
described by six angles; the reduced Bloch vector of the first qubit is
``cos(alpha) * r1(theta1, phi1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, astuple
from typing import NamedTuple

import numpy as np

from .linalg import IDENTITY, density_from_bloch, pauli, tensor_product

TWO_PI = 2.0 * np.pi

# column order of the uniform draws consumed by the samplers
PARAM_NAMES = ("alpha", "psi", "phi1", "theta1", "phi2", "theta2")


@dataclass(frozen=True)
class PurifiedParams:
    alpha: float
    psi: float
    phi1: float
    theta1: float
    phi2: float
    theta2: float

    def __post_init__(self):
        for name, hi in (("alpha", np.pi), ("theta1", np.pi), ("theta2", np.pi)):
            v = getattr(self, name)
            if not 0.0 <= v <= hi:
                raise ValueError(f"{name}={v} outside [0, pi]")
        for name in ("psi", "phi1", "phi2"):
            v = getattr(self, name)
            if not 0.0 <= v <= TWO_PI:
                raise ValueError(f"{name}={v} outside [0, 2pi]")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self))


class FrameVectors(NamedTuple):
    k: np.ndarray
    l: np.ndarray
    r: np.ndarray


def frame_vectors(theta: float, phi: float) -> FrameVectors:
    """Orthonormal triad attached to the direction (theta, phi).

    ``r`` is the unit vector itself; ``k`` and ``l`` span the plane
    orthogonal to it, with ``k x l = r``.
    """
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    return FrameVectors(
        k=np.array([sp, -cp, 0.0]),
        l=np.array([ct * cp, ct * sp, -st]),
        r=np.array([st * cp, st * sp, ct]),
    )


def _dot_sigma(v) -> np.ndarray:
    return v[0] * pauli("x") + v[1] * pauli("y") + v[2] * pauli("z")


def purified_density(p: PurifiedParams) -> np.ndarray:
    """4x4 pure-state projector of the qubit-plus-reservoir system."""
    f1 = frame_vectors(p.theta1, p.phi1)
    f2 = frame_vectors(p.theta2, p.phi2)
    k1, l1, r1 = (_dot_sigma(v) for v in f1)
    k2, l2, r2 = (_dot_sigma(v) for v in f2)
    kron = tensor_product
    ca, sa = np.cos(p.alpha), np.sin(p.alpha)
    rho = (
        kron(IDENTITY, IDENTITY)
        + kron(r1, r2)
        + ca * (kron(r1, IDENTITY) + kron(IDENTITY, r2))
        + sa * np.cos(p.psi) * (kron(k1, k2) - kron(l1, l2))
        - sa * np.sin(p.psi) * (kron(k1, l2) + kron(l1, k2))
    )
    return rho / 4.0


def reduced_bloch(p: PurifiedParams) -> np.ndarray:
    """Bloch vector of the first qubit after tracing out the reservoir."""
    return np.cos(p.alpha) * frame_vectors(p.theta1, p.phi1).r


def measure_weight(p: PurifiedParams) -> float:
    """Invariant measure density cos^2(alpha) sin(alpha) sin(theta1) sin(theta2)."""
    return float(np.cos(p.alpha) ** 2 * np.sin(p.alpha) * np.sin(p.theta1) * np.sin(p.theta2))


def params_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Map uniforms of shape (n, 6) to angles distributed by the invariant measure.

    Columns follow ``PARAM_NAMES``. ``cos(alpha)`` is the real cube root of
    ``1 - 2u`` so that it covers (-1, 1) with density proportional to y^2.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    out[:, 0] = np.arccos(np.cbrt(1.0 - 2.0 * u[:, 0]))
    out[:, 1] = TWO_PI * u[:, 1]
    out[:, 2] = TWO_PI * u[:, 2]
    out[:, 3] = np.arccos(1.0 - 2.0 * u[:, 3])
    out[:, 4] = TWO_PI * u[:, 4]
    out[:, 5] = np.arccos(1.0 - 2.0 * u[:, 5])
    return out


def sample_purified_array(rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` parameter rows (columns as ``PARAM_NAMES``)."""
    return params_from_uniforms(rng.random((n, 6)))


def sample_purified(rng: np.random.Generator) -> PurifiedParams:
    return PurifiedParams(*sample_purified_array(rng, 1)[0])


def pure_qubit_density(theta: float, phi: float) -> np.ndarray:
    return density_from_bloch(frame_vectors(theta, phi).r)
