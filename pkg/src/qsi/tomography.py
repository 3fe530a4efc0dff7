"""Linear-inversion tomography of a qubit from sigma_x, sigma_y, sigma_z frequencies."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import AXES, BLOCH_TOL, density_from_bloch
from .maxent import maxent_qubit
from .measurement import LEVEL_C


@dataclass(frozen=True)
class TomogramResult:
    raw_bloch: np.ndarray
    physical: bool
    projected_rho: np.ndarray


def linear_invert(freqs: dict) -> TomogramResult:
    """Invert f+ per axis to r_i = 2 f+_i - 1, rescaling radially if |r| > 1.

    ``freqs`` maps axis -> f+ (or axis -> (f+, f-)).
    """
    missing = [a for a in AXES if a not in freqs]
    if missing:
        raise ValueError(f"linear inversion needs frequencies for x, y and z; missing {missing}")
    f = np.array([freqs[a][0] if isinstance(freqs[a], (tuple, list)) else freqs[a] for a in AXES], dtype=float)
    if np.any(f < 0) or np.any(f > 1):
        raise ValueError("frequencies must lie in [0, 1]")
    raw = 2.0 * f - 1.0
    norm = np.linalg.norm(raw)
    physical = bool(norm <= 1 + BLOCH_TOL)
    r = raw if norm <= 1 else raw / norm
    return TomogramResult(raw, physical, density_from_bloch(r))


def tomography_equals_maxent(means: dict, tol: float = 1e-12) -> bool:
    """Whether linear inversion of exact frequencies reproduces the complete-level MaxEnt state."""
    freqs = {a: (1.0 + float(means[a])) / 2.0 for a in AXES}
    tomo = linear_invert(freqs).projected_rho
    return bool(np.max(np.abs(tomo - maxent_qubit(means, LEVEL_C))) <= tol)
