"""Pure numpy implementation of the Monte Carlo inner loops.

Mirrors the compiled ``_kernels`` module function for function; the
package picks one of the two at import time (see ``qsi.kernels``).
"""
import numpy as np

MIXED = 0
PURE = 1
_LN2 = np.log(2.0)
_TWO_PI = 2.0 * np.pi


def bloch_from_uniforms(u, mode):
    """Bloch vectors (n, 3) of prior samples drawn from uniforms.

    MIXED consumes six columns (alpha, psi, phi1, theta1, phi2, theta2) and
    returns the reduced vector cos(alpha) * r1; PURE consumes (theta, phi).
    """
    u = np.asarray(u, dtype=np.float64)
    if mode == MIXED:
        y = np.cbrt(1.0 - 2.0 * u[:, 0])
        c = 1.0 - 2.0 * u[:, 3]
        s = 2.0 * np.sqrt(u[:, 3] * (1.0 - u[:, 3]))
        phi = _TWO_PI * u[:, 2]
    elif mode == PURE:
        y = 1.0
        c = 1.0 - 2.0 * u[:, 0]
        s = 2.0 * np.sqrt(u[:, 0] * (1.0 - u[:, 0]))
        phi = _TWO_PI * u[:, 1]
    else:
        raise ValueError(f"unknown mode {mode}")
    out = np.empty((u.shape[0], 3))
    out[:, 0] = y * s * np.cos(phi)
    out[:, 1] = y * s * np.sin(phi)
    out[:, 2] = y * c
    return out


def log_likelihood_bloch(r, nplus, nminus):
    """Per-sample log-likelihood of tallies (n+, n-) on axes x, y, z."""
    logl = np.zeros(r.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(3):
            if nplus[i] > 0:
                logl += nplus[i] * (np.log1p(r[:, i]) - _LN2)
            if nminus[i] > 0:
                logl += nminus[i] * (np.log1p(-r[:, i]) - _LN2)
    return logl


def loglik_moments(u, mode, nplus, nminus):
    """Weighted moments of the prior sample under the likelihood.

    Returns (lmax, sum_w, sum_w2, sum_w*rx, sum_w*ry, sum_w*rz, n_nan) with
    w = exp(logL - lmax). lmax is -inf when no sample has positive weight.
    """
    r = bloch_from_uniforms(u, mode)
    logl = log_likelihood_bloch(r, nplus, nminus)
    bad = np.isnan(logl) | (logl == np.inf)
    n_nan = int(np.count_nonzero(bad))
    logl[bad] = -np.inf
    lmax = float(np.max(logl)) if logl.size else -np.inf
    if lmax == -np.inf:
        return -np.inf, 0.0, 0.0, 0.0, 0.0, 0.0, n_nan
    w = np.exp(logl - lmax)
    sr = w @ r
    return lmax, float(w.sum()), float(w @ w), float(sr[0]), float(sr[1]), float(sr[2]), n_nan


def tophat_moments(u, mode, means, active, eps):
    """Count and Bloch sums of samples with |r_i - means_i| <= eps on active axes."""
    r = bloch_from_uniforms(u, mode)
    keep = np.ones(r.shape[0], dtype=bool)
    for i in range(3):
        if active[i]:
            keep &= np.abs(r[:, i] - means[i]) <= eps
    sr = r[keep].sum(axis=0)
    return int(np.count_nonzero(keep)), float(sr[0]), float(sr[1]), float(sr[2])
