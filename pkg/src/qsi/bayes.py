"""Posterior-mean state estimation by importance sampling over the prior.

Prior samples are drawn chunk by chunk; chunk ``i`` uses the stream
``default_rng([seed, i])`` and partial sums are reduced in ascending chunk
order, so estimates do not depend on the worker count.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .linalg import AXES, density_from_bloch, density_to_json
from .maxent import INCONSISTENT, InconsistentMeansError, check_consistency, level_bloch
from .measurement import FIRST, Dataset, Observable, ObservationLevel, born_probability_params
from .states import PurifiedParams

log = logging.getLogger(__name__)

MIXED = "mixed"
PURE = "pure"
LIMIT_KERNEL = "limit_kernel"

_MODE_CODE = {MIXED: kernels.MIXED, PURE: kernels.PURE}
_N_UNIFORMS = {MIXED: 6, PURE: 2}


class EmptyShellError(RuntimeError):
    """No prior state satisfies the mean-value constraints (within the kernel width)."""

    def __init__(self, acceptance: float, threshold: float):
        super().__init__(
            f"empty microcanonical shell: acceptance fraction {acceptance:.3e} below {threshold:.1e}"
        )
        self.acceptance = acceptance


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 10**6
    seed: int = 0
    chunk_size: int = 2**17
    ess_threshold: float = 0.001
    shell_threshold: float = 1e-6

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if not 0 < self.ess_threshold < 1:
            raise ValueError("ess_threshold must lie in (0, 1)")


@dataclass
class EstimateReport:
    rho: np.ndarray
    ess: float
    log_normalizer: float
    n_samples_used: int
    mode: str
    low_ess: bool = False
    acceptance: float | None = None
    n_nonfinite: int = 0
    config: dict = field(default_factory=dict)

    @property
    def bloch(self) -> np.ndarray:
        r = self.rho
        return np.array([2 * r[0, 1].real, -2 * r[0, 1].imag, (r[0, 0] - r[1, 1]).real])

    def to_json(self) -> dict:
        return {
            "rho": density_to_json(self.rho),
            "ess": self.ess,
            "log_normalizer": self.log_normalizer,
            "n_samples_used": self.n_samples_used,
            "mode": self.mode,
            "low_ess": self.low_ess,
            "acceptance": self.acceptance,
            "n_nonfinite": self.n_nonfinite,
            "config": self.config,
        }


def n_workers() -> int:
    env = os.environ.get("QSI_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _chunks(cfg: McConfig):
    n_chunks = math.ceil(cfg.n_samples / cfg.chunk_size)
    for i in range(n_chunks):
        yield i, min(cfg.chunk_size, cfg.n_samples - i * cfg.chunk_size)


def chunk_uniforms(cfg: McConfig, index: int, size: int, ncols: int) -> np.ndarray:
    return np.random.default_rng([cfg.seed, index]).random((size, ncols))


def map_chunks(fn, cfg: McConfig) -> list:
    """Apply ``fn(index, size)`` to every chunk; results come back in chunk order."""
    chunks = list(_chunks(cfg))
    workers = min(n_workers(), len(chunks))
    if workers <= 1:
        return [fn(i, n) for i, n in chunks]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))


def tallies(d: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """(n_plus, n_minus) arrays indexed x, y, z."""
    nplus = np.zeros(3)
    nminus = np.zeros(3)
    for a, (p, m) in d.counts.items():
        nplus[AXES.index(a)] = p
        nminus[AXES.index(a)] = m
    return nplus, nminus


def log_likelihood(d: Dataset, p: PurifiedParams) -> float:
    """Sum of log outcome probabilities of all events at the given parameters."""
    total = 0.0
    for a, (n_plus, n_minus) in d.counts.items():
        obs = Observable(a, FIRST)
        for n, s in ((n_plus, 1), (n_minus, -1)):
            if n == 0:
                continue
            prob = born_probability_params(p, obs, s)
            if prob <= 0.0:
                return -math.inf
            total += n * math.log(prob)
    return total


def _reduce_weighted(parts, n_samples):
    finite = [p for p in parts if p[0] > -math.inf]
    if not finite:
        raise ValueError("every prior sample has zero likelihood")
    top = max(p[0] for p in finite)
    sw = sw2 = 0.0
    sr = np.zeros(3)
    n_bad = sum(p[6] for p in parts)
    for lmax, w, w2, sx, sy, sz, _ in parts:
        if lmax == -math.inf:
            continue
        scale = math.exp(lmax - top)
        sw += w * scale
        sw2 += w2 * scale * scale
        sr += np.array([sx, sy, sz]) * scale
    r = sr / sw
    norm = np.linalg.norm(r)
    if norm > 1.0:
        r = r / norm
    return r, sw * sw / sw2, top + math.log(sw / n_samples), n_bad


def _posterior_mean(d: Dataset, cfg: McConfig, mode: str, log_prior=None) -> EstimateReport:
    nplus, nminus = tallies(d)
    code, ncols = _MODE_CODE[mode], _N_UNIFORMS[mode]

    def work(index, size):
        u = chunk_uniforms(cfg, index, size, ncols)
        if log_prior is None:
            return kernels.loglik_moments(u, code, nplus, nminus)
        return _weighted_with_prior(u, code, nplus, nminus, log_prior)

    r, ess, log_norm, n_bad = _reduce_weighted(map_chunks(work, cfg), cfg.n_samples)
    low = ess < cfg.ess_threshold * cfg.n_samples
    if low:
        log.warning("%s posterior: effective sample size %.1f below %.3g of %d samples",
                    mode, ess, cfg.ess_threshold, cfg.n_samples)
    return EstimateReport(density_from_bloch(r), ess, log_norm, cfg.n_samples, mode,
                          low_ess=low, n_nonfinite=n_bad, config=asdict(cfg))


def _weighted_with_prior(u, code, nplus, nminus, log_prior):
    from ._kernels_py import log_likelihood_bloch

    r = kernels.bloch_from_uniforms(u, code)
    logw = log_likelihood_bloch(r, nplus, nminus) + np.asarray(log_prior(r), dtype=float)
    bad = np.isnan(logw) | (logw == np.inf)
    logw[bad] = -np.inf
    top = float(np.max(logw))
    if top == -np.inf:
        return -np.inf, 0.0, 0.0, 0.0, 0.0, 0.0, int(bad.sum())
    w = np.exp(logw - top)
    s = w @ r
    return top, float(w.sum()), float(w @ w), float(s[0]), float(s[1]), float(s[2]), int(bad.sum())


def posterior_mean_mixed(d: Dataset, cfg: McConfig = McConfig(), log_prior=None) -> EstimateReport:
    """Posterior mean over the purified two-qubit space, reservoir traced out.

    ``log_prior`` optionally maps an (n, 3) array of reduced Bloch vectors to
    extra log-weights; the default is the flat prior.
    """
    return _posterior_mean(d, cfg, MIXED, log_prior)


def posterior_mean_pure(d: Dataset, cfg: McConfig = McConfig(), log_prior=None) -> EstimateReport:
    """Posterior mean under a prior restricted to pure qubit states."""
    return _posterior_mean(d, cfg, PURE, log_prior)


def limit_estimator_kernel(means: dict, level, epsilon: float = 0.01, mode: str = MIXED,
                           cfg: McConfig = McConfig()) -> EstimateReport:
    """Average of prior states whose means lie within ``epsilon`` of the targets.

    Raises EmptyShellError when the accepted fraction of the prior falls
    below ``cfg.shell_threshold``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    level = ObservationLevel(level)
    target = level_bloch(means, level)
    active = np.array([a in level for a in AXES], dtype=np.int8)
    code, ncols = _MODE_CODE[mode], _N_UNIFORMS[mode]

    def work(index, size):
        return kernels.tophat_moments(chunk_uniforms(cfg, index, size, ncols), code, target, active, epsilon)

    count = 0
    sr = np.zeros(3)
    for c, sx, sy, sz in map_chunks(work, cfg):
        count += c
        sr += (sx, sy, sz)
    acceptance = count / cfg.n_samples
    if acceptance < cfg.shell_threshold or count == 0:
        raise EmptyShellError(acceptance, cfg.shell_threshold)
    r = sr / count
    norm = np.linalg.norm(r)
    if norm > 1.0:
        r = r / norm
    return EstimateReport(density_from_bloch(r), float(count), math.log(acceptance), cfg.n_samples,
                          LIMIT_KERNEL, acceptance=acceptance,
                          config={**asdict(cfg), "epsilon": epsilon, "prior": mode})


def limit_estimator_exact(means: dict, level) -> np.ndarray:
    """Closed-form infinite-data limit (1 + sum_{i in level} m_i sigma_i) / 2."""
    r = level_bloch(means, ObservationLevel(level))
    if check_consistency(r) == INCONSISTENT:
        raise InconsistentMeansError(f"sum of squared means {np.sum(r ** 2):.12g} exceeds 1")
    norm = np.linalg.norm(r)
    return density_from_bloch(r / norm if norm > 1 else r)
