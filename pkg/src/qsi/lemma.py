"""The normalized simplex density F and its N -> infinity concentration.

F(x | alpha) = prod_j x_j^(alpha_j N) / B on the (n-1)-simplex, with the
last coordinate x_n = 1 - sum(x). B is the Dirichlet normalizer
prod_j Gamma(alpha_j N + 1) / Gamma(N + n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln

from .bayes import McConfig, map_chunks


@dataclass(frozen=True)
class LemmaParams:
    alphas: tuple
    N: float

    def __post_init__(self):
        a = tuple(float(x) for x in self.alphas)
        object.__setattr__(self, "alphas", a)
        if len(a) < 2:
            raise ValueError("need at least two alphas")
        if any(x < 0 for x in a):
            raise ValueError("alphas must be non-negative")
        if abs(sum(a) - 1.0) > 1e-12:
            raise ValueError(f"alphas sum to {sum(a)!r}, expected 1")
        if self.N < 0:
            raise ValueError("N must be non-negative")

    @property
    def n(self) -> int:
        return len(self.alphas)

    @property
    def exponents(self) -> np.ndarray:
        return np.array(self.alphas) * self.N


def log_norm_constant(p: LemmaParams) -> float:
    """ln B = sum_j ln Gamma(alpha_j N + 1) - ln Gamma(N + n)."""
    a = p.exponents
    return float(np.sum(gammaln(a + 1)) - gammaln(a.sum() + p.n))


def log_norm_telescoped(p: LemmaParams) -> float:
    """ln B as a telescoped product of Beta functions.

    Integrates out x_{n-1}, x_{n-2}, ..., x_1 in turn:
    B(a_n+1, a_{n-1}+1) B(a_n+a_{n-1}+2, a_{n-2}+1) ... B(a_n+...+a_2+n-1, a_1+1).
    """
    a = p.exponents
    acc = a[-1] + 1.0
    total = 0.0
    for j in range(p.n - 2, -1, -1):
        total += betaln(acc, a[j] + 1.0)
        acc += a[j] + 1.0
    return float(total)


def _xlogy(a, x):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a * np.log(x)
    return np.where(a == 0, 0.0, out)


def _log_f_full(x_full: np.ndarray, p: LemmaParams, log_b: float) -> np.ndarray:
    """log F at points given with all n coordinates (last axis)."""
    return np.sum(_xlogy(p.exponents, x_full), axis=-1) - log_b


def log_F(x, p: LemmaParams) -> np.ndarray | float:
    """log F at a point (or array of points) of the (n-1)-simplex.

    Boundary points with a positive exponent give -inf; zero exponents use
    0 ln 0 = 0.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != p.n - 1:
        raise ValueError(f"expected {p.n - 1} coordinates, got {x.shape[-1]}")
    last = 1.0 - x.sum(axis=-1, keepdims=True)
    if np.any(x < 0) or np.any(last < -1e-15):
        raise ValueError("point outside the simplex")
    x_full = np.concatenate([x, np.clip(last, 0.0, None)], axis=-1)
    out = _log_f_full(x_full, p, log_norm_constant(p))
    return float(out) if out.ndim == 0 else out


def _smooth_rule(panels: int, order: int = 20):
    """Composite Gauss-Legendre rule on [0, 1] pushed through t = s^3 (10 - 15 s + 6 s^2).

    The map flattens endpoint singularities of x^a with fractional a.
    """
    g, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)
    s = (edges[:-1, None] + 0.5 * h[:, None] * (g[None, :] + 1)).ravel()
    ws = (0.5 * h[:, None] * w[None, :]).ravel()
    t = s ** 3 * (10 - 15 * s + 6 * s ** 2)
    dt = 30 * s ** 2 * (1 - s) ** 2
    return t, ws * dt


def default_panels(p: LemmaParams) -> int:
    return max(10, math.ceil(4 * math.sqrt(p.N + 1)))


def quadrature_grid_size(p: LemmaParams, panels: int | None = None, order: int = 20) -> int:
    return (order * (panels or default_panels(p))) ** (p.n - 1)


def _quadrature(p: LemmaParams, panels: int | None = None, order: int = 20):
    """Tensor-grid integrals of F, x_1 F and x_1^2 F over the simplex.

    Coordinates x_k = y_k t_k with y_1 = 1, y_{k+1} = y_k (1 - t_k); each
    t_k runs over [0, 1] with the smoothed composite rule.
    """
    panels = panels or default_panels(p)
    t, w = _smooth_rule(panels, order)
    dims = p.n - 1
    if quadrature_grid_size(p, panels, order) > 5e8:
        raise ValueError(f"quadrature grid too large ({len(t)}^{dims}); use monte_carlo")
    log_b = log_norm_constant(p)
    # integrate dims from the innermost outwards, one outer index block at a time
    grids = np.meshgrid(*([t] * dims), indexing="ij", sparse=True)
    wgrids = np.meshgrid(*([w] * dims), indexing="ij", sparse=True)
    y = 1.0
    xs = []
    jac = 1.0
    wt = 1.0
    for k in range(dims):
        xs.append(y * grids[k])
        jac = jac * y
        wt = wt * wgrids[k]
        y = y * (1.0 - grids[k])
    xs.append(y)
    logf = sum(_xlogy(a, xk) for a, xk in zip(p.exponents, xs)) - log_b
    dens = np.exp(logf) * jac * wt
    x1 = xs[0]
    return float(dens.sum()), float((dens * x1).sum()), float((dens * x1 * x1).sum())


def _mc_is(p: LemmaParams, cfg: McConfig):
    """Importance sampling of F with a widened Dirichlet proposal.

    Returns (integral, stderr, <x_1>, var x_1); the proposal normalizer is
    computed independently of ``log_norm_constant``'s parameters.
    """
    a = p.exponents
    conc = 0.5 * a + 1.0
    log_b = log_norm_constant(p)
    log_bq = float(np.sum(gammaln(conc)) - gammaln(conc.sum()))

    def work(index, size):
        rng = np.random.default_rng([cfg.seed, index])
        x = rng.dirichlet(conc, size=size)
        log_q = np.sum(_xlogy(conc - 1.0, x), axis=1) - log_bq
        ratio = np.exp(_log_f_full(x, p, log_b) - log_q)
        x1 = x[:, 0]
        return ratio.sum(), (ratio * ratio).sum(), (ratio * x1).sum(), (ratio * x1 * x1).sum()

    s, s2, m1, m2 = np.sum(map_chunks(work, cfg), axis=0)
    n = cfg.n_samples
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0)
    mu = m1 / s
    return float(mean), math.sqrt(var / n), float(mu), float(m2 / s - mu * mu)


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    stderr: float
    method: str


def integral_I(p: LemmaParams, method: str = "nested_quadrature", budget=None) -> IntegralEstimate:
    """Numerical integral of F over the simplex; equals 1 up to method error.

    ``budget`` is the panel count for ``nested_quadrature`` and an
    ``McConfig`` (or sample count) for ``monte_carlo``.
    """
    if p.N == 0:
        return IntegralEstimate(1.0, 0.0, method)
    if method == "nested_quadrature":
        if p.n > 5:
            raise ValueError("nested quadrature supports n <= 5")
        val, _, _ = _quadrature(p, budget)
        return IntegralEstimate(val, 0.0, method)
    if method == "monte_carlo":
        cfg = budget if isinstance(budget, McConfig) else McConfig(n_samples=int(budget or 10**6))
        val, se, _, _ = _mc_is(p, cfg)
        return IntegralEstimate(val, se, method)
    raise ValueError(f"unknown method {method!r}")


def simplex_moments(p: LemmaParams) -> tuple[np.ndarray, np.ndarray]:
    """Exact first and second moments of x_1..x_{n-1} under F."""
    a = p.exponents[:-1]
    tot = p.N + p.n
    first = (a + 1) / tot
    second = (a + 1) * (a + 2) / (tot * (tot + 1))
    return first, second


def quadrature_moments(p: LemmaParams, panels: int | None = None) -> tuple[float, float, float]:
    """(integral, <x_1>, var x_1) by nested quadrature."""
    z, m1, m2 = _quadrature(p, panels)
    mean = m1 / z
    return z, mean, m2 / z - mean * mean


def mc_moments(p: LemmaParams, cfg: McConfig = McConfig()) -> tuple[float, float, float]:
    """(integral, <x_1>, var x_1) by importance sampling."""
    z, _, mean, var = _mc_is(p, cfg)
    return z, mean, var


def beta_ratio_identity(n: int, m: int) -> float:
    """B(n+1, m) / B(n, m), which equals n / (n + m)."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    return math.exp(betaln(n + 1, m) - betaln(n, m))
