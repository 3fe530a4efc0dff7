"""Config-driven comparison of Bayesian, MaxEnt and tomographic estimates."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .bayes import (EmptyShellError, McConfig, limit_estimator_kernel, posterior_mean_mixed,
                    posterior_mean_pure)
from .lemma import LemmaParams, mc_moments, quadrature_grid_size, quadrature_moments, simplex_moments
from .linalg import AXES, bloch_from_density, density_from_bloch, trace_distance
from .maxent import maxent_qubit
from .measurement import ObservationLevel, empirical_frequencies, empirical_means, parse_level, simulate_outcomes
from .tomography import linear_invert

ESTIMATORS = ("bayes_mixed", "bayes_pure", "maxent_exact", "tomography", "limit_kernel")
CSV_COLUMNS = ("N", "seed", "estimator", "rx", "ry", "rz", "trace_dist_to_true",
               "trace_dist_to_maxent", "ess", "wall_ms")
DEFAULT_EPSILON = 0.01
DEFAULT_ESS_THRESHOLD = 0.001


class ConfigError(ValueError):
    pass


def build_id() -> str:
    return f"qsi {__version__} ({kernels.BACKEND} kernels)"


@dataclass(frozen=True)
class ExperimentConfig:
    true_state: tuple
    level: ObservationLevel
    n_schedule: tuple
    seeds: tuple
    estimators: tuple
    mc: McConfig
    output_dir: str
    epsilon: float = DEFAULT_EPSILON
    exact_means: bool = False
    timing: bool = True

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        required = ("true_state", "level", "n_schedule", "seeds", "estimators", "mc", "output_dir")
        missing = [k for k in required if k not in d]
        if missing:
            raise ConfigError(f"missing config fields: {', '.join(missing)}")
        unknown = set(d) - set(required) - {"epsilon", "exact_means", "timing"}
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
        mc = dict(d["mc"])
        for k in ("n_samples", "seed", "chunk_size"):
            if k not in mc:
                raise ConfigError(f"missing mc field {k!r}")
        mc.setdefault("ess_threshold", DEFAULT_ESS_THRESHOLD)
        try:
            cfg = cls(
                true_state=tuple(float(x) for x in d["true_state"]),
                level=parse_level(d["level"]),
                n_schedule=tuple(int(n) for n in d["n_schedule"]),
                seeds=tuple(int(s) for s in d["seeds"]),
                estimators=tuple(d["estimators"]),
                mc=McConfig(**mc),
                output_dir=str(d["output_dir"]),
                epsilon=float(d.get("epsilon", DEFAULT_EPSILON)),
                exact_means=bool(d.get("exact_means", False)),
                timing=bool(d.get("timing", True)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from e
        cfg.validate()
        return cfg

    def validate(self):
        if len(self.true_state) != 3 or np.linalg.norm(self.true_state) > 1 + 1e-10:
            raise ConfigError("true_state must be a physical Bloch vector")
        if not self.n_schedule or any(b <= a for a, b in zip(self.n_schedule, self.n_schedule[1:])):
            raise ConfigError("n_schedule must be non-empty and strictly increasing")
        if any(n < 0 for n in self.n_schedule):
            raise ConfigError("n_schedule entries must be non-negative")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not self.estimators:
            raise ConfigError("at least one estimator is required")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad:
            raise ConfigError(f"unknown estimators {bad}; choose from {ESTIMATORS}")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")

    def to_json(self) -> dict:
        d = asdict(self)
        d["level"] = list(self.level)
        return d


def _cell_mc(cfg: ExperimentConfig, n: int, seed: int) -> McConfig:
    derived = int(np.random.SeedSequence([cfg.mc.seed, seed, n]).generate_state(1)[0])
    return replace(cfg.mc, seed=derived)


def _run_estimator(name, cfg, data, means, freqs, mc):
    """Returns (rho, ess) for one estimator; raises on failure."""
    if name in ("bayes_mixed", "bayes_pure"):
        if data is None:
            raise ValueError(f"{name} needs simulated data (exact_means is set)")
        fn = posterior_mean_mixed if name == "bayes_mixed" else posterior_mean_pure
        rep = fn(data, mc)
        return rep.rho, rep.ess
    if name == "maxent_exact":
        return maxent_qubit(means, cfg.level), None
    if name == "tomography":
        return linear_invert(freqs).projected_rho, None
    if name == "limit_kernel":
        rep = limit_estimator_kernel(means, cfg.level, cfg.epsilon, "mixed", mc)
        return rep.rho, rep.ess
    raise ValueError(name)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def atomic_write(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run every (N, seed, estimator) cell, write results.csv and manifest.json.

    Returns the manifest; ``manifest["failures"]`` lists cells that raised.
    """
    true_rho = density_from_bloch(np.array(cfg.true_state))
    true_means = {a: cfg.true_state[AXES.index(a)] for a in cfg.level}
    target = maxent_qubit(true_means, cfg.level)
    rows = []
    failures = []
    for n in cfg.n_schedule:
        for seed in sorted(cfg.seeds):
            if cfg.exact_means:
                data = None
                means = dict(true_means)
                freqs = {a: (1 + m) / 2 for a, m in means.items()}
            else:
                data = simulate_outcomes(true_rho, cfg.level, n, seed)
                means = empirical_means(data)
                freqs = {a: f[0] for a, f in empirical_frequencies(data).items()}
            mc = _cell_mc(cfg, n, seed)
            for name in sorted(cfg.estimators):
                t0 = time.perf_counter()
                try:
                    rho, ess = _run_estimator(name, cfg, data, means, freqs, mc)
                except (ValueError, EmptyShellError) as e:
                    failures.append({"N": n, "seed": seed, "estimator": name, "error": str(e)})
                    continue
                ms = (time.perf_counter() - t0) * 1e3 if cfg.timing else None
                r = bloch_from_density(rho)
                rows.append((n, seed, name, r[0], r[1], r[2], trace_distance(rho, true_rho),
                             trace_distance(rho, target), ess, ms))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    out = Path(cfg.output_dir)
    atomic_write(out / "results.csv", buf.getvalue())
    manifest = {
        "tool": build_id(),
        "config": cfg.to_json(),
        "n_rows": len(rows),
        "failures": failures,
        "maxent_target_bloch": bloch_from_density(target).tolist(),
    }
    atomic_write(out / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return manifest


LEMMA_COLUMNS = ("n", "N", "integral_I", "mean_x1", "var_x1", "analytic_mean", "analytic_var")


def lemma_sweep(alphas, n_list, N_list, out, mc: McConfig | None = None) -> str:
    """CSV of numerical vs analytic moments of F over a grid of (n, N).

    ``alphas`` maps each n to its alpha vector (a plain list is accepted
    when ``n_list`` has a single entry). Nested quadrature is used when the
    grid is small enough, importance sampling otherwise.
    """
    if not isinstance(alphas, dict):
        if len(n_list) != 1:
            raise ValueError("give one alpha vector per n as a mapping")
        alphas = {n_list[0]: alphas}
    alphas = {int(k): v for k, v in alphas.items()}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LEMMA_COLUMNS)
    for n in n_list:
        if n not in alphas or len(alphas[n]) != n:
            raise ValueError(f"need {n} alphas for n={n}")
        for N in N_list:
            p = LemmaParams(tuple(alphas[n]), N)
            if quadrature_grid_size(p) <= 5e7:
                z, mean, var = quadrature_moments(p)
            else:
                z, mean, var = mc_moments(p, mc or McConfig())
            first, second = simplex_moments(p)
            w.writerow([n, _fmt(N), _fmt(z), _fmt(mean), _fmt(var), _fmt(first[0]),
                        _fmt(second[0] - first[0] ** 2)])
    text = buf.getvalue()
    if out is not None:
        atomic_write(Path(out), text)
    return text
