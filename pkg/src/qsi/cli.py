"""Command-line entry point: ``qsi run``, ``qsi lemma-sweep``, ``qsi invert``, ``qsi simulate``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bayes import EmptyShellError, McConfig, limit_estimator_kernel, posterior_mean_mixed, posterior_mean_pure
from .experiment import ConfigError, ExperimentConfig, build_id, lemma_sweep, run_experiment
from .linalg import bloch_from_density, density_from_bloch, density_to_json
from .maxent import maxent_qubit
from .measurement import Dataset, empirical_frequencies, empirical_means, parse_level, simulate_outcomes
from .tomography import linear_invert


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e


def cmd_run(args) -> int:
    cfg = ExperimentConfig.from_dict(_load_json(args.config))
    manifest = run_experiment(cfg)
    print(f"wrote {manifest['n_rows']} rows to {Path(cfg.output_dir) / 'results.csv'}")
    for f in manifest["failures"]:
        print(f"failed: N={f['N']} seed={f['seed']} {f['estimator']}: {f['error']}", file=sys.stderr)
    return 1 if manifest["failures"] else 0


def cmd_lemma_sweep(args) -> int:
    d = _load_json(args.config)
    missing = [k for k in ("alphas", "n_list", "N_list", "out") if k not in d]
    if missing:
        raise ConfigError(f"missing config fields: {', '.join(missing)}")
    lemma_sweep(d["alphas"], [int(n) for n in d["n_list"]], d["N_list"], d["out"])
    print(f"wrote {d['out']}")
    return 0


def cmd_invert(args) -> int:
    data = Dataset.from_jsonl(Path(args.dataset).read_text())
    mc = McConfig(n_samples=args.n_samples, seed=args.seed, chunk_size=args.chunk_size)
    out = {"estimator": args.estimator, "n_events": len(data), "tool": build_id()}
    if args.estimator == "tomography":
        res = linear_invert({a: f[0] for a, f in empirical_frequencies(data).items()})
        out.update(rho=density_to_json(res.projected_rho), raw_bloch=res.raw_bloch.tolist(),
                   physical=res.physical)
    elif args.estimator == "maxent_exact":
        out["rho"] = density_to_json(maxent_qubit(empirical_means(data), data.level))
    elif args.estimator == "limit_kernel":
        out.update(limit_estimator_kernel(empirical_means(data), data.level, args.epsilon, "mixed", mc).to_json())
    else:
        fn = posterior_mean_mixed if args.estimator == "bayes_mixed" else posterior_mean_pure
        out.update(fn(data, mc).to_json())
    rho = out["rho"]
    out["bloch"] = bloch_from_density(np.array(rho["re"]) + 1j * np.array(rho["im"])).tolist()
    text = json.dumps(out, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    rho = density_from_bloch(np.array(args.bloch))
    data = simulate_outcomes(rho, parse_level(args.level), args.n, args.seed)
    Path(args.out).write_text(data.to_jsonl())
    print(f"wrote {len(data)} events to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsi", description=__doc__)
    p.add_argument("--version", action="version", version=build_id())
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a comparison experiment from a JSON config")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("lemma-sweep", help="tabulate simplex-density moments against N")
    s.add_argument("config")
    s.set_defaults(func=cmd_lemma_sweep)

    i = sub.add_parser("invert", help="reconstruct a state from a JSON-lines dataset")
    i.add_argument("dataset")
    i.add_argument("--estimator", default="tomography",
                   choices=["tomography", "maxent_exact", "bayes_mixed", "bayes_pure", "limit_kernel"])
    i.add_argument("--n-samples", type=int, default=10**6)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--chunk-size", type=int, default=2**17)
    i.add_argument("--epsilon", type=float, default=0.01)
    i.add_argument("-o", "--out")
    i.set_defaults(func=cmd_invert)

    m = sub.add_parser("simulate", help="write a simulated dataset")
    m.add_argument("--bloch", type=float, nargs=3, required=True)
    m.add_argument("--level", nargs="+", default=["z", "x", "y"])
    m.add_argument("--n", type=int, required=True, help="events per observable")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("-o", "--out", required=True)
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, EmptyShellError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
