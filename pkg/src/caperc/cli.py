"""``caperc`` command line.

Subcommands::

    caperc sample  --n N --k K --lambda L1,L2,... --seed S      edge list to stdout
    caperc ca      [FILE]                                        partition CSV (+ census)
    caperc theory  PREDICTOR [--arg value ...]                   JSON on stdout
    caperc run     PRESET [--n 1e5,1e6] [--trials T] ...         results, verdicts, manifest
    caperc verify  [--instances 1000]                            oracle self-test

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 an experiment verdict (or the self-test) failed.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import theory
from .census import ca_census, write_census_csv
from .connectivity import ca_oracle, ca_partition, write_partition_csv
from .experiments import PRESETS, ExperimentReport, parse_zeta_rule
from .model import ColoredMultigraph, ColorSet, ModelParams, read_edgelist, sample_model, write_edgelist
from .montecarlo import TrialError
from .rng import derive_seed, generator

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERDICT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


def parse_int(text: str) -> int:
    """Integer flag that also accepts scientific notation such as ``1e6``."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(x) or x != int(x):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(x)


def parse_int_list(text: str) -> list[int]:
    return [parse_int(t) for t in str(text).split(",") if t.strip()]


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


# ---------------------------------------------------------------------------
# theory predictors


def _theory_table() -> dict[str, tuple[list[tuple[str, Callable]], Callable]]:
    def tree(log_fn):
        return lambda a: _log_pair(log_fn(a.n, a.lam, a.s))

    def plain(fn):
        return lambda a: _value_pair(fn(a))

    def params_of(a) -> ModelParams:
        lams = a.__dict__["lambda"]
        return ModelParams(a.n, len(lams), tuple(lams))

    def classify(a):
        label = theory.classify_regime(params_of(a), a.window_tolerance)
        return label.kind.value, None, label.to_dict()

    def scale(a):
        p = params_of(a)
        label = theory.classify_regime(p, a.window_tolerance)
        pred = theory.predicted_max_ca_scale(label, a.n, p.k)
        extra = {"scale_kind": pred.kind, "constant_known": pred.constant_known, "regime": label.to_dict()}
        return pred.value, (math.log(pred.value) if pred.value else None), extra

    return {
        "rate-I": ([("t", float)], plain(lambda a: theory.rate_I(a.t))),
        "expected-tree-count": ([("n", parse_int), ("lam", float), ("s", parse_int)],
                                tree(theory.log_expected_tree_count)),
        "asymptotic-tree-count": ([("n", float), ("lam", float), ("s", parse_int)],
                                  tree(theory.log_asymptotic_tree_count)),
        "ell-cutoff": ([("n", float), ("lam", float), ("omega", float, 1.0)],
                       plain(lambda a: theory.ell_cutoff(a.n, a.lam, a.omega))),
        "m0": ([("n", float), ("q", float)], plain(lambda a: theory.m0_threshold(a.n, a.q))),
        "s1-peak": ([("M", float), ("q", float), ("lam", float)],
                    plain(lambda a: theory.s1_peak(a.M, a.q, a.lam))),
        "chernoff": ([("mu", float), ("delta", float)],
                     plain(lambda a: theory.chernoff_bound(a.mu, a.delta))),
        "giant": ([("n", float), ("lam", float)], plain(lambda a: theory.giant_size_estimate(a.n, a.lam))),
        "black-threshold": ([("n", float), ("q", float)],
                            plain(lambda a: theory.black_threshold_prediction(a.n, a.q))),
        "lambda-I-star": ([("lambda", parse_float_list), ("I", parse_int_list), ("n", parse_int, 10**6)],
                          plain(lambda a: theory.lambda_I_star(params_of(a), ColorSet.of(len(a.__dict__["lambda"]), a.I)))),
        "classify": ([("lambda", parse_float_list), ("n", parse_int, 10**6), ("window-tolerance", float, 1e-6)],
                     classify),
        "predicted-scale": ([("lambda", parse_float_list), ("n", parse_int),
                             ("window-tolerance", float, 1e-6)], scale),
    }


def _value_pair(value: float):
    return value, (math.log(value) if value > 0 else None), {}


def _log_pair(log_value: float):
    return math.exp(log_value), log_value, {}


def cmd_theory(args, out) -> int:
    table = _theory_table()
    sub = _Parser(prog=f"caperc theory {args.predictor}")
    spec = table[args.predictor][0]
    for item in spec:
        name, typ = item[0], item[1]
        if len(item) == 3:
            sub.add_argument(f"--{name}", type=typ, default=item[2])
        else:
            sub.add_argument(f"--{name}", type=typ, required=True)
    a = sub.parse_args(args.rest)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value, log_value, extra = table[args.predictor][1](a)
    doc = {
        "name": args.predictor,
        "inputs": {k: v for k, v in vars(a).items()},
        "value": value,
        "log_value": log_value,
        "validity_warnings": [str(w.message) for w in caught],
    }
    doc.update(extra)
    json.dump(doc, out, sort_keys=False)
    out.write("\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sample / ca / verify


def cmd_sample(args, out) -> int:
    params = ModelParams(args.n, args.k, tuple(args.lambdas))
    g = sample_model(params, args.seed, trial_index=args.trial)
    write_edgelist(g, out)
    return EXIT_OK


def cmd_ca(args, out) -> int:
    if args.input in (None, "-"):
        g = read_edgelist(sys.stdin)
    else:
        with open(args.input) as f:
            g = read_edgelist(f)
    p = ca_partition(g)
    write_partition_csv(p, out)
    if args.census_out:
        with open(args.census_out, "w", newline="") as f:
            write_census_csv(ca_census(p, g.k), f)
    return EXIT_OK


def random_instance(rng: np.random.Generator, max_n: int = 12, ks: Sequence[int] = (2, 3, 4)) -> ColoredMultigraph:
    """Small random colored graph; each layer has its own edge probability in {0.1..0.9}."""
    n = int(rng.integers(1, max_n + 1))
    k = int(rng.choice(ks))
    iu, iv = np.triu_indices(n, 1)
    layers = []
    for _ in range(k):
        p = float(rng.integers(1, 10)) / 10
        keep = rng.random(len(iu)) < p
        layers.append(np.column_stack((iu[keep], iv[keep])))
    return ColoredMultigraph(n, k, tuple(layers))


def oracle_mismatches(instances: int, seed: int) -> int:
    rng = generator(derive_seed(seed, 0, "verify"))
    bad = 0
    for _ in range(instances):
        g = random_instance(rng)
        if ca_partition(g).labeling != ca_oracle(g).labeling:
            bad += 1
    return bad


def cmd_verify(args, out) -> int:
    bad = oracle_mismatches(args.instances, args.seed)
    json.dump({"instances": args.instances, "seed": args.seed, "mismatches": bad}, out)
    out.write("\n")
    return EXIT_OK if bad == 0 else EXIT_VERDICT


# ---------------------------------------------------------------------------
# run


RUN_DEFAULTS: dict[str, dict] = {
    "regime-scaling": {"lambda": [1.3, 0.4], "n": [10**4, 3 * 10**4, 10**5], "trials": 30},
    "critical-window": {"zeta": "inv-log", "lambda_rest": 0.5, "n": [10**5, 10**6, 4 * 10**6], "trials": 30},
    "tree-census": {"lambda": [0.5], "n": [10**5], "trials": 100, "omega": 1.0},
    "black-threshold": {"lambda": [0.5], "q": 0.05, "n": [10**5, 10**6, 10**7], "trials": 30},
    "poisson": {"lambda": [0.4, 0.4], "n": [10**5], "trials": 500},
    "giant-lln": {"a": 0.25, "n": [10**5, 10**6], "trials": 30},
    "intersection": {"zeta": "inv-log", "lambda_rest": 0.5, "n": [10**6], "trials": 20, "threshold": 4},
}
COMMON_DEFAULTS = {"seed": 0, "workers": 1, "out": None}


def _merge_config(args) -> dict:
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(RUN_DEFAULTS[args.preset])
    if args.config:
        with open(args.config) as f:
            file_cfg = json.load(f)
        for key, val in file_cfg.items():
            key = key.replace("-", "_")
            if key == "n":
                val = parse_int_list(val) if isinstance(val, str) else [int(float(v)) for v in val]
            if key == "lambda" and isinstance(val, (int, float)):
                val = [float(val)]
            cfg[key] = val
    for key in ("n", "lambda", "trials", "seed", "workers", "out", "zeta", "lambda_rest", "q", "a",
                "threshold", "omega"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _single(values: list, what: str):
    if len(values) != 1:
        raise ValueError(f"{what} expects a single value, got {values}")
    return values[0]


def run_preset(cfg: dict, preset: str) -> ExperimentReport:
    common = {"trials": cfg["trials"], "master_seed": cfg["seed"], "workers": cfg["workers"]}
    if preset == "regime-scaling":
        return PRESETS[preset](cfg["lambda"], cfg["n"], **common)
    if preset == "critical-window":
        return PRESETS[preset](parse_zeta_rule(cfg["zeta"]), cfg["lambda_rest"], cfg["n"], **common)
    if preset == "tree-census":
        return PRESETS[preset](_single(cfg["lambda"], "--lambda"), _single(cfg["n"], "--n"),
                               omega=cfg["omega"], **common)
    if preset == "black-threshold":
        return PRESETS[preset](_single(cfg["lambda"], "--lambda"), cfg["q"], cfg["n"], **common)
    if preset == "poisson":
        return PRESETS[preset](cfg["lambda"], _single(cfg["n"], "--n"), **common)
    if preset == "giant-lln":
        return PRESETS[preset](cfg["a"], cfg["n"], **common)
    if preset == "intersection":
        return PRESETS[preset](parse_zeta_rule(cfg["zeta"]), cfg["lambda_rest"], _single(cfg["n"], "--n"),
                               threshold=cfg["threshold"], **common)
    raise UsageError(f"unknown preset {preset!r}")


def cmd_run(args, out) -> int:
    cfg = _merge_config(args)
    report = run_preset(cfg, args.preset)
    report.config["effective_cli_config"] = cfg
    outdir = Path(cfg["out"]) if cfg["out"] else Path("runs") / args.preset
    report.write(outdir)
    for v in report.verdicts:
        status = "PASS" if v.passed else "FAIL"
        n = f" n={v.n}" if v.n is not None else ""
        out.write(f"{status} {v.check}{n}: observed {v.observed} ({v.tolerance})\n")
    out.write(f"wrote {outdir}\n")
    return EXIT_OK if report.passed else EXIT_VERDICT


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="caperc", description="Color-avoiding percolation on k-colored random graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="sample a colored graph and print its edge list")
    s.add_argument("--n", type=parse_int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--lambda", dest="lambdas", type=parse_float_list, required=True,
                   help="comma-separated intensities, one per color")
    s.add_argument("--seed", type=parse_int, required=True)
    s.add_argument("--trial", type=int, default=0)

    c = sub.add_parser("ca", help="CA-partition of an edge list (stdin by default)")
    c.add_argument("input", nargs="?", default="-")
    c.add_argument("--census-out", help="also write the CA census CSV here")

    t = sub.add_parser("theory", help="evaluate a predictor and print JSON")
    t.add_argument("predictor", choices=sorted(_theory_table()))
    t.add_argument("rest", nargs=argparse.REMAINDER)

    r = sub.add_parser("run", help="run an experiment preset")
    r.add_argument("preset", choices=sorted(PRESETS))
    r.add_argument("--n", type=parse_int_list, help="n grid, e.g. 1e5,1e6")
    r.add_argument("--lambda", type=parse_float_list)
    r.add_argument("--trials", type=parse_int)
    r.add_argument("--seed", type=parse_int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out")
    r.add_argument("--config", help="JSON file of defaults (flags override it)")
    r.add_argument("--zeta", help="inv-log, power:<a> or const:<z>")
    r.add_argument("--lambda-rest", type=float)
    r.add_argument("--q", type=float)
    r.add_argument("--a", type=float)
    r.add_argument("--threshold", type=int)
    r.add_argument("--omega", type=float)

    v = sub.add_parser("verify", help="check the CA-partition against the brute-force oracle")
    v.add_argument("--instances", type=int, default=1000)
    v.add_argument("--seed", type=parse_int, default=0)
    return p


COMMANDS = {"sample": cmd_sample, "ca": cmd_ca, "theory": cmd_theory, "run": cmd_run, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (ValueError, TrialError, OSError, json.JSONDecodeError) as exc:
        err.write(f"caperc: error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
