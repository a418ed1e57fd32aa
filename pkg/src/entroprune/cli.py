"""
Command-line interface.

Subcommands: ``prune``, ``sweep-lambda``, ``validate-objective``,
``benchmark`` and ``oracle``. Input comes from a prediction-matrix CSV pair
(``--predictions``/``--labels``), a dataset CSV bagged on the fly
(``--dataset``) or a synthetic generator string (``--generator``). Values
resolve in the order: built-in defaults, ``--config`` key=value file,
command-line flags. ``ENTROPRUNE_SEED`` supplies the seed when neither the
file nor the flags do.

Reports go to ``--out`` (or stdout) as JSON or CSV; files are written to a
temporary name and renamed, so a failed run never leaves partial output.
On error the exit status is nonzero and a JSON error object is printed to
stderr.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .distributed import CRITERIA, benchmark_speedup
from .ensemble_io import (
    SplitSpec,
    atomic_write,
    bagging_train,
    load_dataset,
    load_predictions,
    synthetic_ensemble,
)
from .errors import ConfigurationError, EntroPruneError
from .harness import (
    DEFAULT_K_GRID,
    DEFAULT_LAMBDA_GRID,
    oracle_compare,
    oracle_sweep,
    run_prune,
    sweep_lambda,
    validate_objective,
)
from .objective import DEFAULT_LAMBDA, ORACLE_CAP, ObjectiveParams

DEFAULTS = {
    "algo": "comep",
    "lambda": DEFAULT_LAMBDA,
    "k": 5,
    "machines": 1,
    "workers": None,
    "seed": None,
    "criterion": "tdas",
    "predictions": None,
    "labels": None,
    "test_predictions": None,
    "test_labels": None,
    "dataset": None,
    "base": "stump",
    "estimators": 20,
    "generator": None,
    "out": None,
    "format": "json",
    "lambda_grid": ",".join(map(str, DEFAULT_LAMBDA_GRID)),
    "k_grid": ",".join(map(str, DEFAULT_K_GRID)),
    "combo_size": 3,
    "eval_set": "validation",
    "cap": ORACLE_CAP,
    "m_list": "1,2,3",
    "repetitions": 3,
    "instances": 0,
}

GENERATOR_DEFAULTS = {"n": 20, "d": 1000, "n_classes": 2, "base_accuracy": 0.7, "correlation": 0.3}

INT_KEYS = {"k", "machines", "workers", "seed", "estimators", "combo_size", "cap", "repetitions", "instances"}
FLOAT_KEYS = {"lambda"}


def _common(p):
    p.add_argument("--config", help="key=value file supplying defaults")
    p.add_argument("--algo", help="comep | reduce-error | kappa | random | domep | epfd:<name>")
    p.add_argument("--lambda", dest="lambda", type=float, help="trade-off weight in [0, 1]")
    p.add_argument("--k", type=int, help="target sub-ensemble size")
    p.add_argument("--machines", type=int, help="number of simulated machines")
    p.add_argument("--workers", type=int, help="worker-pool width (default: machines)")
    p.add_argument("--seed", type=int)
    p.add_argument("--criterion", choices=CRITERIA)
    p.add_argument("--predictions", help="validation prediction matrix CSV")
    p.add_argument("--labels", help="validation labels CSV")
    p.add_argument("--test-predictions", dest="test_predictions")
    p.add_argument("--test-labels", dest="test_labels")
    p.add_argument("--dataset", help="dataset CSV to bag")
    p.add_argument("--base", choices=("stump", "one_nn"), help="bagging base learner")
    p.add_argument("--estimators", type=int, help="bagging ensemble size")
    p.add_argument("--generator", help="synthetic ensemble settings, e.g. n=20,d=1000,base_accuracy=0.7,correlation=0.3")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"))


class _Parser(argparse.ArgumentParser):
    """Argument errors become the same JSON error object as every other failure."""

    def error(self, message):
        sys.stderr.write(json.dumps({"error": "configuration", "message": message}) + "\n")
        sys.exit(2)


def build_parser():
    parser = _Parser(prog="entroprune", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prune", help="prune one ensemble and report accuracies")
    _common(p)

    p = sub.add_parser("sweep-lambda", help="accuracy over a (lambda, k) grid")
    _common(p)
    p.add_argument("--lambda-grid", dest="lambda_grid")
    p.add_argument("--k-grid", dest="k_grid")

    p = sub.add_parser("validate-objective", help="objective vs accuracy over all combinations")
    _common(p)
    p.add_argument("--combo-size", dest="combo_size", type=int)
    p.add_argument("--eval-set", dest="eval_set", choices=("validation", "test"))
    p.add_argument("--cap", type=int)

    p = sub.add_parser("benchmark", help="speedup and efficiency of the distributed pruner")
    _common(p)
    p.add_argument("--m-list", dest="m_list")
    p.add_argument("--repetitions", type=int)

    p = sub.add_parser("oracle", help="greedy and distributed pruning vs exhaustive search")
    _common(p)
    p.add_argument("--instances", type=int, help="run a sweep over this many random instances")
    p.add_argument("--cap", type=int)
    return parser


def read_config_file(path):
    """Parse ``key=value`` lines; ``#`` starts a comment. Dashes in keys become underscores."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}, line {lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigurationError(f"{path}, line {lineno}: unknown key {key!r}")
            out[key] = value
    return out


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in INT_KEYS:
            return int(value)
        if key in FLOAT_KEYS:
            return float(value)
    except ValueError:
        raise ConfigurationError(f"{key} expects a number, got {value!r}") from None
    return value


def resolve_config(args):
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg = {k: _coerce(k, v) for k, v in cfg.items()}
    if cfg["seed"] is None and os.environ.get("ENTROPRUNE_SEED"):
        cfg["seed"] = _coerce("seed", os.environ["ENTROPRUNE_SEED"])
    cfg["command"] = args.command
    return cfg


def parse_generator(text):
    params = dict(GENERATOR_DEFAULTS)
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in part:
            raise ConfigurationError(f"generator entry {part!r} is not key=value")
        key, value = (s.strip() for s in part.split("=", 1))
        if key not in GENERATOR_DEFAULTS:
            raise ConfigurationError(f"unknown generator key {key!r}; known: {sorted(GENERATOR_DEFAULTS)}")
        try:
            params[key] = type(GENERATOR_DEFAULTS[key])(value)
        except ValueError:
            raise ConfigurationError(f"generator {key} expects a number, got {value!r}") from None
    return params


def load_inputs(cfg):
    """Validation and (optional) test prediction matrices for a config."""
    sources = [bool(cfg["predictions"] or cfg["labels"]), bool(cfg["dataset"]), bool(cfg["generator"])]
    if sum(sources) != 1:
        raise ConfigurationError("give exactly one input: --predictions/--labels, --dataset or --generator")
    if cfg["predictions"] or cfg["labels"]:
        if not (cfg["predictions"] and cfg["labels"]):
            raise ConfigurationError("--predictions and --labels go together")
        val = load_predictions(cfg["predictions"], cfg["labels"])
        test = None
        if cfg["test_predictions"] or cfg["test_labels"]:
            if not (cfg["test_predictions"] and cfg["test_labels"]):
                raise ConfigurationError("--test-predictions and --test-labels go together")
            test = load_predictions(cfg["test_predictions"], cfg["test_labels"])
            if test.n != val.n:
                raise ConfigurationError(f"test matrix has {test.n} classifiers, validation has {val.n}")
        return val, test
    if cfg["dataset"]:
        data = load_dataset(cfg["dataset"])
        return bagging_train(data, SplitSpec(seed=cfg["seed"]), cfg["estimators"], cfg["base"], cfg["seed"])
    g = parse_generator(cfg["generator"])
    # one draw of 2d instances: first half validation, second half test
    ens = synthetic_ensemble(g["n"], 2 * g["d"], g["n_classes"], g["base_accuracy"],
                             g["correlation"], cfg["seed"])
    return ens.instances(np.arange(g["d"])), ens.instances(np.arange(g["d"], 2 * g["d"]))


def _ints(text):
    return [int(s) for s in str(text).split(",") if s.strip()]


def _floats(text):
    return [float(s) for s in str(text).split(",") if s.strip()]


def cmd_prune(cfg):
    val, test = load_inputs(cfg)
    params = ObjectiveParams(k=cfg["k"], lam=cfg["lambda"])
    return run_prune(val, test, params, cfg["algo"], cfg["machines"], cfg["criterion"],
                     cfg["seed"], cfg["workers"])


def cmd_sweep_lambda(cfg):
    val, test = load_inputs(cfg)
    rows = sweep_lambda(val, test, _floats(cfg["lambda_grid"]), _ints(cfg["k_grid"]),
                        cfg["machines"], cfg["seed"])
    return {"rows": rows}


def cmd_validate_objective(cfg):
    val, test = load_inputs(cfg)
    if cfg["eval_set"] == "test" and test is None:
        raise ConfigurationError("--eval-set test needs a test matrix")
    eval_ens = test if cfg["eval_set"] == "test" else val
    return validate_objective(val, eval_ens, cfg["combo_size"], cfg["lambda"], cfg["cap"])


def cmd_benchmark(cfg):
    val, _ = load_inputs(cfg)
    params = ObjectiveParams(k=cfg["k"], lam=cfg["lambda"])
    seed = 0 if cfg["seed"] is None else cfg["seed"]
    rows = benchmark_speedup(val, params, _ints(cfg["m_list"]), cfg["repetitions"], seed,
                             workers=cfg["workers"] or 1)
    return {"rows": rows}


def cmd_oracle(cfg):
    machines = [m for m in (2, 3) if cfg["machines"] in (1, m)] or [cfg["machines"]]
    if cfg["instances"]:
        seed = 0 if cfg["seed"] is None else cfg["seed"]
        return oracle_sweep(cfg["instances"], lam=cfg["lambda"], machines=machines, seed=seed)
    val, _ = load_inputs(cfg)
    params = ObjectiveParams(k=cfg["k"], lam=cfg["lambda"])
    return oracle_compare(val, params, machines, cfg["seed"], cfg["cap"])


COMMANDS = {
    "prune": cmd_prune,
    "sweep-lambda": cmd_sweep_lambda,
    "validate-objective": cmd_validate_objective,
    "benchmark": cmd_benchmark,
    "oracle": cmd_oracle,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        # NaN/inf have no JSON form; null is the documented sentinel
        return obj if math.isfinite(obj) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _cell(value):
    if isinstance(value, (list, tuple)):
        return " ".join(str(_cell(v)) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return "" if value is None else value


def _flatten(row):
    # a list of per-machine dicts becomes columns like domep_m2_ratio
    out = {}
    for key, value in row.items():
        if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            for i, item in enumerate(value):
                tag = f"m{item['m']}" if "m" in item else str(i)
                out.update((f"{key}_{tag}_{f}", v) for f, v in item.items() if f != "m")
        else:
            out[key] = value
    return out


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=False) + "\n"
    rows = report["result"].get("rows")
    if rows is None:
        rows = [{k: v for k, v in report["result"].items()}]
    rows = [_flatten(r) for r in rows]
    buf = io.StringIO()
    fields = list(rows[0]) if rows else []
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        result = COMMANDS[args.command](cfg)
        echo = {k: v for k, v in cfg.items() if k != "command"}
        report = _jsonable({"command": args.command, "version": __version__,
                            "config": echo, "result": result})
        text = render(report, cfg["format"])
        if cfg["out"]:
            atomic_write(cfg["out"], text)
        else:
            sys.stdout.write(text)
    except (EntroPruneError, OSError) as exc:
        kind = "configuration" if isinstance(exc, ConfigurationError) else type(exc).__name__
        sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
        return 2 if isinstance(exc, ConfigurationError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
