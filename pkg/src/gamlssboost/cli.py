"""Batch command-line interface: ``gamlssboost {fit,cv,simulate}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from .csvio import (
    DataFormatError,
    read_dataset,
    write_coefficients,
    write_csv,
    write_risk_path,
    write_study,
    write_trace,
)
from .engine import boost_cyclical, boost_noncyclical
from .errors import DegenerateDataError, DimensionError, GamlssBoostError, NumericError, UsageError
from .simulate import CvSettings, SimDesign, run_study
from .stepsize import StepPolicy
from .tuning import kfold_cv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

# Built-in defaults, applied after the config file and the flags.
DEFAULTS: Dict[str, Any] = {
    "response": "y",
    "policy": "saasl",
    "lambda": 0.1,
    "nu0": 0.1,
    "interval_mu": "0:10",
    "interval_sigma": "0:1",
    "tol": 1e-6,
    "mstop": 100,
    "mmax": 1000,
    "folds": 10,
    "seed": 0,
    "out": ".",
    "design": "balanced",
    "n": 500,
    "p_ninf": None,
    "B": 1,
    "policies": "fsl,saasl",
    "cyclical": None,
    "refit": False,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _interval(value) -> tuple:
    if isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = str(value).split(":")
    if len(parts) != 2:
        raise UsageError(f"interval must look like LO:HI, got {value!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"interval must look like LO:HI, got {value!r}") from None


def _mmax(value):
    """An integer, or ``policy=int`` pairs separated by commas (or a JSON object)."""
    if isinstance(value, dict):
        return {str(k).lower(): int(v) for k, v in value.items()}
    text = str(value)
    try:
        if "=" not in text:
            return int(text)
        out = {}
        for item in text.split(","):
            key, _, num = item.partition("=")
            out[key.strip().lower()] = int(num)
        return out
    except ValueError:
        raise UsageError(f"cannot parse m_max {value!r}") from None


def _int(value, name) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be an integer, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gamlssboost", description="Gaussian location-scale boosting with adaptive step-lengths.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, data=True):
        if data:
            p.add_argument("input", nargs="?", help="CSV file with a header row")
            p.add_argument("--response", help="name of the response column (default y)")
        p.add_argument("--config", help="JSON file with settings; flags override it")
        p.add_argument("--policy", choices=["fsl", "asl", "saasl", "saasl05"])
        p.add_argument("--lambda", dest="lambda", type=float, help="shrinkage applied to the optimal step")
        p.add_argument("--nu0", type=float, help="fixed step for FSL")
        p.add_argument("--interval-mu", dest="interval_mu", help="line-search interval for mu, LO:HI")
        p.add_argument("--interval-sigma", dest="interval_sigma", help="line-search interval for sigma, LO:HI")
        p.add_argument("--tol", type=float, help="line-search tolerance")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")

    p_fit = sub.add_parser("fit", help="fit a model and write coefficients, trace and risk path")
    common(p_fit)
    p_fit.add_argument("--mstop", type=int, help="number of boosting iterations")
    p_fit.add_argument("--cyclical", help="cyclical updates with stops MU:SIGMA")

    p_cv = sub.add_parser("cv", help="choose m_stop by K-fold cross-validation")
    common(p_cv)
    p_cv.add_argument("--mmax", help="largest m_stop considered")
    p_cv.add_argument("--folds", type=int)
    p_cv.add_argument("--refit", action="store_true", default=None, help="also fit the full data at m_best")

    p_sim = sub.add_parser("simulate", help="run a simulation study and write study.csv")
    common(p_sim, data=False)
    p_sim.add_argument("--design", choices=["balanced", "large_variance"])
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--p-ninf", dest="p_ninf", type=int)
    p_sim.add_argument("--B", type=int, help="number of replicates")
    p_sim.add_argument("--policies", help="comma-separated policies, e.g. fsl,saasl")
    p_sim.add_argument("--mmax", help="int, or per policy: fsl=20000,saasl=3000")
    p_sim.add_argument("--folds", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> Dict[str, Any]:
    """Merge built-in defaults, the JSON config file and the flags (highest priority)."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS) - {"input", "command"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key != "config" and value is not None:
            cfg[key] = value
    return cfg


def policy_from(cfg: Dict[str, Any], kind: Optional[str] = None) -> StepPolicy:
    return StepPolicy(
        kind=kind or cfg["policy"],
        lam=float(cfg["lambda"]),
        nu0=float(cfg["nu0"]),
        interval_mu=_interval(cfg["interval_mu"]),
        interval_sigma=_interval(cfg["interval_sigma"]),
        tol=float(cfg["tol"]),
    )


def _outdir(cfg) -> Path:
    out = Path(cfg["out"])
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _load(cfg):
    if not cfg.get("input"):
        raise UsageError("no input CSV given")
    return read_dataset(cfg["input"], cfg["response"])


def _write_fit(out: Path, model, data) -> None:
    write_coefficients(out / "coefficients.csv", model)
    write_trace(out / "trace.csv", model)
    write_risk_path(out / "risk_path.csv", model, data)


def cmd_fit(cfg: Dict[str, Any]) -> int:
    data = _load(cfg)
    policy = policy_from(cfg)
    if cfg.get("cyclical"):
        stop_mu, stop_sigma = (_int(v, "cyclical stop") for v in _interval(cfg["cyclical"]))
        model = boost_cyclical(data, policy, stop_mu, stop_sigma)
    else:
        model = boost_noncyclical(data, policy, _int(cfg["mstop"], "mstop"))
    _write_fit(_outdir(cfg), model, data)
    return EXIT_OK


def cmd_cv(cfg: Dict[str, Any]) -> int:
    data = _load(cfg)
    policy = policy_from(cfg)
    m_max = _mmax(cfg["mmax"])
    if isinstance(m_max, dict):
        m_max = CvSettings(m_max=m_max).m_max_for(policy)
    res = kfold_cv(data, policy, m_max, _int(cfg["folds"], "folds"), seed=_int(cfg["seed"], "seed"))
    out = _outdir(cfg)
    write_csv(out / "cv_curve.csv", ("m", "mean_out_of_fold_risk"), enumerate(res.mean_risk))
    (out / "m_best.txt").write_text(f"{res.m_best}\n", encoding="utf-8")
    if cfg.get("refit"):
        _write_fit(out, boost_noncyclical(data, policy, res.m_best), data)
    return EXIT_OK


def cmd_simulate(cfg: Dict[str, Any]) -> int:
    names = [p.strip() for p in str(cfg["policies"]).split(",") if p.strip()]
    policies = [policy_from(cfg, name) for name in names]
    p_ninf = cfg.get("p_ninf")
    design = SimDesign(
        str(cfg["design"]), _int(cfg["n"], "n"),
        None if p_ninf is None else _int(p_ninf, "p_ninf"), _int(cfg["seed"], "seed"),
    )
    cv = CvSettings(K=_int(cfg["folds"], "folds"), m_max=_mmax(cfg["mmax"]))
    for policy in policies:
        cv.m_max_for(policy)
    rows = run_study(design, policies, _int(cfg["B"], "B"), cv)
    out = _outdir(cfg)
    write_study(out / "study.csv", rows)
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "cv": cmd_cv, "simulate": cmd_simulate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"gamlssboost: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, DegenerateDataError, DimensionError) as exc:
        print(f"gamlssboost: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"gamlssboost: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except GamlssBoostError as exc:
        print(f"gamlssboost: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
