"""Command-line entry point.

Subcommands: ``fit`` runs one boosting fit from a config file,
``oracle`` evaluates closed-form path points, ``rates`` certifies a
run against its geometric gap bound, ``experiment`` executes a named
scenario, ``report`` summarizes a written artifact. Exit codes:
0 success, 1 configuration error, 2 numeric error, 3 acceptance
failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from .boost import BoostConfig, run_boost
from .closedform import implicit_penalty, path_points
from .design import (
    BlockSpec,
    difference_penalty,
    export_matrix_csv,
    make_partition,
    single_block,
    singleton_blocks,
)
from .errors import ConfigError, IntegrityError, NumericError
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    _parse_value,
    emit_report,
    load_artifact,
    load_config,
    run_experiment,
    synth_glm_data,
)
from .losses import binomial, l2, poisson
from .rates import check_bound, rate_quadratic
from .tableio import write_csv

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_ACCEPTANCE = 3


def _read_ini(path):
    if path is None:
        raise ConfigError("--config is required for this subcommand")
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise ConfigError(f"cannot read config file {path}")
    return parser


def _section(parser, name):
    if not parser.has_section(name):
        return {}
    return {k: _parse_value(v) for k, v in parser[name].items()}


def _data_from_config(data, seed):
    n = int(data.get("n", 100))
    p = int(data.get("p", 2))
    rho = float(data.get("rho", 0.0))
    beta_true = data.get("beta_true", tuple([1.0] * p))
    if not isinstance(beta_true, tuple):
        beta_true = (beta_true,)
    family = str(data.get("family", "gaussian"))
    X, y = synth_glm_data(n, p, rho, beta_true, family, seed)
    return X, y, family


def _loss_for(family):
    if family == "gaussian":
        return l2()
    if family == "binomial":
        return binomial()
    if family == "poisson":
        return poisson()
    raise ConfigError(f"unsupported family {family!r}")


def _blocks_from_config(run, p):
    blocks = str(run.get("blocks", "singleton"))
    lam = float(run.get("lam", 0.0))
    penalty = str(run.get("penalty", "none"))
    if blocks == "singleton":
        sizes = [1] * p
    elif blocks == "joint":
        sizes = [p]
    else:
        sizes = [int(s) for s in str(blocks).split("+")]
        if sum(sizes) != p:
            raise ConfigError(f"block sizes {sizes} do not cover p={p}")
    specs = []
    start = 0
    for size in sizes:
        cols = tuple(range(start, start + size))
        start += size
        if penalty == "none" or lam == 0.0:
            specs.append(BlockSpec(cols))
        elif penalty == "ridge":
            specs.append(BlockSpec(cols, "ridge", lam))
        elif penalty == "diff2":
            if size < 3:
                raise ConfigError("diff2 penalty needs blocks of at least 3 columns")
            specs.append(BlockSpec(cols, "pspline", lam, difference_penalty(size, 2)))
        else:
            raise ConfigError(f"unknown penalty {penalty!r}")
    return specs


def _boost_config(run):
    return BoostConfig(
        nu=float(run.get("nu", 0.1)),
        max_iter=int(run.get("max_iter", 100)),
        mode=str(run.get("mode", "greedy")),
        init=str(run.get("init", "zero")),
        stop_tol=float(run.get("stop_tol", 0.0)),
        divergence_guard=bool(run.get("divergence_guard", False)),
    )


def _cmd_fit(args):
    parser = _read_ini(args.config)
    seed = args.seed if args.seed is not None else int(
        _section(parser, "experiment").get("seed", 0)
    )
    X, y, family = _data_from_config(_section(parser, "data"), seed)
    run = _section(parser, "run")
    part = make_partition(X, _blocks_from_config(run, X.shape[1]))
    path = run_boost(part, _loss_for(family), y, _boost_config(run))
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    target = out / "fit_path.csv"
    path.to_csv(target)
    print(f"wrote {target} ({path.n_steps} steps, "
          f"terminated by {path.terminated_by}, final loss "
          f"{path.losses[-1]:.6g})")
    return EXIT_OK


def _cmd_oracle(args):
    parser = _read_ini(args.config)
    seed = args.seed if args.seed is not None else int(
        _section(parser, "experiment").get("seed", 0)
    )
    X, y, family = _data_from_config(_section(parser, "data"), seed)
    if family != "gaussian":
        raise ConfigError("closed-form paths require the gaussian family")
    oracle = _section(parser, "oracle")
    nu = float(oracle.get("nu", 0.1))
    lam = float(oracle.get("lam", 0.0))
    penalty = str(oracle.get("penalty", "ridge"))
    ks = oracle.get("ks", (0, 1, 2, 5, 10, 100))
    if not isinstance(ks, tuple):
        ks = (ks,)
    ks = [int(k) for k in ks]
    p = X.shape[1]
    if lam == 0.0:
        P = None
    elif penalty == "ridge":
        P = np.eye(p)
    elif penalty == "diff2":
        P = difference_penalty(p, 2)
    else:
        raise ConfigError(f"unknown penalty {penalty!r}")
    pts = path_points(X, y, nu, ks, lam, P)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    target = out / "oracle_path.csv"
    write_csv(
        target,
        ["k"] + [f"beta_{j + 1}" for j in range(p)],
        [[k] + [float(v) for v in row] for k, row in zip(ks, pts)],
    )
    print(f"wrote {target}")
    gamma_ks = oracle.get("gamma_ks")
    if gamma_ks is not None:
        if not isinstance(gamma_ks, tuple):
            gamma_ks = (gamma_ks,)
        for k in gamma_ks:
            ip = implicit_penalty(X, y, P, lam, nu, int(k))
            gpath = out / f"implicit_penalty_k{int(k)}.csv"
            export_matrix_csv(ip.gamma, gpath)
            print(f"wrote {gpath}")
    return EXIT_OK


def _cmd_rates(args):
    parser = _read_ini(args.config)
    seed = args.seed if args.seed is not None else int(
        _section(parser, "experiment").get("seed", 0)
    )
    X, y, family = _data_from_config(_section(parser, "data"), seed)
    if family != "gaussian":
        raise ConfigError("rate certificates apply to the gaussian family")
    run = _section(parser, "run")
    part = make_partition(X, _blocks_from_config(run, X.shape[1]))
    cfg = _boost_config(run)
    path = run_boost(part, l2(), y, cfg)
    beta_star = np.linalg.lstsq(X, y, rcond=None)[0]
    loss_opt = 0.5 * float(np.sum((y - X @ beta_star) ** 2))
    gamma = rate_quadratic(X.T @ X, part.n_blocks, cfg.nu)
    report = check_bound(path, gamma, loss_opt, n_blocks=part.n_blocks, nu=cfg.nu)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    target = out / "rate_report.csv"
    report.to_csv(target)
    print(f"gamma = {gamma:.6f}")
    status = "compliant" if report.all_compliant else (
        f"violated first at k={report.first_violation()}"
    )
    print(f"gap bound: {status}")
    print(f"wrote {target}")
    return EXIT_OK if report.all_compliant else EXIT_ACCEPTANCE


def _cmd_experiment(args):
    if args.config:
        cfg = load_config(
            args.config,
            experiment=args.name,
            seed=args.seed,
            out_dir=args.out,
            svg=True if args.svg else None,
        )
    else:
        cfg = ExperimentConfig(
            experiment=args.name,
            seed=args.seed if args.seed is not None else 0,
            out_dir=args.out or ".",
            svg=bool(args.svg),
        )
    artifact = run_experiment(cfg)
    print(emit_report(artifact))
    return EXIT_OK if artifact.all_passed else EXIT_ACCEPTANCE


def _cmd_report(args):
    artifact = load_artifact(args.out)
    print(emit_report(artifact))
    return EXIT_OK if artifact.all_passed else EXIT_ACCEPTANCE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="amboost",
        description="boosting of additive models: fits, closed-form path "
        "oracles, rate certificates and reproducible experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", help="output directory")
        p.add_argument("--svg", action="store_true", help="emit SVG charts")

    p_fit = sub.add_parser("fit", help="one boosting run from a config file")
    common(p_fit)
    p_fit.set_defaults(func=_cmd_fit)

    p_oracle = sub.add_parser("oracle", help="closed-form path evaluation")
    common(p_oracle)
    p_oracle.set_defaults(func=_cmd_oracle)

    p_rates = sub.add_parser("rates", help="rate constants and bound compliance")
    common(p_rates)
    p_rates.set_defaults(func=_cmd_rates)

    p_exp = sub.add_parser("experiment", help="run a named scenario")
    p_exp.add_argument("name", choices=EXPERIMENTS)
    common(p_exp)
    p_exp.set_defaults(func=_cmd_experiment)

    p_rep = sub.add_parser("report", help="summarize a written artifact")
    p_rep.add_argument("--out", required=True, help="artifact directory")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, IntegrityError, configparser.Error, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
