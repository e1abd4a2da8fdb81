"""Command-line entry points.

Subcommands: ``gen`` (dataset generation), ``train-predictor``,
``train-agent``, ``eval`` (scores a policy roster against the true
simulator), ``sweep-alpha`` and ``run`` (the full benchmark). The
``DEDUCT_SEED`` environment variable overrides the config seeds. Exit
codes: 0 success, 2 configuration error, 3 training divergence, 4 I/O
error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .agents.flat import FlatQAgent
from .agents.hierarchical import HierarchicalQAgent
from .bench.metrics import succ_rate
from .bench.rollout import run_policy_on_records
from .bench.runner import (
    alpha_sweep,
    build_seed_context,
    run_experiment,
    train_policy,
    write_episode_logs,
    write_per_seed,
    write_report,
    _report_rows,
)
from .config import load_config
from .errors import ConfigurationError, DatasetIOError, DeductError, TrainingDivergenceError
from .policies import (
    BalanceDnnRegressor,
    FlatAgentPolicy,
    FullDeductionPolicy,
    HeuristicHalvingPolicy,
    HierAgentPolicy,
    PredictiveDnnPolicy,
)
from .predictor.model import BalancePredictor, train_predictor
from .sim.dataset_io import export_dataset, load_dataset
from .sim.generator import generate_accounts, population_stats

POLICY_CHOICES = ("full", "heuristic", "dnn", "dqn", "dqn-ce", "dqn-a2", "dqn-a2ce")


def _split_records(records, config):
    n_train = config.bench.train_accounts
    n_eval = config.bench.eval_accounts
    if len(records) < n_train + n_eval:
        raise ConfigurationError(
            f"dataset holds {len(records)} accounts; bench split needs "
            f"{n_train + n_eval}"
        )
    return records[:n_train], records[n_train:n_train + n_eval]


def cmd_gen(args):
    config = load_config(args.config)
    records = generate_accounts(config.simulation)
    os.makedirs(os.path.dirname(os.path.abspath(args.out)) or ".", exist_ok=True)
    export_dataset(records, args.out)
    stats = population_stats(records)
    print(f"wrote {len(records)} accounts to {args.out}")
    for key, value in stats.items():
        print(f"  {key}: {value:.4f}" if isinstance(value, float) else f"  {key}: {value}")
    return 0


def cmd_train_predictor(args):
    config = load_config(args.config)
    records = load_dataset(args.data)
    train_records, _ = _split_records(records, config)
    model, report = train_predictor(train_records, config.predictor,
                                    seed=config.simulation.seed)
    model.save(args.out)
    print(f"trained on {report['train_rows']} rows, "
          f"validation MAPE {report['val_mape']:.4f}; saved to {args.out}")
    return 0


def cmd_train_agent(args):
    config = load_config(args.config)
    records = load_dataset(args.data)
    _split_records(records, config)  # validates sizes
    # Rebuild the full seed context so the behavior logs / corrected
    # environments match the benchmark pipeline exactly.
    ctx = build_seed_context(config, config.simulation.seed)
    if args.predictor:
        ctx.predictor = BalancePredictor.load(args.predictor)
    policy, model = train_policy(args.policy, ctx, config)
    if model is None:
        raise ConfigurationError(f"policy {args.policy!r} has nothing to train")
    model.save(args.out)
    print(f"trained {args.policy}; saved to {args.out}")
    return 0


def _load_policy(name, agents_dir, config):
    if name == "full":
        return FullDeductionPolicy(retry_daily=config.bench.retry_daily)
    if name == "heuristic":
        return HeuristicHalvingPolicy()
    path = os.path.join(agents_dir, f"{name}.npz")
    if not os.path.exists(path):
        raise ConfigurationError(f"missing checkpoint for policy {name!r}: {path}")
    if name == "dnn":
        return PredictiveDnnPolicy(BalanceDnnRegressor.load(path))
    if name in ("dqn", "dqn-ce"):
        return FlatAgentPolicy(FlatQAgent.load(path))
    return HierAgentPolicy(HierarchicalQAgent.load(path))


def cmd_eval(args):
    config = load_config(args.config)
    records = load_dataset(args.data)
    _, eval_records = _split_records(records, config)
    cost = config.simulation.cost_minor
    seed = config.simulation.seed
    per_seed = []
    out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
    os.makedirs(out_dir, exist_ok=True)
    for name in config.bench.policies:
        policy = _load_policy(name, args.agents, config)
        logs, _ = run_policy_on_records(eval_records, policy, cost)
        per_seed.append({
            "seed": seed, "policy": name, "succ_rate": succ_rate(logs),
            "total_deducted": sum(l.total_deducted for l in logs),
            "total_cost": sum(l.total_cost for l in logs),
            "attempts": sum(len(l.attempts) for l in logs),
            "total_bill": sum(l.bill for l in logs),
        })
        write_episode_logs(os.path.join(out_dir, f"logs_{name}.jsonl"), logs)
        print(f"{name}: SuccRate {per_seed[-1]['succ_rate']:.4f}")
    write_report(args.out, _report_rows(per_seed, tuple(config.bench.policies), (seed,)))
    return 0


def cmd_sweep_alpha(args):
    config = load_config(args.config)
    grid = tuple(x.strip() for x in args.grid.split(",") if x.strip())
    rows = alpha_sweep(config, grid=grid, out_dir=args.out)
    for row in rows:
        print(f"alpha {row['alpha']}: SuccRate {row['succ_rate_mean']:.4f} "
              f"(std {row['succ_rate_std']:.4f})")
    return 0


def cmd_run(args):
    config = load_config(args.config)
    seeds = None
    if args.seeds:
        seeds = tuple(int(s) for s in args.seeds.split(",") if s.strip())
    os.makedirs(args.out, exist_ok=True)
    report = run_experiment(config, seeds=seeds, out_dir=args.out)
    print(f"{'policy':>10}  {'mean':>8}  {'std':>8}")
    for row in report.rows:
        print(f"{row['policy']:>10}  {row['succ_rate_mean']:8.4f}  {row['succ_rate_std']:8.4f}")
    print(f"report written to {os.path.join(args.out, 'report.csv')}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="deduct",
                                     description="deduction-path workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic account dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("train-predictor", help="fit the balance corrector")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_train_predictor)

    p = sub.add_parser("train-agent", help="train one learned policy")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--predictor", default=None)
    p.add_argument("--policy", required=True, choices=POLICY_CHOICES)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_train_agent)

    p = sub.add_parser("eval", help="evaluate the policy roster on held-out accounts")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--agents", required=True, help="directory of agent checkpoints")
    p.add_argument("--out", required=True, help="report CSV path")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("sweep-alpha", help="correction-weight sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", required=True, help='comma list, e.g. "0,0.5,1.1,1.6"')
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_sweep_alpha)

    p = sub.add_parser("run", help="full benchmark over all seeds and policies")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seeds", default=None)
    p.set_defaults(fn=cmd_run)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except TrainingDivergenceError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 3
    except DatasetIOError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return 4
    except DeductError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
