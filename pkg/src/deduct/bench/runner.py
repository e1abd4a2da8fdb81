"""Experiment orchestration.

One experiment, per seed: generate a fresh population, roll the incumbent
halving policy over the training split to produce historical logs, fit
the balance corrector on privileged labels, build corrected replay
environments, train every configured policy, and evaluate all of them
greedily on the held-out split against the true simulator. Reported
numbers are always recomputable from the raw episode logs shipped next
to the report.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from ..agents.flat import FlatQAgent
from ..agents.hierarchical import HierarchicalQAgent
from ..config import ExperimentConfig
from ..currency import parse_ratio
from ..errors import ConfigurationError
from ..policies import (
    BalanceDnnRegressor,
    FlatAgentPolicy,
    FullDeductionPolicy,
    HeuristicHalvingPolicy,
    HierAgentPolicy,
    PredictiveDnnPolicy,
    dnn_features,
)
from ..predictor.correction import build_corrected_env
from ..predictor.model import build_label_rows, build_sequence, train_predictor
from ..sim.dataset_io import export_dataset
from ..sim.generator import generate_accounts
from ..sim.types import DeductionAttempt, EpisodeLog
from .metrics import succ_rate
from .rollout import run_policy_on_records

LEARNED_POLICIES = ("dnn", "dqn", "dqn-ce", "dqn-a2", "dqn-a2ce")
CURVE_EVAL_ACCOUNTS = 96


@dataclass
class SeedContext:
    """Everything derived from one seed's population, reusable across policies."""

    seed: int
    train_records: list
    eval_records: list
    behavior_logs: dict
    predictor: object
    predictor_report: dict
    y_pred_minor: dict  # account_id -> per-day minor-unit estimates
    cost_minor: int


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)  # aggregated per policy
    per_seed: list = field(default_factory=list)  # (seed, policy, succ_rate, ...)
    seeds: tuple = ()

    def policy_mean(self, policy):
        for row in self.rows:
            if row["policy"] == policy:
                return row["succ_rate_mean"]
        raise KeyError(policy)


def mean_of(values):
    values = list(values)
    return sum(values) / len(values)


def pstd_of(values):
    values = list(values)
    m = mean_of(values)
    return (sum((v - m) ** 2 for v in values) / len(values)) ** 0.5


def build_seed_context(config: ExperimentConfig, seed: int) -> SeedContext:
    bench = config.bench
    n_total = bench.train_accounts + bench.eval_accounts
    sim = replace(config.simulation, seed=int(seed), accounts=n_total)
    records = generate_accounts(sim)
    train_records = records[:bench.train_accounts]
    eval_records = records[bench.train_accounts:n_total]
    cost = sim.cost_minor

    logs, _ = run_policy_on_records(train_records, HeuristicHalvingPolicy(), cost)
    behavior = {log.account_id: log for log in logs}

    predictor, report = train_predictor(train_records, config.predictor, seed=seed)

    y_pred = {}
    chunk_records = train_records
    seqs, owners = [], []
    for rec in chunk_records:
        for day in range(rec.horizon):
            seqs.append(build_sequence(rec.events, day, predictor.lookback_days,
                                       predictor.max_events))
            owners.append(rec.account_id)
    preds = predictor.predict_minor(seqs)
    cursor = 0
    for rec in chunk_records:
        y_pred[rec.account_id] = preds[cursor:cursor + rec.horizon]
        cursor += rec.horizon

    return SeedContext(
        seed=seed, train_records=train_records, eval_records=eval_records,
        behavior_logs=behavior, predictor=predictor, predictor_report=report,
        y_pred_minor=y_pred, cost_minor=cost,
    )


def corrected_training_envs(ctx: SeedContext, alpha):
    """Replay environments over the training split at the given correction weight."""
    return [
        build_corrected_env(
            rec, ctx.behavior_logs[rec.account_id], ctx.predictor, alpha,
            cost_minor=ctx.cost_minor, y_pred_by_day=ctx.y_pred_minor[rec.account_id],
        )
        for rec in ctx.train_records
    ]


def _fit_dnn_baseline(ctx: SeedContext, config) -> PredictiveDnnPolicy:
    by_id = {rec.account_id: rec for rec in ctx.train_records}
    ids, days, _, labels = build_label_rows(
        ctx.train_records, lookback_days=config.predictor.lookback_days,
        max_events=config.predictor.max_events,
    )
    feats = np.stack([
        dnn_features(by_id[i].events, by_id[i].profile, d, by_id[i].horizon)
        for i, d in zip(ids, days)
    ])
    cap = min(len(feats), config.predictor.max_labels)
    regressor = BalanceDnnRegressor(seed=ctx.seed)
    regressor.fit(feats[:cap], labels[:cap])
    return PredictiveDnnPolicy(regressor)


def _curve_eval_fn(ctx: SeedContext, adapter):
    probe = ctx.train_records[:CURVE_EVAL_ACCOUNTS]

    def evaluate(agent):
        logs, _ = run_policy_on_records(probe, adapter(agent), ctx.cost_minor)
        return succ_rate(logs)

    return evaluate


def train_policy(name, ctx: SeedContext, config: ExperimentConfig, with_curves=True):
    """Build (policy, trained_model_or_None) for one roster entry."""
    alpha = config.predictor.alpha
    agent_cfg = config.agent
    if name == "full":
        return FullDeductionPolicy(retry_daily=config.bench.retry_daily), None
    if name == "heuristic":
        return HeuristicHalvingPolicy(), None
    if name == "dnn":
        policy = _fit_dnn_baseline(ctx, config)
        return policy, policy.regressor
    if name in ("dqn", "dqn-ce"):
        envs = corrected_training_envs(ctx, 0 if name == "dqn" else alpha)
        agent = FlatQAgent.from_config(agent_cfg, seed=ctx.seed)
        eval_fn = _curve_eval_fn(ctx, FlatAgentPolicy) if with_curves else None
        agent.fit(envs, eval_episodes_fn=eval_fn)
        return FlatAgentPolicy(agent), agent
    if name in ("dqn-a2", "dqn-a2ce"):
        envs = corrected_training_envs(ctx, 0 if name == "dqn-a2" else alpha)
        agent = HierarchicalQAgent.from_config(agent_cfg, seed=ctx.seed)
        eval_fn = _curve_eval_fn(ctx, HierAgentPolicy) if with_curves else None
        agent.fit(envs, eval_episodes_fn=eval_fn)
        return HierAgentPolicy(agent), agent
    raise ConfigurationError(f"unknown policy {name!r}")


# -- persistence of results -------------------------------------------------


def write_episode_logs(path, logs):
    with open(path, "w", encoding="utf-8") as fh:
        for log in logs:
            obj = {
                "account_id": log.account_id,
                "bill": log.bill,
                "horizon": log.horizon,
                "attempts": [
                    {"day": a.day, "step": a.step, "requested": a.requested,
                     "outcome": a.outcome, "realized": a.realized, "cost": a.cost}
                    for a in log.attempts
                ],
            }
            fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def read_episode_logs(path):
    logs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            logs.append(EpisodeLog(
                account_id=obj["account_id"], bill=obj["bill"], horizon=obj["horizon"],
                attempts=tuple(
                    DeductionAttempt(day=a["day"], step=a["step"], requested=a["requested"],
                                     outcome=a["outcome"], realized=a["realized"],
                                     cost=a["cost"])
                    for a in obj["attempts"]
                ),
            ))
    return logs


def write_curves(path, curves):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,td_loss_upper,td_loss_lower,eval_succ_rate,epsilon\n")
        for row in curves:
            fh.write(
                f"{row['epoch']},{row['td_loss_upper']!r},{row['td_loss_lower']!r},"
                f"{row['eval_succ_rate']!r},{row['epsilon']!r}\n"
            )


def write_predictor_report(path, ctx: SeedContext):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("account_id,day,y_real,y_pred,abs_pct_err\n")
        for account_id, day, y_real, y_pred in ctx.predictor_report["rows"]:
            err = abs(y_pred - y_real) / y_real
            fh.write(f"{account_id},{day},{y_real},{y_pred},{err!r}\n")


def _report_rows(per_seed, policies, seeds):
    rows = []
    for policy in policies:
        entries = [r for r in per_seed if r["policy"] == policy]
        rates = [r["succ_rate"] for r in entries]
        rows.append({
            "policy": policy,
            "succ_rate_mean": mean_of(rates),
            "succ_rate_std": pstd_of(rates),
            "total_deducted": sum(r["total_deducted"] for r in entries),
            "total_cost": sum(r["total_cost"] for r in entries),
            "attempts": sum(r["attempts"] for r in entries),
            "seeds": "|".join(str(s) for s in seeds),
        })
    return rows


def write_report(path, rows):
    cols = ["policy", "succ_rate_mean", "succ_rate_std", "total_deducted",
            "total_cost", "attempts", "seeds"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(
                repr(row[c]) if isinstance(row[c], float) else str(row[c])
                for c in cols
            ) + "\n")


def write_per_seed(path, per_seed):
    cols = ["seed", "policy", "succ_rate", "total_deducted", "total_cost",
            "attempts", "total_bill"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for row in per_seed:
            fh.write(",".join(
                repr(row[c]) if isinstance(row[c], float) else str(row[c])
                for c in cols
            ) + "\n")


def run_experiment(config: ExperimentConfig, seeds=None, out_dir=None,
                   contexts=None) -> BenchReport:
    """Full benchmark over the configured policy roster.

    Writes report.csv, report_per_seed.csv, per-seed raw episode logs,
    training curves, predictor reports and checkpoints under ``out_dir``.
    ``contexts`` lets callers reuse prebuilt seed contexts (the sweep does).
    """
    config.validate()
    seeds = tuple(seeds) if seeds is not None else tuple(config.bench.seeds)
    if not seeds:
        raise ConfigurationError("at least one seed is required")
    policies = tuple(config.bench.policies)
    per_seed = []
    for seed in seeds:
        ctx = (contexts or {}).get(seed) if contexts else None
        if ctx is None:
            ctx = build_seed_context(config, seed)
            if contexts is not None:
                contexts[seed] = ctx
        seed_dir = None
        if out_dir is not None:
            seed_dir = os.path.join(out_dir, f"seed{seed}")
            for sub in ("logs", "curves", "checkpoints"):
                os.makedirs(os.path.join(seed_dir, sub), exist_ok=True)
            write_predictor_report(os.path.join(seed_dir, "predictor_report.csv"), ctx)
            ctx.predictor.save(os.path.join(seed_dir, "checkpoints", "predictor.npz"))
            export_dataset(
                ctx.train_records + ctx.eval_records,
                os.path.join(seed_dir, "dataset.jsonl"),
            )
        for name in policies:
            policy, model = train_policy(name, ctx, config)
            logs, _ = run_policy_on_records(ctx.eval_records, policy, ctx.cost_minor)
            rate = succ_rate(logs)
            per_seed.append({
                "seed": seed, "policy": name, "succ_rate": rate,
                "total_deducted": sum(l.total_deducted for l in logs),
                "total_cost": sum(l.total_cost for l in logs),
                "attempts": sum(len(l.attempts) for l in logs),
                "total_bill": sum(l.bill for l in logs),
            })
            if seed_dir is not None:
                write_episode_logs(os.path.join(seed_dir, "logs", f"{name}.jsonl"), logs)
                if model is not None and hasattr(model, "curves_"):
                    write_curves(os.path.join(seed_dir, "curves", f"{name}.csv"),
                                 model.curves_)
                if model is not None and hasattr(model, "save"):
                    model.save(os.path.join(seed_dir, "checkpoints", f"{name}.npz"))
    rows = _report_rows(per_seed, policies, seeds)
    report = BenchReport(rows=rows, per_seed=per_seed, seeds=seeds)
    if out_dir is not None:
        write_report(os.path.join(out_dir, "report.csv"), rows)
        write_per_seed(os.path.join(out_dir, "report_per_seed.csv"), per_seed)
        _write_run_meta(os.path.join(out_dir, "run_meta.json"), config, seeds)
    return report


def alpha_sweep(config: ExperimentConfig, grid=None, seeds=None, out_dir=None,
                contexts=None):
    """Train the hierarchical corrected-environment agent per alpha.

    Returns rows of (alpha, mean, std, per-seed rates); seed contexts
    (population, behavior logs, predictor) are shared across the grid, so
    only the replay capacities and agent training vary with alpha.
    """
    config.validate()
    grid = tuple(grid) if grid is not None else tuple(config.bench.alpha_grid)
    if not grid:
        raise ConfigurationError("alpha grid must be nonempty")
    seeds = tuple(seeds) if seeds is not None else tuple(config.bench.seeds)
    if contexts is None:
        contexts = {}
    for seed in seeds:
        if seed not in contexts:
            contexts[seed] = build_seed_context(config, seed)
    rows = []
    for alpha in grid:
        alpha_frac = parse_ratio(alpha)
        rates = []
        for seed in seeds:
            ctx = contexts[seed]
            sweep_cfg = ExperimentConfig(
                simulation=replace(config.simulation),
                predictor=replace(config.predictor, alpha=alpha_frac),
                agent=replace(config.agent),
                bench=replace(config.bench),
            )
            policy, _ = train_policy("dqn-a2ce", ctx, sweep_cfg, with_curves=False)
            logs, _ = run_policy_on_records(ctx.eval_records, policy, ctx.cost_minor)
            rates.append(succ_rate(logs))
        rows.append({
            "alpha": float(alpha),
            "succ_rate_mean": mean_of(rates),
            "succ_rate_std": pstd_of(rates),
            "per_seed": tuple(rates),
        })
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "alpha_sweep.csv"), "w", encoding="utf-8") as fh:
            fh.write("alpha,succ_rate_mean,succ_rate_std," +
                     ",".join(f"seed{s}" for s in seeds) + "\n")
            for row in rows:
                fh.write(f"{row['alpha']!r},{row['succ_rate_mean']!r},"
                         f"{row['succ_rate_std']!r}," +
                         ",".join(repr(r) for r in row["per_seed"]) + "\n")
    return rows


def _write_run_meta(path, config: ExperimentConfig, seeds):
    def simplify(obj):
        if hasattr(obj, "__dict__"):
            return {k: simplify(v) for k, v in sorted(vars(obj).items())}
        if isinstance(obj, dict):
            return {str(k): simplify(v) for k, v in sorted(obj.items())}
        if isinstance(obj, (list, tuple)):
            return [simplify(v) for v in obj]
        if isinstance(obj, (int, float, str, bool)) or obj is None:
            return obj
        return str(obj)

    meta = {"seeds": list(seeds), "config": simplify(config)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=1)
        fh.write("\n")
