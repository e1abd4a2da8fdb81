"""Experiment configuration.

Configs live in INI files with four sections: ``[simulation]`` for the
account generator and environment, ``[predictor]`` for the balance
corrector, ``[agent]`` for the Q-learning agents, and ``[bench]`` for the
benchmark harness. Every key has a code default, so a config file only
needs the keys it overrides. The environment variable ``DEDUCT_SEED``
overrides the seeds from the file.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

from .currency import parse_ratio, to_minor
from .errors import ConfigurationError


def _parse_mix(text: str) -> dict:
    mix = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, weight = part.partition(":")
        mix[name.strip()] = float(weight)
    total = sum(mix.values())
    if not mix or total <= 0:
        raise ConfigurationError(f"invalid archetype mix {text!r}")
    return {k: v / total for k, v in mix.items()}


def _parse_int_list(text: str) -> tuple:
    return tuple(int(x) for x in str(text).split(",") if str(x).strip())


def _parse_float_list(text: str) -> tuple:
    return tuple(float(x) for x in str(text).split(",") if str(x).strip())


def _parse_str_list(text: str) -> tuple:
    return tuple(x.strip() for x in str(text).split(",") if x.strip())


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"invalid boolean {text!r}")


@dataclass
class SimulationConfig:
    """Account generator and environment parameters."""

    accounts: int = 2500
    horizon_days: int = 30
    seed: int = 7
    archetype_mix: dict = field(
        default_factory=lambda: {"payday": 0.70, "low": 0.15, "dormant": 0.15}
    )
    cost_c: Fraction = Fraction(1, 10)  # currency units per attempt
    payday_period: int = 10

    @property
    def cost_minor(self) -> int:
        minor = self.cost_c * 100
        if minor.denominator != 1:
            raise ConfigurationError(f"cost_c {self.cost_c} is not representable in minor units")
        return int(minor)

    def validate(self):
        if self.accounts <= 0:
            raise ConfigurationError(f"accounts must be > 0, got {self.accounts}")
        if self.horizon_days <= 0:
            raise ConfigurationError(f"horizon_days must be > 0, got {self.horizon_days}")
        if self.payday_period <= 0:
            raise ConfigurationError(f"payday_period must be > 0, got {self.payday_period}")
        if self.cost_c < 0:
            raise ConfigurationError(f"cost_c must be >= 0, got {self.cost_c}")
        unknown = set(self.archetype_mix) - {"payday", "low", "dormant"}
        if unknown:
            raise ConfigurationError(f"unknown archetypes: {sorted(unknown)}")
        return self


@dataclass
class PredictorConfig:
    """Balance-corrector model and training parameters."""

    embed_dim: int = 6
    hidden_dim: int = 24
    lookback_days: int = 30
    max_events: int = 64
    lr: float = 0.02
    batch: int = 64
    patience: int = 3
    alpha: Fraction = Fraction(8, 5)
    max_epochs: int = 30
    max_labels: int = 20000
    # "balance" regresses the true balance; "headroom" regresses the part
    # above the day's logged deduction.
    target: str = "balance"

    def validate(self):
        for name in ("embed_dim", "hidden_dim", "lookback_days", "max_events",
                     "batch", "patience", "max_epochs", "max_labels"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be > 0")
        if self.lr <= 0:
            raise ConfigurationError("lr must be > 0")
        if self.alpha < 0:
            raise ConfigurationError("alpha must be >= 0")
        if self.target not in ("balance", "headroom"):
            raise ConfigurationError(f"unknown predictor target {self.target!r}")
        return self


@dataclass
class AgentConfig:
    """Q-learning hyperparameters shared by the flat and hierarchical agents."""

    eta: float = 0.99            # upper-level (daily) discount
    gamma: float = 0.95          # lower-level (intra-day) discount
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_frac: float = 0.5
    buffer_d1: int = 50000
    buffer_d2: int = 200000
    batch: int = 64
    sync_every: int = 500
    hidden_dims: tuple = (64, 32)
    seed: int = 7
    tabular_mode: bool = False
    double_dqn: bool = False
    lr: float = 1e-3
    lstm_hidden: int = 16
    history_window: int = 30
    epochs: int = 10
    rollout_batch: int = 128
    updates_per_batch: int = 24
    envs_per_epoch: int = 0  # 0 = every environment each epoch
    eval_accounts: int = 128

    def validate(self):
        for name in ("eta", "gamma"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ConfigurationError(f"{name} must lie in (0, 1], got {v}")
        for name in ("eps_start", "eps_end", "eps_decay_frac"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {v}")
        for name in ("buffer_d1", "buffer_d2", "batch", "sync_every", "lstm_hidden",
                     "history_window", "epochs", "rollout_batch", "updates_per_batch"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be > 0")
        if self.lr <= 0:
            raise ConfigurationError("lr must be > 0")
        if not self.hidden_dims:
            raise ConfigurationError("hidden_dims must be nonempty")
        return self


@dataclass
class BenchConfig:
    """Benchmark harness layout: splits, seeds and the policy roster."""

    train_accounts: int = 2000
    eval_accounts: int = 500
    seeds: tuple = (1, 2, 3)
    policies: tuple = ("full", "heuristic", "dnn", "dqn", "dqn-ce", "dqn-a2", "dqn-a2ce")
    alpha_grid: tuple = (0.0, 0.5, 0.8, 1.0, 1.1, 1.3, 1.6, 2.0, 2.5)
    retry_daily: bool = True

    def validate(self):
        if self.train_accounts <= 0 or self.eval_accounts <= 0:
            raise ConfigurationError("account splits must be > 0")
        if not self.seeds:
            raise ConfigurationError("at least one seed is required")
        known = {"full", "heuristic", "dnn", "dqn", "dqn-ce", "dqn-a2", "dqn-a2ce"}
        unknown = set(self.policies) - known
        if unknown:
            raise ConfigurationError(f"unknown policies: {sorted(unknown)}")
        return self


@dataclass
class ExperimentConfig:
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    predictor: PredictorConfig = field(default_factory=PredictorConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)

    def validate(self):
        self.simulation.validate()
        self.predictor.validate()
        self.agent.validate()
        self.bench.validate()
        if self.simulation.accounts < self.bench.train_accounts + self.bench.eval_accounts:
            raise ConfigurationError(
                "simulation.accounts must cover train_accounts + eval_accounts"
            )
        return self

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Copy of this config with both the simulation and agent seeds replaced."""
        return ExperimentConfig(
            simulation=replace(self.simulation, seed=int(seed)),
            predictor=replace(self.predictor),
            agent=replace(self.agent, seed=int(seed)),
            bench=replace(self.bench),
        )


_PARSERS = {
    ("simulation", "archetype_mix"): _parse_mix,
    ("simulation", "cost_c"): parse_ratio,
    ("predictor", "alpha"): parse_ratio,
    ("agent", "hidden_dims"): _parse_int_list,
    ("agent", "tabular_mode"): _parse_bool,
    ("agent", "double_dqn"): _parse_bool,
    ("bench", "seeds"): _parse_int_list,
    ("bench", "policies"): _parse_str_list,
    ("bench", "alpha_grid"): _parse_float_list,
    ("bench", "retry_daily"): _parse_bool,
}


def _apply_section(obj, section_name, items):
    known = {f.name: f.type for f in fields(obj)}
    for key, raw in items:
        if key not in known:
            raise ConfigurationError(f"unknown key {key!r} in section [{section_name}]")
        parser = _PARSERS.get((section_name, key))
        if parser is not None:
            value = parser(raw)
        else:
            current = getattr(obj, key)
            if isinstance(current, bool):
                value = _parse_bool(raw)
            elif isinstance(current, int):
                value = int(raw)
            elif isinstance(current, float):
                value = float(raw)
            else:
                value = raw
        setattr(obj, key, value)


def load_config(path=None, seed_override=None) -> ExperimentConfig:
    """Load an experiment config, applying file and environment overrides.

    ``DEDUCT_SEED`` (or an explicit ``seed_override``) replaces the seeds
    parsed from the file.
    """
    cfg = ExperimentConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(str(path))
        if not read:
            raise ConfigurationError(f"config file not found: {path}")
        section_map = {
            "simulation": cfg.simulation,
            "predictor": cfg.predictor,
            "agent": cfg.agent,
            "bench": cfg.bench,
        }
        for section in parser.sections():
            if section not in section_map:
                raise ConfigurationError(f"unknown config section [{section}]")
            _apply_section(section_map[section], section, parser.items(section))
    if seed_override is None:
        env_seed = os.environ.get("DEDUCT_SEED")
        if env_seed is not None:
            try:
                seed_override = int(env_seed)
            except ValueError:
                raise ConfigurationError(f"DEDUCT_SEED must be an integer, got {env_seed!r}")
    if seed_override is not None:
        cfg.simulation.seed = int(seed_override)
        cfg.agent.seed = int(seed_override)
    return cfg.validate()
