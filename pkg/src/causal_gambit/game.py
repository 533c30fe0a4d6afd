"""The repeated game: the agent intervenes, Nature answers from the hidden true model."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .agents import Agent, AgentContext, AgentSpec, CausalLearningAgent, build_agent
from .beliefs import BeliefStore
from .inference import map_outcome, sample_outcome
from .model import CausalModel
from .rng import RngStream

if TYPE_CHECKING:
    from .config import ExperimentConfig

SIM_MODES = ("sample", "map", "hybrid")


@dataclass(frozen=True)
class RoundRecord:
    round_index: int
    action: int
    outcome: tuple[int, ...]
    reward: float


@dataclass(frozen=True, eq=False)
class RewardTrace:
    agent: str
    seed: int
    rewards: np.ndarray
    beliefs: BeliefStore | None = None  # final beliefs of learning agents

    def __len__(self):
        return len(self.rewards)


def realize_outcome(model: CausalModel, intervention: Mapping[int, int], sim_mode: str,
                    rng: RngStream) -> tuple[int, ...]:
    """Nature's response to ``do(intervention)``.

    ``sample`` draws ancestrally, ``map`` returns the most probable outcome,
    and ``hybrid`` samples the exogenous roots first and completes the rest by
    MAP given those roots.
    """
    if sim_mode == "sample":
        return sample_outcome(model, intervention, rng)
    if sim_mode == "map":
        return map_outcome(model, intervention)
    if sim_mode == "hybrid":
        fixed = dict(intervention)
        for r in model.roots():
            if r not in fixed:
                fixed[r] = rng.categorical(model.cpts[r].table)
        # roots are parentless, so fixing them by do() equals conditioning on them
        return map_outcome(model, fixed)
    raise ValueError(f"unknown simulation mode {sim_mode!r}; expected one of {SIM_MODES}")


def play_round(true_model: CausalModel, agent: Agent, sim_mode: str, ctx: AgentContext,
               rng: RngStream, round_index: int = 0) -> RoundRecord:
    action = agent.choose(rng)
    outcome = realize_outcome(true_model, {ctx.action_variable: action}, sim_mode, rng)
    reward = ctx.reward(outcome)
    agent.observe(action, outcome, reward)
    return RoundRecord(round_index, action, outcome, reward)


def run_episode(true_model: CausalModel, agent_spec: AgentSpec, rounds: int, seed: int,
                sim_mode: str, ctx: AgentContext) -> RewardTrace:
    """One fresh agent for ``rounds`` rounds; one stream seeded by ``seed`` drives everything."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    rng = RngStream(seed)
    agent = build_agent(agent_spec, true_model, ctx, rng)
    rewards = np.empty(rounds)
    for t in range(rounds):
        rewards[t] = play_round(true_model, agent, sim_mode, ctx, rng, t).reward
    beliefs = agent.beliefs if isinstance(agent, CausalLearningAgent) else None
    return RewardTrace(agent_spec.label, seed, rewards, beliefs)


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """Rewards per agent label as ``(n_seeds, rounds)`` arrays, rows in ascending seed order."""

    labels: tuple[str, ...]
    seeds: tuple[int, ...]
    rewards: dict[str, np.ndarray]
    beliefs: dict[str, dict[int, BeliefStore]]

    def mean_reward(self, label: str) -> np.ndarray:
        """Mean over seeds of the reward at each round."""
        return self.rewards[label].mean(axis=0)

    def cumulative_mean(self, label: str) -> np.ndarray:
        """Running mean of :meth:`mean_reward` up to each round."""
        m = self.mean_reward(label)
        return np.cumsum(m) / np.arange(1, len(m) + 1)

    def window_mean(self, label: str, start: int, stop: int) -> float:
        """Average reward over rounds ``start..stop`` (1-based, inclusive), across seeds."""
        return float(self.mean_reward(label)[start - 1:stop].mean())


def _episode_task(args):
    model, spec, rounds, seed, sim_mode, ctx = args
    return run_episode(model, spec, rounds, seed, sim_mode, ctx)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Every agent against every seed.

    Aggregation is keyed by sorted seed, so results do not depend on the
    order of ``config.seeds`` or on ``jobs``.
    """
    model = config.model
    ctx = config.context()
    seeds = tuple(sorted(set(config.seeds)))
    tasks = [(model, spec, config.rounds, seed, config.sim_mode, ctx)
             for spec in config.agents for seed in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks), os.cpu_count() or 1)) as pool:
            traces = list(pool.map(_episode_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        traces = [_episode_task(t) for t in tasks]
    by_key = {(t.agent, t.seed): t for t in traces}
    labels = tuple(spec.label for spec in config.agents)
    rewards = {label: np.stack([by_key[(label, s)].rewards for s in seeds]) for label in labels}
    beliefs = {label: {s: by_key[(label, s)].beliefs for s in seeds if by_key[(label, s)].beliefs is not None}
               for label in labels}
    return ExperimentResult(labels, seeds, rewards, {k: v for k, v in beliefs.items() if v})


def constant_action_rewards(true_model: CausalModel, ctx: AgentContext, action: int, rounds: int,
                            seed: int, sim_mode: str = "sample") -> np.ndarray:
    """Rewards of always playing ``action``; handy for checking Nature against the oracle."""
    rng = RngStream(seed)
    out = np.empty(rounds)
    for t in range(rounds):
        out[t] = ctx.reward(realize_outcome(true_model, {ctx.action_variable: action}, sim_mode, rng))
    return out


def seeds_from(spec: Sequence[int] | Mapping[str, int]) -> tuple[int, ...]:
    if isinstance(spec, Mapping):
        base = spec.get("base_seed", 0)
        return tuple(range(base, base + spec["count"]))
    return tuple(spec)
