"""Decision policies for the repeated game against Nature.

All agents share one protocol: ``choose(rng)`` picks a state of the action
variable before anything else in the round is visible, and
``observe(action, outcome, reward)`` is called once the round's full outcome
is revealed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .beliefs import BeliefInit, BeliefStore, init_beliefs, realize_model, update
from .inference import best_action
from .model import CausalModel
from .rng import RngStream

AGENT_KINDS = ("causal-known", "causal-learner", "q-learning", "random")


@dataclass(frozen=True)
class AgentContext:
    action_variable: int
    action_states: int
    target: int
    desired_value: int
    # expected utility over target states replaces the 0/1 indicator when set
    utility: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.action_variable == self.target:
            raise ValueError("action variable and target must differ")

    @classmethod
    def for_model(cls, model: CausalModel, action: str, target: str, desired: str,
                  utility: Sequence[float] | None = None) -> AgentContext:
        a = model.index_of(action)
        t = model.index_of(target)
        return cls(a, model.variables[a].cardinality, t, model.state_index(t, desired),
                   tuple(utility) if utility is not None else None)

    def reward(self, outcome: Sequence[int]) -> float:
        y = outcome[self.target]
        if self.utility is not None:
            return float(self.utility[y])
        return 1.0 if y == self.desired_value else 0.0


class Agent:
    kind = "agent"

    def __init__(self, ctx: AgentContext):
        self.ctx = ctx

    def choose(self, rng: RngStream) -> int:
        raise NotImplementedError

    def observe(self, action: int, outcome: Sequence[int], reward: float) -> None:
        pass


class CausalKnownAgent(Agent):
    """Plays the best response computed once on the true model."""

    kind = "causal-known"

    def __init__(self, ctx: AgentContext, model: CausalModel):
        super().__init__(ctx)
        self.model = model
        self.action, self.value = best_action(model, ctx.action_variable, ctx.target,
                                              ctx.desired_value, ctx.utility)

    def choose(self, rng):
        return self.action


class CausalLearningAgent(Agent):
    """Knows the graph, learns the CPTs.

    Each round a concrete model is realised from the Dirichlet beliefs
    (posterior draw in ``sample`` mode, posterior mean in ``mean`` mode) and the
    best action on it is played. Observed outcomes update every CPT except the
    action variable's own, which only reflects this agent's choices.
    """

    kind = "causal-learner"

    def __init__(self, ctx: AgentContext, beliefs: BeliefStore, realization_mode: str = "sample"):
        super().__init__(ctx)
        if realization_mode not in ("sample", "mean"):
            raise ValueError(f"unknown realization mode {realization_mode!r}")
        self.beliefs = beliefs
        self.realization_mode = realization_mode

    @classmethod
    def from_structure(cls, ctx: AgentContext, structure, init: BeliefInit, rng: RngStream,
                       realization_mode: str = "sample") -> CausalLearningAgent:
        beliefs = init_beliefs(structure, init, rng, excluded=(ctx.action_variable,))
        return cls(ctx, beliefs, realization_mode)

    def current_model(self, rng: RngStream) -> CausalModel:
        return realize_model(self.beliefs, self.realization_mode, rng)

    def choose(self, rng):
        model = self.current_model(rng)
        action, _ = best_action(model, self.ctx.action_variable, self.ctx.target,
                                self.ctx.desired_value, self.ctx.utility)
        return action

    def observe(self, action, outcome, reward):
        self.beliefs = update(self.beliefs, outcome)


class QLearningAgent(Agent):
    """Single-state epsilon-greedy Q-learner (rounds are i.i.d., nothing observable before acting)."""

    kind = "q-learning"

    def __init__(self, ctx: AgentContext, learning_rate: float = 0.1, epsilon: float = 0.1,
                 q_init: float = 0.0):
        super().__init__(ctx)
        if not 0 < learning_rate <= 1:
            raise ValueError(f"learning_rate must be in (0, 1], got {learning_rate}")
        if not 0 <= epsilon <= 1:
            raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
        self.learning_rate = learning_rate
        self.epsilon = epsilon
        self.q = np.full(ctx.action_states, float(q_init))

    def choose(self, rng):
        explore = rng.random() < self.epsilon
        if explore:
            return rng.integers(self.ctx.action_states)
        return int(np.argmax(self.q))

    def observe(self, action, outcome, reward):
        self.q[action] += self.learning_rate * (reward - self.q[action])


class RandomAgent(Agent):
    kind = "random"

    def choose(self, rng):
        return rng.integers(self.ctx.action_states)


_PARAMS = {
    "causal-known": set(),
    "causal-learner": {"realization_mode", "belief_init"},
    "q-learning": {"learning_rate", "epsilon", "q_init"},
    "random": set(),
}


@dataclass(frozen=True)
class AgentSpec:
    """Recipe for a fresh agent; ``label`` names it in outputs (defaults to ``kind``)."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    label: str | None = None

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}; expected one of {AGENT_KINDS}")
        unknown = set(self.params) - _PARAMS[self.kind]
        if unknown:
            raise ValueError(f"unknown hyperparameter(s) {sorted(unknown)} for {self.kind}")
        object.__setattr__(self, "params", dict(self.params))
        if self.label is None:
            object.__setattr__(self, "label", self.kind)


def build_agent(spec: AgentSpec, true_model: CausalModel, ctx: AgentContext,
                rng: RngStream) -> Agent:
    """Instantiate ``spec``. Only the causal-known agent gets to see the true parameters."""
    p = spec.params
    if spec.kind == "causal-known":
        return CausalKnownAgent(ctx, true_model)
    if spec.kind == "causal-learner":
        init = p.get("belief_init", BeliefInit())
        if isinstance(init, Mapping):
            init = BeliefInit(**init)
        return CausalLearningAgent.from_structure(ctx, true_model.structure, init, rng,
                                                  p.get("realization_mode", "sample"))
    if spec.kind == "q-learning":
        return QLearningAgent(ctx, p.get("learning_rate", 0.1), p.get("epsilon", 0.1),
                              p.get("q_init", 0.0))
    return RandomAgent(ctx)
