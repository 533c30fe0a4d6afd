import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causal_gambit import RngStream
from causal_gambit.agents import (AgentContext, AgentSpec, CausalKnownAgent, CausalLearningAgent,
                                  QLearningAgent, RandomAgent, build_agent)
from causal_gambit.beliefs import BeliefInit, init_beliefs


def test_known_agent_plays_pill(default_model, ctx):
    agent = CausalKnownAgent(ctx, default_model)
    rng = RngStream(0)
    assert {agent.choose(rng) for _ in range(50)} == {0}
    assert agent.value == pytest.approx(0.45)


def test_q_greedy_argmax(ctx):
    agent = QLearningAgent(ctx, epsilon=0.0)
    agent.q[:] = [0.3, 0.7]
    assert agent.choose(RngStream(0)) == 1


def test_q_ties_go_low(ctx):
    assert QLearningAgent(ctx, epsilon=0.0).choose(RngStream(0)) == 0


def test_q_update(ctx):
    agent = QLearningAgent(ctx, learning_rate=0.1)
    agent.observe(0, (0, 0, 0, 0), 1.0)
    assert agent.q.tolist() == [0.1, 0.0]


@given(st.lists(st.tuples(st.integers(0, 1), st.sampled_from([0.0, 1.0])), max_size=200),
       st.floats(0.01, 1.0))
def test_q_values_stay_in_unit_interval(history, lr):
    agent = QLearningAgent(AgentContext(1, 2, 3, 0), learning_rate=lr)
    for a, r in history:
        agent.observe(a, (0, a, 0, 0), r)
        assert np.all((agent.q >= 0) & (agent.q <= 1))


@pytest.mark.parametrize("kwargs", [{"learning_rate": 0.0}, {"learning_rate": 1.5}, {"epsilon": -0.1}])
def test_q_bad_hyperparameters(ctx, kwargs):
    with pytest.raises(ValueError):
        QLearningAgent(ctx, **kwargs)


def test_random_agent_uniform(ctx):
    agent = RandomAgent(ctx)
    rng = RngStream(8)
    freq = np.mean([agent.choose(rng) for _ in range(10_000)])
    assert abs(freq - 0.5) <= 0.02


def test_random_agent_observe_is_noop(ctx):
    agent = RandomAgent(ctx)
    before = dict(vars(agent))
    agent.observe(1, (0, 1, 0, 0), 1.0)
    assert vars(agent) == before


def test_learner_observe_updates_matching_rows(default_model, ctx):
    agent = CausalLearningAgent.from_structure(ctx, default_model.structure, BeliefInit("uniform"), RngStream(0))
    agent.observe(0, (0, 0, 0, 0), 1.0)
    changed = {(v, cfg) for v, cfg in agent.beliefs.rows() if agent.beliefs.counts[v][cfg].sum()}
    assert changed == {(0, ()), (2, (0,)), (3, (0, 0, 0))}
    assert agent.beliefs.alpha(3, (0, 0, 0)).tolist() == [2.0, 1.0]


def test_learner_with_true_means_matches_known(default_model, ctx):
    b = init_beliefs(default_model, BeliefInit("uniform"), excluded=(1,))
    prior = []
    for v in range(4):
        table = np.asarray(default_model.cpts[v].reordered(b.parents(v)).table)
        # large pseudo-counts proportional to the truth; mean equals the truth exactly
        prior.append(table * 1000.0 + 0.0 if v != 1 else np.ones(table.shape))
    prior = [np.where(p > 0, p, 1e-300) for p in prior]
    b = type(b)(b.structure, tuple(prior), b.counts, b.excluded)
    learner = CausalLearningAgent(ctx, b, realization_mode="mean")
    assert learner.choose(RngStream(0)) == CausalKnownAgent(ctx, default_model).choose(RngStream(0))


@pytest.mark.parametrize("kind", ["causal-known", "causal-learner", "q-learning", "random"])
def test_choices_reproducible(default_model, ctx, kind):
    def run(seed):
        rng = RngStream(seed)
        agent = build_agent(AgentSpec(kind), default_model, ctx, rng)
        out = []
        for _ in range(30):
            a = agent.choose(rng)
            agent.observe(a, (0, a, 0, 0), 1.0)
            out.append(a)
        return out
    assert run(5) == run(5)


def test_spec_rejects_unknown_hyperparameter():
    with pytest.raises(ValueError, match="lerning_rate"):
        AgentSpec("q-learning", {"lerning_rate": 0.1})


def test_context_utility_reward(default_model):
    c = AgentContext.for_model(default_model, "Treatment", "Lives", "lives", utility=(10.0, -1.0))
    assert c.reward((0, 0, 0, 0)) == 10.0 and c.reward((0, 0, 0, 1)) == -1.0
