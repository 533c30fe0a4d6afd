# %% [markdown]
# # Learning the CPTs while playing
#
# The learning agent knows the graph but not the parameters. It keeps one
# Dirichlet per CPT row, realises a concrete model from them every round,
# plays the best response on that model, and counts what Nature shows it.

# %%
import numpy as np

from causal_gambit import AgentContext, RngStream, load_default_model, play_round, tv_distance
from causal_gambit.agents import CausalLearningAgent
from causal_gambit.beliefs import BeliefInit, posterior_mean

model = load_default_model()
ctx = AgentContext.for_model(model, "Treatment", "Lives", "lives")
rng = RngStream(3)
agent = CausalLearningAgent.from_structure(ctx, model.structure, BeliefInit("random", 0.5, 2.0), rng)

# %%
rewards, actions = [], []
for t in range(500):
    rec = play_round(model, agent, "sample", ctx, rng, t)
    rewards.append(rec.reward)
    actions.append(rec.action)
    if t + 1 in (10, 50, 100, 500):
        tv = tv_distance(agent.beliefs, model, min_count=20)
        print(f"round {t + 1:3d}: surgery share so far {np.mean(actions):.2f}, "
              f"avg reward {np.mean(rewards):.3f}, mean TV (rows with >= 20 obs) {tv.mean:.3f}")

# %% [markdown]
# Posterior means of the rows the agent visited most, next to the truth.

# %%
for (v, cfg), d in sorted(tv_distance(agent.beliefs, model, min_count=50).per_row.items()):
    var = model.variables[v]
    given = [model.variables[p].states[s] for p, s in zip(agent.beliefs.parents(v), cfg)]
    print(f"{var.name:9s} given {given}: belief {np.round(posterior_mean(agent.beliefs, v, cfg), 3)}, TV {d:.3f}")
