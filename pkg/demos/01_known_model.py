# %% [markdown]
# # Deciding with a fully known causal model
#
# The bundled test scenario: a patient has disease A or B, the doctor gives a
# pill or sends them to surgery, the treatment may trigger a fatal reaction,
# and whether the patient lives depends on all three.

# %%
from causal_gambit import Query, best_action, interventional_query, load_default_model, map_outcome
from causal_gambit import RngStream, sample_outcome

model = load_default_model()
print(model.names)
print(model.dag.edges)

# %% [markdown]
# Intervening on Treatment cuts it loose from its (empty) parent set and keeps
# every other factor, so P(Lives | do(Treatment)) is a sum over Disease and
# Reaction.

# %%
T, Y = model.index_of("Treatment"), model.index_of("Lives")
lives = model.state_index(Y, "lives")
for state in model.variables[T].states:
    p = interventional_query(model, Query(Y, lives, {T: model.state_index(T, state)}))
    print(f"P(Lives=lives | do(Treatment={state})) = {p:.4f}")

# %%
action, p = best_action(model, T, Y, lives)
print("best response:", model.variables[T].states[action], p)

# %% [markdown]
# Nature can answer an intervention by sampling or by returning the most
# probable outcome. Under do(pill) two outcomes tie at 0.405; the tie goes to
# the smallest state vector in topological order.

# %%
def show(x):
    return ",".join(v.states[s] for v, s in zip(model.variables, x))


print("MAP:", show(map_outcome(model, {T: 0})))
rng = RngStream(7)
for _ in range(5):
    print("sample:", show(sample_outcome(model, {T: 0}, rng)))
