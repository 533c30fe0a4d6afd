# %% [markdown]
# # Agent comparison over 20, 50, 100 and 200 rounds
#
# Runs the bundled experiment (causal learner, Q-learning, random; 100 seeds)
# for each horizon and writes one SVG of cumulative mean reward per horizon.
# Pass an output directory as the first argument (default: ./figures).

# %%
import sys
from dataclasses import replace
from pathlib import Path

from causal_gambit.config import figures_config_path, load_config
from causal_gambit.game import run_experiment
from causal_gambit.svg import reward_curves_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(parents=True, exist_ok=True)
base = load_config(figures_config_path())

# %%
for rounds in (20, 50, 100, 200):
    res = run_experiment(replace(base, rounds=rounds), jobs=4)
    curves = {label: res.cumulative_mean(label) for label in res.labels}
    path = out / f"rewards_{rounds}.svg"
    path.write_text(reward_curves_svg(curves, f"Average reward, {rounds} rounds", "cumulative mean reward"))
    final = ", ".join(f"{label} {c[-1]:.3f}" for label, c in curves.items())
    print(f"{rounds:3d} rounds -> {path}: {final}")
