"""Causal decision making against Nature on small discrete causal models."""

from .agents import (AgentContext, AgentSpec, CausalKnownAgent, CausalLearningAgent, QLearningAgent,
                     RandomAgent, build_agent)
from .beliefs import (BeliefInit, BeliefStore, init_beliefs, posterior_mean, realize_model, tv_distance,
                      update)
from .config import ExperimentConfig, config_from_dict, default_model_path, load_config
from .game import ExperimentResult, RewardTrace, RoundRecord, play_round, run_episode, run_experiment
from .inference import (Query, best_action, interventional_query, joint_probability, joint_table,
                        map_outcome, sample_outcome, truncate)
from .model import (CausalModel, Cpt, Dag, ModelError, VariableSpec, load_model, parse_model,
                    serialize_model, topological_order, validate_model)
from .rng import RngStream


def load_default_model() -> CausalModel:
    """The bundled Disease/Treatment/Reaction/Lives test scenario."""
    return load_model(default_model_path())


__version__ = "0.1.0"
