"""Experiment configuration files (JSON)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .agents import AGENT_KINDS, AgentContext, AgentSpec, _PARAMS
from .beliefs import BeliefInit
from .game import SIM_MODES
from .model import CausalModel, ModelError, load_model


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ConfigReadError(ConfigError):
    """The config file itself could not be read or decoded."""


def data_path(name: str) -> Path:
    return Path(str(resources.files("causal_gambit") / "data" / name))


def default_model_path() -> Path:
    return data_path("test_scenario.model.json")


def figures_config_path() -> Path:
    return data_path("figures.config")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    model: CausalModel
    action_variable: str
    target: str
    desired_value: str
    agents: tuple[AgentSpec, ...]
    rounds: int
    seeds: tuple[int, ...]
    sim_mode: str = "sample"
    belief_init: BeliefInit = BeliefInit()
    realization_mode: str = "sample"
    utility: tuple[float, ...] | None = None
    model_path: Path | None = None
    outputs: dict[str, str | None] = field(
        default_factory=lambda: {"rewards": "rewards.csv", "summary": "summary.csv", "plot": None})
    output_dir: Path = Path(".")

    def context(self) -> AgentContext:
        return AgentContext.for_model(self.model, self.action_variable, self.target,
                                      self.desired_value, self.utility)


_TOP_KEYS = {"model_path", "action_variable", "target", "desired_value", "agents", "rounds",
             "seeds", "sim_mode", "belief_init", "realization_mode", "utility", "outputs",
             "output_dir"}
_REQUIRED = {"action_variable", "target", "desired_value", "agents", "rounds", "seeds"}


def _need(cond: bool, path: str, message: str):
    if not cond:
        raise ConfigError(path, message)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _belief_init(raw: Any, path: str) -> BeliefInit:
    if raw == "uniform":
        return BeliefInit("uniform")
    _need(isinstance(raw, dict), path, 'expected "uniform" or {"strategy", "lo", "hi"}')
    extra = set(raw) - {"strategy", "lo", "hi"}
    _need(not extra, path, f"unknown key(s) {sorted(extra)}")
    try:
        return BeliefInit(raw.get("strategy", "random"), raw.get("lo", 0.5), raw.get("hi", 2.0))
    except (ValueError, TypeError) as e:
        raise ConfigError(path, str(e)) from None


def config_from_dict(data: Any, base_dir: Path = Path(".")) -> ExperimentConfig:
    """Validate a decoded config; relative paths resolve against ``base_dir``.

    Raises:
        ConfigError: carrying the dotted path of the offending field.
    """
    _need(isinstance(data, dict), "$", "config must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    _need(not unknown, "$", f"unknown key(s) {sorted(unknown)}")
    missing = _REQUIRED - set(data)
    _need(not missing, "$", f"missing key(s) {sorted(missing)}")

    if data.get("model_path") is None:
        model_path = default_model_path()
    else:
        _need(isinstance(data["model_path"], str), "model_path", "expected a path string")
        model_path = Path(data["model_path"])
        if not model_path.is_absolute():
            model_path = base_dir / model_path
    try:
        model = load_model(model_path)
    except OSError as e:
        raise ConfigError("model_path", f"cannot read {model_path}: {e.strerror}") from None
    except ModelError as e:
        raise ConfigError("model_path", str(e)) from None

    for key in ("action_variable", "target"):
        _need(data[key] in model.names, key, f"unknown variable {data[key]!r}")
    target = model.index_of(data["target"])
    _need(data["desired_value"] in model.variables[target].states, "desired_value",
          f"{data['target']!r} has no state {data['desired_value']!r}")
    _need(data["action_variable"] != data["target"], "target", "must differ from action_variable")

    rounds = data["rounds"]
    _need(_is_int(rounds) and rounds >= 1, "rounds", "expected an integer >= 1")

    raw_seeds = data["seeds"]
    if isinstance(raw_seeds, dict):
        extra = set(raw_seeds) - {"count", "base_seed"}
        _need(not extra, "seeds", f"unknown key(s) {sorted(extra)}")
        count, base = raw_seeds.get("count"), raw_seeds.get("base_seed", 0)
        _need(_is_int(count) and count >= 1, "seeds.count", "expected an integer >= 1")
        _need(_is_int(base) and base >= 0, "seeds.base_seed", "expected a non-negative integer")
        seeds = tuple(range(base, base + count))
    else:
        _need(isinstance(raw_seeds, list) and raw_seeds, "seeds", "expected a non-empty list or {count, base_seed}")
        for i, s in enumerate(raw_seeds):
            _need(_is_int(s) and 0 <= s < 2**64, f"seeds[{i}]", "expected a 64-bit unsigned integer")
        _need(len(set(raw_seeds)) == len(raw_seeds), "seeds", "duplicate seeds")
        seeds = tuple(raw_seeds)

    sim_mode = data.get("sim_mode", "sample")
    _need(sim_mode in SIM_MODES, "sim_mode", f"expected one of {list(SIM_MODES)}")
    realization = data.get("realization_mode", "sample")
    _need(realization in ("sample", "mean"), "realization_mode", 'expected "sample" or "mean"')
    belief_init = _belief_init(data.get("belief_init", {}), "belief_init")

    utility = None
    if data.get("utility") is not None:
        raw_u = data["utility"]
        states = model.variables[target].states
        _need(isinstance(raw_u, dict), "utility", "expected an object mapping target states to numbers")
        for s, u in raw_u.items():
            _need(s in states, f"utility.{s}", f"{data['target']!r} has no state {s!r}")
            _need(isinstance(u, (int, float)) and not isinstance(u, bool), f"utility.{s}", "expected a number")
        utility = tuple(float(raw_u.get(s, 0.0)) for s in states)

    raw_agents = data["agents"]
    _need(isinstance(raw_agents, list) and raw_agents, "agents", "expected a non-empty list")
    agents = []
    for i, ra in enumerate(raw_agents):
        path = f"agents[{i}]"
        _need(isinstance(ra, dict), path, "expected an object")
        extra = set(ra) - {"kind", "hyperparameters", "label"}
        _need(not extra, path, f"unknown key(s) {sorted(extra)}")
        kind = ra.get("kind")
        _need(kind in AGENT_KINDS, f"{path}.kind", f"expected one of {list(AGENT_KINDS)}")
        hyper = dict(ra.get("hyperparameters") or {})
        bad = set(hyper) - _PARAMS[kind]
        _need(not bad, f"{path}.hyperparameters", f"unknown key(s) {sorted(bad)} for {kind}")
        if kind == "causal-learner":
            hyper["belief_init"] = (_belief_init(hyper["belief_init"], f"{path}.hyperparameters.belief_init")
                                    if "belief_init" in hyper else belief_init)
            hyper.setdefault("realization_mode", realization)
            _need(hyper["realization_mode"] in ("sample", "mean"),
                  f"{path}.hyperparameters.realization_mode", 'expected "sample" or "mean"')
        if kind == "q-learning":
            for key in hyper:
                _need(isinstance(hyper[key], (int, float)) and not isinstance(hyper[key], bool),
                      f"{path}.hyperparameters.{key}", "expected a number")
            lr, eps = hyper.get("learning_rate", 0.1), hyper.get("epsilon", 0.1)
            _need(0 < lr <= 1, f"{path}.hyperparameters.learning_rate", "expected a value in (0, 1]")
            _need(0 <= eps <= 1, f"{path}.hyperparameters.epsilon", "expected a value in [0, 1]")
        label = ra.get("label", kind)
        _need(isinstance(label, str) and label, f"{path}.label", "expected a non-empty string")
        agents.append(AgentSpec(kind, hyper, label))
    labels = [a.label for a in agents]
    for i, label in enumerate(labels):
        _need(labels.index(label) == i, f"agents[{i}].label", f"duplicate agent label {label!r}; set 'label'")

    outputs = {"rewards": "rewards.csv", "summary": "summary.csv", "plot": None}
    raw_out = data.get("outputs", {})
    _need(isinstance(raw_out, dict), "outputs", "expected an object")
    extra = set(raw_out) - set(outputs)
    _need(not extra, "outputs", f"unknown key(s) {sorted(extra)}")
    for k, v in raw_out.items():
        _need(v is None or isinstance(v, str), f"outputs.{k}", "expected a file name or null")
        outputs[k] = v
    out_dir = data.get("output_dir")
    _need(out_dir is None or isinstance(out_dir, str), "output_dir", "expected a path string")
    output_dir = base_dir / out_dir if out_dir else Path(".")

    return ExperimentConfig(model, data["action_variable"], data["target"], data["desired_value"],
                            tuple(agents), rounds, seeds, sim_mode, belief_init, realization,
                            utility, model_path, outputs, output_dir)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigReadError("$", f"cannot read {path}: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigReadError("$", f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return config_from_dict(data, path.parent)
