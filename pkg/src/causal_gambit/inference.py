"""Exact inference on small discrete causal models.

Everything here enumerates the full joint table, so it is meant for models
with a few dozen thousand complete assignments at most.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .model import CausalModel, Cpt, Dag
from .rng import RngStream

__all__ = [
    "IncompleteOutcomeError", "NullEventError", "Query", "as_outcome", "joint_probability",
    "joint_table", "truncate", "interventional_query", "interventional_distribution",
    "action_values", "best_action", "map_outcome", "sample_outcome",
]

# relative gap under which two joint probabilities count as a MAP tie
MAP_TIE_RTOL = 1e-12


class IncompleteOutcomeError(ValueError):
    def __init__(self, missing: Sequence[str]):
        self.missing = list(missing)
        super().__init__(f"outcome is missing variables: {', '.join(self.missing)}")


class NullEventError(ValueError):
    """Raised when a query conditions on evidence of probability zero."""


@dataclass(frozen=True)
class Query:
    """``P(target = value | do(intervention), evidence)``."""

    target: int
    value: int
    intervention: Mapping[int, int] = field(default_factory=dict)
    evidence: Mapping[int, int] = field(default_factory=dict)


def as_outcome(model, outcome) -> tuple[int, ...]:
    """Normalise a complete assignment (sequence or mapping) to a tuple of state indices."""
    n = model.n_vars
    if isinstance(outcome, Mapping):
        missing = [model.variables[i].name for i in range(n) if i not in outcome]
        if missing:
            raise IncompleteOutcomeError(missing)
        return tuple(int(outcome[i]) for i in range(n))
    outcome = tuple(int(s) for s in outcome)
    if len(outcome) < n:
        raise IncompleteOutcomeError([v.name for v in model.variables[len(outcome):]])
    if len(outcome) > n:
        raise ValueError(f"outcome has {len(outcome)} entries for {n} variables")
    return outcome


def _check_assignment(model: CausalModel, assignment: Mapping[int, int], what: str):
    for var, state in assignment.items():
        if not 0 <= var < model.n_vars:
            raise KeyError(f"{what} on unknown variable index {var}")
        if not 0 <= state < model.variables[var].cardinality:
            raise ValueError(f"{what}: state {state} invalid for {model.variables[var].name!r}")


def joint_probability(model: CausalModel, outcome) -> float:
    """Product of the CPT entries selected by a complete outcome."""
    x = as_outcome(model, outcome)
    p = 1.0
    for cpt in model.cpts:
        p *= float(cpt.table[tuple(x[q] for q in cpt.parents) + (x[cpt.variable],)])
    return p


def joint_table(model: CausalModel) -> np.ndarray:
    """The full joint distribution as an array with one axis per variable."""
    n = model.n_vars
    card = model.cardinalities
    joint = np.ones(card)
    for cpt in model.cpts:
        axes = list(cpt.parents) + [cpt.variable]
        factor = np.transpose(cpt.table, np.argsort(axes))
        bshape = [1] * n
        for ax in axes:
            bshape[ax] = card[ax]
        joint = joint * factor.reshape(bshape)
    return joint


def truncate(model: CausalModel, intervention: Mapping[int, int]) -> CausalModel:
    """Apply ``do(intervention)``: forced variables lose their parents and become point masses."""
    if not intervention:
        return model
    _check_assignment(model, intervention, "intervention")
    cpts = list(model.cpts)
    for var, state in intervention.items():
        row = np.zeros(model.variables[var].cardinality)
        row[state] = 1.0
        cpts[var] = Cpt(var, (), row)
    edges = tuple((a, b) for a, b in model.dag.edges if b not in intervention)
    return CausalModel(model.variables, Dag(model.dag.nodes, edges), tuple(cpts))


def _index(n: int, fixed: Mapping[int, int]):
    return tuple(fixed[i] if i in fixed else slice(None) for i in range(n))


def interventional_query(model: CausalModel, q: Query) -> float:
    """``P(q.target = q.value | do(q.intervention), q.evidence)`` by exact enumeration.

    The target may itself be intervened on, in which case the answer is 1 or 0.

    Raises:
        NullEventError: the evidence has probability zero under the intervention.
    """
    _check_assignment(model, {q.target: q.value}, "query target")
    _check_assignment(model, q.evidence, "evidence")
    joint = joint_table(truncate(model, q.intervention))
    n = model.n_vars
    if q.target in q.evidence and q.evidence[q.target] != q.value:
        num = 0.0
    else:
        num = float(joint[_index(n, {**q.evidence, q.target: q.value})].sum())
    if not q.evidence:
        return num
    den = float(joint[_index(n, q.evidence)].sum())
    if den <= 0.0:
        raise NullEventError("conditioning on null event")
    return num / den


def interventional_distribution(model: CausalModel, target: int,
                                intervention: Mapping[int, int] | None = None) -> np.ndarray:
    """``P(target | do(intervention))`` as a vector over the target's states."""
    joint = joint_table(truncate(model, intervention or {}))
    other = tuple(i for i in range(model.n_vars) if i != target)
    return joint.sum(axis=other)


def action_values(model: CausalModel, action_variable: int, target: int,
                  desired_value: int | None = None, utility: Sequence[float] | None = None) -> np.ndarray:
    """Value of each intervention ``do(action_variable = a)``.

    With ``utility`` the value is the expected utility over target states,
    otherwise the probability of ``desired_value``.
    """
    values = np.empty(model.variables[action_variable].cardinality)
    for a in range(len(values)):
        dist = interventional_distribution(model, target, {action_variable: a})
        values[a] = float(np.dot(utility, dist)) if utility is not None else float(dist[desired_value])
    return values


def best_action(model: CausalModel, action_variable: int, target: int,
                desired_value: int | None = None,
                utility: Sequence[float] | None = None) -> tuple[int, float]:
    """Action state maximising the desired target value's interventional probability.

    Ties go to the lowest state index. Returns ``(state, value)``.
    """
    if action_variable == target:
        raise ValueError("action variable and target must differ")
    values = action_values(model, action_variable, target, desired_value, utility)
    best = 0
    for a in range(1, len(values)):
        if values[a] > values[best]:
            best = a
    return best, float(values[best])


def map_outcome(model: CausalModel, intervention: Mapping[int, int] | None = None) -> tuple[int, ...]:
    """Most probable complete outcome under ``do(intervention)``.

    Ties (within a relative 1e-12) go to the lexicographically smallest
    state vector read in the model's topological order.
    """
    intervention = intervention or {}
    truncated = truncate(model, intervention)
    order = model.topological_order()
    joint = np.transpose(joint_table(truncated), order)
    flat = joint.ravel()
    top = flat.max()
    k = int(np.flatnonzero(flat >= top - MAP_TIE_RTOL * top)[0])
    states = np.unravel_index(k, joint.shape)
    outcome = [0] * model.n_vars
    for var, s in zip(order, states):
        outcome[var] = int(s)
    return tuple(outcome)


def sample_outcome(model: CausalModel, intervention: Mapping[int, int] | None,
                   rng: RngStream) -> tuple[int, ...]:
    """Ancestral sample from the truncated model; forced variables consume no draws."""
    intervention = intervention or {}
    _check_assignment(model, intervention, "intervention")
    x = [0] * model.n_vars
    for var in model.topological_order():
        if var in intervention:
            x[var] = intervention[var]
            continue
        cpt = model.cpts[var]
        x[var] = rng.categorical(cpt.table[tuple(x[p] for p in cpt.parents)])
    return tuple(x)
