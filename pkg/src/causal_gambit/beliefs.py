"""Dirichlet beliefs over the CPT rows of a known structure.

Each row ``(variable, parent configuration)`` carries its own Dirichlet. The
store keeps the prior pseudo-counts and the integer observation counts
separately, so the posterior parameter is always exactly ``prior + counts``
no matter how many updates or in which order they arrived.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .inference import as_outcome
from .model import CausalModel, Cpt, ModelFormatError, Structure, _dump, model_from_dict
from .rng import RngStream


class StructureMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class BeliefInit:
    """How prior pseudo-counts are chosen: all ones, or i.i.d. uniform in ``[lo, hi]``."""

    strategy: str = "random"
    lo: float = 0.5
    hi: float = 2.0

    def __post_init__(self):
        if self.strategy not in ("uniform", "random"):
            raise ValueError(f"unknown belief init strategy {self.strategy!r}")
        if self.strategy == "random":
            if not (self.lo > 0 and self.hi > 0):
                raise ValueError(f"random init bounds must be positive, got ({self.lo}, {self.hi})")
            if self.lo > self.hi:
                raise ValueError(f"random init needs lo <= hi, got ({self.lo}, {self.hi})")


@dataclass(frozen=True, eq=False)
class BeliefStore:
    structure: Structure
    prior: tuple[np.ndarray, ...]
    counts: tuple[np.ndarray, ...]
    excluded: frozenset[int] = frozenset()

    def parents(self, variable: int) -> tuple[int, ...]:
        return self.structure.dag.parents(variable)

    def alpha_table(self, variable: int) -> np.ndarray:
        return self.prior[variable] + self.counts[variable]

    def alpha(self, variable: int, config: Sequence[int] = ()) -> np.ndarray:
        """Posterior Dirichlet parameter of one row."""
        self._check_row(variable, config)
        config = tuple(config)
        return self.prior[variable][config] + self.counts[variable][config]

    def rows(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        for v in range(self.structure.n_vars):
            for config in itertools.product(*(range(k) for k in self.prior[v].shape[:-1])):
                yield v, config

    def n_rows(self) -> int:
        return sum(int(np.prod(p.shape[:-1])) for p in self.prior)

    def _check_row(self, variable: int, config: Sequence[int]):
        if not 0 <= variable < self.structure.n_vars:
            raise KeyError(f"unknown variable {variable}")
        shape = self.prior[variable].shape[:-1]
        if len(config) != len(shape) or any(not 0 <= s < k for s, k in zip(config, shape)):
            raise KeyError(f"no row {tuple(config)} for variable {self.structure.variables[variable].name!r}")

    def __eq__(self, other):
        if not isinstance(other, BeliefStore):
            return NotImplemented
        return (self.structure == other.structure and self.excluded == other.excluded
                and all(np.array_equal(a, b) for a, b in zip(self.prior, other.prior))
                and all(np.array_equal(a, b) for a, b in zip(self.counts, other.counts)))

    __hash__ = None


def _as_structure(structure) -> Structure:
    return structure.structure if isinstance(structure, CausalModel) else structure


def init_beliefs(structure, init: BeliefInit = BeliefInit(), rng: RngStream | None = None,
                 excluded: Iterable[int] = ()) -> BeliefStore:
    """Fresh beliefs for ``structure`` (a Structure or a CausalModel whose parameters are ignored).

    Rows use the graph's parents in ascending index order. ``random`` draws
    every pseudo-count independently, variable by variable, from ``rng``.
    """
    structure = _as_structure(structure)
    card = structure.cardinalities
    prior = []
    for v in range(structure.n_vars):
        shape = tuple(card[p] for p in structure.dag.parents(v)) + (card[v],)
        if init.strategy == "uniform":
            a = np.ones(shape)
        else:
            if rng is None:
                raise ValueError("random belief init needs an RngStream")
            a = np.asarray(rng.uniform(init.lo, init.hi, size=shape), dtype=float)
        a.flags.writeable = False
        prior.append(a)
    counts = []
    for a in prior:
        c = np.zeros(a.shape, dtype=np.int64)
        c.flags.writeable = False
        counts.append(c)
    excluded = frozenset(int(e) for e in excluded)
    if not excluded <= set(range(structure.n_vars)):
        raise ValueError(f"excluded variables {sorted(excluded)} not in structure")
    return BeliefStore(structure, tuple(prior), tuple(counts), excluded)


def update(beliefs: BeliefStore, outcome) -> BeliefStore:
    """Conjugate update with one complete outcome; returns a new store.

    For every non-excluded variable the row selected by its observed parents
    gains one count at the observed state.
    """
    s = beliefs.structure
    n = s.n_vars
    x = as_outcome(s, outcome)
    counts = list(beliefs.counts)
    for v in range(n):
        if v in beliefs.excluded:
            continue
        c = counts[v].copy()
        c[tuple(x[p] for p in beliefs.parents(v)) + (x[v],)] += 1
        c.flags.writeable = False
        counts[v] = c
    return BeliefStore(s, beliefs.prior, tuple(counts), beliefs.excluded)


def update_many(beliefs: BeliefStore, outcomes: Iterable) -> BeliefStore:
    for x in outcomes:
        beliefs = update(beliefs, x)
    return beliefs


def realize_model(beliefs: BeliefStore, mode: str = "sample", rng: RngStream | None = None) -> CausalModel:
    """Concrete model from beliefs: posterior means, or one Dirichlet draw per row.

    Draws normalise independent unit-scale gamma variates. Excluded variables
    get uniform rows; they are truncated away by any intervention on them.
    """
    s = beliefs.structure
    cpts = []
    for v in range(s.n_vars):
        alpha = beliefs.alpha_table(v)
        if v in beliefs.excluded:
            table = np.full(alpha.shape, 1.0 / alpha.shape[-1])
        elif mode == "mean":
            table = alpha / alpha.sum(axis=-1, keepdims=True)
        elif mode == "sample":
            if rng is None:
                raise ValueError("sample realization needs an RngStream")
            g = rng.gamma(alpha)
            total = g.sum(axis=-1, keepdims=True)
            # all-zero draws only happen for vanishing alphas; fall back to the mean
            table = np.where(total > 0, g / np.where(total > 0, total, 1.0),
                             alpha / alpha.sum(axis=-1, keepdims=True))
        else:
            raise ValueError(f"unknown realization mode {mode!r}")
        cpts.append(Cpt(v, beliefs.parents(v), table))
    return CausalModel(s.variables, s.dag, tuple(cpts))


def posterior_mean(beliefs: BeliefStore, variable: int, parent_config: Sequence[int] = ()) -> np.ndarray:
    a = beliefs.alpha(variable, parent_config)
    return a / a.sum()


def observation_count(beliefs: BeliefStore, variable: int, parent_config: Sequence[int] = ()) -> int:
    beliefs._check_row(variable, parent_config)
    return int(beliefs.counts[variable][tuple(parent_config)].sum())


@dataclass(frozen=True)
class TvReport:
    per_row: dict[tuple[int, tuple[int, ...]], float]
    mean: float  # nan when no row qualifies


def _same_structure(a: Structure, b: Structure) -> bool:
    return (a.variables == b.variables and tuple(a.dag.nodes) == tuple(b.dag.nodes)
            and set(a.dag.edges) == set(b.dag.edges))


def tv_distance(beliefs: BeliefStore, truth: CausalModel, min_count: int = 0) -> TvReport:
    """Total-variation distance between posterior means and the true CPT rows.

    Only rows with at least ``min_count`` observations enter; excluded
    variables are skipped.
    """
    if not _same_structure(beliefs.structure, truth.structure):
        raise StructureMismatchError("beliefs and model have different structures")
    per_row = {}
    for v, config in beliefs.rows():
        if v in beliefs.excluded or observation_count(beliefs, v, config) < min_count:
            continue
        true_row = truth.cpts[v].reordered(beliefs.parents(v)).row(config)
        per_row[(v, config)] = 0.5 * float(np.abs(posterior_mean(beliefs, v, config) - true_row).sum())
    mean = float(np.mean(list(per_row.values()))) if per_row else float("nan")
    return TvReport(per_row, mean)


def beliefs_to_json(beliefs: BeliefStore) -> str:
    """Model-file shaped JSON with posterior ``alpha`` vectors in place of ``p``."""
    s = beliefs.structure
    cpts = [Cpt(v, beliefs.parents(v), np.full(beliefs.prior[v].shape, 0.0)) for v in range(s.n_vars)]
    extra = {"excluded": [s.variables[v].name for v in sorted(beliefs.excluded)]}
    return _dump(s.variables, s.dag, cpts, [beliefs.alpha_table(v) for v in range(s.n_vars)],
                 "alpha", extra)


def beliefs_from_json(text: str) -> BeliefStore:
    """Read a snapshot back as a store whose prior is the dumped alpha (counts zero)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(e.msg, line=e.lineno, column=e.colno) from None
    model, _ = model_from_dict(data, value_key="alpha")
    names = model.names
    excluded = [names.index(e) for e in data.get("excluded", [])]
    prior = []
    counts = []
    for v in range(model.n_vars):
        a = np.array(model.cpts[v].reordered(model.dag.parents(v)).table)
        if np.any(a <= 0):
            raise ModelFormatError("alpha entries must be positive", f"cpts[{v}]")
        a.flags.writeable = False
        prior.append(a)
        c = np.zeros(a.shape, dtype=np.int64)
        c.flags.writeable = False
        counts.append(c)
    return BeliefStore(model.structure, tuple(prior), tuple(counts), frozenset(excluded))
