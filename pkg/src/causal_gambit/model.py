"""Discrete causal graphical models: variables, DAGs, CPTs and the JSON model file."""

from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Sequence

import numpy as np

ROW_TOLERANCE = 1e-9
JOINT_TOLERANCE = 1e-6
# joint normalisation is only checked by enumeration below this size
_MAX_ENUMERATED_JOINT = 1 << 16


class ModelError(ValueError):
    """Base class for problems with a model or model file."""


class ModelFormatError(ModelError):
    """The model file cannot be read into a model.

    ``location`` is a JSON path such as ``cpts[1].rows[0].p``; ``line`` and
    ``column`` are set for JSON syntax errors.
    """

    def __init__(self, message: str, location: str | None = None,
                 line: int | None = None, column: int | None = None):
        self.location = location
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if location:
            where.append(location)
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)


class CycleError(ModelError):
    def __init__(self, cycle: Sequence[int], names: Sequence[str] | None = None):
        self.cycle = tuple(cycle)
        labels = [names[i] for i in cycle] if names else [str(i) for i in cycle]
        super().__init__("directed cycle: " + " -> ".join(labels + labels[:1]))


class ModelValidationError(ModelError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("invalid model:\n" + "\n".join(f"  {v}" for v in self.violations))


@dataclass(frozen=True)
class Violation:
    kind: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.location}: {self.message}"


@dataclass(frozen=True)
class VariableSpec:
    name: str
    states: tuple[str, ...]
    index: int

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise KeyError(f"variable {self.name!r} has no state {state!r}") from None


@dataclass(frozen=True)
class Dag:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))

    @classmethod
    def empty(cls, n: int) -> Dag:
        return cls(tuple(range(n)), ())

    def parents(self, node: int) -> tuple[int, ...]:
        return tuple(sorted({a for a, b in self.edges if b == node}))

    def children(self, node: int) -> tuple[int, ...]:
        return tuple(sorted({b for a, b in self.edges if a == node}))

    def find_cycle(self) -> list[int] | None:
        """Return the nodes of one directed cycle, or None if the graph is acyclic."""
        succ: dict[int, list[int]] = {n: [] for n in self.nodes}
        for a, b in self.edges:
            succ.setdefault(a, []).append(b)
            succ.setdefault(b, [])
        colour = dict.fromkeys(succ, 0)  # 0 unseen, 1 on stack, 2 done
        for start in sorted(succ):
            if colour[start]:
                continue
            stack = [(start, iter(sorted(succ[start])))]
            path = [start]
            colour[start] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    colour[node] = 2
                    stack.pop()
                    path.pop()
                elif colour[nxt] == 1:
                    return path[path.index(nxt):]
                elif colour[nxt] == 0:
                    colour[nxt] = 1
                    path.append(nxt)
                    stack.append((nxt, iter(sorted(succ[nxt]))))
        return None


def topological_order(dag: Dag) -> list[int]:
    """Kahn's algorithm, always emitting the lowest-index ready node first.

    Raises:
        CycleError: if the graph has a directed cycle.
    """
    indeg = dict.fromkeys(dag.nodes, 0)
    succ: dict[int, set[int]] = {n: set() for n in dag.nodes}
    for a, b in set(dag.edges):
        succ[a].add(b)
        indeg[b] += 1
    ready = [n for n, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        n = heapq.heappop(ready)
        order.append(n)
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(ready, m)
    if len(order) != len(indeg):
        raise CycleError(dag.find_cycle() or [])
    return order


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability table of one variable.

    ``table`` has one axis per parent (in ``parents`` order) followed by the
    variable's own axis, so ``table[config]`` is the row for that parent
    configuration.
    """

    variable: int
    parents: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))
        table = np.array(self.table, dtype=np.float64)
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    def row(self, config: Sequence[int] = ()) -> np.ndarray:
        return self.table[tuple(config)]

    def rows(self) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
        """Rows in lexicographic order of the parent configuration."""
        for config in itertools.product(*(range(k) for k in self.table.shape[:-1])):
            yield config, self.table[config]

    def reordered(self, parents: Sequence[int]) -> Cpt:
        """The same table with its parent axes permuted into ``parents`` order."""
        parents = tuple(parents)
        if parents == self.parents:
            return self
        perm = [self.parents.index(p) for p in parents] + [len(self.parents)]
        return Cpt(self.variable, parents, np.transpose(self.table, perm))

    def __eq__(self, other):
        if not isinstance(other, Cpt):
            return NotImplemented
        return (self.variable == other.variable and self.parents == other.parents
                and self.table.shape == other.table.shape
                and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.variable, self.parents, self.table.tobytes()))


@dataclass(frozen=True)
class Structure:
    """Variables plus graph, without parameters."""

    variables: tuple[VariableSpec, ...]
    dag: Dag

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def index_of(self, name: str) -> int:
        for v in self.variables:
            if v.name == name:
                return v.index
        raise KeyError(f"unknown variable {name!r}")

    def parents(self, node: int) -> tuple[int, ...]:
        return self.dag.parents(node)


@dataclass(frozen=True, eq=False)
class CausalModel:
    variables: tuple[VariableSpec, ...]
    dag: Dag
    cpts: tuple[Cpt, ...]
    _topo: list[int] | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))

    @classmethod
    def build(cls, variables: Sequence[tuple[str, Sequence[str]]],
              cpts: Mapping[str, Any]) -> CausalModel:
        """Build a model from names.

        ``cpts`` maps each variable name either to a probability table (root
        variables) or to ``(parent_names, table)``; edges follow the parents.
        """
        specs = tuple(VariableSpec(name, tuple(states), i) for i, (name, states) in enumerate(variables))
        index = {v.name: v.index for v in specs}
        tables = []
        edges = []
        for v in specs:
            entry = cpts[v.name]
            if isinstance(entry, tuple) and len(entry) == 2 and not np.isscalar(entry[0]) \
                    and all(isinstance(p, str) for p in entry[0]):
                parent_names, table = entry
            else:
                parent_names, table = (), entry
            parents = tuple(index[p] for p in parent_names)
            edges.extend((p, v.index) for p in parents)
            tables.append(Cpt(v.index, parents, np.asarray(table, dtype=float)))
        return cls(specs, Dag(tuple(range(len(specs))), tuple(edges)), tuple(tables))

    @property
    def structure(self) -> Structure:
        return Structure(self.variables, self.dag)

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def index_of(self, name: str) -> int:
        for v in self.variables:
            if v.name == name:
                return v.index
        raise KeyError(f"unknown variable {name!r}")

    def state_index(self, variable: int | str, state: str) -> int:
        var = self.variables[self.index_of(variable) if isinstance(variable, str) else variable]
        return var.state_index(state)

    def cpt(self, variable: int | str) -> Cpt:
        i = self.index_of(variable) if isinstance(variable, str) else variable
        return self.cpts[i]

    def parents(self, node: int) -> tuple[int, ...]:
        return self.dag.parents(node)

    def roots(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_vars) if not self.cpts[i].parents)

    def topological_order(self) -> list[int]:
        if self._topo is None:
            object.__setattr__(self, "_topo", topological_order(self.dag))
        return list(self._topo)

    def __eq__(self, other):
        if not isinstance(other, CausalModel):
            return NotImplemented
        return (self.variables == other.variables
                and self.dag.nodes == other.dag.nodes
                and sorted(set(self.dag.edges)) == sorted(set(other.dag.edges))
                and self.cpts == other.cpts)

    __hash__ = None


def validate_model(model: CausalModel) -> list[Violation]:
    """Check every structural and numerical invariant of ``model``.

    Returns the list of violations; an empty list means the model is valid.
    """
    out: list[Violation] = []
    n = len(model.variables)

    names = [v.name for v in model.variables]
    for i, v in enumerate(model.variables):
        loc = f"variables[{i}] ({v.name})"
        if v.index != i:
            out.append(Violation("variable", loc, f"index {v.index} does not match position {i}"))
        if len(v.states) < 2:
            out.append(Violation("variable", loc, f"needs at least 2 states, has {len(v.states)}"))
        if len(set(v.states)) != len(v.states):
            out.append(Violation("variable", loc, "duplicate state names"))
        if names.count(v.name) > 1 and names.index(v.name) == i:
            out.append(Violation("variable", loc, f"variable name {v.name!r} is not unique"))

    def label(i):
        return names[i] if 0 <= i < n else str(i)

    dag = model.dag
    if tuple(dag.nodes) != tuple(range(n)):
        out.append(Violation("dag", "dag.nodes", f"nodes {list(dag.nodes)} do not match the {n} variables"))
    seen = set()
    edges_ok = True
    for k, (a, b) in enumerate(dag.edges):
        loc = f"edges[{k}]"
        if not (0 <= a < n and 0 <= b < n):
            out.append(Violation("dag", loc, f"edge ({a}, {b}) references an unknown node"))
            edges_ok = False
            continue
        if a == b:
            out.append(Violation("dag", loc, f"self-edge on {label(a)}"))
        if (a, b) in seen:
            out.append(Violation("dag", loc, f"duplicate edge {label(a)} -> {label(b)}"))
        seen.add((a, b))
    acyclic = True
    if edges_ok:
        cycle = dag.find_cycle()
        if cycle:
            acyclic = False
            out.append(Violation("cycle", "edges", str(CycleError(cycle, names))))

    card = [v.cardinality for v in model.variables]
    cpts_ok = len(model.cpts) == n
    if not cpts_ok:
        out.append(Violation("cpt", "cpts", f"expected {n} CPTs, found {len(model.cpts)}"))
    for i, cpt in enumerate(model.cpts[:n]):
        loc = f"cpts[{i}] ({label(cpt.variable)})"
        if cpt.variable != i:
            out.append(Violation("cpt", loc, f"CPT for variable {label(cpt.variable)} is at position {i}"))
            cpts_ok = False
            continue
        if any(not 0 <= p < n for p in cpt.parents):
            out.append(Violation("cpt", loc, "parent index out of range"))
            cpts_ok = False
            continue
        if len(set(cpt.parents)) != len(cpt.parents):
            out.append(Violation("cpt", loc, "duplicate parents"))
            cpts_ok = False
        if edges_ok and set(cpt.parents) != set(dag.parents(i)):
            out.append(Violation(
                "cpt", loc,
                f"parents {[label(p) for p in cpt.parents]} differ from graph parents "
                f"{[label(p) for p in dag.parents(i)]}"))
            cpts_ok = False
        shape = tuple(card[p] for p in cpt.parents) + (card[i],)
        if cpt.table.shape != shape:
            out.append(Violation("cpt", loc, f"table shape {cpt.table.shape}, expected {shape}"))
            cpts_ok = False
            continue
        for config, row in cpt.rows():
            rloc = f"{loc} row given={[model.variables[p].states[s] for p, s in zip(cpt.parents, config)]}"
            if not np.all(np.isfinite(row)) or np.any(row < 0) or np.any(row > 1):
                out.append(Violation("probability", rloc, f"entries {row.tolist()} outside [0, 1]"))
                cpts_ok = False
            total = float(np.sum(row))
            if abs(total - 1.0) > ROW_TOLERANCE:
                out.append(Violation("normalization", rloc, f"row {row.tolist()} sums to {total:.12g}, not 1"))
                cpts_ok = False

    if cpts_ok and acyclic and math.prod(card) <= _MAX_ENUMERATED_JOINT:
        from .inference import joint_table
        total = float(joint_table(model).sum())
        if abs(total - 1.0) > JOINT_TOLERANCE:
            out.append(Violation("normalization", "joint", f"joint distribution sums to {total:.12g}, not 1"))
    return out


def check_model(model: CausalModel) -> CausalModel:
    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)
    return model


# -- model file ---------------------------------------------------------------

def _expect(cond: bool, message: str, location: str):
    if not cond:
        raise ModelFormatError(message, location)


def _keys(obj: Any, required: set[str], location: str, optional: set[str] = frozenset()):
    _expect(isinstance(obj, dict), "expected an object", location)
    missing = required - obj.keys()
    _expect(not missing, f"missing key(s) {sorted(missing)}", location)
    extra = obj.keys() - required - optional
    _expect(not extra, f"unknown key(s) {sorted(extra)}", location)


def _number(x: Any, location: str) -> float:
    _expect(isinstance(x, (int, float)) and not isinstance(x, bool), "expected a number", location)
    return float(x)


def model_from_dict(data: Any, value_key: str = "p") -> tuple[CausalModel, list[dict]]:
    """Read the model-file structure (already JSON-decoded) into a model.

    ``value_key`` names the per-row vector (``p`` for models, ``alpha`` for
    belief snapshots). Returns the model and the raw CPT blocks.

    Raises:
        ModelFormatError: on schema problems, with the JSON path of the fault.
    """
    _keys(data, {"variables", "edges", "cpts"}, "$", optional={"excluded"})
    raw_vars = data["variables"]
    _expect(isinstance(raw_vars, list) and raw_vars, "expected a non-empty list", "variables")
    specs = []
    index: dict[str, int] = {}
    for i, rv in enumerate(raw_vars):
        loc = f"variables[{i}]"
        _keys(rv, {"name", "states"}, loc)
        name, states = rv["name"], rv["states"]
        _expect(isinstance(name, str) and name, "name must be a non-empty string", f"{loc}.name")
        _expect(name not in index, f"duplicate variable name {name!r}", f"{loc}.name")
        _expect(isinstance(states, list) and all(isinstance(s, str) for s in states),
                "states must be a list of strings", f"{loc}.states")
        index[name] = i
        specs.append(VariableSpec(name, tuple(states), i))

    raw_edges = data["edges"]
    _expect(isinstance(raw_edges, list), "expected a list", "edges")
    edges = []
    for k, e in enumerate(raw_edges):
        loc = f"edges[{k}]"
        _expect(isinstance(e, list) and len(e) == 2, "edge must be [parent, child]", loc)
        for end in e:
            _expect(end in index, f"unknown variable {end!r}", loc)
        edges.append((index[e[0]], index[e[1]]))

    raw_cpts = data["cpts"]
    _expect(isinstance(raw_cpts, list), "expected a list", "cpts")
    by_var: dict[int, Cpt] = {}
    for c, rc in enumerate(raw_cpts):
        loc = f"cpts[{c}]"
        _keys(rc, {"variable", "parents", "rows"}, loc)
        var = rc["variable"]
        _expect(var in index, f"unknown variable {var!r}", f"{loc}.variable")
        vi = index[var]
        _expect(vi not in by_var, f"second CPT for {var!r}", f"{loc}.variable")
        pnames = rc["parents"]
        _expect(isinstance(pnames, list), "parents must be a list", f"{loc}.parents")
        for p in pnames:
            _expect(p in index, f"unknown parent variable {p!r}", f"{loc}.parents")
        _expect(len(set(pnames)) == len(pnames), "duplicate parents", f"{loc}.parents")
        parents = tuple(index[p] for p in pnames)
        shape = tuple(specs[p].cardinality for p in parents) + (specs[vi].cardinality,)
        table = np.full(shape, np.nan)
        filled = set()
        rows = rc["rows"]
        _expect(isinstance(rows, list), "rows must be a list", f"{loc}.rows")
        for r, row in enumerate(rows):
            rloc = f"{loc}.rows[{r}]"
            _keys(row, {"given", value_key}, rloc)
            given = row["given"]
            _expect(isinstance(given, list) and len(given) == len(parents),
                    f"given must list one state per parent ({len(parents)})", f"{rloc}.given")
            config = []
            for p, s in zip(parents, given):
                _expect(s in specs[p].states,
                        f"unknown state {s!r} for parent {specs[p].name!r}", f"{rloc}.given")
                config.append(specs[p].states.index(s))
            config = tuple(config)
            _expect(config not in filled, f"duplicate row for given={given}", rloc)
            vec = row[value_key]
            _expect(isinstance(vec, list) and len(vec) == specs[vi].cardinality,
                    f"{value_key} must have {specs[vi].cardinality} entries (one per state of {var!r})",
                    f"{rloc}.{value_key}")
            table[config] = [_number(x, f"{rloc}.{value_key}[{j}]") for j, x in enumerate(vec)]
            filled.add(config)
        expected = math.prod(shape[:-1])
        if len(filled) != expected:
            missing = [
                [specs[p].states[s] for p, s in zip(parents, cfg)]
                for cfg in itertools.product(*(range(k) for k in shape[:-1])) if cfg not in filled
            ]
            raise ModelFormatError(f"missing rows for given={missing}", f"{loc}.rows")
        by_var[vi] = Cpt(vi, parents, table)
    for v in specs:
        _expect(v.index in by_var, f"no CPT for variable {v.name!r}", "cpts")

    model = CausalModel(tuple(specs), Dag(tuple(range(len(specs))), tuple(edges)),
                        tuple(by_var[i] for i in range(len(specs))))
    return model, raw_cpts


def parse_model(text: str, validate: bool = True) -> CausalModel:
    """Parse a JSON model file.

    Raises:
        ModelFormatError: malformed JSON or schema (with line or JSON path).
        ModelValidationError: the file is well formed but the model violates
            an invariant; skipped when ``validate`` is False.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(e.msg, line=e.lineno, column=e.colno) from None
    model, _ = model_from_dict(data)
    if validate:
        check_model(model)
    return model


def load_model(path, validate: bool = True) -> CausalModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), validate=validate)


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _rows_block(model_vars, cpt: Cpt, values, value_key: str) -> list[str]:
    lines = []
    for config, _ in cpt.rows():
        given = json.dumps([model_vars[p].states[s] for p, s in zip(cpt.parents, config)])
        vec = "[" + ", ".join(_num(x) for x in values[config]) + "]"
        lines.append(f'        {{"given": {given}, "{value_key}": {vec}}}')
    return lines


def _dump(variables, dag, cpts, values, value_key: str, extra: dict | None = None) -> str:
    out = ["{", '  "variables": [']
    out.append(",\n".join(
        f'    {{"name": {json.dumps(v.name)}, "states": {json.dumps(list(v.states))}}}' for v in variables))
    out.append("  ],")
    edge_lines = [f"    {json.dumps([variables[a].name, variables[b].name])}" for a, b in dag.edges]
    if edge_lines:
        out.append('  "edges": [')
        out.append(",\n".join(edge_lines))
        out.append("  ],")
    else:
        out.append('  "edges": [],')
    for key, value in (extra or {}).items():
        out.append(f"  {json.dumps(key)}: {json.dumps(value)},")
    out.append('  "cpts": [')
    blocks = []
    for cpt, vals in zip(cpts, values):
        block = [
            "    {",
            f'      "variable": {json.dumps(variables[cpt.variable].name)},',
            f'      "parents": {json.dumps([variables[p].name for p in cpt.parents])},',
            '      "rows": [',
            ",\n".join(_rows_block(variables, cpt, vals, value_key)),
            "      ]",
            "    }",
        ]
        blocks.append("\n".join(block))
    out.append(",\n".join(blocks))
    out.append("  ]")
    out.append("}")
    return "\n".join(out) + "\n"


def serialize_model(model: CausalModel) -> str:
    """Model-file JSON text; probabilities carry 17 significant digits."""
    return _dump(model.variables, model.dag, model.cpts, [c.table for c in model.cpts], "p")


def random_model(rng: np.random.Generator, n_vars: int, edge_prob: float = 0.5,
                 max_parents: int = 3, max_states: int = 2,
                 concentration: float = 1.0) -> CausalModel:
    """Random valid model whose edges always point from lower to higher index.

    Rows are Dirichlet(concentration) draws; ``max_states`` > 2 gives each
    variable between 2 and ``max_states`` states.
    """
    cards = [int(rng.integers(2, max_states + 1)) for _ in range(n_vars)]
    specs = tuple(VariableSpec(f"X{i}", tuple(f"s{j}" for j in range(k)), i) for i, k in enumerate(cards))
    edges = []
    cpts = []
    for i in range(n_vars):
        cand = [j for j in range(i) if rng.random() < edge_prob]
        if len(cand) > max_parents:
            cand = sorted(rng.choice(cand, size=max_parents, replace=False).tolist())
        parents = tuple(cand)
        edges.extend((p, i) for p in parents)
        shape = tuple(cards[p] for p in parents) + (cards[i],)
        table = rng.dirichlet(np.full(cards[i], concentration), size=shape[:-1])
        table = table.reshape(shape)
        table /= table.sum(axis=-1, keepdims=True)
        cpts.append(Cpt(i, parents, table))
    return CausalModel(specs, Dag(tuple(range(n_vars)), tuple(edges)), tuple(cpts))
