"""Minimum-cost sensor placement as a 0-1 covering program.

Variables are node sensors ``x_i`` (one per bus) followed by line sensors
``y_(i,j)`` (one per line, ordered by child id).  Every constraint is a
covering row ``sum(coeff * var) >= rhs`` with positive integer data, which
keeps the exact solver simple: a depth-first branch-and-bound with a
fractional single-row lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .feeder import ROOT, Edge, Feeder

EXHAUSTIVE_MAX_VARS = 24
PRUNE_GUARD = 1e-12


class InfeasibleProgramError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    kind: str  # "x" node sensor, "y" line sensor
    owner: int | Edge

    def __str__(self):
        if self.kind == "x":
            return f"x_{self.owner}"
        i, j = self.owner
        return f"y_({i},{j})"


@dataclass(frozen=True)
class Row:
    coefficients: Mapping[int, int]
    rhs: int
    label: str = ""

    def __post_init__(self):
        coeffs = {int(k): int(v) for k, v in sorted(self.coefficients.items())}
        object.__setattr__(self, "coefficients", MappingProxyType(coeffs))

    def render(self, variables: Sequence[Variable]) -> str:
        terms = " + ".join(
            (f"{c}*" if c != 1 else "") + str(variables[v]) for v, c in self.coefficients.items()
        )
        return f"{terms} >= {self.rhs}"


@dataclass(frozen=True)
class IntegerProgram:
    variables: tuple[Variable, ...]
    objective: tuple[float, ...]
    constraints: tuple[Row, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "objective", tuple(float(c) for c in self.objective))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = len(self.variables)
        if len(self.objective) != n:
            raise ValueError("objective length must match the variable count")
        if any(not math.isfinite(c) or c < 0 for c in self.objective):
            raise ValueError("objective costs must be finite and non-negative")
        if len(set(self.variables)) != n:
            raise ValueError("duplicate variables")
        for row in self.constraints:
            if row.rhs < 1:
                raise ValueError("rows with rhs <= 0 must be dropped")
            for v, c in row.coefficients.items():
                if not 0 <= v < n:
                    raise ValueError(f"row references unknown variable {v}")
                if c < 1:
                    raise ValueError("coefficients must be positive integers")
        object.__setattr__(self, "_index", {var: k for k, var in enumerate(self.variables)})

    @property
    def size(self) -> int:
        return len(self.variables)

    def index_of(self, var: Variable) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise ValueError(f"unknown variable {var}") from None

    def cost(self, assignment: Sequence[int]) -> float:
        """Objective value, accumulated in canonical variable order."""
        total = 0.0
        for c, v in zip(self.objective, assignment):
            if v:
                total += c
        return total

    def satisfies(self, assignment: Sequence[int]) -> bool:
        return all(
            sum(c for v, c in row.coefficients.items() if assignment[v]) >= row.rhs
            for row in self.constraints
        )

    def to_placement(self, assignment: Sequence[int], **meta) -> Placement:
        nodes, lines = [], []
        for var, val in zip(self.variables, assignment):
            if val:
                (nodes if var.kind == "x" else lines).append(var.owner)
        return Placement(frozenset(nodes), frozenset(lines), self.cost(assignment), **meta)

    def assignment_of(self, placement: Placement) -> tuple[int, ...]:
        values = [0] * self.size
        for i in placement.node_sensors:
            values[self.index_of(Variable("x", i))] = 1
        for e in placement.line_sensors:
            values[self.index_of(Variable("y", tuple(e)))] = 1
        return tuple(values)

    def describe(self) -> list[str]:
        return [row.render(self.variables) for row in self.constraints]


@dataclass(frozen=True)
class Placement:
    """Chosen node sensors and line sensors.

    Solver metadata (``optimal``, ``nodes_explored``, ``root_bound``) does not
    take part in equality.
    """

    node_sensors: frozenset[int] = frozenset()
    line_sensors: frozenset[Edge] = frozenset()
    total_cost: float = 0.0
    optimal: bool = field(default=False, compare=False)
    nodes_explored: int = field(default=0, compare=False)
    root_bound: float | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "node_sensors", frozenset(int(i) for i in self.node_sensors))
        object.__setattr__(
            self, "line_sensors", frozenset((int(i), int(j)) for i, j in self.line_sensors)
        )

    @classmethod
    def build(cls, feeder: Feeder, nodes: Iterable[int] = (), lines: Iterable[Edge] = ()) -> Placement:
        nodes = {feeder.check_node(i) for i in nodes}
        lines = {feeder.check_edge(e) for e in lines}
        total = 0.0
        for i in feeder.nodes:
            if i in nodes:
                total += feeder.node_sensor_cost[i]
        for e in feeder.edges:
            if e in lines:
                total += feeder.line_sensor_cost[e]
        return cls(frozenset(nodes), frozenset(lines), total)

    @property
    def sorted_lines(self) -> list[Edge]:
        return sorted(self.line_sensors, key=lambda e: e[1])

    def to_json(self) -> dict:
        return {
            "node_sensors": sorted(self.node_sensors),
            "line_sensors": [[i, j] for i, j in self.sorted_lines],
            "total_cost": self.total_cost,
            "optimal": self.optimal,
            "nodes_explored": self.nodes_explored,
        }

    @classmethod
    def from_json(cls, data: dict) -> Placement:
        try:
            return cls(
                frozenset(data["node_sensors"]),
                frozenset(tuple(e) for e in data["line_sensors"]),
                float(data.get("total_cost", 0.0)),
                optimal=bool(data.get("optimal", False)),
                nodes_explored=int(data.get("nodes_explored", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed placement: {exc}") from None


# -- program construction ------------------------------------------------


def build_program(feeder: Feeder) -> IntegerProgram:
    variables = [Variable("x", i) for i in feeder.nodes]
    variables += [Variable("y", e) for e in feeder.edges]
    index = {v: k for k, v in enumerate(variables)}
    objective = [feeder.node_sensor_cost[i] for i in feeder.nodes]
    objective += [feeder.line_sensor_cost[e] for e in feeder.edges]

    def branching_row(k: int, rhs: int, label: str):
        coeffs = {index[Variable("x", k)]: feeder.degree(k)}
        for j in feeder.children[k]:
            coeffs[index[Variable("x", j)]] = 1
            coeffs[index[Variable("y", (k, j))]] = 1
        return Row(coeffs, rhs, label)

    rows = []
    d1 = feeder.degree(ROOT)
    if d1 - 1 > 0:
        rows.append(branching_row(ROOT, d1 - 1, "root"))
    for k in feeder.nodes:
        if k != ROOT and feeder.degree(k) >= 3:
            rows.append(branching_row(k, feeder.degree(k) - 2, f"branch {k}"))
    for k in sorted(feeder.zero_injection):
        if k == ROOT:
            # the root's parent edge is the grid connection, monitored externally
            continue
        e = feeder.parent_edge(k)
        rows.append(Row({index[Variable("x", k)]: 1, index[Variable("y", e)]: 1}, 1, f"zero {k}"))
    return IntegerProgram(tuple(variables), tuple(objective), tuple(rows))


def check_feasible(program: IntegerProgram, placement: Placement) -> bool:
    return program.satisfies(program.assignment_of(placement))


def _assert_feasible(program: IntegerProgram) -> None:
    for row in program.constraints:
        if sum(row.coefficients.values()) < row.rhs:
            raise InfeasibleProgramError(f"row cannot be satisfied: {row.render(program.variables)}")


def _tie_tol(value: float) -> float:
    return PRUNE_GUARD * max(1.0, abs(value))


# -- heuristics and oracles ----------------------------------------------


def greedy_heuristic(program: IntegerProgram) -> Placement:
    """Feasible placement by best coverage-per-cost selection."""
    _assert_feasible(program)
    residual = [row.rhs for row in program.constraints]
    chosen = [0] * program.size
    var_rows = _var_rows(program)
    while any(r > 0 for r in residual):
        best, best_ratio = None, -1.0
        for v in range(program.size):
            if chosen[v]:
                continue
            gain = sum(min(c, residual[r]) for r, c in var_rows[v] if residual[r] > 0)
            if gain == 0:
                continue
            cost = program.objective[v]
            ratio = math.inf if cost == 0 else gain / cost
            if ratio > best_ratio:
                best, best_ratio = v, ratio
        chosen[best] = 1
        for r, c in var_rows[best]:
            residual[r] -= c
    return program.to_placement(chosen)


def solve_exhaustive(program: IntegerProgram) -> Placement:
    """Complete enumeration; the lexicographically smallest optimum wins."""
    n = program.size
    if n > EXHAUSTIVE_MAX_VARS:
        raise ValueError(f"{n} variables exceeds the exhaustive limit of {EXHAUSTIVE_MAX_VARS}")
    _assert_feasible(program)
    if n == 0:
        return program.to_placement((), optimal=True, nodes_explored=1)

    costs = np.array(program.objective)
    A = np.zeros((len(program.constraints), n), dtype=np.int64)
    rhs = np.array([row.rhs for row in program.constraints], dtype=np.int64)
    for r, row in enumerate(program.constraints):
        for v, c in row.coefficients.items():
            A[r, v] = c
    # variable 0 is the most significant bit, so integer order is lexicographic order
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    chunk = 1 << min(n, 16)

    def chunks():
        for start in range(0, 1 << n, chunk):
            codes = np.arange(start, start + chunk, dtype=np.int64)
            bits = (codes[:, None] >> shifts) & 1
            ok = np.all(bits @ A.T >= rhs, axis=1) if len(rhs) else np.ones(chunk, bool)
            yield codes, np.where(ok, bits @ costs, math.inf)

    best_cost = min(vals.min() for _, vals in chunks())
    cutoff = best_cost + _tie_tol(best_cost)
    for codes, vals in chunks():
        hits = np.flatnonzero(vals <= cutoff)
        if len(hits):
            best_code = int(codes[hits[0]])
            break
    assignment = [(best_code >> int(s)) & 1 for s in shifts]
    return program.to_placement(assignment, optimal=True, nodes_explored=1 << n)


# -- branch and bound ----------------------------------------------------


def _var_rows(program: IntegerProgram) -> list[list[tuple[int, int]]]:
    var_rows: list[list[tuple[int, int]]] = [[] for _ in range(program.size)]
    for r, row in enumerate(program.constraints):
        for v, c in row.coefficients.items():
            var_rows[v].append((r, c))
    return var_rows


class _Search:
    """Depth-first branch-and-bound state over one covering program."""

    def __init__(self, program: IntegerProgram):
        self.cost = program.objective
        self.rows = [list(row.coefficients.items()) for row in program.constraints]
        # per-row variables sorted by cost per unit coefficient, for the bound
        self.sorted_rows = [
            sorted(items, key=lambda vc: (self.cost[vc[0]] / vc[1], vc[0])) for items in self.rows
        ]
        self.var_rows = _var_rows(program)
        self.rhs = [row.rhs for row in program.constraints]
        self.n = program.size
        self.nodes = 0

    def reset(self, fixed: Mapping[int, int]):
        self.value = [-1] * self.n
        self.residual = list(self.rhs)
        self.current = 0.0
        for v, val in fixed.items():
            self._set(v, val)

    def _set(self, v: int, val: int):
        self.value[v] = val
        if val:
            self.current += self.cost[v]
            for r, c in self.var_rows[v]:
                self.residual[r] -= c

    def _unset(self, v: int):
        if self.value[v] == 1:
            self.current -= self.cost[v]
            for r, c in self.var_rows[v]:
                self.residual[r] += c
        self.value[v] = -1

    def row_bound(self, r: int) -> float:
        """Cheapest fractional completion of row ``r`` from its free variables."""
        need = self.residual[r]
        extra = 0.0
        for v, c in self.sorted_rows[r]:
            if self.value[v] != -1:
                continue
            if c >= need:
                return extra + self.cost[v] * need / c
            extra += self.cost[v]
            need -= c
        return math.inf

    def lower_bound(self) -> float:
        """max(best single row, sum over rows sharing no free variable)."""
        bounds = []
        for r, res in enumerate(self.residual):
            if res > 0:
                b = self.row_bound(r)
                if b == math.inf:
                    return b
                bounds.append((b, r))
        if not bounds:
            return 0.0
        bounds.sort(key=lambda br: (-br[0], br[1]))
        used: set[int] = set()
        packed = 0.0
        for b, r in bounds:
            free = [v for v, _ in self.rows[r] if self.value[v] == -1]
            if used.isdisjoint(free):
                used.update(free)
                packed += b
        return max(bounds[0][0], packed)

    def branch_var(self) -> int:
        best, best_count = -1, 0
        counts = [0] * self.n
        for r, res in enumerate(self.residual):
            if res > 0:
                for v, _ in self.rows[r]:
                    if self.value[v] == -1:
                        counts[v] += 1
        for v, cnt in enumerate(counts):
            if cnt > best_count:
                best, best_count = v, cnt
        return best

    def leaf(self) -> list[int]:
        return [1 if x == 1 else 0 for x in self.value]

    def minimize(self, incumbent_cost: float, incumbent: list[int]) -> tuple[float, list[int]]:
        """Improve on the incumbent; returns the best (cost, assignment) found."""
        best = [incumbent_cost, incumbent]

        def dfs():
            self.nodes += 1
            lb = self.lower_bound()
            if self.current + lb >= best[0] - PRUNE_GUARD:
                return
            if all(res <= 0 for res in self.residual):
                best[0], best[1] = self.current, self.leaf()
                return
            v = self.branch_var()
            for val in (1, 0):
                self._set(v, val)
                dfs()
                self._unset(v)

        dfs()
        return best[0], best[1]

    def find_within(self, budget: float) -> list[int] | None:
        """Any completion of cost <= budget, or None."""

        def dfs():
            self.nodes += 1
            if self.current + self.lower_bound() > budget:
                return None
            if all(res <= 0 for res in self.residual):
                return self.leaf()
            v = self.branch_var()
            for val in (1, 0):
                self._set(v, val)
                found = dfs()
                self._unset(v)
                if found is not None:
                    return found
            return None

        return dfs()


def solve_exact(program: IntegerProgram, incumbent: Placement | None = None) -> Placement:
    """Provably optimal placement; the lexicographically smallest optimum.

    A cost-minimising branch-and-bound seeded with the greedy solution finds
    the optimal value.  A second pass then walks the variables in canonical
    order and keeps each at 0 whenever a completion within the optimal cost
    still exists.
    """
    _assert_feasible(program)
    search = _Search(program)
    if incumbent is None:
        incumbent = greedy_heuristic(program)
    start = list(program.assignment_of(incumbent))
    start_cost = program.cost(start)

    search.reset({})
    root_bound = search.lower_bound()
    opt_cost, witness = search.minimize(start_cost, start)
    budget = opt_cost + _tie_tol(opt_cost)

    fixed: dict[int, int] = {}
    for v in range(program.size):
        if witness[v] == 0:
            fixed[v] = 0
            continue
        search.reset({**fixed, v: 0})
        found = search.find_within(budget)
        if found is not None:
            witness = found
            fixed[v] = 0
        else:
            fixed[v] = 1
    assignment = [fixed[v] for v in range(program.size)]
    assert program.satisfies(assignment)
    return program.to_placement(
        assignment, optimal=True, nodes_explored=search.nodes, root_bound=root_bound
    )


def solve_feeder(feeder: Feeder) -> Placement:
    return solve_exact(build_program(feeder))

