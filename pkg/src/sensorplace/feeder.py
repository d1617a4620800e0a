"""Radial feeder topology, load forecasts and sensor costs.

A feeder is a rooted tree over buses ``1..N`` with bus 1 as the point of
common coupling.  Every non-root bus ``k`` owns exactly one line, its parent
edge ``(p_k, k)``, so lines are identified by their child endpoint throughout
the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

Edge = tuple[int, int]

ROOT = 1


class FeederError(ValueError):
    """Raised for malformed feeder data or queries on unknown buses/lines."""


def _finite_nonneg(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FeederError(f"{what}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise FeederError(f"{what}: non-finite value {value!r}")
    if value < 0:
        raise FeederError(f"{what}: negative value {value!r}")
    return value


@dataclass(frozen=True)
class Feeder:
    """Immutable radial feeder.

    ``parent_of`` maps every non-root bus to its parent.  The grid connection
    of the root is implicit and never appears in :attr:`edges`.
    """

    node_count: int
    parent_of: Mapping[int, int]
    forecast: Mapping[int, float]
    sigma: Mapping[int, float]
    zero_injection: frozenset[int] = frozenset()
    node_sensor_cost: Mapping[int, float] = field(default_factory=dict)
    line_sensor_cost: Mapping[Edge, float] = field(default_factory=dict)

    def __post_init__(self):
        n = self.node_count
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise FeederError(f"node_count must be a positive integer, got {n!r}")
        nodes = set(range(1, n + 1))

        parent_of = {int(k): int(p) for k, p in self.parent_of.items()}
        if set(parent_of) != nodes - {ROOT}:
            raise FeederError("parent_of must cover exactly the non-root buses 2..N")
        for k, p in parent_of.items():
            if p not in nodes:
                raise FeederError(f"bus {k} has unknown parent {p}")
            if p == k:
                raise FeederError(f"bus {k} is its own parent")
        for k in parent_of:
            # every walk toward the root must terminate within N steps
            cur, steps = k, 0
            while cur != ROOT:
                cur = parent_of[cur]
                steps += 1
                if steps >= n:
                    raise FeederError(f"cycle detected through bus {k}")

        zero = frozenset(int(i) for i in self.zero_injection)
        if not zero <= nodes:
            raise FeederError(f"zero-injection set names unknown buses {sorted(zero - nodes)}")

        forecast, sigma, ncost = {}, {}, {}
        for name, src, dst in (
            ("forecast", self.forecast, forecast),
            ("sigma", self.sigma, sigma),
            ("node_sensor_cost", self.node_sensor_cost, ncost),
        ):
            if set(src) != nodes:
                raise FeederError(f"{name} must have an entry for every bus 1..{n}")
            for i in sorted(nodes):
                dst[i] = _finite_nonneg(src[i], f"{name}[{i}]")

        for i in sorted(nodes):
            if i in zero:
                if forecast[i] != 0.0 or sigma[i] != 0.0:
                    raise FeederError(
                        f"zero-injection bus {i} must have zero forecast and sigma"
                    )
            elif forecast[i] <= 0.0:
                raise FeederError(f"bus {i} is not zero-injection but has forecast <= 0")

        edges = {(p, k) for k, p in parent_of.items()}
        lcost = {}
        if set(self.line_sensor_cost) != edges:
            raise FeederError("line_sensor_cost must have an entry for every line")
        for e in sorted(edges, key=lambda e: e[1]):
            lcost[e] = _finite_nonneg(self.line_sensor_cost[e], f"line_sensor_cost[{e}]")

        object.__setattr__(self, "parent_of", MappingProxyType(parent_of))
        object.__setattr__(self, "zero_injection", zero)
        object.__setattr__(self, "forecast", MappingProxyType(forecast))
        object.__setattr__(self, "sigma", MappingProxyType(sigma))
        object.__setattr__(self, "node_sensor_cost", MappingProxyType(ncost))
        object.__setattr__(self, "line_sensor_cost", MappingProxyType(lcost))

    # -- structure -------------------------------------------------------

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        """All lines, ordered by child id."""
        return tuple((self.parent_of[k], k) for k in range(2, self.node_count + 1))

    @cached_property
    def children(self) -> Mapping[int, tuple[int, ...]]:
        kids: dict[int, list[int]] = {i: [] for i in self.nodes}
        for k in range(2, self.node_count + 1):
            kids[self.parent_of[k]].append(k)
        return MappingProxyType({i: tuple(c) for i, c in kids.items()})

    @cached_property
    def _euler(self) -> tuple[dict[int, int], dict[int, int], list[int]]:
        tin, tout, order = {}, {}, []
        stack = [(ROOT, False)]
        clock = 0
        while stack:
            v, done = stack.pop()
            if done:
                tout[v] = clock
                continue
            tin[v] = clock
            clock += 1
            order.append(v)
            stack.append((v, True))
            for c in reversed(self.children[v]):
                stack.append((c, False))
        return tin, tout, order

    @cached_property
    def _subtrees(self) -> dict[int, frozenset[int]]:
        tin, tout, order = self._euler
        return {v: frozenset(order[tin[v]:tout[v]]) for v in self.nodes}

    def check_node(self, k: int) -> int:
        if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= self.node_count:
            raise FeederError(f"unknown bus {k!r}")
        return int(k)

    def check_edge(self, e) -> Edge:
        try:
            i, j = e
        except (TypeError, ValueError):
            raise FeederError(f"malformed line {e!r}") from None
        if not (isinstance(j, (int, np.integer)) and 2 <= j <= self.node_count
                and self.parent_of[int(j)] == i):
            raise FeederError(f"unknown line {e!r}")
        return (int(i), int(j))

    def parent_edge(self, k: int) -> Edge:
        k = self.check_node(k)
        if k == ROOT:
            raise FeederError("the root has no in-graph parent edge")
        return (self.parent_of[k], k)

    def degree(self, k: int) -> int:
        """Number of children plus one.

        For the root the extra one is the grid connection, which is not a
        member of :attr:`edges`.
        """
        return len(self.children[self.check_node(k)]) + 1

    def subtree_nodes(self, j: int) -> frozenset[int]:
        return self._subtrees[self.check_node(j)]

    def is_downstream(self, e1, e2) -> bool:
        """True iff ``e2`` lies on the path from ``e1`` to the root (``e1 != e2``)."""
        _, k = self.check_edge(e1)
        _, m = self.check_edge(e2)
        if k == m:
            return False
        tin, tout, _ = self._euler
        return tin[m] < tin[k] < tout[m]

    def is_ancestor(self, a: int, b: int) -> bool:
        """True iff bus ``a`` lies on the root path of bus ``b`` (inclusive)."""
        tin, tout, _ = self._euler
        return tin[a] <= tin[b] < tout[a]

    def incident_edges(self, i: int) -> tuple[Edge, ...]:
        """In-graph lines touching bus ``i``: its parent edge, then child edges."""
        i = self.check_node(i)
        out = [] if i == ROOT else [(self.parent_of[i], i)]
        out.extend((i, c) for c in self.children[i])
        return tuple(out)

    def edge_cost(self, e) -> float:
        return self.line_sensor_cost[self.check_edge(e)]

    # -- variants --------------------------------------------------------

    def with_costs(self, node_cost: float | None = None, line_cost: float | None = None) -> Feeder:
        """Copy with uniform node and/or line sensor costs."""
        ncost = dict(self.node_sensor_cost) if node_cost is None else {i: node_cost for i in self.nodes}
        lcost = dict(self.line_sensor_cost) if line_cost is None else {e: line_cost for e in self.edges}
        return Feeder(self.node_count, self.parent_of, self.forecast, self.sigma,
                      self.zero_injection, ncost, lcost)

    def with_zero_injection(self, zero: Iterable[int], default_forecast: float = 1.0) -> Feeder:
        """Copy with a different zero-injection set.

        New members get zero forecast and sigma.  Buses leaving the set keep
        their sigma (zero) and receive ``default_forecast``.
        """
        zero = frozenset(zero)
        forecast = dict(self.forecast)
        sigma = dict(self.sigma)
        for i in self.nodes:
            if i in zero:
                forecast[i] = 0.0
                sigma[i] = 0.0
            elif forecast[i] <= 0.0:
                forecast[i] = default_forecast
        return Feeder(self.node_count, self.parent_of, forecast, sigma, zero,
                      self.node_sensor_cost, self.line_sensor_cost)


@dataclass(frozen=True)
class LoadModel:
    """Independent Gaussian load forecasts; index ``i - 1`` holds bus ``i``."""

    forecasts: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        f = np.array(self.forecasts, dtype=float)
        s = np.array(self.sigmas, dtype=float)
        if f.ndim != 1 or f.shape != s.shape:
            raise ValueError("forecasts and sigmas must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(s))) or np.any(s < 0):
            raise ValueError("load model entries must be finite with sigmas >= 0")
        f.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "forecasts", f)
        object.__setattr__(self, "sigmas", s)

    @property
    def size(self) -> int:
        return len(self.forecasts)

    @classmethod
    def from_feeder(cls, feeder: Feeder) -> LoadModel:
        return cls(
            np.array([feeder.forecast[i] for i in feeder.nodes]),
            np.array([feeder.sigma[i] for i in feeder.nodes]),
        )


# -- file format ---------------------------------------------------------


def _reject_constant(name):
    raise FeederError(f"non-finite number {name} in feeder file")


def _as_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FeederError(f"{what}: expected an integer, got {value!r}")
    return value


def feeder_from_dict(data) -> Feeder:
    if not isinstance(data, dict) or "nodes" not in data or "edges" not in data:
        raise FeederError("feeder file must be an object with 'nodes' and 'edges' arrays")
    nodes, edges = data["nodes"], data["edges"]
    if not isinstance(nodes, list) or not isinstance(edges, list):
        raise FeederError("'nodes' and 'edges' must be arrays")

    forecast, sigma, ncost, zero = {}, {}, {}, set()
    for rec in nodes:
        if not isinstance(rec, dict):
            raise FeederError(f"node record must be an object, got {rec!r}")
        try:
            i = _as_int(rec["id"], "node id")
            if i in forecast:
                raise FeederError(f"duplicate node id {i}")
            forecast[i] = _finite_nonneg(rec["forecast"], f"forecast of bus {i}")
            sigma[i] = _finite_nonneg(rec["sigma"], f"sigma of bus {i}")
            ncost[i] = _finite_nonneg(rec["node_sensor_cost"], f"node_sensor_cost of bus {i}")
            zi = rec.get("zero_injection", False)
        except KeyError as exc:
            raise FeederError(f"node record missing field {exc}") from None
        if not isinstance(zi, bool):
            raise FeederError(f"zero_injection of bus {i} must be a boolean")
        if zi:
            zero.add(i)

    n = len(forecast)
    if n == 0:
        raise FeederError("feeder has no buses")
    if set(forecast) != set(range(1, n + 1)):
        raise FeederError(f"bus ids must be exactly 1..{n}")

    parent_of, lcost = {}, {}
    for rec in edges:
        if not isinstance(rec, dict):
            raise FeederError(f"edge record must be an object, got {rec!r}")
        try:
            i = _as_int(rec["from"], "edge 'from'")
            j = _as_int(rec["to"], "edge 'to'")
            cost = _finite_nonneg(rec["line_sensor_cost"], f"line_sensor_cost of ({i},{j})")
        except KeyError as exc:
            raise FeederError(f"edge record missing field {exc}") from None
        for end in (i, j):
            if end not in forecast:
                raise FeederError(f"edge ({i},{j}) references unknown bus {end}")
        if j in parent_of:
            raise FeederError(f"bus {j} has more than one parent")
        parent_of[j] = i
        lcost[(i, j)] = cost

    roots = sorted(set(forecast) - set(parent_of))
    if roots != [ROOT]:
        if not roots:
            raise FeederError("cycle detected: every bus has a parent")
        if ROOT not in roots:
            raise FeederError("bus 1 must be the root (never appear as 'to')")
        raise FeederError(f"feeder is disconnected: buses {roots} have no parent")

    return Feeder(n, parent_of, forecast, sigma, zero, ncost, lcost)


def parse_feeder(text: str) -> Feeder:
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FeederError(f"invalid feeder file: {exc}") from None
    return feeder_from_dict(data)


def feeder_to_dict(feeder: Feeder) -> dict:
    return {
        "nodes": [
            {
                "id": i,
                "forecast": feeder.forecast[i],
                "sigma": feeder.sigma[i],
                "zero_injection": i in feeder.zero_injection,
                "node_sensor_cost": feeder.node_sensor_cost[i],
            }
            for i in feeder.nodes
        ],
        "edges": [
            {"from": i, "to": j, "line_sensor_cost": feeder.line_sensor_cost[(i, j)]}
            for i, j in feeder.edges
        ],
    }


def dump_feeder(feeder: Feeder) -> str:
    return json.dumps(feeder_to_dict(feeder), indent=2, allow_nan=False) + "\n"


def load_feeder(path) -> Feeder:
    with open(path, encoding="utf-8") as fh:
        return parse_feeder(fh.read())
