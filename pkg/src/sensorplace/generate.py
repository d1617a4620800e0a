"""Synthetic feeders for tests and experiments."""

from __future__ import annotations

from typing import Iterable, Mapping

import networkx as nx
import numpy as np

from .feeder import ROOT, Feeder


def build_feeder(
    parent_of: Mapping[int, int],
    *,
    forecast: Mapping[int, float] | float = 1.0,
    sigma: Mapping[int, float] | float = 0.0,
    zero_injection: Iterable[int] = (),
    node_cost: Mapping[int, float] | float = 2.0,
    line_cost: Mapping[tuple[int, int], float] | float = 1.0,
) -> Feeder:
    """Assemble a feeder from a parent map, broadcasting scalar attributes.

    Zero-injection buses are forced to zero forecast and sigma.
    """
    n = len(parent_of) + 1
    nodes = range(1, n + 1)
    zero = frozenset(zero_injection)

    def per_node(v):
        return dict(v) if isinstance(v, Mapping) else {i: float(v) for i in nodes}

    f, s = per_node(forecast), per_node(sigma)
    for i in zero:
        f[i] = s[i] = 0.0
    edges = [(p, k) for k, p in parent_of.items()]
    lcost = dict(line_cost) if isinstance(line_cost, Mapping) else {e: float(line_cost) for e in edges}
    return Feeder(n, parent_of, f, s, zero, per_node(node_cost), lcost)


def five_bus_feeder(**kwargs) -> Feeder:
    """Five-bus example: children of 1 are {2, 3}; children of 3 are {4, 5}."""
    return build_feeder({2: 1, 3: 1, 4: 3, 5: 3}, **kwargs)


def path_feeder(n: int, **kwargs) -> Feeder:
    return build_feeder({k: k - 1 for k in range(2, n + 1)}, **kwargs)


def star_feeder(leaves: int, **kwargs) -> Feeder:
    return build_feeder({k: ROOT for k in range(2, leaves + 2)}, **kwargs)


def random_parents(n: int, rng: np.random.Generator) -> dict[int, int]:
    """Parent map of a uniformly random labelled tree on 1..n, rooted at 1."""
    if n == 1:
        return {}
    if n == 2:
        return {2: 1}
    seq = [int(v) for v in rng.integers(0, n, size=n - 2)]
    tree = nx.from_prufer_sequence(seq)
    parents = {}
    for u, v in nx.bfs_edges(tree, 0):
        parents[v + 1] = u + 1
    return parents


def random_feeder(
    n: int,
    rng: np.random.Generator,
    *,
    zero_prob: float = 0.2,
    costs: tuple[int, int] = (1, 5),
    forecast_range: tuple[float, float] = (0.5, 2.0),
    sigma_frac: float = 0.1,
) -> Feeder:
    """Random radial feeder.

    Integer sensor costs are drawn uniformly from ``costs`` (inclusive).  Each
    bus is zero-injection independently with probability ``zero_prob``; the
    others get a uniform forecast and ``sigma = sigma_frac * forecast``.
    """
    parents = random_parents(n, rng)
    lo, hi = costs
    nodes = range(1, n + 1)
    zero = [i for i in nodes if rng.random() < zero_prob]
    forecast = {i: float(rng.uniform(*forecast_range)) for i in nodes}
    sigma = {i: sigma_frac * forecast[i] for i in nodes}
    node_cost = {i: float(rng.integers(lo, hi + 1)) for i in nodes}
    line_cost = {(p, k): float(rng.integers(lo, hi + 1)) for k, p in sorted(parents.items())}
    return build_feeder(parents, forecast=forecast, sigma=sigma, zero_injection=zero,
                        node_cost=node_cost, line_cost=line_cost)
