"""Line-outage hypotheses and the uniquely identifiable set."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .feeder import Edge, Feeder

DEFAULT_MAX_NODES = 20


class EnumerationCapError(ValueError):
    pass


@dataclass(frozen=True, init=False, repr=False)
class OutageHypothesis:
    """A set of simultaneously outaged lines."""

    edges: frozenset[Edge] = frozenset()

    def __init__(self, edges: Iterable[Edge] = ()):
        object.__setattr__(self, "edges", frozenset((int(i), int(j)) for i, j in edges))

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.sorted_edges)

    @property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges, key=lambda e: e[1]))

    @property
    def child_ids(self) -> tuple[int, ...]:
        return tuple(sorted(j for _, j in self.edges))

    def sort_key(self):
        """Fewer outages first, then lexicographic by child id."""
        return (len(self.edges), self.child_ids)

    def to_json(self) -> list[list[int]]:
        return [[i, j] for i, j in self.sorted_edges]

    @classmethod
    def from_json(cls, pairs) -> OutageHypothesis:
        return cls(tuple(p) for p in pairs)

    def __repr__(self):
        return f"OutageHypothesis({list(self.sorted_edges)})"


def validate(feeder: Feeder, h: OutageHypothesis) -> OutageHypothesis:
    for e in h.edges:
        feeder.check_edge(e)
    return h


def hypothesis_count(feeder: Feeder) -> int:
    """Size of the full hypothesis space, every subset of lines."""
    return 2 ** (feeder.node_count - 1)


def is_uniquely_identifiable(feeder: Feeder, h: OutageHypothesis) -> bool:
    validate(feeder, h)
    kids = h.child_ids
    for a in kids:
        for b in kids:
            if a != b and feeder.is_ancestor(a, b):
                return False
    return True


def energized_set(feeder: Feeder, h: OutageHypothesis) -> frozenset[int]:
    """Buses still connected to the root once the lines in ``h`` are open."""
    validate(feeder, h)
    dead: set[int] = set()
    for _, j in h.edges:
        dead |= feeder.subtree_nodes(j)
    return frozenset(i for i in feeder.nodes if i not in dead)


def enumerate_hu(
    feeder: Feeder,
    max_outages: int | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> list[OutageHypothesis]:
    """Every antichain of lines (size <= ``max_outages``), empty one included.

    Output is lexicographic by sorted child ids.  Full enumeration is refused
    above ``max_nodes`` buses unless ``max_outages`` bounds the search.
    """
    if max_outages is None and feeder.node_count > max_nodes:
        raise EnumerationCapError(
            f"feeder has {feeder.node_count} buses, above the enumeration cap of "
            f"{max_nodes}; pass max_outages to enumerate partially"
        )
    if max_outages is not None and max_outages < 0:
        raise ValueError("max_outages must be non-negative")
    limit = feeder.node_count if max_outages is None else max_outages
    children = [j for _, j in feeder.edges]
    out: list[OutageHypothesis] = []

    def walk(start: int, chosen: list[int]):
        out.append(OutageHypothesis((feeder.parent_of[j], j) for j in chosen))
        if len(chosen) >= limit:
            return
        for idx in range(start, len(children)):
            j = children[idx]
            # comparable lines share an ancestor/descendant relation
            if any(feeder.is_ancestor(c, j) or feeder.is_ancestor(j, c) for c in chosen):
                continue
            chosen.append(j)
            walk(idx + 1, chosen)
            chosen.pop()

    walk(0, [])
    return out


def single_edge_hypotheses(feeder: Feeder) -> list[OutageHypothesis]:
    return [OutageHypothesis()] + [OutageHypothesis([e]) for e in feeder.edges]

