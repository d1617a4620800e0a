"""Noise-free distinguishability of outage hypotheses under a placement.

A hypothesis is seen through the sensors as a :class:`Signature`.  Each
monitored line is summarised by the set of energized, load-carrying buses
whose consumption flows through it, and each monitored bus by whether it is
energized.  Two hypotheses with different signatures give different readings
for every load vector outside a measure-zero set, so signature equality is
the load-independent notion of "same measurements".
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .feeder import Edge, Feeder
from .hypotheses import OutageHypothesis, energized_set, single_edge_hypotheses
from .placement import Placement


@dataclass(frozen=True)
class MonitoredSets:
    flow_edges: frozenset[Edge]
    voltage_nodes: frozenset[int]


@dataclass(frozen=True)
class Signature:
    flow_fingerprint: Mapping[Edge, frozenset[int]]
    voltage_flags: Mapping[int, bool]

    def key(self) -> tuple:
        return (
            tuple(sorted(self.flow_fingerprint.items(), key=lambda kv: kv[0][1])),
            tuple(sorted(self.voltage_flags.items())),
        )

    def __hash__(self):
        return hash(self.key())


def monitored_sets(feeder: Feeder, placement: Placement) -> MonitoredSets:
    flows: set[Edge] = set()
    volts: set[int] = set()
    for e in placement.line_sensors:
        i, j = feeder.check_edge(e)
        flows.add((i, j))
        volts.add(j)
    for i in placement.node_sensors:
        flows.update(feeder.incident_edges(i))
        volts.add(i)
    return MonitoredSets(frozenset(flows), frozenset(volts))


def signature(
    feeder: Feeder,
    placement: Placement,
    h: OutageHypothesis,
    monitored: MonitoredSets | None = None,
) -> Signature:
    if monitored is None:
        monitored = monitored_sets(feeder, placement)
    alive = energized_set(feeder, h)
    zero = feeder.zero_injection
    flows = {}
    for e in sorted(monitored.flow_edges, key=lambda e: e[1]):
        j = e[1]
        if j in alive:
            flows[e] = frozenset(k for k in feeder.subtree_nodes(j) if k in alive and k not in zero)
        else:
            flows[e] = frozenset()
    volts = {i: i in alive for i in sorted(monitored.voltage_nodes)}
    return Signature(flows, volts)


def distinguishable(feeder: Feeder, placement: Placement, h1: OutageHypothesis,
                    h2: OutageHypothesis) -> bool:
    if h1 == h2:
        raise ValueError("distinguishable() needs two different hypotheses")
    return signature(feeder, placement, h1) != signature(feeder, placement, h2)


@dataclass
class AuditReport:
    hypotheses_checked: int = 0
    pairs_checked: int = 0
    indistinguishable_pairs: list[tuple[OutageHypothesis, OutageHypothesis]] = field(
        default_factory=list
    )

    @property
    def claim_holds(self) -> bool:
        return not self.indistinguishable_pairs

    def to_json(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "indistinguishable_pairs": [
                [a.to_json(), b.to_json()] for a, b in self.indistinguishable_pairs
            ],
            "claim_holds": self.claim_holds,
        }


AUDIT_SCHEMA = {
    "type": "object",
    "required": ["pairs_checked", "indistinguishable_pairs", "claim_holds"],
    "properties": {
        "pairs_checked": {"type": "integer", "minimum": 0},
        "indistinguishable_pairs": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "integer"},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
            },
        },
        "claim_holds": {"type": "boolean"},
    },
}


def audit_placement(feeder: Feeder, placement: Placement,
                    hypotheses: Sequence[OutageHypothesis]) -> AuditReport:
    """Every unordered pair of ``hypotheses`` with equal signatures.

    Pairs come out sorted by each hypothesis' (size, child ids) key, the
    smaller hypothesis first.
    """
    if len(set(hypotheses)) != len(hypotheses):
        raise ValueError("hypotheses must be pairwise distinct")
    monitored = monitored_sets(feeder, placement)
    groups: dict[tuple, list[OutageHypothesis]] = defaultdict(list)
    for h in hypotheses:
        groups[signature(feeder, placement, h, monitored).key()].append(h)
    pairs = []
    for members in groups.values():
        members = sorted(members, key=OutageHypothesis.sort_key)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                pairs.append((members[a], members[b]))
    pairs.sort(key=lambda p: (p[0].sort_key(), p[1].sort_key()))
    n = len(hypotheses)
    return AuditReport(n, n * (n - 1) // 2, pairs)


def single_edge_audit(feeder: Feeder, placement: Placement) -> AuditReport:
    return audit_placement(feeder, placement, single_edge_hypotheses(feeder))
