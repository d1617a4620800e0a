"""Reproducible experiment harnesses: random corpora and the claim check."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .detectability import AUDIT_SCHEMA, audit_placement, single_edge_audit
from .feeder import Feeder
from .generate import random_feeder
from .hypotheses import enumerate_hu
from .placement import Placement, build_program, solve_exact


def random_corpus(count: int, n_range: tuple[int, int], seed: int, **kwargs) -> list[Feeder]:
    """``count`` random feeders with bus counts uniform over ``n_range`` (inclusive)."""
    rng = np.random.default_rng(seed)
    lo, hi = n_range
    return [random_feeder(int(rng.integers(lo, hi + 1)), rng, **kwargs) for _ in range(count)]


CLAIM_SCHEMA = {
    "type": "object",
    "required": ["instances", "single_edge_violations", "full_hu_violations", "full_hu_checked"],
    "properties": {
        "single_edge_violations": {"type": "integer", "minimum": 0},
        "full_hu_violations": {"type": "integer", "minimum": 0},
        "full_hu_checked": {"type": "integer", "minimum": 0},
        "instances": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "node_count", "zero_injection", "placement", "single_edge"],
                "properties": {
                    "index": {"type": "integer"},
                    "node_count": {"type": "integer", "minimum": 1},
                    "zero_injection": {"type": "array", "items": {"type": "integer"}},
                    "placement": {"type": "object"},
                    "single_edge": AUDIT_SCHEMA,
                    "full_hu": {"oneOf": [AUDIT_SCHEMA, {"type": "null"}]},
                },
            },
        },
    },
}


def claim_check(
    feeders: Sequence[Feeder],
    placements: Sequence[Placement] | None = None,
    full_hu_max_nodes: int = 10,
) -> dict:
    """Audit optimal placements over single-edge outages and, for small feeders, all of H_U.

    Every violating pair is kept verbatim in the returned report.
    """
    instances = []
    single_bad = full_bad = full_checked = 0
    for idx, feeder in enumerate(feeders):
        placement = placements[idx] if placements is not None else solve_exact(build_program(feeder))
        single = single_edge_audit(feeder, placement)
        entry = {
            "index": idx,
            "node_count": feeder.node_count,
            "zero_injection": sorted(feeder.zero_injection),
            "placement": placement.to_json(),
            "single_edge": single.to_json(),
            "full_hu": None,
        }
        single_bad += not single.claim_holds
        if feeder.node_count <= full_hu_max_nodes:
            full = audit_placement(feeder, placement, enumerate_hu(feeder, max_nodes=full_hu_max_nodes))
            entry["full_hu"] = full.to_json()
            full_checked += 1
            full_bad += not full.claim_holds
        instances.append(entry)
    return {
        "instances": instances,
        "single_edge_violations": single_bad,
        "full_hu_violations": full_bad,
        "full_hu_checked": full_checked,
    }
