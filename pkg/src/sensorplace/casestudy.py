"""Cost-ratio and zero-injection sweeps over one feeder topology."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .feeder import Feeder
from .placement import Placement, build_program, check_feasible, solve_exact


@dataclass(frozen=True)
class CaseRow:
    ratio: float
    zero_injection: tuple[int, ...]
    node_sensors: int
    line_sensors: int
    total_cost: float
    feasible: bool
    placement: Placement

    def to_json(self) -> dict:
        return {
            "ratio": self.ratio,
            "zero_injection": list(self.zero_injection),
            "node_sensors": self.node_sensors,
            "line_sensors": self.line_sensors,
            "total_cost": self.total_cost,
            "feasible": self.feasible,
            "placement": self.placement.to_json(),
        }


def case_study(
    feeder: Feeder,
    cost_ratios: Sequence[float],
    z_variants: Iterable[Iterable[int]] | None = None,
) -> list[CaseRow]:
    """Solve with ``a_i = ratio`` and ``b = 1`` for every (ratio, Z) pair.

    ``z_variants`` defaults to the feeder's own zero-injection set.
    """
    if any(r <= 0 for r in cost_ratios):
        raise ValueError("cost ratios must be positive")
    variants = [tuple(sorted(feeder.zero_injection))] if z_variants is None else [
        tuple(sorted(set(z))) for z in z_variants
    ]
    rows = []
    for ratio in cost_ratios:
        for zero in variants:
            variant = feeder.with_zero_injection(zero).with_costs(float(ratio), 1.0)
            program = build_program(variant)
            placement = solve_exact(program)
            rows.append(CaseRow(
                float(ratio), zero, len(placement.node_sensors), len(placement.line_sensors),
                placement.total_cost, check_feasible(program, placement), placement,
            ))
    return rows


def format_table(rows: Sequence[CaseRow]) -> str:
    out = [f"{'ratio':>6}  {'Z':<16}{'node':>5}{'line':>6}{'cost':>8}"]
    for r in rows:
        z = ",".join(map(str, r.zero_injection)) or "-"
        out.append(f"{r.ratio:>6g}  {z:<16}{r.node_sensors:>5}{r.line_sensors:>6}{r.total_cost:>8g}")
    return "\n".join(out)
