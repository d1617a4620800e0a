"""Cost-optimal sensor placement for outage detection on radial feeders."""

from .detectability import (
    AuditReport,
    MonitoredSets,
    Signature,
    audit_placement,
    distinguishable,
    monitored_sets,
    signature,
    single_edge_audit,
)
from .feeder import Feeder, FeederError, LoadModel, dump_feeder, load_feeder, parse_feeder
from .hypotheses import (
    EnumerationCapError,
    OutageHypothesis,
    energized_set,
    enumerate_hu,
    hypothesis_count,
    is_uniquely_identifiable,
)
from .placement import (
    IntegerProgram,
    InfeasibleProgramError,
    Placement,
    build_program,
    check_feasible,
    greedy_heuristic,
    solve_exact,
    solve_exhaustive,
)
from .simkit import (
    MeasurementSet,
    log_likelihood,
    ml_detect,
    monte_carlo,
    sample_loads,
    simulate_measurements,
)

__version__ = "0.1.0"
