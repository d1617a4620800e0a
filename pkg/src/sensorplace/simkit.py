"""Noisy measurement simulation and maximum-likelihood outage detection.

Line flows follow the linearized DistFlow rule (a line carries the sum of the
loads energized beneath it).  Voltage is an energized indicator: 1.0 p.u. when
powered, 0.0 otherwise.  Sensor noise on every reading is Normal(0, s^2) with
a single shared ``sensor_sigma``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .detectability import monitored_sets
from .feeder import Edge, Feeder, LoadModel
from .hypotheses import OutageHypothesis, energized_set, enumerate_hu
from .placement import Placement

VARIANCE_FLOOR = 1e-12
VOLTAGE_THRESHOLD = 0.5
NOMINAL_VOLTAGE = 1.0


@dataclass(frozen=True)
class MeasurementSet:
    flows: Mapping[Edge, float]
    voltages: Mapping[int, float]
    sensor_sigma: float = 0.0


def sample_loads(load_model: LoadModel, seed) -> np.ndarray:
    """One draw of true loads, ``l_i ~ N(forecast_i, sigma_i^2)``.

    Buses with zero forecast and sigma always return exactly 0.  Negative
    draws are kept.
    """
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(load_model.size)
    loads = load_model.forecasts + load_model.sigmas * z
    return np.where(load_model.sigmas == 0, load_model.forecasts, loads)


def _flow_members(feeder: Feeder, alive: frozenset[int], edge: Edge) -> list[int]:
    j = edge[1]
    if j not in alive:
        return []
    return sorted(k for k in feeder.subtree_nodes(j) if k in alive)


def simulate_measurements(
    feeder: Feeder,
    placement: Placement,
    h: OutageHypothesis,
    loads: Sequence[float],
    sensor_sigma: float,
    seed,
) -> MeasurementSet:
    loads = np.asarray(loads, dtype=float)
    if loads.shape != (feeder.node_count,):
        raise ValueError(f"expected {feeder.node_count} loads, got shape {loads.shape}")
    if sensor_sigma < 0 or not math.isfinite(sensor_sigma):
        raise ValueError("sensor_sigma must be finite and non-negative")
    mon = monitored_sets(feeder, placement)
    alive = energized_set(feeder, h)
    edges = sorted(mon.flow_edges, key=lambda e: e[1])
    nodes = sorted(mon.voltage_nodes)
    noise = np.random.default_rng(seed).normal(0.0, sensor_sigma, size=len(edges) + len(nodes))

    flows = {}
    for e, n in zip(edges, noise[: len(edges)]):
        total = 0.0
        for k in _flow_members(feeder, alive, e):
            total += loads[k - 1]
        flows[e] = total + float(n)
    volts = {
        i: (NOMINAL_VOLTAGE if i in alive else 0.0) + float(n)
        for i, n in zip(nodes, noise[len(edges):])
    }
    return MeasurementSet(flows, volts, float(sensor_sigma))


def _gaussian_logpdf(x: float, mean: float, var: float) -> float:
    var = max(var, VARIANCE_FLOOR)
    return -0.5 * ((x - mean) ** 2 / var + math.log(2 * math.pi * var))


def log_likelihood(
    feeder: Feeder,
    placement: Placement,
    h: OutageHypothesis,
    meas: MeasurementSet,
    load_model: LoadModel,
) -> float:
    """Gaussian log-likelihood of ``meas`` under hypothesis ``h``.

    Voltage readings are classified energized iff above 0.5; a hypothesis
    that disagrees with any classification scores ``-inf``.
    """
    alive = energized_set(feeder, h)
    for i, v in meas.voltages.items():
        if (v > VOLTAGE_THRESHOLD) != (i in alive):
            return -math.inf
    total = 0.0
    s2 = meas.sensor_sigma ** 2
    for e, s in sorted(meas.flows.items(), key=lambda kv: kv[0][1]):
        mean, var = 0.0, 0.0
        for k in _flow_members(feeder, alive, e):
            mean += load_model.forecasts[k - 1]
            var += load_model.sigmas[k - 1] ** 2
        total += _gaussian_logpdf(s, mean, var + s2)
    return total


def ml_detect(
    feeder: Feeder,
    placement: Placement,
    meas: MeasurementSet,
    load_model: LoadModel,
    hypotheses: Sequence[OutageHypothesis],
) -> OutageHypothesis:
    """Most likely hypothesis; ties go to fewer outages, then lower child ids."""
    if not hypotheses:
        raise ValueError("ml_detect needs at least one candidate hypothesis")
    best, best_ll = None, -math.inf
    for h in sorted(hypotheses, key=OutageHypothesis.sort_key):
        ll = log_likelihood(feeder, placement, h, meas, load_model)
        if ll > best_ll:
            best, best_ll = h, ll
    if best is None:
        raise ValueError("every hypothesis has zero likelihood; measurements do not match placement")
    return best


class _LikelihoodTable:
    """Per-hypothesis means, variances and voltage flags, vectorised."""

    def __init__(self, feeder, placement, load_model, hypotheses, sensor_sigma):
        mon = monitored_sets(feeder, placement)
        self.edges = sorted(mon.flow_edges, key=lambda e: e[1])
        self.nodes = sorted(mon.voltage_nodes)
        self.hypotheses = sorted(hypotheses, key=OutageHypothesis.sort_key)
        H, E = len(self.hypotheses), len(self.edges)
        self.mean = np.zeros((H, E))
        var = np.zeros((H, E))
        self.flags = np.zeros((H, len(self.nodes)), dtype=bool)
        for a, h in enumerate(self.hypotheses):
            alive = energized_set(feeder, h)
            for b, e in enumerate(self.edges):
                for k in _flow_members(feeder, alive, e):
                    self.mean[a, b] += load_model.forecasts[k - 1]
                    var[a, b] += load_model.sigmas[k - 1] ** 2
            self.flags[a] = [i in alive for i in self.nodes]
        self.var = np.maximum(var + sensor_sigma ** 2, VARIANCE_FLOOR)
        self.log_norm = np.log(2 * np.pi * self.var).sum(axis=1)

    def detect(self, meas: MeasurementSet) -> OutageHypothesis | None:
        """ML hypothesis, or None when no hypothesis matches the voltage readings."""
        s = np.array([meas.flows[e] for e in self.edges])
        v = np.array([meas.voltages[i] for i in self.nodes]) > VOLTAGE_THRESHOLD
        ll = -0.5 * (((s - self.mean) ** 2 / self.var).sum(axis=1) + self.log_norm)
        ll[(self.flags != v).any(axis=1)] = -np.inf
        if not np.isfinite(ll).any():
            return None
        return self.hypotheses[int(np.argmax(ll))]


@dataclass
class AccuracyReport:
    trials: int
    correct: int
    confusion: Counter
    seed: int
    sensor_sigma: float

    @property
    def accuracy(self) -> float:
        return self.correct / self.trials

    def to_json(self) -> dict:
        def key(kv):
            (truth, found), _ = kv
            return (truth.sort_key(), found is None, found.sort_key() if found is not None else ())

        rows = sorted(self.confusion.items(), key=key)
        return {
            "trials": self.trials,
            "accuracy": self.accuracy,
            "confusion": [
                {"truth": t.to_json(), "detected": d.to_json() if d is not None else None,
                 "count": c} for (t, d), c in rows
            ],
            "seed": self.seed,
            "sensor_sigma": self.sensor_sigma,
        }


def monte_carlo(
    feeder: Feeder,
    placement: Placement,
    load_model: LoadModel,
    sensor_sigma: float,
    trials: int,
    seed: int,
    max_nodes: int | None = None,
) -> AccuracyReport:
    """Detection accuracy over random hypotheses, loads and sensor noise.

    Trial ``t`` draws everything from a generator seeded with ``(seed, t)``.
    A trial whose voltage readings rule out every hypothesis counts as a miss
    with ``detected = None``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    kwargs = {} if max_nodes is None else {"max_nodes": max_nodes}
    hyps = enumerate_hu(feeder, **kwargs)
    table = _LikelihoodTable(feeder, placement, load_model, hyps, sensor_sigma)
    confusion: Counter = Counter()
    correct = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        truth = hyps[int(rng.integers(len(hyps)))]
        load_seed, noise_seed = (int(x) for x in rng.integers(0, 2**63 - 1, size=2))
        loads = sample_loads(load_model, load_seed)
        meas = simulate_measurements(feeder, placement, truth, loads, sensor_sigma, noise_seed)
        found = table.detect(meas)
        confusion[(truth, found)] += 1
        correct += found == truth
    return AccuracyReport(trials, correct, confusion, seed, float(sensor_sigma))
