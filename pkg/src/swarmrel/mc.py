"""Monte Carlo estimation of delivery reliability for all protocol variants.

Each trial draws fresh geometry and fading, runs the selected protocol, and
reports which UAVs decoded.  Every trial owns an rng seeded from
(master_seed, trial_index), so estimates are bit-identical for a given seed
no matter how many worker processes share the load.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fading, geometry, scenario
from .scenario import ScenarioConfig

__all__ = [
    "Protocol",
    "PROPOSED",
    "NEAREST_GBS",
    "ALL_GBS",
    "HEAD_RELAY",
    "multi_round",
    "TrialOutcome",
    "ReliabilityEstimate",
    "Phase1CountDistribution",
    "run_trial",
    "estimate",
    "phase1_count_distribution",
    "multiround_reliability",
]


@dataclass(frozen=True)
class Protocol:
    """A delivery protocol variant.

    ``proposed``     split slot: all serving GBSs with head-phased weights,
                     then every decoder relays.
    ``nearest_gbs``  the single closest serving GBS transmits for the whole
                     slot; no relaying.
    ``all_gbs``      all serving GBSs transmit (head-phased weights) for the
                     whole slot; no relaying.
    ``head_relay``   like ``proposed`` but only the head relays.
    ``multi_round``  whole-slot cellular stage, then ``rounds`` whole-slot
                     relay rounds over fixed geometry with fresh fading;
                     ``with_head=False`` drops the head's pilot so GBS
                     transmissions are unweighted.
    """

    name: str
    rounds: int = 0
    with_head: bool = True

    def __post_init__(self):
        if self.name == "multi_round" and self.rounds < 1:
            raise ValueError("multi_round requires rounds >= 1")

    @property
    def label(self) -> str:
        if self.name != "multi_round":
            return self.name
        suffix = "" if self.with_head else "_nohead"
        return f"multi_round{self.rounds}{suffix}"


PROPOSED = Protocol("proposed")
NEAREST_GBS = Protocol("nearest_gbs")
ALL_GBS = Protocol("all_gbs")
HEAD_RELAY = Protocol("head_relay")


def multi_round(rounds: int, with_head: bool = True) -> Protocol:
    return Protocol("multi_round", rounds=rounds, with_head=with_head)


@dataclass(frozen=True)
class TrialOutcome:
    """Decode sets of one trial.

    ``decoded_phase2`` is disjoint from ``decoded_phase1`` by construction;
    for multi-round protocols ``round_sets`` holds the cumulative decode set
    after each relay round (nested, non-decreasing).
    """

    protocol: Protocol
    decoded_phase1: frozenset[int]
    decoded_phase2: frozenset[int]
    round_sets: tuple[frozenset[int], ...] = ()

    @property
    def decoded(self) -> frozenset[int]:
        return self.decoded_phase1 | self.decoded_phase2


@dataclass(frozen=True)
class ReliabilityEstimate:
    """Sample mean of the per-trial decoded fraction, with its standard error."""

    eta_mean: float
    std_err: float  # NaN when trials == 1
    trials: int
    seed: int


@dataclass(frozen=True)
class Phase1CountDistribution:
    """Empirical pmf of the cellular-stage decoder count over {0..N}."""

    pmf: np.ndarray
    trials: int
    seed: int

    @property
    def mean_count(self) -> float:
        return float((np.arange(len(self.pmf)) * self.pmf).sum())

    @property
    def mode(self) -> int:
        return int(np.argmax(self.pmf))

    @property
    def std_err_count(self) -> float:
        second = float((np.arange(len(self.pmf)) ** 2 * self.pmf).sum())
        var = max(0.0, second - self.mean_count**2)
        if self.trials < 2:
            return math.nan
        return math.sqrt(var / self.trials)


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """The rng owned by one trial; depends only on (master_seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=(master_seed, index)))


def _cellular_stage(config, rng, protocol):
    """Sample geometry and fading, return (swarm, decoded mask) for the stage.

    Draw order is fixed (GBS layout, swarm layout, cellular fading) so that
    protocols sharing a trial seed share the cellular stage outcome.
    """
    gbs = geometry.sample_gbs_layout(config, rng)
    swarm = geometry.sample_swarm_layout(config, rng)
    draw = fading.draw_phase1(config, rng)

    if protocol.name == "nearest_gbs":
        nearest = gbs.available_idx[np.argmin(gbs.center_distances[gbs.available_idx])]
        sinrs = fading.phase1_sinrs(gbs, swarm, draw, config, transmitters=np.array([nearest]))
        threshold = scenario.full_slot_cell_threshold(config)
    elif protocol.name == "all_gbs":
        sinrs = fading.phase1_sinrs(gbs, swarm, draw, config)
        threshold = scenario.full_slot_cell_threshold(config)
    elif protocol.name == "multi_round":
        combining = "head" if protocol.with_head else "unit"
        sinrs = fading.phase1_sinrs(gbs, swarm, draw, config, combining=combining)
        threshold = scenario.full_slot_cell_threshold(config)
    else:  # proposed / head_relay use the split-slot cellular stage
        sinrs = fading.phase1_sinrs(gbs, swarm, draw, config)
        threshold = scenario.phase1_threshold(config)
    return swarm, sinrs >= threshold


def _relay_once(config, rng, swarm, relays_mask, decoded_mask, threshold):
    """One relay round: return the updated decode mask (never shrinks).

    The listeners are the UAVs that have not decoded yet, which is a strict
    subset of the relays' complement whenever a decoder stays silent (only
    the head relays, say).
    """
    n_relays = int(relays_mask.sum())
    receivers = np.flatnonzero(~decoded_mask)
    updated = decoded_mask.copy()
    if n_relays == 0 or len(receivers) == 0:
        return updated
    draw = fading.draw_phase2(len(receivers), n_relays, rng)
    sinrs = fading.phase2_sinrs(
        swarm, np.flatnonzero(relays_mask), draw, config, receivers=receivers
    )
    updated[receivers] = sinrs >= threshold
    return updated


def run_trial(config: ScenarioConfig, protocol: Protocol, rng: np.random.Generator) -> TrialOutcome:
    """Run one protocol trial on freshly sampled geometry and fading."""
    swarm, dec1 = _cellular_stage(config, rng, protocol)

    if protocol.name in ("nearest_gbs", "all_gbs"):
        return TrialOutcome(
            protocol=protocol,
            decoded_phase1=frozenset(np.flatnonzero(dec1).tolist()),
            decoded_phase2=frozenset(),
        )

    if protocol.name == "multi_round":
        threshold = scenario.full_slot_d2d_threshold(config)
        decoded = dec1.copy()
        rounds = []
        for _ in range(protocol.rounds):
            decoded = _relay_once(config, rng, swarm, decoded, decoded, threshold)
            rounds.append(frozenset(np.flatnonzero(decoded).tolist()))
        phase1 = frozenset(np.flatnonzero(dec1).tolist())
        return TrialOutcome(
            protocol=protocol,
            decoded_phase1=phase1,
            decoded_phase2=frozenset(np.flatnonzero(decoded).tolist()) - phase1,
            round_sets=tuple(rounds),
        )

    # proposed / head_relay: one relay round within the split slot
    relays = dec1.copy()
    if protocol.name == "head_relay":
        relays = np.zeros_like(dec1)
        relays[swarm.head_idx] = dec1[swarm.head_idx]
    decoded = _relay_once(config, rng, swarm, relays, dec1, scenario.phase2_threshold(config))
    phase1 = frozenset(np.flatnonzero(dec1).tolist())
    return TrialOutcome(
        protocol=protocol,
        decoded_phase1=phase1,
        decoded_phase2=frozenset(np.flatnonzero(decoded).tolist()) - phase1,
    )


def _fraction_chunk(config, protocol, master_seed, start, stop, per_round):
    """Decoded fractions for trials [start, stop); rows are rounds if per_round."""
    n = config.n_uavs
    width = protocol.rounds + 1 if per_round else 1
    out = np.empty((stop - start, width))
    for i in range(start, stop):
        outcome = run_trial(config, protocol, trial_rng(master_seed, i))
        if per_round:
            out[i - start, 0] = len(outcome.decoded_phase1) / n
            for r, s in enumerate(outcome.round_sets):
                out[i - start, r + 1] = len(s) / n
        else:
            out[i - start, 0] = len(outcome.decoded) / n
    return start, out


def _count_chunk(config, master_seed, start, stop):
    counts = np.zeros(config.n_uavs + 1)
    for i in range(start, stop):
        outcome = run_trial(config, PROPOSED, trial_rng(master_seed, i))
        counts[len(outcome.decoded_phase1)] += 1
    return start, counts


def _map_chunks(worker, trials: int, workers: int):
    """Run worker(start, stop) over a fixed chunking of range(trials).

    Chunk boundaries depend only on ``trials``, never on ``workers``, and
    results are reassembled by chunk origin, so the reduction order (and the
    result, bit for bit) is independent of the worker count.
    """
    chunk = max(1, min(256, math.ceil(trials / 16)))
    spans = [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    if workers <= 1:
        return [worker(s, e) for s, e in spans]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(worker, s, e) for s, e in spans]
        return [f.result() for f in futures]


def _gather_fractions(config, protocol, trials, master_seed, workers, per_round=False):
    worker = functools.partial(_fraction_chunk, config, protocol, master_seed, per_round=per_round)
    width = protocol.rounds + 1 if per_round else 1
    fractions = np.empty((trials, width))
    for start, block in _map_chunks(worker, trials, workers):
        fractions[start : start + len(block)] = block
    return fractions


def estimate(
    config: ScenarioConfig,
    protocol: Protocol,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> ReliabilityEstimate:
    """Mean decoded fraction over independent trials.

    Deterministic in (config, protocol, trials, master_seed): per-trial rngs
    are derived from the seed and the trial index, and the mean is taken over
    the trial-ordered array.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    fractions = _gather_fractions(config, protocol, trials, master_seed, workers)[:, 0]
    std_err = math.nan if trials == 1 else float(fractions.std(ddof=1) / math.sqrt(trials))
    return ReliabilityEstimate(
        eta_mean=float(fractions.mean()), std_err=std_err, trials=trials, seed=master_seed
    )


def multiround_reliability(
    config: ScenarioConfig,
    rounds: int,
    with_head: bool,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> list[ReliabilityEstimate]:
    """Reliability after the cellular stage and after each relay round.

    Entry 0 is the cellular stage alone; entry r is after relay round r.
    All entries come from the same trials, so the sequence is non-decreasing
    trial by trial, not just on average.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    protocol = multi_round(rounds, with_head)
    fractions = _gather_fractions(config, protocol, trials, master_seed, workers, per_round=True)
    out = []
    for col in fractions.T:
        std_err = math.nan if trials == 1 else float(col.std(ddof=1) / math.sqrt(trials))
        out.append(
            ReliabilityEstimate(
                eta_mean=float(col.mean()), std_err=std_err, trials=trials, seed=master_seed
            )
        )
    return out


def phase1_count_distribution(
    config: ScenarioConfig,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> Phase1CountDistribution:
    """Empirical distribution of the cellular-stage decoder count."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    worker = functools.partial(_count_chunk, config, master_seed)
    counts = np.zeros(config.n_uavs + 1)
    for _, block in _map_chunks(worker, trials, workers):
        counts += block
    return Phase1CountDistribution(pmf=counts / trials, trials=trials, seed=master_seed)
