"""Scenario geometry, macro-diversity statistics and the drop simulator.

A scenario is a set of base stations and users on a plane with per-link
LOS/NLOS conditions, CI models per condition, a link budget and a beam
sweep grid.  The Monte Carlo drop simulator emulates a directional sweep:
for every link and every (TX sector angle, RX direction) combination it
draws a shadow-faded directional path loss, marks the combination
detectable when the draw stays within the budget's maximum measurable path
loss, synthesizes per-link omnidirectional path loss from the detectable
combinations, and reduces each link to a per-RX-direction reception mask.

Reception-over-all-angles statistics for k serving base stations are then
combinatorial: a k-combination of serving stations covers a user when the
entrywise OR of its reception masks is all-true.

Known limitation: directional draws across the angles of one link are
independent; no angular correlation model is applied.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coverage import LinkBudget
from .params import DEFAULT_P_LOS, DEFAULT_SEED
from .propagation import CiModel, Condition, ci_sample_path_loss_db
from .rng import substream

LinkKey = tuple[str, str]  # (ue_id, bs_id)


@dataclass(frozen=True)
class Node:
    """A base station or user position; height is antenna height AGL."""

    id: str
    x_m: float
    y_m: float
    height_m: float

    def __post_init__(self):
        if self.height_m <= 0:
            raise ValueError(f"height_m must be positive, got {self.height_m}")


@dataclass(frozen=True)
class SweepGrid:
    """Beam sweep geometry: TX sector angles by RX azimuth/elevation bins.

    Defaults: 15 TX pointing angles at 8 degree increments (a 120 degree
    sector; 17 for the extended 136 degree sector), 24 RX azimuths at 15
    degree increments covering the full plane, 3 RX elevation planes, for
    72 RX beamformed directions.
    """

    tx_angles: int = 15
    rx_azimuths: int = 24
    rx_elevations: int = 3
    tx_step_deg: float = 8.0
    rx_step_deg: float = 15.0

    def __post_init__(self):
        if self.tx_angles < 1 or self.rx_azimuths < 1 or self.rx_elevations < 1:
            raise ValueError("sweep grid counts must be >= 1")
        if abs(self.rx_azimuths * self.rx_step_deg - 360.0) > 1e-9:
            raise ValueError("RX azimuth bins must tile the full 360 degree plane")

    @property
    def n_rx_directions(self) -> int:
        return self.rx_azimuths * self.rx_elevations


@dataclass(frozen=True)
class ReceptionRecord:
    """Per-link detectability over the RX direction grid.

    ``mask[el * n_azimuths + az]`` is True when that RX direction received
    signal from at least one TX sector angle (elevation-major ordering).
    """

    link: LinkKey
    mask: tuple[bool, ...]

    @property
    def full_reception(self) -> bool:
        return all(self.mask)


@dataclass(frozen=True)
class ConditionPolicy:
    """Per-link condition assignment.

    Explicit entries take precedence; remaining links draw LOS with
    probability ``p_los`` (Bernoulli, one draw per link per trial).
    """

    explicit: Mapping[LinkKey, Condition] = field(default_factory=dict)
    p_los: float = DEFAULT_P_LOS

    def __post_init__(self):
        if not 0.0 <= self.p_los <= 1.0:
            raise ValueError(f"p_los must be in [0, 1], got {self.p_los}")
        for link, cond in self.explicit.items():
            if cond not in (Condition.LOS, Condition.NLOS):
                raise ValueError(
                    f"explicit condition for link {link} must be LOS or NLOS")

    def resolve(self, link: LinkKey, rng: np.random.Generator) -> Condition:
        cond = self.explicit.get(link)
        if cond is not None:
            return cond
        return Condition.LOS if rng.random() < self.p_los else Condition.NLOS


@dataclass(frozen=True)
class Scenario:
    """A drop-simulation scenario; see the module docstring."""

    base_stations: tuple[Node, ...]
    ues: tuple[Node, ...]
    condition_policy: ConditionPolicy
    models: Mapping[Condition, CiModel]
    budget: LinkBudget
    sweep: SweepGrid = SweepGrid()
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not self.base_stations:
            raise ValueError("scenario needs at least one base station")
        if not self.ues:
            raise ValueError("scenario needs at least one UE")
        for nodes, label in ((self.base_stations, "base station"), (self.ues, "UE")):
            ids = [n.id for n in nodes]
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate {label} id")
        for cond in (Condition.LOS, Condition.NLOS):
            if cond not in self.models:
                raise ValueError(f"missing CI model for condition {cond.value}")

    def links(self) -> list[tuple[Node, Node]]:
        """All (UE, BS) pairs in deterministic id order."""
        ues = sorted(self.ues, key=lambda n: n.id)
        bss = sorted(self.base_stations, key=lambda n: n.id)
        return [(ue, bs) for ue in ues for bs in bss]

    def topology(self) -> dict[str, tuple[str, ...]]:
        """Serving sets: every base station serves every UE."""
        bs_ids = tuple(sorted(bs.id for bs in self.base_stations))
        return {ue.id: bs_ids for ue in sorted(self.ues, key=lambda n: n.id)}


@dataclass
class DropRealization:
    """One Monte Carlo trial: per-link conditions, omni path loss, masks."""

    trial: int
    conditions: dict[LinkKey, Condition]
    omni_pl_db: dict[LinkKey, float]
    records: dict[LinkKey, ReceptionRecord]
    best_order: dict[str, tuple[str, ...]]


@dataclass(frozen=True)
class DistanceStats:
    mean_m: float
    median_m: float
    std_m: float
    min_m: float
    max_m: float


def distance_3d(a: Node, b: Node) -> float:
    """3D Euclidean separation including the height difference."""
    return math.sqrt((a.x_m - b.x_m) ** 2 + (a.y_m - b.y_m) ** 2
                     + (a.height_m - b.height_m) ** 2)


def nearest_neighbor_order(ue: Node, scenario: Scenario) -> list[str]:
    """Base station ids by ascending 3D distance; ties by ascending id."""
    return [bs.id for bs in sorted(scenario.base_stations,
                                   key=lambda bs: (distance_3d(ue, bs), bs.id))]


def nn_distance_stats(scenario: Scenario,
                      max_rank: int | None = None) -> dict[int, DistanceStats]:
    """Across-UE statistics of the k-th nearest base station distance.

    Returns a map rank (1-based) -> stats; standard deviation is the
    population value.  Values are unrounded, rounding is left to display.
    """
    n_bs = len(scenario.base_stations)
    if max_rank is None:
        max_rank = n_bs
    if not 1 <= max_rank <= n_bs:
        raise ValueError(f"max_rank must be in [1, {n_bs}], got {max_rank}")
    by_rank: dict[int, list[float]] = {r: [] for r in range(1, max_rank + 1)}
    for ue in scenario.ues:
        dists = sorted(distance_3d(ue, bs) for bs in scenario.base_stations)
        for r in range(1, max_rank + 1):
            by_rank[r].append(dists[r - 1])
    out = {}
    for r, vals in by_rank.items():
        arr = np.array(vals)
        out[r] = DistanceStats(
            mean_m=float(arr.mean()),
            median_m=float(np.median(arr)),
            std_m=float(arr.std()),
            min_m=float(arr.min()),
            max_m=float(arr.max()),
        )
    return out


def best_n_path_loss(ue_id: str, scenario: Scenario,
                     realization: DropRealization) -> list[float]:
    """Per-link omni path losses for one UE, ascending (Best-1 first).

    Links with no detectable angle carry infinite path loss and sort last.
    """
    return sorted(realization.omni_pl_db[(ue_id, bs.id)]
                  for bs in scenario.base_stations)


def enumerate_serving_combinations(
        topology: Mapping[str, Iterable[str]],
        k: int) -> list[tuple[str, tuple[str, ...]]]:
    """All k-subsets of each UE's serving set, lexicographically ordered.

    UEs with fewer than k serving stations contribute no combinations.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    combos = []
    for ue_id in sorted(topology):
        serving = sorted(topology[ue_id])
        for subset in itertools.combinations(serving, k):
            combos.append((ue_id, subset))
    return combos


def all_angle_reception_probability(records: Mapping[LinkKey, ReceptionRecord],
                                    topology: Mapping[str, Iterable[str]],
                                    k: int) -> float:
    """Fraction of k-combinations that receive over every RX direction.

    A combination counts as reception when the entrywise OR of its member
    links' masks has no uncovered direction.
    """
    combos = enumerate_serving_combinations(topology, k)
    if not combos:
        raise ValueError(f"no serving set has {k} or more base stations")
    masks = {}
    for ue_id, subset in combos:
        for bs_id in subset:
            link = (ue_id, bs_id)
            if link not in masks:
                rec = records.get(link)
                if rec is None:
                    raise ValueError(f"missing reception record for link {link}")
                masks[link] = np.array(rec.mask, dtype=bool)
    hits = 0
    for ue_id, subset in combos:
        union = np.zeros_like(masks[(ue_id, subset[0])])
        for bs_id in subset:
            union |= masks[(ue_id, bs_id)]
        if union.all():
            hits += 1
    return hits / len(combos)


def _simulate_link(model: CiModel, best_model: CiModel | None, d_m: float,
                   sweep: SweepGrid, budget: LinkBudget,
                   rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Directional draws for one link: (detect mask over RX dirs, omni PL)."""
    shape = (sweep.tx_angles, sweep.rx_elevations, sweep.rx_azimuths)
    pl = ci_sample_path_loss_db(model, d_m, rng, size=shape)
    pl = pl.reshape(sweep.tx_angles, sweep.n_rx_directions)
    if best_model is not None:
        # The single best-aligned angle pair follows its own statistics;
        # the lowest arbitrary-angle draw is replaced by a best-model draw.
        best_pl = float(ci_sample_path_loss_db(best_model, d_m, rng))
        pl.flat[np.argmin(pl)] = best_pl
    detect = pl <= budget.max_pl_db
    mask = detect.any(axis=0)
    if detect.any():
        omni = float(-10.0 * np.log10(np.sum(10.0 ** (-pl[detect] / 10.0))))
    else:
        omni = math.inf
    return mask, omni


def simulate_drop(scenario: Scenario, trials: int) -> list[DropRealization]:
    """Run ``trials`` independent drops of the beam-sweep emulation.

    Trial t draws from the (seed, t) sub-stream, so any prefix of trials is
    identical regardless of the total trial count, and trials can be
    distributed without changing results.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    links = scenario.links()
    best_model = scenario.models.get(Condition.NLOS_BEST)
    realizations = []
    for t in range(trials):
        rng = substream(scenario.seed, t)
        conditions: dict[LinkKey, Condition] = {}
        omni: dict[LinkKey, float] = {}
        records: dict[LinkKey, ReceptionRecord] = {}
        for ue, bs in links:
            link = (ue.id, bs.id)
            cond = scenario.condition_policy.resolve(link, rng)
            model = scenario.models[cond]
            d = distance_3d(ue, bs)
            mask, omni_pl = _simulate_link(
                model, best_model if cond is Condition.NLOS else None,
                d, scenario.sweep, scenario.budget, rng)
            conditions[link] = cond
            omni[link] = omni_pl
            records[link] = ReceptionRecord(link, tuple(bool(b) for b in mask))
        best_order = {
            ue.id: tuple(sorted((bs.id for bs in scenario.base_stations),
                                key=lambda b: (omni[(ue.id, b)], b)))
            for ue in scenario.ues
        }
        realizations.append(DropRealization(t, conditions, omni, records, best_order))
    return realizations


def reception_vs_serving_count(scenario: Scenario, trials: int, k_max: int,
                               realizations: Sequence[DropRealization] | None = None
                               ) -> dict[int, float]:
    """Mean all-angle reception probability for k = 1..k_max serving stations.

    Pass ``realizations`` to reuse drops already simulated for this scenario.
    """
    n_bs = len(scenario.base_stations)
    if not 1 <= k_max <= n_bs:
        raise ValueError(f"k_max must be in [1, {n_bs}], got {k_max}")
    topology = scenario.topology()
    if realizations is None:
        realizations = simulate_drop(scenario, trials)
    return {
        k: float(np.mean([all_angle_reception_probability(r.records, topology, k)
                          for r in realizations]))
        for k in range(1, k_max + 1)
    }


def reception_table_from_records(records: Mapping[LinkKey, ReceptionRecord],
                                 topology: Mapping[str, Iterable[str]],
                                 k_max: int | None = None
                                 ) -> dict[int, tuple[float, int]]:
    """Reception probabilities from measured (or fixture) masks, no simulation.

    Returns k -> (probability, combination count) for every k with at
    least one combination, up to ``k_max`` or the largest serving set.
    """
    sizes = [len(set(s)) for s in topology.values()]
    limit = max(sizes) if k_max is None else k_max
    out = {}
    for k in range(1, limit + 1):
        combos = enumerate_serving_combinations(topology, k)
        if not combos:
            break
        out[k] = (all_angle_reception_probability(records, topology, k), len(combos))
    return out
