"""Seeded graph-ensemble simulation of every connectivity metric.

One trial draws a placement, builds the per-pair SNR matrix for the chosen
channel model, thresholds it into a graph and reads all metrics off that
graph.  Trial t always uses the stream seeded by (master_seed, t), so results
are bit-identical regardless of execution order or worker count, and the two
channel models see the same placements at the same seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import channel, graph, scenario
from .scenario import ScenarioParams

__all__ = [
    "UNIT_DISC",
    "RAYLEIGH",
    "MODELS",
    "DECIDERS",
    "TrialOutcome",
    "EnsembleEstimate",
    "MeanEstimate",
    "EnsembleResult",
    "SweepRow",
    "wilson_interval",
    "run_trial",
    "run_ensemble",
    "estimate_connectivity",
    "estimate_single_link",
    "estimate_node_degree",
    "estimate_vehicle_connectivity",
    "sweep",
]

UNIT_DISC = "unit_disc"
RAYLEIGH = "rayleigh"
MODELS = (UNIT_DISC, RAYLEIGH)
DECIDERS = ("eigen", "components", "both")

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class TrialOutcome:
    """All metrics of one snapshot."""

    connected: bool
    degrees: np.ndarray
    linked_pairs_by_gap: np.ndarray  # count of linked (i, i+m) pairs, m = 1..big_m
    n_isolated_two_side: int  # vehicles with no linked neighbour at all
    n_isolated_forward: int  # vehicles (but the last) with no forward link
    n_isolated_backward: int  # vehicles (but the first) with no backward link
    decider_mismatch: bool | None  # eigen vs union-find, only when both ran


@dataclass(frozen=True)
class EnsembleEstimate:
    """Point estimate of a probability with its 95% confidence interval."""

    trials: int
    successes: int
    estimate: float
    ci_lo: float
    ci_hi: float
    master_seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (self.ci_lo <= self.estimate <= self.ci_hi):
            raise ValueError("interval must bracket the estimate")
        if not (0.0 <= self.estimate <= 1.0):
            raise ValueError("estimate must be a probability")

    def covers(self, value: float) -> bool:
        return self.ci_lo <= value <= self.ci_hi


@dataclass(frozen=True)
class MeanEstimate:
    """Sample mean with its standard error across trials."""

    trials: int
    mean: float
    std_error: float
    master_seed: int


@dataclass(frozen=True)
class _TrialStats:
    connected: bool
    mismatch: bool
    linked_by_gap: np.ndarray
    n_isolated_two_side: int
    n_isolated_forward: int
    n_isolated_backward: int
    degree_mean_all: float
    degree_mean_interior: float


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval; well behaved near 0/1 and at small trial counts."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    # the score interval always contains p; keep that exact under roundoff
    return min(p, max(0.0, center - half)), max(p, min(1.0, center + half))


def _cluster_interval(fractions: np.ndarray) -> tuple[float, float, float]:
    """Mean of per-trial fractions with a normal interval on the trial means.

    Pairs or vehicles inside one trial share headways, so they are dependent;
    the trials themselves are i.i.d. and carry the valid standard error.
    """
    mean = float(fractions.mean())
    if fractions.size < 2:
        return mean, mean, mean
    se = float(fractions.std(ddof=1)) / math.sqrt(fractions.size)
    return mean, max(0.0, mean - _Z95 * se), min(1.0, mean + _Z95 * se)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Stream for one trial, derived only from (master_seed, trial index)."""
    return np.random.default_rng([master_seed, trial_index])


def run_trial(
    params: ScenarioParams,
    model: str,
    rng: np.random.Generator,
    big_m: int = 10,
    decider: str = "eigen",
) -> TrialOutcome:
    """One snapshot: placement -> SNR matrix -> graph -> metrics."""
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    if decider not in DECIDERS:
        raise ValueError(f"decider must be one of {DECIDERS}, got {decider!r}")
    if big_m < 1:
        raise ValueError("big_m must be >= 1")

    headways = scenario.sample_headways(params, rng)
    placement = scenario.placement_from_headways(headways)
    budget = channel.LinkBudget.from_scenario(params)
    if model == UNIT_DISC:
        snr = channel.snr_matrix_unit_disc(placement.distances, budget)
    else:
        snr = channel.snr_matrix_rayleigh(placement.distances, budget, rng)
    g = graph.adjacency_from_snr(snr, params.psi)

    mismatch: bool | None = None
    if decider == "eigen":
        connected = graph.is_connected(g)
    elif decider == "components":
        connected = graph.count_partitions_unionfind(g) == 1
    else:
        eigen_connected = graph.is_connected(g)
        uf_connected = graph.count_partitions_unionfind(g) == 1
        connected = eigen_connected
        mismatch = eigen_connected != uf_connected

    n = g.n
    adjacency = g.adjacency
    linked = np.zeros(big_m, dtype=np.int64)
    for m in range(1, min(big_m, n - 1) + 1):
        linked[m - 1] = int(adjacency.diagonal(m).sum())
    forward_links = np.triu(adjacency, k=1).sum(axis=1)
    backward_links = np.tril(adjacency, k=-1).sum(axis=1)

    return TrialOutcome(
        connected=connected,
        degrees=g.degrees,
        linked_pairs_by_gap=linked,
        n_isolated_two_side=int(np.count_nonzero(g.degrees == 0)),
        n_isolated_forward=int(np.count_nonzero(forward_links[:-1] == 0)),
        n_isolated_backward=int(np.count_nonzero(backward_links[1:] == 0)),
        decider_mismatch=mismatch,
    )


def default_interior_margin(params: ScenarioParams) -> int:
    """Vehicles to drop from each end before averaging node degree.

    An interior vehicle must have effectively all its reachable neighbours
    present on both sides for its expected degree to match the infinite-road
    value; the link probability is negligible beyond a few multiples of
    rho * lam neighbours.  Clamped so at least ten vehicles remain.
    """
    reach = params.rho * channel.unit_disc_range(
        channel.LinkBudget.from_scenario(params), params.psi
    )
    margin = math.ceil(8.0 * reach) + 12
    return max(0, min(margin, (params.n_vehicles - 10) // 2))


def _summarize(outcome: TrialOutcome, margin: int) -> _TrialStats:
    degrees = outcome.degrees
    interior = degrees[margin : degrees.size - margin] if margin > 0 else degrees
    return _TrialStats(
        connected=outcome.connected,
        mismatch=bool(outcome.decider_mismatch),
        linked_by_gap=outcome.linked_pairs_by_gap,
        n_isolated_two_side=outcome.n_isolated_two_side,
        n_isolated_forward=outcome.n_isolated_forward,
        n_isolated_backward=outcome.n_isolated_backward,
        degree_mean_all=float(degrees.mean()),
        degree_mean_interior=float(interior.mean()),
    )


def _trial_stats(
    trial_index: int,
    params: ScenarioParams,
    model: str,
    master_seed: int,
    big_m: int,
    decider: str,
    margin: int,
) -> _TrialStats:
    rng = trial_rng(master_seed, trial_index)
    outcome = run_trial(params, model, rng, big_m=big_m, decider=decider)
    return _summarize(outcome, margin)


@dataclass(frozen=True)
class EnsembleResult:
    """Per-trial statistics of one ensemble plus the estimators over them."""

    params: ScenarioParams
    model: str
    trials: int
    master_seed: int
    big_m: int
    decider: str
    interior_margin: int
    stats: tuple[_TrialStats, ...]

    def network_connectivity(self) -> EnsembleEstimate:
        successes = sum(s.connected for s in self.stats)
        lo, hi = wilson_interval(successes, self.trials)
        return EnsembleEstimate(
            trials=self.trials,
            successes=successes,
            estimate=successes / self.trials,
            ci_lo=lo,
            ci_hi=hi,
            master_seed=self.master_seed,
        )

    def single_link(self, m: int) -> EnsembleEstimate:
        if not 1 <= m <= self.big_m:
            raise ValueError(f"gap m must lie in [1, {self.big_m}], got {m}")
        eligible = self.params.n_vehicles - m
        if eligible < 1:
            raise ValueError(f"no (i, i+{m}) pairs exist for N={self.params.n_vehicles}")
        counts = np.array([s.linked_by_gap[m - 1] for s in self.stats], dtype=float)
        mean, lo, hi = _cluster_interval(counts / eligible)
        return EnsembleEstimate(
            trials=self.trials,
            successes=int(counts.sum()),
            estimate=mean,
            ci_lo=lo,
            ci_hi=hi,
            master_seed=self.master_seed,
        )

    def node_degree(self, interior: bool = True) -> MeanEstimate:
        means = np.array(
            [s.degree_mean_interior if interior else s.degree_mean_all for s in self.stats]
        )
        se = float(means.std(ddof=1)) / math.sqrt(self.trials) if self.trials > 1 else 0.0
        return MeanEstimate(
            trials=self.trials,
            mean=float(means.mean()),
            std_error=se,
            master_seed=self.master_seed,
        )

    def vehicle_connectivity(self, side: str = "two", direction: str = "forward") -> EnsembleEstimate:
        n = self.params.n_vehicles
        if side == "two":
            isolated = np.array([s.n_isolated_two_side for s in self.stats], dtype=float)
            eligible = n
        elif side == "one":
            if direction == "forward":
                isolated = np.array([s.n_isolated_forward for s in self.stats], dtype=float)
            elif direction == "backward":
                isolated = np.array([s.n_isolated_backward for s in self.stats], dtype=float)
            else:
                raise ValueError(f"direction must be forward or backward, got {direction!r}")
            eligible = n - 1
        else:
            raise ValueError(f"side must be 'one' or 'two', got {side!r}")
        fractions = 1.0 - isolated / eligible
        mean, lo, hi = _cluster_interval(fractions)
        connected_total = int(round(fractions.sum() * eligible))
        return EnsembleEstimate(
            trials=self.trials,
            successes=connected_total,
            estimate=mean,
            ci_lo=lo,
            ci_hi=hi,
            master_seed=self.master_seed,
        )

    def decider_mismatches(self) -> int:
        return sum(s.mismatch for s in self.stats)


def run_ensemble(
    params: ScenarioParams,
    model: str,
    trials: int,
    master_seed: int,
    big_m: int = 10,
    decider: str = "eigen",
    workers: int = 1,
    interior_margin: int | None = None,
) -> EnsembleResult:
    """Run the full trial ensemble; deterministic in master_seed alone.

    With workers > 1 the trials run in a process pool; the per-trial streams
    and the index-ordered fold keep the result identical to a serial run.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if master_seed < 0:
        raise ValueError("master_seed must be a nonnegative integer")
    margin = default_interior_margin(params) if interior_margin is None else interior_margin
    if margin < 0 or 2 * margin >= params.n_vehicles:
        raise ValueError(f"interior margin {margin} leaves no vehicles")
    worker = partial(
        _trial_stats,
        params=params,
        model=model,
        master_seed=master_seed,
        big_m=big_m,
        decider=decider,
        margin=margin,
    )
    if workers > 1:
        chunk = max(1, trials // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            stats = tuple(pool.map(worker, range(trials), chunksize=chunk))
    else:
        stats = tuple(worker(t) for t in range(trials))
    return EnsembleResult(
        params=params,
        model=model,
        trials=trials,
        master_seed=master_seed,
        big_m=big_m,
        decider=decider,
        interior_margin=margin,
        stats=stats,
    )


def estimate_connectivity(
    params: ScenarioParams,
    model: str,
    trials: int,
    master_seed: int,
    decider: str = "eigen",
    workers: int = 1,
) -> EnsembleEstimate:
    """Fraction of trials whose snapshot graph is fully connected."""
    result = run_ensemble(
        params, model, trials, master_seed, big_m=1, decider=decider, workers=workers
    )
    return result.network_connectivity()


def estimate_single_link(
    params: ScenarioParams,
    model: str,
    m: int,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> EnsembleEstimate:
    """Fraction of (i, i+m) pairs with a direct link, pooled over trials."""
    if not 1 <= m <= params.n_vehicles - 1:
        raise ValueError(f"gap m must lie in [1, {params.n_vehicles - 1}], got {m}")
    result = run_ensemble(params, model, trials, master_seed, big_m=m, workers=workers)
    return result.single_link(m)


def estimate_node_degree(
    params: ScenarioParams,
    model: str,
    trials: int,
    master_seed: int,
    interior_margin: int | None = None,
    workers: int = 1,
) -> MeanEstimate:
    """Ensemble-and-node average degree, by default over interior vehicles only.

    Vehicles near the ends of the segment are missing neighbours on one side,
    which biases the plain average low against the infinite-road expectation;
    the default margin removes that bias.  Pass interior_margin=0 for the raw
    average over all vehicles.
    """
    result = run_ensemble(
        params, model, trials, master_seed, big_m=1, workers=workers,
        interior_margin=interior_margin,
    )
    return result.node_degree(interior=True)


def estimate_vehicle_connectivity(
    params: ScenarioParams,
    model: str,
    side: str,
    trials: int,
    master_seed: int,
    direction: str = "forward",
    workers: int = 1,
) -> EnsembleEstimate:
    """Fraction of non-isolated vehicles under the one- or two-side definition."""
    result = run_ensemble(params, model, trials, master_seed, big_m=1, workers=workers)
    return result.vehicle_connectivity(side=side, direction=direction)


@dataclass(frozen=True)
class SweepRow:
    """Outcome of one (grid point, model) cell; failures land in ``error``."""

    model: str
    rho: float
    psi: float
    n_vehicles: int | None
    result: EnsembleResult | None
    error: str | None


def sweep(
    grid,
    models,
    trials: int,
    master_seed: int,
    *,
    road_length: float,
    tx_power: float,
    noise_power: float,
    beta: float,
    ple: int,
    big_m: int = 10,
    decider: str = "eigen",
    workers: int = 1,
    interior_margin: int | None = None,
) -> list[SweepRow]:
    """Run the ensemble at every (rho, psi) point for every model.

    Rows follow grid order, then model order.  Per-trial streams depend only
    on (master_seed, trial index), so duplicated grid points produce identical
    rows and both models share placements at the same seed.  A failing point
    is recorded in its row and the sweep continues.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("grid must contain at least one (rho, psi) point")
    if isinstance(models, str):
        models = (models,)
    for model in models:
        if model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    rows: list[SweepRow] = []
    for rho, psi in grid:
        for model in models:
            try:
                params = ScenarioParams(
                    rho=rho,
                    road_length=road_length,
                    tx_power=tx_power,
                    noise_power=noise_power,
                    beta=beta,
                    ple=ple,
                    psi=psi,
                )
                result = run_ensemble(
                    params,
                    model,
                    trials,
                    master_seed,
                    big_m=big_m,
                    decider=decider,
                    workers=workers,
                    interior_margin=interior_margin,
                )
                rows.append(
                    SweepRow(
                        model=model,
                        rho=rho,
                        psi=psi,
                        n_vehicles=params.n_vehicles,
                        result=result,
                        error=None,
                    )
                )
            except Exception as exc:  # record and keep sweeping
                rows.append(
                    SweepRow(
                        model=model,
                        rho=rho,
                        psi=psi,
                        n_vehicles=None,
                        result=None,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    return rows
