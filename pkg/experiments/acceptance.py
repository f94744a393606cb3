"""
Seeded property checks of the simulator's qualitative dynamics.

Each check runs a small batch of replicates and returns a CriterionResult.
`culture reproduce` runs them all; the quick ones are also part of the test
suite under the `acceptance` tag.
"""

import logging
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from culture.actions import Action
from culture.agents import KboState, invent
from culture.fitness import FitnessSpec, enumerate_landscape
from experiments.config import parse_config
from simulation.engine import (
    BroadcastPolicy,
    BroadcastSelection,
    ratio_to_probability,
    run,
)
from simulation.metrics import convergence_iteration, trait_convergence_iteration
from simulation.streams import stream
from simulation.world import Barrier, Placement, Topology, WorldSpec

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = tuple(range(1, 21))
PAIRED_SEEDS = tuple(range(1, 51))
RATIOS = ("1:4", "1:1", "2:1", "4:1")
BARRIER_RATIO = "1:9"
DENSITIES = (1.0, 0.5, 0.25)
THRESHOLD = 0.9
NO_CHANGE_TRIALS = 100_000


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str

    def __str__(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def default_config(**changes):
    """The default experiment (empty configuration file) with changes applied."""
    return replace(parse_config("").base, **changes)


def run_seeds(config, seeds):
    return [run(replace(config, seed=seed)) for seed in seeds]


def convergence_or_cap(result):
    """Convergence iteration; unconverged runs count as iterations + 1."""
    found = convergence_iteration(result.metrics, THRESHOLD)
    return found if found >= 0 else result.config.iterations + 1


def median(values):
    return float(np.median(values))


def fitness_rise(seeds=DEFAULT_SEEDS):
    results = run_seeds(default_config(), seeds)
    rising = sum(
        result.metrics[50].mean_fitness > result.metrics[0].mean_fitness
        for result in results
    )
    converged = sum(
        convergence_iteration(result.metrics, THRESHOLD) >= 0 for result in results
    )
    needed = len(seeds) - len(seeds) // 10
    return CriterionResult(
        "fitness rise",
        rising == len(seeds) and converged >= needed,
        f"fitness rose by t=50 in {rising}/{len(seeds)} runs, "
        f"90% on an optimum by t=100 in {converged}/{len(seeds)}",
    )


def inverted_u_diversity(seeds=DEFAULT_SEEDS):
    results = run_seeds(default_config(), seeds)
    shaped = 0
    for result in results:
        series = [row.diversity for row in result.metrics]
        peak_at = int(np.argmax(series))
        peak, final = series[peak_at], series[-1]
        if 1 <= peak_at < len(series) - 1 and final < 0.5 * peak:
            shaped += 1
    needed = len(seeds) - len(seeds) // 10
    return CriterionResult(
        "inverted-U diversity",
        shaped >= needed,
        f"rise then fall below half the peak in {shaped}/{len(seeds)} runs",
    )


def ratio_medians(seeds=DEFAULT_SEEDS, ratios=RATIOS):
    """Median convergence iteration for each invention:imitation ratio."""
    medians = {}
    for ratio in ratios:
        plan = parse_config(f"invention_ratio = {ratio}")
        medians[ratio] = median(
            [convergence_or_cap(result) for result in run_seeds(plan.base, seeds)]
        )
    return medians


def ratio_optimum(seeds=DEFAULT_SEEDS, ratios=RATIOS):
    medians = ratio_medians(seeds, ratios)
    ranked = sorted(ratios, key=lambda ratio: medians[ratio])
    passed = (
        medians["2:1"] <= medians["1:4"]
        and medians["2:1"] <= medians["4:1"]
        and "2:1" in ranked[:2]
    )
    detail = ", ".join(f"{ratio} -> {medians[ratio]:g}" for ratio in ratios)
    return CriterionResult(
        "invention to imitation ratio", passed, f"median convergence {detail}"
    )


def _mean_imitation_frequency(records):
    return np.mean(
        [r.imitation_frequency for r in records if r.imitation_frequency is not None]
    )


def best_agent_imitation(seeds=DEFAULT_SEEDS):
    """
    Agents first on an optimum owe fewer of their adopted actions to imitation.

    Frequencies count adopted actions only; a failed imitation turn (no fitter
    neighbour) is not imitation.
    """
    below = 0
    counted = 0
    for result in run_seeds(default_config(), seeds):
        reached = [r for r in result.records if r.first_optimal_iteration >= 0]
        if not reached:
            continue
        counted += 1
        earliest = min(r.first_optimal_iteration for r in reached)
        best = [r for r in reached if r.first_optimal_iteration == earliest]
        best_frequency = _mean_imitation_frequency(best)
        population = _mean_imitation_frequency(result.records)
        if best_frequency < population:
            below += 1
    needed = int(np.ceil(0.7 * len(seeds)))
    return CriterionResult(
        "best agents imitate less",
        below >= needed,
        f"earliest optimal agents imitated less than average in "
        f"{below}/{counted} runs",
    )


def _broadcast_config(count):
    return default_config(
        iterations=20,
        broadcast=BroadcastPolicy(count=count) if count else BroadcastPolicy(),
    )


def broadcaster_homogenization(seeds=PAIRED_SEEDS):
    medians = {}
    for count in (0, 1, 5):
        results = run_seeds(_broadcast_config(count), seeds)
        finals = [result.metrics[20] for result in results]
        medians[count] = (
            median([row.diversity for row in finals]),
            median([row.top_fraction for row in finals]),
        )
    (d0, f0), (d1, f1), (d5, f5) = medians[0], medians[1], medians[5]
    passed = d1 < d0 and f1 > f0 and d5 > d1 and f5 < f1
    return CriterionResult(
        "broadcaster homogenization",
        passed,
        f"t=20 median diversity/top share: none {d0:g}/{f0:.2f}, "
        f"one {d1:g}/{f1:.2f}, five {d5:g}/{f5:.2f}",
    )


def convergence_acceleration(seeds=PAIRED_SEEDS):
    """One broadcaster, the fittest agent each iteration, against none."""
    broadcasting = default_config(
        broadcast=BroadcastPolicy(count=1, selection=BroadcastSelection.FITTEST)
    )
    plain = default_config()
    without = median([convergence_or_cap(r) for r in run_seeds(plain, seeds)])
    with_one = median([convergence_or_cap(r) for r in run_seeds(broadcasting, seeds)])
    return CriterionResult(
        "broadcaster accelerates convergence",
        with_one < without,
        f"median convergence {with_one:g} with one broadcaster, {without:g} without",
    )


def _small_world(*barriers):
    # Bounded: on a torus the seam joins the two sides around the barrier.
    return WorldSpec(
        rows=8, cols=8, topology=Topology.BOUNDED, barriers=tuple(barriers)
    )


def barrier_latency(seeds=DEFAULT_SEEDS, invention_ratio=BARRIER_RATIO):
    """
    A wall between columns 3 and 4 against an open 8x8 square world.

    Runs at a low invention ratio: a wall only delays ideas that spread by
    imitation.
    """
    invention_prob = ratio_to_probability(invention_ratio)
    open_runs = run_seeds(
        default_config(world=_small_world(), invention_prob=invention_prob), seeds
    )
    walled = _small_world(Barrier(left_col=3))
    walled_runs = run_seeds(
        default_config(world=walled, invention_prob=invention_prob), seeds
    )
    open_diversity = median([r.metrics[20].diversity for r in open_runs])
    walled_diversity = median([r.metrics[20].diversity for r in walled_runs])
    open_convergence = median([convergence_or_cap(r) for r in open_runs])
    walled_convergence = median([convergence_or_cap(r) for r in walled_runs])
    return CriterionResult(
        "barriers raise diversity and latency",
        walled_diversity > open_diversity and walled_convergence > open_convergence,
        f"t=20 diversity {walled_diversity:g} vs {open_diversity:g}, "
        f"convergence {walled_convergence:g} vs {open_convergence:g}",
    )


@dataclass(frozen=True)
class ErosionCounts:
    runs: int
    as_fit: int
    more_diverse: int
    both: int


def eroding_barrier_counts(seeds=DEFAULT_SEEDS):
    """
    Compare runs behind a barrier eroding over iterations 10-50 with open runs.

    Counts eroding runs whose final mean fitness is within 5% of the open
    median, whose peak diversity beats the open median peak, and both.
    """
    eroding = Barrier(left_col=3, erosion_start=10, erosion_duration=40)
    open_runs = run_seeds(default_config(world=_small_world()), seeds)
    eroding_runs = run_seeds(default_config(world=_small_world(eroding)), seeds)
    open_fitness = median([r.metrics[-1].mean_fitness for r in open_runs])
    open_peak = median([max(row.diversity for row in r.metrics) for r in open_runs])
    as_fit = [
        abs(r.metrics[-1].mean_fitness - open_fitness) <= 0.05 * open_fitness
        for r in eroding_runs
    ]
    more_diverse = [
        max(row.diversity for row in r.metrics) > open_peak for r in eroding_runs
    ]
    return ErosionCounts(
        runs=len(eroding_runs),
        as_fit=sum(as_fit),
        more_diverse=sum(more_diverse),
        both=sum(fit and diverse for fit, diverse in zip(as_fit, more_diverse)),
    )


def eroding_barrier(seeds=DEFAULT_SEEDS):
    counts = eroding_barrier_counts(seeds)
    needed = int(np.ceil(0.7 * len(seeds)))
    return CriterionResult(
        "eroding barrier specializes then shares",
        counts.both >= needed,
        f"as fit as the open world in {counts.as_fit}/{counts.runs} runs, "
        f"more diverse at the peak in {counts.more_diverse}, both in {counts.both}",
    )


def density_disruption(seeds=DEFAULT_SEEDS, densities=DENSITIES):
    gaps = []
    for density in densities:
        world = WorldSpec(placement=Placement(kind="random", density=density))
        runs = run_seeds(default_config(world=world), seeds)
        gaps.append(
            median(
                [
                    max(row.diversity for row in r.metrics) - r.metrics[-1].diversity
                    for r in runs
                ]
            )
        )
    passed = all(high > low for high, low in zip(gaps, gaps[1:]))
    detail = ", ".join(f"{d:g} -> {gap:g}" for d, gap in zip(densities, gaps))
    return CriterionResult(
        "density disrupts the inverted U", passed, f"median peak-final gap {detail}"
    )


def drift(seeds=PAIRED_SEEDS):
    winners = []
    dominant = 0
    for result in run_seeds(default_config(), seeds):
        shares = result.metrics[-1].optimum_shares
        index, share = min(shares.items(), key=lambda item: (-item[1], item[0]))
        winners.append(index)
        if share > 0.5:
            dominant += 1
    distinct = len(Counter(winners))
    passed = distinct >= 3 and dominant >= 0.3 * len(seeds)
    return CriterionResult(
        "drift among equally fit optima",
        passed,
        f"{distinct} distinct winning optima, majority winner in "
        f"{dominant}/{len(seeds)} runs",
    )


def epistasis_latency(seeds=DEFAULT_SEEDS):
    def capped(result, trait):
        found = trait_convergence_iteration(result.metrics, trait, THRESHOLD)
        return found if found >= 0 else result.config.iterations + 1

    results = run_seeds(default_config(), seeds)
    head_hips = float(np.mean([capped(r, "head_hips") for r in results]))
    arms = float(np.mean([capped(r, "arms") for r in results]))
    return CriterionResult(
        "epistatic pair optimizes later",
        head_hips >= arms,
        f"mean 90% iteration: head/hips {head_hips:.1f}, arms {arms:.1f}",
    )


def oracle_equivalence():
    f1 = enumerate_landscape(FitnessSpec(kind="F1"))
    f2 = enumerate_landscape(FitnessSpec(kind="F2"))
    passed = (
        f1.maximum == 13
        and len(f1.maximizers) == 8
        and f2.maximum == 10
        and len(f2.maximizers) == 2
        and f1.minimum == 0
        and f1.minimizers == (Action.stationary(),)
    )
    return CriterionResult(
        "fitness oracle",
        passed,
        f"F1 max {f1.maximum:g} x{len(f1.maximizers)}, min {f1.minimum:g} "
        f"x{len(f1.minimizers)}; F2 max {f2.maximum:g} x{len(f2.maximizers)}",
    )


def _outputs(result):
    return (
        [row.csv_values() for row in result.metrics],
        result.snapshots,
        [agent.current_action for agent in result.agents],
    )


def determinism(seed=7):
    config = default_config(iterations=40, seed=seed, snapshot_iterations=(0, 20, 40))
    first, second = run(config), run(config)
    reversed_order = run(config, order=lambda t, n: list(range(n - 1, -1, -1)))
    repeatable = _outputs(first) == _outputs(second)
    order_free = _outputs(first) == _outputs(reversed_order)
    return CriterionResult(
        "determinism and order invariance",
        repeatable and order_free,
        f"repeat identical: {repeatable}, reversed order identical: {order_free}",
    )


def unit_invariants(seeds=(1, 2, 3), trials=NO_CHANGE_TRIALS):
    kbo_ok = True
    monotone = True
    for result in run_seeds(default_config(), seeds):
        for agent in result.agents:
            probabilities = (*agent.kbo.p_im, agent.kbo.p_sym)
            kbo_ok &= all(0.0 <= p <= 1.0 for p in probabilities)
        history = np.array(result.fitness_history)
        monotone &= bool(np.all(np.diff(history, axis=0) >= 0))

    rng = stream(0, 99)
    kbo = KboState()
    start = Action.stationary()
    identity = all(invent(start, kbo, 0.0, rng) == start for _ in range(1000))
    unchanged = sum(invent(start, kbo, 1 / 6, rng) == start for _ in range(trials))
    share = unchanged / trials
    expected = (5 / 6) ** 6
    passed = kbo_ok and monotone and identity and abs(share - expected) <= 0.01
    return CriterionResult(
        "unit invariants",
        passed,
        f"KBO in [0,1]: {kbo_ok}, fitness non-decreasing: {monotone}, "
        f"rate 0 identity: {identity}, no-change share {share:.4f} "
        f"(expected {expected:.4f})",
    )


CRITERIA = (
    fitness_rise,
    inverted_u_diversity,
    ratio_optimum,
    best_agent_imitation,
    broadcaster_homogenization,
    convergence_acceleration,
    barrier_latency,
    eroding_barrier,
    density_disruption,
    drift,
    epistasis_latency,
    oracle_equivalence,
    determinism,
    unit_invariants,
)


def evaluate(criteria=CRITERIA):
    results = []
    for criterion in criteria:
        result = criterion()
        log = logger.info if result.passed else logger.warning
        log(str(result))
        results.append(result)
    return results
