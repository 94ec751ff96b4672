"""
Genetic search for the most critical scenario.

Random draws come from one ``numpy`` generator in a fixed order: the random
top-up of the initial population (whatever the configured population does not
supply), then per parent pair the crossover draw r and, when crossing, the cut
point, then per child the mutation draw r and, when mutating, the bit index,
and last one integer per immigrant picking the untried branch it takes.
Selection draws nothing.
"""

import logging
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from backend.shared.errors import ConfigurationError, LayoutMismatchError
from backend.shared.run_utils import LOGGER_NAME, PerformanceMonitor

from ..complexity.complexity_models import WeightTable
from ..encoding.encoding_models import Chromosome, ChromosomeLayout, ScenarioPath
from ..encoding.path_encoder import FitnessEvaluator
from ..graph.graph_models import FlowGraph
from .ga_models import (
    CrossoverOutcome,
    GaConfig,
    GaIteration,
    GaRunResult,
    MutationOutcome,
    TraceRow,
)

logger = logging.getLogger(LOGGER_NAME)

Scored = Tuple[Chromosome, int]
Branches = Tuple[Tuple[str, int], ...]


def init_population(
    layout: ChromosomeLayout, cfg: GaConfig, rng: np.random.Generator
) -> List[Chromosome]:
    """
    The configured initial population, topped up with uniform random chromosomes.

    Raises:
        ConfigurationError: a configured chromosome does not fit the layout
    """
    supplied = [Chromosome(bits=bits) for bits in cfg.initial_population or []]
    for chromosome in supplied:
        if len(chromosome) != layout.total_bits:
            raise ConfigurationError(
                f"initial chromosome '{chromosome.bits}' has {len(chromosome)} bits, "
                f"layout of '{layout.graph_name}' needs {layout.total_bits}"
            )

    missing = cfg.population_size - len(supplied)
    if missing <= 0:
        return supplied
    draws = rng.integers(0, 2, size=(missing, layout.total_bits))
    return supplied + [Chromosome(bits="".join(str(int(b)) for b in row)) for row in draws]


def select(scored: Sequence[Scored]) -> List[Scored]:
    """Rank by fitness, highest first; equal fitness ranks the smaller bit value first."""
    return sorted(scored, key=lambda item: (-item[1], item[0].value))


def pair_up(ranked: Sequence[Scored]) -> List[Tuple[Scored, Scored]]:
    return [(ranked[i], ranked[i + 1]) for i in range(0, len(ranked) - 1, 2)]


def single_point_crossover(
    a: Chromosome, b: Chromosome, cut: int
) -> Tuple[Chromosome, Chromosome]:
    """Exchange the suffixes starting at bit ``cut``."""
    if len(a) != len(b):
        raise LayoutMismatchError("crossover parents differ in length")
    return (
        Chromosome(bits=a.bits[:cut] + b.bits[cut:]),
        Chromosome(bits=b.bits[:cut] + a.bits[cut:]),
    )


def crossover(
    a: Chromosome, b: Chromosome, rng: np.random.Generator, cfg: GaConfig
) -> CrossoverOutcome:
    r = float(rng.random())
    if r < cfg.crossover_prob and len(a) >= 2:
        cut = int(rng.integers(1, len(a)))
        return CrossoverOutcome(children=single_point_crossover(a, b, cut), r=r, cut=cut)
    return CrossoverOutcome(children=(a, b), r=r)


def mutate(c: Chromosome, rng: np.random.Generator, cfg: GaConfig) -> MutationOutcome:
    r = float(rng.random())
    if r < cfg.mutation_prob and len(c) >= 1:
        index = int(rng.integers(0, len(c)))
        return MutationOutcome(chromosome=c.flip(index), r=r, flipped=index)
    return MutationOutcome(chromosome=c, r=r)


class BranchFrontier:
    """
    Branch sequences walked so far and the untried branches next to them.

    An untried branch is a walked prefix extended by a branch that no walked
    sequence takes after that prefix. Once none is left, every path of the
    graph has been decoded at least once.
    """

    def __init__(self, layout: ChromosomeLayout):
        self.layout = layout
        self._walked: Set[Branches] = set()
        self._untried: Dict[Branches, str] = {}

    def __len__(self) -> int:
        return len(self._untried)

    @property
    def exhausted(self) -> bool:
        return not self._untried

    def record(self, path: ScenarioPath) -> None:
        branches = path.branches
        if not branches or branches in self._walked:
            return
        for end in range(1, len(branches) + 1):
            self._walked.add(branches[:end])
            self._untried.pop(branches[:end], None)

        for position, (node, branch) in enumerate(branches):
            outdegree = self.layout.fields[self.layout.index(node)].outdegree
            for other in range(outdegree):
                prefix = branches[:position] + ((node, other),)
                if other != branch and prefix not in self._walked:
                    self._untried.setdefault(prefix, path.chromosome)

    def draw(self, rng: np.random.Generator) -> Chromosome:
        """Take one untried branch at random; the chromosome follows its prefix, then takes it."""
        prefix = list(self._untried)[int(rng.integers(0, len(self._untried)))]
        base = self._untried.pop(prefix)
        node, branch = prefix[-1]
        return self.layout.with_code(Chromosome(bits=base), node, branch)


def _covered_listing(covered: Dict[str, ScenarioPath]) -> List[ScenarioPath]:
    return sorted(covered.values(), key=lambda p: (-p.fitness, p.key))


@PerformanceMonitor.monitor_operation("ga_run", log_parameters=False)
def run(
    graph: FlowGraph,
    weights: WeightTable,
    layout: ChromosomeLayout,
    cfg: GaConfig,
    target_path_count: Optional[int] = None,
) -> GaRunResult:
    """
    Evolve the population: evaluate, rank, cross over, mutate, re-evaluate.

    Survivors whose path is not new (seen in an earlier generation, or held by
    another survivor) are replaced by immigrants taking an untried branch,
    unless ``cfg.immigrants`` is off. The elite's slot is never replaced.

    Stops after ``cfg.max_iterations`` iterations, or earlier once every path
    has been covered (no untried branch left, or ``target_path_count``
    distinct paths seen), or (with ``stop_on_uniform`` and elitism) once the
    population is uniform.
    """
    rng = np.random.default_rng(cfg.seed)
    evaluator = FitnessEvaluator(graph, weights, layout, cfg.workers)
    frontier = BranchFrontier(layout)

    population = init_population(layout, cfg, rng)
    paths = evaluator.evaluate_many(population)
    fitnesses = [p.fitness for p in paths]

    covered: Dict[str, ScenarioPath] = {}
    best_path: Optional[ScenarioPath] = None

    def record(new_paths: List[ScenarioPath]) -> None:
        nonlocal best_path
        for path in new_paths:
            covered.setdefault(path.key, path)
            frontier.record(path)
            if best_path is None or path.fitness > best_path.fitness:
                best_path = path

    record(paths)
    initial_population = [c.bits for c in population]
    iterations: List[GaIteration] = []
    stop_reason = "max_iterations"

    for index in range(1, cfg.max_iterations + 1):
        target_met = target_path_count is not None and len(covered) >= target_path_count
        if frontier.exhausted or target_met:
            stop_reason = "all_paths_covered"
            break
        if cfg.stop_on_uniform and cfg.elitism and len({c.bits for c in population}) == 1:
            stop_reason = "uniform_population"
            break

        ranked = select(list(zip(population, fitnesses)))
        drafts = []
        for (a, fa), (b, fb) in pair_up(ranked):
            outcome = crossover(a, b, rng, cfg)
            for (parent, parent_fitness), child in zip(((a, fa), (b, fb)), outcome.children):
                drafts.append((parent, parent_fitness, outcome, child, mutate(child, rng, cfg)))

        seen_before = set(covered)
        mutants = [draft[4].chromosome for draft in drafts]
        mutant_paths = evaluator.evaluate_many(mutants)
        record(mutant_paths)

        survivors = list(mutants)
        survivor_paths = list(mutant_paths)
        elite_slot = None
        protected = None
        if cfg.elitism:
            elite = ranked[0][0]
            held = [i for i, c in enumerate(survivors) if c.bits == elite.bits]
            if held:
                protected = held[0]
            else:
                elite_slot = protected = min(
                    range(len(survivors)),
                    key=lambda i: (survivor_paths[i].fitness, -survivors[i].value),
                )
                survivors[elite_slot] = elite
                survivor_paths[elite_slot] = evaluator.evaluate(elite)

        immigrant_slots: Set[int] = set()
        if cfg.immigrants:
            keys = {survivor_paths[protected].key} if protected is not None else set()
            stale = []
            for slot, path in enumerate(survivor_paths):
                if slot == protected:
                    continue
                if path.key in seen_before or path.key in keys:
                    stale.append(slot)
                keys.add(path.key)
            for slot in stale:
                if frontier.exhausted:
                    break
                survivors[slot] = frontier.draw(rng)
                survivor_paths[slot] = evaluator.evaluate(survivors[slot])
                record([survivor_paths[slot]])
                immigrant_slots.add(slot)

        survivor_fitness = [p.fitness for p in survivor_paths]
        rows = []
        for slot, (parent, parent_fitness, outcome, child, mutation) in enumerate(drafts):
            rows.append(
                TraceRow(
                    x=parent.bits,
                    fx=parent_fitness,
                    r=outcome.r,
                    cut=outcome.cut,
                    c=child.bits,
                    mutation_r=mutation.r,
                    flipped=mutation.flipped,
                    m=mutation.chromosome.bits,
                    fm=mutant_paths[slot].fitness,
                    survivor=survivors[slot].bits,
                    survivor_fitness=survivor_fitness[slot],
                    elite=slot == elite_slot,
                    immigrant=slot in immigrant_slots,
                )
            )

        iterations.append(
            GaIteration(
                index=index,
                rows=rows,
                best_fitness=best_path.fitness,
                population_best=max(survivor_fitness),
                covered=len(covered),
            )
        )
        logger.debug(
            f"GA iteration {index}: best={best_path.fitness} ({best_path.chromosome}), "
            f"population_best={max(survivor_fitness)}, covered={len(covered)}, "
            f"immigrants={len(immigrant_slots)}, untried={len(frontier)}"
        )
        population, fitnesses = survivors, survivor_fitness

    result = GaRunResult(
        config=cfg,
        best=best_path.chromosome,
        best_fitness=best_path.fitness,
        best_path=best_path,
        iterations_run=len(iterations),
        stop_reason=stop_reason,
        initial_population=initial_population,
        initial_fitness=[p.fitness for p in paths],
        trace=iterations,
        covered_paths=_covered_listing(covered),
    )
    logger.info(
        f"GA on '{graph.name}' (seed {cfg.seed}): best {result.best} = {result.best_fitness} "
        f"after {result.iterations_run} iteration(s), stop: {stop_reason}, "
        f"{len(covered)} distinct path(s)"
    )
    return result
