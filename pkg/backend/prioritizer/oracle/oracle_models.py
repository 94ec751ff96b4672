import heapq
import itertools
import math
from typing import Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


def _tag(chromosomes: Iterator[str], key: str) -> Iterator[Tuple[str, str]]:
    for bits in chromosomes:
        yield bits, key


class OracleEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    chromosome: str
    path_key: str
    fitness: int
    aliased: bool = False


class BranchPattern(BaseModel):
    """The chromosomes of one branch sequence: allowed codes per layout field."""

    model_config = ConfigDict(frozen=True)

    codes: List[List[int]] = Field(description="Ascending codes, one list per decision node")

    @property
    def count(self) -> int:
        return math.prod(len(allowed) for allowed in self.codes)

    def matches(self, values: List[int]) -> bool:
        return all(value in allowed for value, allowed in zip(values, self.codes))

    def expand(self, width: int) -> Iterator[str]:
        """Member chromosomes in ascending bit value."""
        for combo in itertools.product(*self.codes):
            yield "".join(format(code, f"0{width}b") for code in combo)


class DistinctPath(BaseModel):
    """One scenario and the branch sequences that lead to it."""

    model_config = ConfigDict(frozen=True)

    key: str
    nodes: List[str]
    fitness: int
    complete: bool
    patterns: List[BranchPattern] = Field(default_factory=list)
    first_chromosome: str = Field(description="Smallest member chromosome")

    @property
    def chromosome_count(self) -> int:
        return sum(p.count for p in self.patterns)

    def chromosomes(self, width: int) -> Iterator[str]:
        """Every member chromosome in ascending bit value."""
        return heapq.merge(*(p.expand(width) for p in self.patterns))


class OracleResult(BaseModel):
    """
    Exhaustive view of a chromosome space, grouped by decoded path.

    Per-chromosome entries are produced on demand from the branch patterns.
    """

    model_config = ConfigDict(frozen=True)

    graph_name: str
    total_bits: int
    field_width: int
    outdegrees: List[int]
    sequence_count: int = Field(description="Distinct branch sequences walked")
    distinct_paths: List[DistinctPath] = Field(
        description="By descending fitness, then smallest member chromosome"
    )

    @property
    def total_chromosomes(self) -> int:
        return 2**self.total_bits

    @property
    def maximum(self) -> int:
        return self.distinct_paths[0].fitness

    @property
    def minimum(self) -> int:
        return min(p.fitness for p in self.distinct_paths)

    @property
    def argmax(self) -> List[str]:
        """Every chromosome attaining the maximum, in ascending bit value."""
        best = [p for p in self.distinct_paths if p.fitness == self.maximum]
        return list(heapq.merge(*(p.chromosomes(self.field_width) for p in best)))

    @property
    def path_keys(self) -> List[str]:
        return [p.key for p in self.distinct_paths]

    def _values(self, chromosome: str) -> List[int]:
        width = self.field_width
        return [
            int(chromosome[i * width : (i + 1) * width], 2) for i in range(len(self.outdegrees))
        ]

    def _is_aliased(self, values: List[int]) -> bool:
        return any(value >= degree for value, degree in zip(values, self.outdegrees))

    def entry(self, chromosome: str) -> Optional[OracleEntry]:
        if len(chromosome) != self.total_bits:
            return None
        values = self._values(chromosome)
        for path in self.distinct_paths:
            if any(pattern.matches(values) for pattern in path.patterns):
                return OracleEntry(
                    chromosome=chromosome,
                    path_key=path.key,
                    fitness=path.fitness,
                    aliased=self._is_aliased(values),
                )
        return None

    def iter_entries(self) -> Iterator[OracleEntry]:
        """Every chromosome, by descending fitness then ascending bit value."""
        for fitness, group in itertools.groupby(self.distinct_paths, key=lambda p: p.fitness):
            tagged = [_tag(path.chromosomes(self.field_width), path.key) for path in group]
            for bits, key in heapq.merge(*tagged):
                yield OracleEntry(
                    chromosome=bits,
                    path_key=key,
                    fitness=fitness,
                    aliased=self._is_aliased(self._values(bits)),
                )

    def as_records(self) -> List[Dict[str, object]]:
        """Rows shaped for CSV export."""
        return [
            {
                "chromosome": e.chromosome,
                "path": e.path_key,
                "fitness": e.fitness,
                "aliased": e.aliased,
            }
            for e in self.iter_entries()
        ]


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    optimum_found: bool
    ga_best: int
    oracle_maximum: int
    gap: int = Field(ge=0)
    coverage: float = Field(ge=0.0, le=1.0, description="Share of distinct paths the GA saw")
    covered_paths: int
    distinct_paths: int


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    best: str
    best_fitness: int
    gap: int
    coverage: float
    iterations_run: int


class SweepSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    seeds: Tuple[int, int] = Field(description="First and last seed, inclusive")
    runs: int
    optimum_found: int
    mean_gap: float
    mean_coverage: float
    min_rate: float
    rows: List[SweepRow] = Field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.optimum_found / self.runs if self.runs else 0.0

    @property
    def passed(self) -> bool:
        return self.rate >= self.min_rate
