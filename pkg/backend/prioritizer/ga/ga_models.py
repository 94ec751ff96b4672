from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..encoding.encoding_models import Chromosome, ScenarioPath


class GaConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    population_size: int = Field(default=4, ge=2, description="Even number of individuals")
    crossover_prob: float = Field(default=0.8, ge=0.0, le=1.0)
    mutation_prob: float = Field(default=0.2, ge=0.0, le=1.0)
    max_iterations: int = Field(default=12, ge=0)
    seed: int = Field(default=0, ge=0)
    elitism: bool = True
    stop_on_uniform: bool = Field(
        default=False, description="Stop once every individual is identical (elitism only)"
    )
    initial_population: Optional[List[str]] = Field(
        default=None,
        description="Starting chromosomes; random ones fill the rest of the population",
    )
    immigrants: bool = Field(
        default=True,
        description="Replace survivors without a new path by chromosomes taking an untried branch",
    )
    workers: int = Field(default=1, ge=1, description="Threads for fitness evaluation")

    @field_validator("population_size")
    @classmethod
    def _even_population(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"population size must be even, got {value}")
        return value

    @model_validator(mode="after")
    def _initial_fits_population(self) -> "GaConfig":
        if self.initial_population is not None:
            if len(self.initial_population) > self.population_size:
                raise ValueError(
                    f"initial population has {len(self.initial_population)} chromosomes, "
                    f"more than the population size {self.population_size}"
                )
            for bits in self.initial_population:
                if not bits or set(bits) - {"0", "1"}:
                    raise ValueError(f"'{bits}' is not a bit string")
        return self

    @classmethod
    def from_config(cls, config: Dict[str, Any], **overrides) -> "GaConfig":
        """Build from RunConfigManager values; explicit overrides win when not None."""
        values = {
            "population_size": config.get("PRIORITIZER_POPULATION_SIZE", 4),
            "crossover_prob": config.get("PRIORITIZER_CROSSOVER_PROB", 0.8),
            "mutation_prob": config.get("PRIORITIZER_MUTATION_PROB", 0.2),
            "max_iterations": config.get("PRIORITIZER_MAX_ITERATIONS", 12),
            "seed": config.get("PRIORITIZER_SEED", 0),
            "workers": config.get("PRIORITIZER_WORKERS", 1),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


class CrossoverOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    children: Tuple[Chromosome, Chromosome]
    r: float
    cut: Optional[int] = None


class MutationOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    chromosome: Chromosome
    r: float
    flipped: Optional[int] = None


class TraceRow(BaseModel):
    """One individual of one iteration: X, F(X), r, C, M, F'(X) plus draw details."""

    model_config = ConfigDict(frozen=True)

    x: str
    fx: int
    r: float
    cut: Optional[int] = None
    c: str
    mutation_r: float
    flipped: Optional[int] = None
    m: str
    fm: int
    survivor: str = Field(description="Individual carried into the next generation")
    survivor_fitness: int
    elite: bool = Field(default=False, description="Slot taken over by the elite")
    immigrant: bool = Field(default=False, description="Slot refilled with an untried branch")


class GaIteration(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    rows: List[TraceRow]
    best_fitness: int = Field(description="Best fitness seen so far")
    population_best: int = Field(description="Best fitness in the next generation")
    covered: int = Field(description="Distinct paths seen so far")


class GaRunResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: GaConfig
    best: str
    best_fitness: int
    best_path: ScenarioPath
    iterations_run: int
    stop_reason: str
    initial_population: List[str]
    initial_fitness: List[int]
    trace: List[GaIteration] = Field(default_factory=list)
    covered_paths: List[ScenarioPath] = Field(
        default_factory=list,
        description="One entry per distinct node sequence seen, by fitness then path",
    )

    @property
    def covered_keys(self) -> List[str]:
        return [p.key for p in self.covered_paths]

    def trace_records(self) -> List[Dict[str, Any]]:
        """Trace rows shaped for CSV export."""
        records = []
        for iteration in self.trace:
            for row in iteration.rows:
                records.append(
                    {
                        "iteration": iteration.index,
                        "X": row.x,
                        "F(X)": row.fx,
                        "r": round(row.r, 6),
                        "C": row.c,
                        "M": row.m,
                        "F'(X)": row.fm,
                    }
                )
        return records
