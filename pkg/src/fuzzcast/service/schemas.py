"""Request and response bodies for the HTTP API."""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, model_validator

from ..species import AbundanceFrequencies, IncidenceFrequencies


class MultinomialSnapshotIn(BaseModel):
    model: Literal["multinomial"] = "multinomial"
    n: int = Field(ge=0)
    species: int = Field(ge=0)
    f1: int = Field(default=0, ge=0)
    f2: int = Field(default=0, ge=0)
    f3: int = Field(default=0, ge=0)
    f4: int = Field(default=0, ge=0)
    s_known: int | None = None

    def to_frequencies(self, s_known: int | None = None) -> AbundanceFrequencies:
        return AbundanceFrequencies.from_marginals(
            n=self.n,
            s_obs=self.species,
            f1=self.f1,
            f2=self.f2,
            f3=self.f3,
            f4=self.f4,
            s_known=s_known if s_known is not None else self.s_known,
        )


class IncidenceSnapshotIn(BaseModel):
    model: Literal["incidence"]
    n: int = Field(ge=0)
    species: int = Field(ge=0)
    q1: int = Field(default=0, ge=0)
    q2: int = Field(default=0, ge=0)
    q3: int = Field(default=0, ge=0)
    q4: int = Field(default=0, ge=0)
    v: int = Field(ge=0)
    s_known: int | None = None

    def to_frequencies(self, s_known: int | None = None) -> IncidenceFrequencies:
        return IncidenceFrequencies.from_marginals(
            n=self.n,
            s_obs=self.species,
            q1=self.q1,
            q2=self.q2,
            q3=self.q3,
            q4=self.q4,
            v=self.v,
            s_known=s_known if s_known is not None else self.s_known,
        )


SnapshotIn = Annotated[
    Union[MultinomialSnapshotIn, IncidenceSnapshotIn], Field(discriminator="model")
]


class BootstrapIn(BaseModel):
    replicates: int = Field(default=200, ge=2)
    level: float = Field(default=0.95, gt=0.0, lt=1.0)
    seed: int = 0


class IntervalOut(BaseModel):
    lower: float
    upper: float
    level: float
    degraded: bool = False


class EstimateRequest(BaseModel):
    snapshot: SnapshotIn
    method: str = "chao"
    s_known: int | None = None
    bootstrap: BootstrapIn | None = None
    rate: float | None = Field(default=None, gt=0.0)


class EstimateResponse(BaseModel):
    model: str
    n: int
    species: int
    method: str
    s_hat: float
    f0_hat: float
    degraded: bool
    ci: IntervalOut | None = None
    coverage: float
    discovery: float
    discovery_naive: float | None = None
    inputs_to_next: float | None = None
    seconds_to_next: float | None = None
    singletons: int
    doubletons: int


class ExtrapolateRequest(BaseModel):
    snapshot: SnapshotIn
    method: str = "chao"
    s_known: int | None = None
    horizons: list[int] = Field(min_length=1)
    bootstrap: BootstrapIn | None = None

    @model_validator(mode="after")
    def _non_negative_horizons(self):
        if any(m < 0 for m in self.horizons):
            raise ValueError("horizons must be >= 0")
        return self


class ExtrapolatePointOut(BaseModel):
    m_star: int
    s_pred: float
    u_pred: float
    coverage_pred: float
    ci: IntervalOut | None = None


class ExtrapolateResponse(BaseModel):
    model: str
    n: int
    species: int
    method: str
    s_hat: float
    points: list[ExtrapolatePointOut]


class EffortRequest(BaseModel):
    snapshot: SnapshotIn
    method: str = "chao"
    s_known: int | None = None
    target: float = Field(gt=0.0)


class EffortResponse(BaseModel):
    model: str
    target: float
    coverage_now: float
    s_hat: float
    m_exact: int
    m_formula: int | None = None
    note: str | None = None


class SimulateRequest(BaseModel):
    species: int = Field(ge=1)
    dist: Literal["uniform", "geometric", "zipf"] = "uniform"
    ratio: float | None = Field(default=None, gt=0.0, le=1.0)
    exponent: float | None = Field(default=None, gt=0.0)
    model: Literal["multinomial", "incidence"] = "multinomial"
    inputs: int = Field(ge=0)
    seed: int = 0
    detection_rate: float = Field(default=0.01, gt=0.0, le=1.0)
    checkpoint_every: int | None = Field(default=None, ge=1)
    rate: float = Field(default=1000.0, gt=0.0)
    bias_boost: float | None = Field(default=None, gt=0.0)
    bias_degree: int = Field(default=2, ge=0)
    include_events: bool = True

    @model_validator(mode="after")
    def _dist_params(self):
        if self.dist == "geometric" and self.ratio is None:
            raise ValueError("geometric distribution needs 'ratio'")
        if self.dist == "zipf" and self.exponent is None:
            raise ValueError("zipf distribution needs 'exponent'")
        return self


class SimulateResponse(BaseModel):
    model: str
    n: int
    species_true: int
    species_discovered: int
    events: str | None = None
    trajectory_csv: str


class EvaluateRequest(BaseModel):
    species: int = Field(ge=1)
    dist: Literal["uniform", "geometric", "zipf"] = "uniform"
    ratio: float | None = Field(default=None, gt=0.0, le=1.0)
    exponent: float | None = Field(default=None, gt=0.0)
    model: Literal["multinomial", "incidence"] = "multinomial"
    inputs: int = Field(ge=1)
    runs: int = Field(default=10, ge=2)
    seed: int = 0
    estimator: str = "chao"
    reference: Literal["simulator-truth", "final-empirical"] = "simulator-truth"
    checkpoints: int = Field(default=8, ge=1)
    horizons: list[int] | None = None
    detection_rate: float = Field(default=0.01, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _dist_params(self):
        if self.dist == "geometric" and self.ratio is None:
            raise ValueError("geometric distribution needs 'ratio'")
        if self.dist == "zipf" and self.exponent is None:
            raise ValueError("zipf distribution needs 'exponent'")
        return self


class EvaluateRowOut(BaseModel):
    checkpoint: int
    estimator: str
    mean_bias: float
    imprecision: float
    runs: int


class EvaluateResponse(BaseModel):
    kind: str
    rows: list[EvaluateRowOut]


class ErrorBody(BaseModel):
    error: str
    message: str
