"""fuzzcast: species-discovery statistics for fuzzing campaigns.

Treats a fuzzing campaign as sampling from an unknown species pool (paths,
branches, crash sites, covered statements) and answers, from counts alone:
how much is still undiscovered, how fast the campaign is slowing down, and
how much more effort a coverage target would take.

Typical use::

    from fuzzcast import ingest, abundance

    acc = ingest.parse_events("campaign.events")
    freq = acc.abundance_snapshot()
    risk = abundance.good_turing(freq)
    rich = abundance.chao1(freq)
    done = abundance.species_coverage(freq, rich)
"""

from .species import (
    MULTINOMIAL,
    INCIDENCE,
    AbundanceFrequencies,
    IncidenceFrequencies,
    SpeciesAccumulator,
    species_id,
)
from .abundance import (
    AbundanceProfile,
    EffortEstimate,
    ExtrapolationPoint,
    RichnessEstimate,
    abundance_profile,
    chao1,
    extrapolate_discovery,
    extrapolate_richness,
    good_turing,
    ichao1,
    jackknife,
    known_richness,
    required_effort,
    species_coverage,
)
from .incidence import (
    IncidenceDiscovery,
    chao2,
    ichao2,
    incidence_discovery,
    incidence_extrapolate,
    incidence_required_effort,
)
from .bootstrap import BootstrapConfig, BootstrapInterval, bootstrap_ci
from .simulate import (
    AdaptiveBias,
    Assemblage,
    Campaign,
    TrajectoryPoint,
    continue_campaign,
    custom_assemblage,
    geometric_assemblage,
    sample_campaign,
    uniform_assemblage,
    zipf_assemblage,
)
from .evaluate import (
    EvaluationReport,
    ReportRow,
    bias_imprecision,
    evaluate_estimator,
    evaluate_extrapolator,
    geometric_checkpoints,
    run_campaign_set,
    scaled_bias_imprecision,
)
from .errors import (
    EffortError,
    FormulaRangeError,
    FuzzcastError,
    InsufficientRareSpeciesError,
    InsufficientReplicationError,
    ModeViolationError,
    MonotonicityError,
    ParseError,
    SchemaError,
    TargetAlreadyReachedError,
    TargetUnreachableError,
    UndefinedEstimateError,
)
from . import errors, ingest

__version__ = "0.1.0"

__all__ = [
    "MULTINOMIAL",
    "INCIDENCE",
    "AbundanceFrequencies",
    "IncidenceFrequencies",
    "SpeciesAccumulator",
    "species_id",
    "AbundanceProfile",
    "EffortEstimate",
    "ExtrapolationPoint",
    "RichnessEstimate",
    "abundance_profile",
    "chao1",
    "extrapolate_discovery",
    "extrapolate_richness",
    "good_turing",
    "ichao1",
    "jackknife",
    "known_richness",
    "required_effort",
    "species_coverage",
    "IncidenceDiscovery",
    "chao2",
    "ichao2",
    "incidence_discovery",
    "incidence_extrapolate",
    "incidence_required_effort",
    "BootstrapConfig",
    "BootstrapInterval",
    "bootstrap_ci",
    "AdaptiveBias",
    "Assemblage",
    "Campaign",
    "TrajectoryPoint",
    "continue_campaign",
    "custom_assemblage",
    "geometric_assemblage",
    "sample_campaign",
    "uniform_assemblage",
    "zipf_assemblage",
    "EvaluationReport",
    "ReportRow",
    "bias_imprecision",
    "evaluate_estimator",
    "evaluate_extrapolator",
    "geometric_checkpoints",
    "run_campaign_set",
    "scaled_bias_imprecision",
    "EffortError",
    "FormulaRangeError",
    "FuzzcastError",
    "InsufficientRareSpeciesError",
    "InsufficientReplicationError",
    "ModeViolationError",
    "MonotonicityError",
    "ParseError",
    "SchemaError",
    "TargetAlreadyReachedError",
    "TargetUnreachableError",
    "UndefinedEstimateError",
    "errors",
    "ingest",
]
