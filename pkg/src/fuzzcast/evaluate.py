"""Scoring estimators and extrapolators against simulated ground truth.

Estimator runs are scored with a scaled mean bias and an imprecision
(spread) at each checkpoint:

    mean_bias   = sum_i (est_i - ref_i) / (N * scale)
    imprecision = sqrt( sum_i (d_i - mean_bias)^2 / (N - 1) ),
                  d_i = (est_i - ref_i) / ref_i

Note the asymmetry: the mean term divides by one common scale while the
spread term scales each run by its own reference.  Extrapolator runs are
scored with the fully per-run form (every term divided by that run's
reference); there ``checkpoint`` holds the horizon m* instead of n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .bootstrap import resolve_estimator
from .errors import InsufficientReplicationError
from .simulate import Assemblage, AdaptiveBias, Campaign, continue_campaign, sample_campaign
from .species import AbundanceFrequencies, IncidenceFrequencies

SIMULATOR_TRUTH = "simulator-truth"
FINAL_EMPIRICAL = "final-empirical"


def bias_imprecision(
    estimates: Sequence[float], references: Sequence[float], scale: float | None = None
) -> tuple[float, float]:
    """Estimator scores at one checkpoint (mixed global/per-run scaling).

    Args:
        estimates: one estimate per run.
        references: the reference richness per run (the truth, or the final
            empirical count).
        scale: the common scale for the mean-bias term; defaults to the
            mean of the references.

    Raises:
        InsufficientReplicationError: with fewer than two runs.
    """
    if len(estimates) != len(references):
        raise ValueError("estimates and references must pair up")
    n_runs = len(estimates)
    if n_runs < 2:
        raise InsufficientReplicationError("evaluation needs at least two runs")
    if scale is None:
        scale = math.fsum(references) / n_runs
    if scale <= 0 or any(r <= 0 for r in references):
        raise ValueError("references and scale must be positive")
    # fsum keeps the scores independent of campaign ordering
    mean_bias = math.fsum(e - r for e, r in zip(estimates, references)) / (n_runs * scale)
    deviations = [(e - r) / r for e, r in zip(estimates, references)]
    imprecision = math.sqrt(
        math.fsum((d - mean_bias) ** 2 for d in deviations) / (n_runs - 1)
    )
    return mean_bias, imprecision


def scaled_bias_imprecision(
    estimates: Sequence[float], references: Sequence[float]
) -> tuple[float, float]:
    """Extrapolator scores at one horizon (every term per-run scaled)."""
    if len(estimates) != len(references):
        raise ValueError("estimates and references must pair up")
    n_runs = len(estimates)
    if n_runs < 2:
        raise InsufficientReplicationError("evaluation needs at least two runs")
    if any(r <= 0 for r in references):
        raise ValueError("references must be positive")
    deviations = [(e - r) / r for e, r in zip(estimates, references)]
    mean_bias = math.fsum(deviations) / n_runs
    imprecision = math.sqrt(
        math.fsum((d - mean_bias) ** 2 for d in deviations) / (n_runs - 1)
    )
    return mean_bias, imprecision


@dataclass(frozen=True)
class ReportRow:
    checkpoint: int
    estimator: str
    mean_bias: float
    imprecision: float
    runs: int


@dataclass(frozen=True)
class EvaluationReport:
    """Per-checkpoint scores for one estimator over a campaign set."""

    kind: str
    rows: tuple[ReportRow, ...]

    def as_dicts(self) -> list[dict]:
        return [
            {
                "checkpoint": r.checkpoint,
                "estimator": r.estimator,
                "mean_bias": r.mean_bias,
                "imprecision": r.imprecision,
                "runs": r.runs,
            }
            for r in self.rows
        ]


def geometric_checkpoints(n: int, points: int = 8) -> list[int]:
    """Roughly geometrically spaced checkpoints from 1 to n inclusive."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if points < 1:
        raise ValueError("points must be >= 1")
    return sorted({max(1, round(n ** (i / points))) for i in range(1, points + 1)})


def run_campaign_set(
    assemblage: Assemblage,
    n: int,
    seeds: Sequence[int],
    *,
    bias: AdaptiveBias | None = None,
    checkpoints: Sequence[int] | None = None,
    points: int = 8,
    known: bool = False,
) -> list[Campaign]:
    """Run one campaign per seed with aligned snapshot checkpoints."""
    cps = list(checkpoints) if checkpoints is not None else geometric_checkpoints(n, points)
    return [
        sample_campaign(
            assemblage,
            n,
            seed,
            bias=bias,
            checkpoints=cps,
            record_snapshots=True,
            snapshot_known=known,
        )
        for seed in seeds
    ]


def _resolve(estimator, model: str) -> tuple[str, Callable]:
    if callable(estimator):
        return getattr(estimator, "__name__", "custom"), estimator
    return estimator, resolve_estimator(estimator, model)


def evaluate_estimator(
    campaigns: Sequence[Campaign],
    estimator: str | Callable[[AbundanceFrequencies | IncidenceFrequencies], float],
    *,
    reference: str = SIMULATOR_TRUTH,
) -> EvaluationReport:
    """Score a richness estimator at every recorded checkpoint.

    Args:
        campaigns: finished campaigns from :func:`run_campaign_set` (their
            checkpoints must align).
        estimator: registry name ("chao1", "jackknife2", ...) or a callable
            mapping a frequency summary to a value.
        reference: ``"simulator-truth"`` scores against the assemblage's
            true size; ``"final-empirical"`` scores against each run's own
            final observed count (for replayed real campaigns, where truth
            is unknown).

    Raises:
        InsufficientReplicationError: with fewer than two campaigns.
        ValueError: if checkpoints are not aligned across campaigns.
    """
    if len(campaigns) < 2:
        raise InsufficientReplicationError("evaluation needs at least two campaigns")
    if reference not in (SIMULATOR_TRUTH, FINAL_EMPIRICAL):
        raise ValueError(f"unknown reference {reference!r}")
    grid = [n for n, _ in campaigns[0].snapshots]
    if not grid:
        raise ValueError("campaigns recorded no snapshots; use record_snapshots=True")
    for c in campaigns[1:]:
        if [n for n, _ in c.snapshots] != grid:
            raise ValueError("campaign checkpoints are not aligned")
    name, fn = _resolve(estimator, campaigns[0].model)

    if reference == SIMULATOR_TRUTH:
        refs = [float(c.assemblage.s_true) for c in campaigns]
        scale = refs[0]
    else:
        refs = [float(c.snapshots[-1][1].s_obs) for c in campaigns]
        scale = None

    rows = []
    for i, n in enumerate(grid):
        ests = [float(fn(c.snapshots[i][1])) for c in campaigns]
        mean_bias, imprecision = bias_imprecision(ests, refs, scale)
        rows.append(
            ReportRow(
                checkpoint=n,
                estimator=name,
                mean_bias=mean_bias,
                imprecision=imprecision,
                runs=len(campaigns),
            )
        )
    return EvaluationReport(kind="estimator", rows=tuple(rows))


def evaluate_extrapolator(
    campaigns: Sequence[Campaign],
    horizons: Sequence[int],
    extrapolate: Callable[[AbundanceFrequencies | IncidenceFrequencies, int], float],
) -> EvaluationReport:
    """Score richness extrapolation against actually continued campaigns.

    Each campaign's current state provides the base summary; the campaign
    is then continued (consuming its random stream) so the empirical
    S(n + m*) at every horizon serves as the reference.

    Args:
        campaigns: campaigns all stopped at the same n.
        horizons: additional-input horizons m*, each >= 0.
        extrapolate: callable (base summary, m*) -> predicted richness.

    Raises:
        InsufficientReplicationError: with fewer than two campaigns.
    """
    if len(campaigns) < 2:
        raise InsufficientReplicationError("evaluation needs at least two campaigns")
    targets = sorted(set(int(m) for m in horizons))
    if not targets or targets[0] < 0:
        raise ValueError("horizons must be >= 0")
    if len({c.n for c in campaigns}) != 1:
        raise ValueError("campaigns must all be stopped at the same n")

    bases = [c.snapshot(known=True) for c in campaigns]
    predictions = {m: [extrapolate(b, m) for b in bases] for m in targets}
    empirical: dict[int, list[float]] = {m: [] for m in targets}
    for c in campaigns:
        prev = 0
        for m in targets:
            continue_campaign(c, m - prev)
            empirical[m].append(float(c.discovered.sum()))
            prev = m

    rows = []
    for m in targets:
        mean_bias, imprecision = scaled_bias_imprecision(predictions[m], empirical[m])
        rows.append(
            ReportRow(
                checkpoint=m,
                estimator="extrapolation",
                mean_bias=mean_bias,
                imprecision=imprecision,
                runs=len(campaigns),
            )
        )
    return EvaluationReport(kind="extrapolator", rows=tuple(rows))
