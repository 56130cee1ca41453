"""Bootstrap confidence intervals for campaign estimates.

Resampling follows the Chao-style recipe: rebuild a plausible species
distribution from the observed counts, including a reconstructed unseen
pool, then redraw whole campaigns from it and re-run the estimator.

Multinomial streams are redrawn as one multinomial sample of n inputs over
the smoothed profile (discovered species rescaled to 1 - f1/n, plus f0_hat
pseudo-species sharing the missing mass equally).  Incidence streams are
redrawn as n independent Bernoulli vectors over smoothed detection rates
(discovered rates rescaled by 1 - Q1/V, plus q0_hat pseudo-species sharing
the missing rate mass Q1/n).

Each replicate b derives its own generator from ``seed + b``, so results do
not depend on execution order and are reproducible bit for bit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import abundance, incidence
from .errors import FuzzcastError, UndefinedEstimateError
from .species import AbundanceFrequencies, IncidenceFrequencies

Estimator = Callable[[AbundanceFrequencies | IncidenceFrequencies], float]

_ABUNDANCE_ESTIMATORS: dict[str, Estimator] = {
    "chao1": lambda fq: abundance.chao1(fq).s_hat,
    "ichao1": lambda fq: abundance.ichao1(fq).s_hat,
    "jackknife1": lambda fq: abundance.jackknife(fq, 1).s_hat,
    "jackknife2": lambda fq: abundance.jackknife(fq, 2).s_hat,
    "known": lambda fq: abundance.known_richness(fq).s_hat,
    "good_turing": abundance.good_turing,
}

_INCIDENCE_ESTIMATORS: dict[str, Estimator] = {
    "chao2": lambda fq: incidence.chao2(fq).s_hat,
    "ichao2": lambda fq: incidence.ichao2(fq).s_hat,
    "known": lambda fq: incidence.known_richness(fq).s_hat,
}


def resolve_estimator(name: str, model: str) -> Estimator:
    """Look up a named estimator for the given sampling model.

    Raises:
        ValueError: for an unknown name/model combination.
    """
    table = _ABUNDANCE_ESTIMATORS if model == "multinomial" else _INCIDENCE_ESTIMATORS
    try:
        return table[name]
    except KeyError:
        raise ValueError(f"unknown estimator {name!r} for model {model!r}") from None


@dataclass(frozen=True)
class BootstrapConfig:
    """Knobs for :func:`bootstrap_ci`.

    Attributes:
        replicates: number of resampled campaigns (200 is plenty for
            percentile intervals at the 95% level).
        level: two-sided confidence level in (0, 1).
        seed: base seed; replicate b uses ``seed + b``.
    """

    replicates: int = 200
    level: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if self.replicates < 2:
            raise ValueError("need at least two bootstrap replicates")
        if not 0.0 < self.level < 1.0:
            raise ValueError("confidence level must be in (0, 1)")


@dataclass(frozen=True)
class BootstrapInterval:
    """Percentile bootstrap interval.

    ``degraded`` is set when the estimator failed on more than half of the
    resamples; the interval then widens to the full range of the values
    that could be computed.
    """

    lower: float
    upper: float
    level: float
    replicates_used: int
    degraded: bool = False

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lower, self.upper, self.level)


def _smoothed_multinomial(freq: AbundanceFrequencies) -> np.ndarray:
    if freq.n == 0:
        raise UndefinedEstimateError("cannot smooth an empty abundance profile")
    counts = np.asarray(freq.abundances(), dtype=np.float64)
    u_hat = freq.f1 / freq.n
    f0 = abundance.chao1(freq).f0_hat
    f0_int = math.ceil(f0)
    if u_hat > 0 and f0_int == 0:
        f0_int = 1
    probs = counts / freq.n * (1.0 - u_hat)
    if f0_int > 0 and u_hat > 0:
        probs = np.concatenate([probs, np.full(f0_int, u_hat / f0_int)])
    total = probs.sum()
    if total <= 0:
        raise UndefinedEstimateError("cannot smooth an empty abundance profile")
    return probs / total


def _smoothed_incidence(freq: IncidenceFrequencies) -> np.ndarray:
    if freq.v == 0:
        raise UndefinedEstimateError("cannot smooth a stream without detections")
    detections = np.asarray(freq.incidences(), dtype=np.float64)
    shrink = 1.0 - freq.q1 / freq.v
    q0 = incidence.chao2(freq).f0_hat
    q0_int = math.ceil(q0)
    if freq.q1 > 0 and q0_int == 0:
        q0_int = 1
    rates = detections / freq.n * shrink
    if q0_int > 0 and freq.q1 > 0:
        unseen = min(1.0, (freq.q1 / freq.n) / q0_int)
        rates = np.concatenate([rates, np.full(q0_int, unseen)])
    return np.clip(rates, 0.0, 1.0)


def _resample_abundance(
    freq: AbundanceFrequencies, probs: np.ndarray, rng: np.random.Generator
) -> AbundanceFrequencies:
    counts = rng.multinomial(freq.n, probs)
    counts = counts[counts > 0]
    ks, f = np.unique(counts, return_counts=True)
    return AbundanceFrequencies(
        n=freq.n,
        s_obs=int(counts.size),
        f={int(k): int(c) for k, c in zip(ks, f)},
        s_known=freq.s_known,
    )


def _resample_incidence(
    freq: IncidenceFrequencies, rates: np.ndarray, rng: np.random.Generator
) -> IncidenceFrequencies:
    detections = rng.binomial(freq.n, rates)
    detections = detections[detections > 0]
    ks, q = np.unique(detections, return_counts=True)
    return IncidenceFrequencies(
        n=freq.n,
        s_obs=int(detections.size),
        q={int(k): int(c) for k, c in zip(ks, q)},
        v=int(detections.sum()),
        s_known=freq.s_known,
    )


def bootstrap_ci(
    freq: AbundanceFrequencies | IncidenceFrequencies,
    estimator: str | Estimator,
    config: BootstrapConfig | None = None,
) -> BootstrapInterval:
    """Percentile bootstrap interval for any snapshot statistic.

    Args:
        freq: the observed frequency summary.
        estimator: a registry name ("chao1", "good_turing", "chao2", ...)
            or any callable mapping a resampled summary to a float.
        config: replicate count, level and seed; defaults to 200 replicates
            at the 95% level with seed 0.

    Returns:
        A :class:`BootstrapInterval`; ``lower <= upper`` always holds and
        the resample median lies inside the interval.

    Raises:
        UndefinedEstimateError: if the estimator failed on every resample
            or the stream is too empty to smooth.
    """
    cfg = config or BootstrapConfig()
    if isinstance(freq, AbundanceFrequencies):
        model = "multinomial"
        probs = _smoothed_multinomial(freq)
    else:
        model = "incidence"
        probs = _smoothed_incidence(freq)
    fn = resolve_estimator(estimator, model) if isinstance(estimator, str) else estimator

    values: list[float] = []
    failures = 0
    for b in range(cfg.replicates):
        rng = np.random.Generator(np.random.Philox(key=cfg.seed + b))
        if model == "multinomial":
            resample = _resample_abundance(freq, probs, rng)
        else:
            resample = _resample_incidence(freq, probs, rng)
        try:
            values.append(float(fn(resample)))
        except FuzzcastError:
            failures += 1
    if not values:
        raise UndefinedEstimateError("estimator undefined on every bootstrap resample")

    arr = np.sort(np.asarray(values))
    degraded = failures > cfg.replicates // 2
    if degraded:
        warnings.warn(
            f"estimator undefined on {failures}/{cfg.replicates} resamples; "
            "reporting the full range of the defined ones",
            RuntimeWarning,
            stacklevel=2,
        )
        lower, upper = float(arr[0]), float(arr[-1])
    else:
        alpha = (1.0 - cfg.level) / 2.0
        lower = float(np.quantile(arr, alpha))
        upper = float(np.quantile(arr, 1.0 - alpha))
    return BootstrapInterval(
        lower=lower,
        upper=upper,
        level=cfg.level,
        replicates_used=len(values),
        degraded=degraded,
    )
