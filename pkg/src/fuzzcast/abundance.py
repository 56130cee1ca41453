"""Estimators for multinomial (one species per input) campaign data.

All functions read only the frequency summary produced by
:mod:`fuzzcast.species`: n, S(n) and the rare-species counts f1..f4.  Two
snapshots that agree on those fields therefore produce bit-identical
estimates, no matter how the abundant tail is distributed.

The quantities computed here:

* ``good_turing``          probability that the next input discovers a new
                           species (the residual risk of stopping now).
* ``chao1`` family         lower-bound estimates of total species richness.
* ``species_coverage``     fraction of estimated species already discovered.
* ``extrapolate_*``        behaviour of the campaign after m further inputs.
* ``required_effort``      additional inputs needed to reach a coverage target.
* ``abundance_profile``    smoothed species distribution and Pielou evenness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    InsufficientRareSpeciesError,
    TargetAlreadyReachedError,
    TargetUnreachableError,
    UndefinedEstimateError,
)
from .species import MULTINOMIAL, AbundanceFrequencies, SpeciesAccumulator


@dataclass(frozen=True)
class RichnessEstimate:
    """Point estimate of the total number of species.

    Attributes:
        s_hat: estimated total richness, never below ``s_obs``.
        s_obs: species discovered so far.
        f0_hat: estimated number of still-undiscovered species.
        method: name of the estimator that produced the value.
        ci: optional ``(lower, upper, level)`` bootstrap interval.
        degraded: True when the requested estimator fell back to a simpler
            one because its own inputs were missing (for example iChao1
            without quadrupletons).
    """

    s_hat: float
    s_obs: int
    f0_hat: float
    method: str
    ci: tuple[float, float, float] | None = None
    degraded: bool = False

    def with_ci(self, ci: tuple[float, float, float]) -> "RichnessEstimate":
        return RichnessEstimate(
            s_hat=self.s_hat,
            s_obs=self.s_obs,
            f0_hat=self.f0_hat,
            method=self.method,
            ci=ci,
            degraded=self.degraded,
        )


@dataclass(frozen=True)
class ExtrapolationPoint:
    """Predicted campaign state after ``m_star`` additional inputs."""

    m_star: int
    s_pred: float
    u_pred: float


@dataclass(frozen=True)
class EffortEstimate:
    """Additional inputs required to certify a species coverage target.

    ``m_formula`` is the closed-form approximation, ``m_exact`` inverts the
    extrapolation curve directly.  Both are rounded up to whole inputs.
    """

    g_star: float
    m_formula: int
    m_exact: int


def _finalize(f0_raw: float, s_obs: int, method: str, degraded: bool = False) -> RichnessEstimate:
    # f0_hat is kept as the directly computed term rather than s_hat - s_obs,
    # which would cancel catastrophically when f0 is tiny next to S(n).
    f0 = max(float(f0_raw), 0.0) + 0.0  # + 0.0 turns -0.0 into +0.0
    return RichnessEstimate(
        s_hat=s_obs + f0, s_obs=s_obs, f0_hat=f0, method=method, degraded=degraded
    )


def good_turing(freq: AbundanceFrequencies) -> float:
    """Good-Turing estimate of the discovery probability U(n) = f1 / n.

    This is the probability that the next generated input belongs to a
    species not seen in the first n inputs; equivalently, the fraction of
    the total species distribution still unobserved (the missing mass).
    Its mean squared error is below 1/n regardless of the underlying
    distribution, so at scale the estimate is sharp.

    Args:
        freq: abundance frequency summary with n >= 1.

    Returns:
        The estimated discovery probability, clamped to [0, 1].

    Raises:
        UndefinedEstimateError: if the summary is empty (n == 0).
    """
    if freq.n < 1:
        raise UndefinedEstimateError("discovery probability needs at least one input")
    return min(1.0, max(0.0, freq.f1 / freq.n))


def expected_inputs_to_next(freq: AbundanceFrequencies) -> float:
    """Expected number of further inputs until the next discovery, 1 / U(n).

    Returns infinity when the stream shows no singletons.
    """
    u = good_turing(freq)
    return math.inf if u == 0.0 else 1.0 / u


def expected_time_to_next(freq: AbundanceFrequencies, rate: float) -> float:
    """Expected seconds until the next discovery at ``rate`` inputs per second."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    return expected_inputs_to_next(freq) / rate


def chao1(freq: AbundanceFrequencies) -> RichnessEstimate:
    """Chao1 lower-bound estimate of total species richness.

    With doubletons present::

        s_hat = S(n) + ((n - 1) / n) * f1^2 / (2 * f2)

    and the bias-corrected form ``S(n) + ((n - 1) / n) * f1 * (f1 - 1) / 2``
    when f2 == 0.  The (n - 1)/n factor keeps small samples honest; it only
    perturbs the classic form by O(1/n).

    Args:
        freq: abundance frequency summary with n >= 2.

    Raises:
        UndefinedEstimateError: if n < 2.
    """
    if freq.n < 2:
        raise UndefinedEstimateError("chao1 needs at least two inputs")
    n = freq.n
    f1, f2 = freq.f1, freq.f2
    adj = (n - 1) / n
    if f2 > 0:
        f0 = adj * f1 * f1 / (2.0 * f2)
    else:
        f0 = adj * f1 * (f1 - 1) / 2.0
    return _finalize(f0, freq.s_obs, "chao1")


def ichao1(freq: AbundanceFrequencies) -> RichnessEstimate:
    """Improved Chao1 estimate using tripleton and quadrupleton counts.

    Adds to Chao1 the correction::

        ((n - 3) / n) * (f3 / (4 * f4))
            * max(f1 - ((n - 3) / (n - 1)) * f2 * f3 / (2 * f4), 0)

    With f4 == 0 the correction is undefined; the estimate falls back to
    plain Chao1 and is flagged ``degraded``.  With f3 == 0 the correction
    vanishes on its own.

    Args:
        freq: abundance frequency summary with n >= 4.

    Raises:
        UndefinedEstimateError: if n < 4.
    """
    if freq.n < 4:
        raise UndefinedEstimateError("ichao1 needs at least four inputs")
    base = chao1(freq)
    n = freq.n
    f1, f2, f3, f4 = freq.f1, freq.f2, freq.f3, freq.f4
    if f4 == 0:
        return RichnessEstimate(
            s_hat=base.s_hat,
            s_obs=base.s_obs,
            f0_hat=base.f0_hat,
            method="ichao1",
            degraded=True,
        )
    inner = max(f1 - ((n - 3) / (n - 1)) * f2 * f3 / (2.0 * f4), 0.0)
    f0 = base.f0_hat + ((n - 3) / n) * (f3 / (4.0 * f4)) * inner
    return _finalize(f0, freq.s_obs, "ichao1")


def jackknife(freq: AbundanceFrequencies, order: int = 1) -> RichnessEstimate:
    """First or second order jackknife richness estimate.

    Order 1::

        s_hat = S(n) + ((n - 1) / n) * f1

    Order 2::

        s_hat = S(n) + ((2n - 3) / n) * f1 - ((n - 2)^2 / (n (n - 1))) * f2

    The exact finite-n forms are used, not their large-n limits.  Estimates
    are floored at S(n).

    Args:
        freq: abundance frequency summary (n >= 1 for order 1, n >= 2 for
            order 2).
        order: 1 or 2.

    Raises:
        ValueError: for any other order.
        UndefinedEstimateError: if n is too small for the requested order.
    """
    n = freq.n
    if order == 1:
        if n < 1:
            raise UndefinedEstimateError("jackknife needs at least one input")
        f0 = ((n - 1) / n) * freq.f1
        return _finalize(f0, freq.s_obs, "jackknife1")
    if order == 2:
        if n < 2:
            raise UndefinedEstimateError("second order jackknife needs at least two inputs")
        f0 = ((2 * n - 3) / n) * freq.f1 - ((n - 2) ** 2 / (n * (n - 1))) * freq.f2
        return _finalize(f0, freq.s_obs, "jackknife2")
    raise ValueError(f"jackknife order must be 1 or 2, got {order}")


def known_richness(freq: AbundanceFrequencies, s_known: int | None = None) -> RichnessEstimate:
    """Richness "estimate" for the case where the true total is known.

    Useful when the species are statically enumerable (statements in the
    binary, for instance).  ``f0_hat`` becomes ``s_known - S(n)``.

    Args:
        freq: frequency summary.
        s_known: the externally known total; defaults to ``freq.s_known``.

    Raises:
        ValueError: if no known total is available or it is below S(n).
    """
    total = s_known if s_known is not None else freq.s_known
    if total is None:
        raise ValueError("no known species total available")
    if total < freq.s_obs:
        raise ValueError("known species total is below the observed count")
    return RichnessEstimate(
        s_hat=float(total), s_obs=freq.s_obs, f0_hat=float(total - freq.s_obs), method="known"
    )


def species_coverage(
    freq: AbundanceFrequencies, richness: RichnessEstimate | float
) -> float:
    """Fraction of the estimated species pool already discovered, S(n) / s_hat.

    Args:
        freq: abundance frequency summary.
        richness: a richness estimate (or bare s_hat value) for the same data.

    Returns:
        Coverage in [0, 1].

    Raises:
        UndefinedEstimateError: if the richness estimate is zero.
    """
    s_hat = richness.s_hat if isinstance(richness, RichnessEstimate) else float(richness)
    if s_hat <= 0:
        raise UndefinedEstimateError("species coverage undefined for zero estimated richness")
    return min(1.0, max(0.0, freq.s_obs / s_hat))


def _discovery_rate(freq: AbundanceFrequencies, f0_hat: float) -> float:
    """Per-input rate r = f1 / (n * f0_hat + f1) at which the unseen pool shrinks."""
    denom = freq.n * f0_hat + freq.f1
    if denom <= 0:
        return 0.0
    return freq.f1 / denom


def extrapolate_richness(
    freq: AbundanceFrequencies, richness: RichnessEstimate, m_star: int
) -> ExtrapolationPoint:
    """Predict S(n + m*) and U(n + m*) after m* additional inputs.

    The prediction interpolates between S(n) at m* = 0 and the estimated
    total s_hat as m* grows::

        s_pred = S(n) + f0_hat * (1 - (1 - r)^m*)
        u_pred = (f1 / n) * (1 - r)^(m* + 1)
        r      = f1 / (n * f0_hat + f1)

    The power is evaluated as exp(m* * log1p(-r)), which stays accurate for
    horizons up to about 1e12 inputs.

    Args:
        freq: abundance frequency summary with n >= 1.
        richness: richness estimate supplying f0_hat.
        m_star: number of additional inputs, >= 0.

    Raises:
        ValueError: if m_star is negative.
        UndefinedEstimateError: if the summary is empty.
    """
    if m_star < 0:
        raise ValueError("m_star must be >= 0")
    if freq.n < 1:
        raise UndefinedEstimateError("extrapolation needs at least one input")
    f0 = richness.f0_hat
    f1 = freq.f1
    if f0 <= 0 or f1 == 0:
        return ExtrapolationPoint(m_star=int(m_star), s_pred=float(freq.s_obs), u_pred=0.0)
    log_keep = math.log1p(-_discovery_rate(freq, f0))
    s_pred = freq.s_obs + f0 * -math.expm1(m_star * log_keep)
    u_pred = (f1 / freq.n) * math.exp((m_star + 1) * log_keep)
    return ExtrapolationPoint(
        m_star=int(m_star),
        s_pred=min(s_pred, richness.s_hat),
        u_pred=min(1.0, max(0.0, u_pred)),
    )


def extrapolate_discovery(
    freq: AbundanceFrequencies, richness: RichnessEstimate, m_star: int
) -> float:
    """Predicted discovery probability after m* additional inputs.

    Satisfies the exact difference identity
    U(n + m*) == S(n + m* + 1) - S(n + m*) of the extrapolated curves.
    """
    return extrapolate_richness(freq, richness, m_star).u_pred


def required_effort(
    freq: AbundanceFrequencies, richness: RichnessEstimate, g_star: float
) -> EffortEstimate:
    """Additional inputs m* needed to push species coverage to ``g_star``.

    Two answers are produced.  The closed-form approximation::

        m_formula = ceil( (n * f1 / (2 * f2)) * ln(f0_hat / ((1 - g*) * s_hat)) )

    and the exact inversion of the richness extrapolation curve::

        m_exact = ceil( ln((1 - g*) * s_hat / f0_hat) / log1p(-r) )

    They agree within a few percent whenever discovery is slow
    (f1 / (n * f0_hat) well below 1).  Callers that present a single number
    should prefer ``m_exact``.

    Args:
        freq: abundance frequency summary.
        richness: richness estimate for the same data.
        g_star: target coverage, strictly between the current coverage and 1.

    Raises:
        ValueError: if g_star is not in (0, 1) by way of being <= 0.
        TargetUnreachableError: if g_star >= 1.
        TargetAlreadyReachedError: if g_star <= current coverage.
        InsufficientRareSpeciesError: if f1 == 0 or f2 == 0.
    """
    if g_star <= 0:
        raise ValueError("coverage target must be positive")
    if g_star >= 1:
        raise TargetUnreachableError("coverage target must be below 1")
    coverage = species_coverage(freq, richness)
    if g_star <= coverage:
        raise TargetAlreadyReachedError(
            f"estimated coverage is already {coverage:.6f}, target {g_star:.6f}"
        )
    if freq.f1 == 0 or freq.f2 == 0:
        raise InsufficientRareSpeciesError(
            "required effort needs both singletons and doubletons"
        )
    f0 = richness.f0_hat
    shortfall = (1.0 - g_star) * richness.s_hat
    m_formula = (freq.n * freq.f1 / (2.0 * freq.f2)) * math.log(f0 / shortfall)
    m_exact = math.log(shortfall / f0) / math.log1p(-_discovery_rate(freq, f0))
    return EffortEstimate(
        g_star=g_star,
        m_formula=max(0, math.ceil(m_formula)),
        m_exact=max(0, math.ceil(m_exact)),
    )


@dataclass(frozen=True)
class AbundanceProfile:
    """Smoothed relative abundances and evenness of the discovered species.

    Attributes:
        p_hat: estimated probabilities, sorted descending, with one trailing
            entry holding the aggregate missing mass when it is positive.
            Entries are in (0, 1] and sum to 1.
        h_hat: Shannon index over the discovered-species entries.
        j_hat: Pielou evenness, h_hat / ln(S(n)), clamped to [0, 1].
    """

    p_hat: tuple[float, ...]
    h_hat: float
    j_hat: float


def abundance_profile(acc: SpeciesAccumulator) -> AbundanceProfile:
    """Estimate the species distribution behind a multinomial accumulator.

    Naive per-species proportions X_i / n overweight what has been seen:
    together they sum to 1 even though undiscovered species carry U(n) of
    the true distribution.  The profile therefore reserves the Good-Turing
    missing mass f1 / n and rescales the discovered proportions to sum to
    1 - f1 / n.  Evenness is Pielou's J = H / ln S(n) over the discovered
    entries, with J defined as 1 for a single-species stream.

    Args:
        acc: a multinomial accumulator with at least one observation.

    Raises:
        ModeViolationError: for incidence accumulators.
        UndefinedEstimateError: if the accumulator is empty.
    """
    freq = acc.abundance_snapshot()
    if freq.n < 1:
        raise UndefinedEstimateError("abundance profile needs at least one input")
    missing = good_turing(freq)
    scale = (1.0 - missing) / freq.n
    probs = sorted((count * scale for count in acc.counts.values()), reverse=True)
    h_hat = -sum(p * math.log(p) for p in probs if p > 0)
    if freq.s_obs == 1:
        j_hat = 1.0
    else:
        j_hat = min(1.0, max(0.0, h_hat / math.log(freq.s_obs)))
    if missing > 0:
        probs.append(missing)
    return AbundanceProfile(p_hat=tuple(probs), h_hat=h_hat, j_hat=j_hat)
