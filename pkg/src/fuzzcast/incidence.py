"""Estimators for incidence (species set per input) campaign data.

Under this model an input can touch any number of species at once, e.g. all
statements it covers, so the per-input record is a presence set rather than
a single label.  Estimation runs on the incidence counts Q_k (species
detected by exactly k inputs) and the incidence total V.

Result containers are shared with :mod:`fuzzcast.abundance`.  The
extrapolated curves here satisfy the scaled difference identity

    S(n + m + 1) - S(n + m) == (V / n) * U(n + m)

which collapses to the plain multinomial identity when every input carries
exactly one species (V == n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    FormulaRangeError,
    InsufficientRareSpeciesError,
    TargetAlreadyReachedError,
    TargetUnreachableError,
    UndefinedEstimateError,
)
from .abundance import EffortEstimate, ExtrapolationPoint, RichnessEstimate
from .species import IncidenceFrequencies


@dataclass(frozen=True)
class IncidenceDiscovery:
    """Discovery probability estimate for an incidence stream.

    Attributes:
        u_hat: estimated probability that the next input detects at least
            one new species, with the finite-pool correction applied.
        naive: the uncorrected ratio Q1 / V, reported alongside because it
            is what a quick reading of the counts suggests.
    """

    u_hat: float
    naive: float


def chao2(freq: IncidenceFrequencies) -> RichnessEstimate:
    """Chao2 lower-bound estimate of total species richness.

    With duplicates present::

        s_hat = S(n) + Q1^2 / (2 * Q2)

    and ``S(n) + Q1 * (Q1 - 1) / 2`` when Q2 == 0.  Unlike Chao1 there is
    no (n - 1)/n factor; the incidence form is already stated for a finite
    number of sampling units.

    Args:
        freq: incidence frequency summary with n >= 2.

    Raises:
        UndefinedEstimateError: if n < 2.
    """
    if freq.n < 2:
        raise UndefinedEstimateError("chao2 needs at least two sampling units")
    q1, q2 = freq.q1, freq.q2
    if q2 > 0:
        q0 = q1 * q1 / (2.0 * q2)
    else:
        q0 = q1 * (q1 - 1) / 2.0
    q0 = max(float(q0), 0.0) + 0.0  # + 0.0 turns -0.0 into +0.0
    return RichnessEstimate(
        s_hat=freq.s_obs + q0, s_obs=freq.s_obs, f0_hat=q0, method="chao2"
    )


def ichao2(freq: IncidenceFrequencies) -> RichnessEstimate:
    """Improved Chao2 estimate using Q3 and Q4.

    Adds ``(Q3 / (4 * Q4)) * max(Q1 - Q2 * Q3 / (2 * Q4), 0)`` to Chao2.
    With Q4 == 0 the correction is undefined and the estimate falls back to
    plain Chao2, flagged ``degraded``; Q3 == 0 zeroes the correction.

    Args:
        freq: incidence frequency summary with n >= 4.

    Raises:
        UndefinedEstimateError: if n < 4.
    """
    if freq.n < 4:
        raise UndefinedEstimateError("ichao2 needs at least four sampling units")
    base = chao2(freq)
    q1, q2, q3, q4 = freq.q1, freq.q2, freq.q3, freq.q4
    if q4 == 0:
        return RichnessEstimate(
            s_hat=base.s_hat,
            s_obs=base.s_obs,
            f0_hat=base.f0_hat,
            method="ichao2",
            degraded=True,
        )
    inner = max(q1 - q2 * q3 / (2.0 * q4), 0.0)
    q0 = base.f0_hat + (q3 / (4.0 * q4)) * inner
    return RichnessEstimate(
        s_hat=freq.s_obs + q0, s_obs=freq.s_obs, f0_hat=q0, method="ichao2"
    )


def known_richness(freq: IncidenceFrequencies, s_known: int | None = None) -> RichnessEstimate:
    """Richness for a statically enumerable species pool (e.g. statements).

    ``f0_hat = s_known - S(n)`` is then exact rather than estimated.

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


def _detection_rate(freq: IncidenceFrequencies, q0_hat: float) -> float:
    """Per-input rate r = Q1 / (n * q0_hat + Q1) at which the unseen pool shrinks."""
    denom = freq.n * q0_hat + freq.q1
    if denom <= 0:
        return 0.0
    return freq.q1 / denom


def incidence_discovery(
    freq: IncidenceFrequencies, richness: RichnessEstimate
) -> IncidenceDiscovery:
    """Probability that the next input detects at least one new species.

    The corrected estimate is::

        u_hat = (Q1 / V) * (n * q0_hat) / (n * q0_hat + Q1)

    where q0_hat comes from the supplied richness estimate.  The naive
    ratio Q1 / V is returned alongside; the correction only matters once
    the undetected pool n * q0_hat stops dwarfing Q1.

    Args:
        freq: incidence frequency summary.
        richness: richness estimate supplying q0_hat.

    Raises:
        UndefinedEstimateError: if the stream has no incidences at all (V == 0).
    """
    if freq.v == 0:
        raise UndefinedEstimateError(
            "discovery probability undefined without any detections"
        )
    naive = freq.q1 / freq.v
    q0 = richness.f0_hat
    if q0 <= 0 or freq.q1 == 0:
        return IncidenceDiscovery(u_hat=0.0, naive=naive)
    u_hat = naive * (freq.n * q0) / (freq.n * q0 + freq.q1)
    return IncidenceDiscovery(u_hat=min(1.0, max(0.0, u_hat)), naive=naive)


def incidence_extrapolate(
    freq: IncidenceFrequencies, richness: RichnessEstimate, m_star: int
) -> ExtrapolationPoint:
    """Predict S(n + m*) and U(n + m*) after m* additional sampling units.

    ::

        s_pred = S(n) + q0_hat * (1 - (1 - r)^m*)
        u_pred = (Q1 / V) * (1 - r)^(m* + 1)
        r      = Q1 / (n * q0_hat + Q1)

    Args:
        freq: incidence frequency summary with n >= 1.
        richness: richness estimate supplying q0_hat.
        m_star: number of additional inputs, >= 0.

    Raises:
        ValueError: if m_star is negative.
        UndefinedEstimateError: if the stream is empty or has no detections.
    """
    if m_star < 0:
        raise ValueError("m_star must be >= 0")
    if freq.n < 1:
        raise UndefinedEstimateError("extrapolation needs at least one sampling unit")
    if freq.v == 0:
        raise UndefinedEstimateError("extrapolation undefined without any detections")
    q0 = richness.f0_hat
    q1 = freq.q1
    if q0 <= 0 or q1 == 0:
        return ExtrapolationPoint(m_star=int(m_star), s_pred=float(freq.s_obs), u_pred=0.0)
    log_keep = math.log1p(-_detection_rate(freq, q0))
    s_pred = freq.s_obs + q0 * -math.expm1(m_star * log_keep)
    u_pred = (q1 / freq.v) * math.exp((m_star + 1) * log_keep)
    return ExtrapolationPoint(
        m_star=int(m_star),
        s_pred=min(s_pred, richness.s_hat),
        u_pred=min(1.0, max(0.0, u_pred)),
    )


def incidence_required_effort(
    freq: IncidenceFrequencies, richness: RichnessEstimate, g_star: float
) -> EffortEstimate:
    """Additional sampling units m* needed to reach species coverage ``g_star``.

    The closed form::

        m_formula = ceil( ln(1 - (n / (n-1)) * (2 Q2 / Q1^2) * (g* s_hat - S(n)))
                          / ln(1 - 2 Q2 / ((n-1) Q1 + 2 Q2)) )

    is only defined while its log argument stays in (0, 1]; ambitious
    targets push it to zero or below.  The exact inversion of the
    extrapolation curve::

        m_exact = ceil( ln(1 - (g* s_hat - S(n)) / q0_hat) / log1p(-r) )

    is defined for every target below 1 and is also computed here.  When
    only the closed form fails, the raised :class:`FormulaRangeError`
    carries ``m_exact`` so callers can still answer.

    Args:
        freq: incidence frequency summary with n >= 2.
        richness: richness estimate for the same data.
        g_star: target coverage, strictly between the current coverage and 1.

    Raises:
        ValueError: if g_star <= 0.
        TargetUnreachableError: if g_star >= 1.
        TargetAlreadyReachedError: if g_star <= current coverage.
        InsufficientRareSpeciesError: if Q1 == 0 or Q2 == 0.
        UndefinedEstimateError: if n < 2.
        FormulaRangeError: if the closed-form log argument leaves (0, 1].
    """
    if g_star <= 0:
        raise ValueError("coverage target must be positive")
    if g_star >= 1:
        raise TargetUnreachableError("coverage target must be below 1")
    if freq.n < 2:
        raise UndefinedEstimateError("required effort needs at least two sampling units")
    if richness.s_hat <= 0:
        raise UndefinedEstimateError("required effort needs a positive richness estimate")
    coverage = freq.s_obs / richness.s_hat
    if g_star <= coverage:
        raise TargetAlreadyReachedError(
            f"estimated coverage is already {coverage:.6f}, target {g_star:.6f}"
        )
    if freq.q1 == 0 or freq.q2 == 0:
        raise InsufficientRareSpeciesError(
            "required effort needs both uniques and duplicates"
        )
    n, q1, q2 = freq.n, freq.q1, freq.q2
    q0 = richness.f0_hat
    gap = g_star * richness.s_hat - freq.s_obs
    m_exact = math.log1p(-gap / q0) / math.log1p(-_detection_rate(freq, q0))
    m_exact = max(0, math.ceil(m_exact))
    numerator_arg = 1.0 - (n / (n - 1.0)) * (2.0 * q2 / (q1 * q1)) * gap
    if numerator_arg <= 0:
        raise FormulaRangeError(
            "closed-form effort is undefined for this target; "
            f"the exact inversion gives {m_exact} additional inputs",
            m_exact=m_exact,
        )
    denominator_arg = 1.0 - 2.0 * q2 / ((n - 1.0) * q1 + 2.0 * q2)
    m_formula = math.log(numerator_arg) / math.log(denominator_arg)
    return EffortEstimate(
        g_star=g_star,
        m_formula=max(0, math.ceil(m_formula)),
        m_exact=m_exact,
    )
