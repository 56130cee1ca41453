"""Multinomial estimators: golden values, hand calculations, properties."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from fuzzcast import (
    AbundanceFrequencies,
    InsufficientRareSpeciesError,
    SpeciesAccumulator,
    TargetAlreadyReachedError,
    TargetUnreachableError,
    UndefinedEstimateError,
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
from fuzzcast.abundance import expected_inputs_to_next, expected_time_to_next


def _freq(n, s_obs, f1, f2, f3=0, f4=0, s_known=None):
    return AbundanceFrequencies.from_marginals(
        n=n, s_obs=s_obs, f1=f1, f2=f2, f3=f3, f4=f4, s_known=s_known
    )

WORKED = _freq(n=10_000, s_obs=100, f1=10, f2=5)


# -- good_turing ----------------------------------------------------------


def test_good_turing_twelve_hour_panel():
    freq = _freq(n=63_600_000, s_obs=4944, f1=447, f2=70)
    value = good_turing(freq)
    assert value == pytest.approx(447 / 63_600_000)
    assert 6.7e-6 <= value <= 7.4e-6


def test_good_turing_twentyfour_hour_panel():
    freq = _freq(n=124_800_000, s_obs=5000, f1=95, f2=50)
    value = good_turing(freq)
    assert value == pytest.approx(95 / 124_800_000)
    assert 7.2e-7 <= value <= 8.4e-7


def test_good_turing_no_singletons():
    assert good_turing(_freq(n=1_000, s_obs=10, f1=0, f2=0)) == 0.0


def test_good_turing_needs_data():
    empty = AbundanceFrequencies(n=0, s_obs=0, f={})
    with pytest.raises(UndefinedEstimateError):
        good_turing(empty)


def test_expected_inputs_and_time_to_next():
    assert expected_inputs_to_next(WORKED) == pytest.approx(1000.0)
    assert expected_time_to_next(WORKED, rate=1000.0) == pytest.approx(1.0)
    saturated = _freq(n=1_000, s_obs=10, f1=0, f2=0)
    assert expected_inputs_to_next(saturated) == math.inf
    with pytest.raises(ValueError):
        expected_time_to_next(WORKED, rate=0.0)


# -- chao1 / ichao1 / jackknife ------------------------------------------


def test_chao1_no_rare_species():
    freq = _freq(n=1_000_000, s_obs=120, f1=0, f2=0)
    est = chao1(freq)
    assert est.s_hat == 120.0
    assert est.f0_hat == 0.0


def test_chao1_hand_value():
    est = chao1(WORKED)
    assert est.s_hat == pytest.approx(109.999, abs=1e-9)
    assert est.f0_hat == pytest.approx(9.999, abs=1e-9)
    assert est.method == "chao1"
    assert not est.degraded


def test_chao1_bias_corrected_branch():
    freq = _freq(n=1_000, s_obs=20, f1=3, f2=0)
    est = chao1(freq)
    assert est.s_hat == pytest.approx(20 + (999 / 1000) * 3 * 2 / 2)


def test_chao1_needs_two_inputs():
    freq = AbundanceFrequencies(n=1, s_obs=1, f={1: 1})
    with pytest.raises(UndefinedEstimateError):
        chao1(freq)


def test_chao1_on_simulated_uniform_assemblage():
    from fuzzcast import sample_campaign, uniform_assemblage

    campaign = sample_campaign(uniform_assemblage(1000), n=100_000, seed=11)
    est = chao1(campaign.snapshot())
    assert abs(est.s_hat - 1000) / 1000 < 0.02


def test_ichao1_zero_correction():
    freq = _freq(n=10_000, s_obs=100, f1=10, f2=5, f3=0, f4=2)
    assert ichao1(freq).s_hat == chao1(freq).s_hat
    assert not ichao1(freq).degraded


def test_ichao1_hand_value():
    freq = _freq(n=10_000, s_obs=100, f1=10, f2=5, f3=4, f4=2)
    est = ichao1(freq)
    correction = (9997 / 10_000) * (4 / 8) * max(10 - (9997 / 9999) * (5 * 4 / (2 * 2)), 0)
    assert est.s_hat == pytest.approx(chao1(freq).s_hat + correction)
    assert est.s_hat == pytest.approx(112.499, abs=2e-3)
    assert est.s_hat >= chao1(freq).s_hat


def test_ichao1_clamp():
    freq = _freq(n=10_000, s_obs=100, f1=2, f2=8, f3=8, f4=1)
    assert ichao1(freq).s_hat == chao1(freq).s_hat


def test_ichao1_without_quadrupletons_degrades():
    freq = _freq(n=10_000, s_obs=100, f1=10, f2=5, f3=4, f4=0)
    est = ichao1(freq)
    assert est.degraded
    assert est.method == "ichao1"
    assert est.s_hat == chao1(freq).s_hat


def test_ichao1_needs_four_inputs():
    freq = AbundanceFrequencies(n=3, s_obs=1, f={3: 1})
    with pytest.raises(UndefinedEstimateError):
        ichao1(freq)


def test_jackknife_no_rare_species():
    freq = _freq(n=1_000, s_obs=10, f1=0, f2=0)
    assert jackknife(freq, order=1).s_hat == 10.0
    assert jackknife(freq, order=2).s_hat == 10.0


def test_jackknife_hand_values():
    jk1 = jackknife(WORKED, order=1)
    jk2 = jackknife(WORKED, order=2)
    assert jk1.s_hat == pytest.approx(109.999, abs=1e-9)
    assert jk2.s_hat == pytest.approx(114.9985, abs=1e-3)
    assert jk2.s_hat == pytest.approx(
        100 + (19_997 / 10_000) * 10 - (9998**2 / (10_000 * 9_999)) * 5
    )


def test_jackknife2_matches_large_n_approximation():
    freq = _freq(n=10_000_000, s_obs=100, f1=10, f2=5)
    approx = 100 + 2 * 10 - 5
    assert abs(jackknife(freq, order=2).s_hat - approx) < 0.01


def test_jackknife_rejects_other_orders():
    with pytest.raises(ValueError):
        jackknife(WORKED, order=3)


def test_jackknife_preconditions():
    empty = AbundanceFrequencies(n=0, s_obs=0, f={})
    with pytest.raises(UndefinedEstimateError):
        jackknife(empty, order=1)
    single = AbundanceFrequencies(n=1, s_obs=1, f={1: 1})
    with pytest.raises(UndefinedEstimateError):
        jackknife(single, order=2)
    assert jackknife(single, order=1).s_hat == pytest.approx(1.0)


def test_known_richness():
    est = known_richness(WORKED, s_known=120)
    assert est.s_hat == 120.0
    assert est.f0_hat == 20.0
    assert est.method == "known"
    tagged = _freq(n=10_000, s_obs=100, f1=10, f2=5, s_known=150)
    assert known_richness(tagged).s_hat == 150.0
    with pytest.raises(ValueError):
        known_richness(WORKED)
    with pytest.raises(ValueError):
        known_richness(WORKED, s_known=50)


# -- species_coverage -----------------------------------------------------


def test_coverage_path_panel():
    assert species_coverage(
        AbundanceFrequencies(n=97_072, s_obs=5392, f={18: 5376, 19: 16}),
        5408.0,
    ) == pytest.approx(0.997, abs=1e-3)


def test_coverage_complete():
    freq = _freq(n=1_000, s_obs=10, f1=0, f2=0)
    assert species_coverage(freq, chao1(freq)) == 1.0


def test_coverage_from_chao1():
    assert species_coverage(WORKED, chao1(WORKED)) == pytest.approx(0.9091, abs=1e-4)


def test_coverage_zero_richness():
    empty = AbundanceFrequencies(n=0, s_obs=0, f={})
    with pytest.raises(UndefinedEstimateError):
        species_coverage(empty, 0.0)


# -- extrapolation --------------------------------------------------------


def test_extrapolate_zero_horizon():
    rich = chao1(WORKED)
    point = extrapolate_richness(WORKED, rich, 0)
    assert point.s_pred == 100.0
    assert point.m_star == 0


def test_extrapolate_nothing_left():
    freq = _freq(n=1_000, s_obs=10, f1=0, f2=0)
    rich = chao1(freq)
    for m in (0, 10, 10**6, 10**12):
        assert extrapolate_richness(freq, rich, m).s_pred == 10.0


def test_extrapolate_hand_value():
    point = extrapolate_richness(WORKED, chao1(WORKED), 10_000)
    assert point.s_pred == pytest.approx(106.32075739671713, rel=1e-9)
    assert point.s_pred == pytest.approx(106.32, abs=5e-3)


def test_extrapolate_shape():
    rich = chao1(WORKED)
    grid = [0, 1, 10, 100, 1_000, 10_000, 100_000, 10**7, 10**12]
    preds = [extrapolate_richness(WORKED, rich, m).s_pred for m in grid]
    gains = np.diff(preds)
    assert all(g >= -1e-12 for g in gains)
    assert all(WORKED.s_obs <= p <= rich.s_hat + 1e-12 for p in preds)
    assert preds[-1] == pytest.approx(rich.s_hat, rel=1e-12)
    dense = [extrapolate_richness(WORKED, rich, m).s_pred for m in range(0, 4000, 200)]
    steps = np.diff(dense)
    assert all(b <= a + 1e-12 for a, b in zip(steps, steps[1:]))


def test_extrapolate_discovery_trivial():
    freq = _freq(n=1_000, s_obs=10, f1=0, f2=0)
    rich = chao1(freq)
    for m in (0, 5, 500):
        assert extrapolate_discovery(freq, rich, m) == 0.0
    u = [extrapolate_discovery(WORKED, chao1(WORKED), m) for m in (0, 10, 1_000, 10**6)]
    assert all(b <= a for a, b in zip(u, u[1:]))
    assert all(0.0 <= x <= 1.0 for x in u)


def test_extrapolate_discovery_good_turing_limit():
    from fuzzcast import RichnessEstimate

    huge = RichnessEstimate(s_hat=100 + 1e12, s_obs=100, f0_hat=1e12, method="known")
    assert extrapolate_discovery(WORKED, huge, 0) == pytest.approx(
        good_turing(WORKED), rel=1e-6
    )


def test_difference_identity_hand_case():
    rich = chao1(WORKED)
    u = extrapolate_discovery(WORKED, rich, 500)
    err = oracles.multinomial_identity_error(
        WORKED.n, WORKED.f1, rich.f0_hat, WORKED.s_obs, u, 500
    )
    assert err <= 1e-12


# -- required_effort ------------------------------------------------------


def test_required_effort_hand_value():
    effort = required_effort(WORKED, chao1(WORKED), 0.95)
    assert effort.m_formula == 5978
    assert effort.m_exact == 5978
    assert effort.g_star == 0.95


def test_required_effort_exactly_at_coverage_is_already_achieved():
    coverage = species_coverage(WORKED, chao1(WORKED))
    with pytest.raises(TargetAlreadyReachedError):
        required_effort(WORKED, chao1(WORKED), coverage)


def test_required_effort_just_above_coverage_is_tiny():
    coverage = species_coverage(WORKED, chao1(WORKED))
    effort = required_effort(WORKED, chao1(WORKED), math.nextafter(coverage, 1.0))
    assert 0 <= effort.m_exact <= 1
    assert 0 <= effort.m_formula <= 1


def test_required_effort_errors():
    rich = chao1(WORKED)
    with pytest.raises(TargetUnreachableError):
        required_effort(WORKED, rich, 1.0)
    with pytest.raises(TargetAlreadyReachedError):
        required_effort(WORKED, rich, 0.5)
    with pytest.raises(ValueError):
        required_effort(WORKED, rich, 0.0)
    no_doubletons = _freq(n=1_000, s_obs=20, f1=3, f2=0)
    with pytest.raises(InsufficientRareSpeciesError):
        required_effort(no_doubletons, chao1(no_doubletons), 0.99)
    no_singletons = _freq(n=1_000, s_obs=20, f1=0, f2=3, s_known=30)
    with pytest.raises(InsufficientRareSpeciesError):
        required_effort(no_singletons, known_richness(no_singletons), 0.9)


def test_required_effort_roundtrip_worked_example():
    rich = chao1(WORKED)
    effort = required_effort(WORKED, rich, 0.95)
    s_pred = extrapolate_richness(WORKED, rich, effort.m_exact).s_pred
    assert abs(s_pred - 0.95 * rich.s_hat) / (0.95 * rich.s_hat) < 0.05


# -- abundance_profile ----------------------------------------------------


def _profile_from_counts(counts):
    acc = SpeciesAccumulator()
    for token, k in counts.items():
        for _ in range(k):
            acc.observe(token)
    return abundance_profile(acc)


def test_evenness_balanced_pair():
    assert _profile_from_counts({"a": 500, "b": 500}).j_hat == pytest.approx(1.0)


def test_evenness_skewed_pair():
    profile = _profile_from_counts({"a": 900, "b": 100})
    assert profile.j_hat == pytest.approx(0.469, abs=0.005)


def test_evenness_million_inputs_no_missing_mass():
    profile = _profile_from_counts({"a": 500_000, "b": 500_000})
    assert profile.j_hat == pytest.approx(1.0)
    assert profile.p_hat[-1] > 0.0


def test_evenness_single_species():
    assert _profile_from_counts({"a": 3}).j_hat == 1.0


def test_profile_smoothing_reserves_missing_mass():
    profile = _profile_from_counts({"a": 5, "b": 3, "c": 1})
    assert sum(profile.p_hat) == pytest.approx(1.0, abs=1e-9)
    assert profile.p_hat[-1] == pytest.approx(1 / 9)
    assert all(0 < p <= 1 for p in profile.p_hat)
    assert profile.h_hat >= 0.0
    assert 0.0 <= profile.j_hat <= 1.0


def test_profile_needs_data():
    with pytest.raises(UndefinedEstimateError):
        abundance_profile(SpeciesAccumulator())


# -- cross-cutting properties --------------------------------------------


def test_estimators_read_only_the_margins():
    base = dict(n=100_000, s_obs=60, f1=5, f2=3, f3=2, f4=1)
    plain = AbundanceFrequencies.from_marginals(**base)
    # same margins, radically different abundant tail
    skew_f = {1: 5, 2: 3, 3: 2, 4: 1, 5: 48, 99_739: 1}
    skew = AbundanceFrequencies(n=100_000, s_obs=60, f=skew_f)
    for est in (chao1, ichao1, lambda f: jackknife(f, 2)):
        assert est(plain).s_hat == est(skew).s_hat
    assert good_turing(plain) == good_turing(skew)


@st.composite
def _random_freq(draw):
    n_scale = draw(st.integers(min_value=100, max_value=10_000))
    f1 = draw(st.integers(min_value=0, max_value=40))
    f2 = draw(st.integers(min_value=0, max_value=40))
    f3 = draw(st.integers(min_value=0, max_value=20))
    f4 = draw(st.integers(min_value=0, max_value=20))
    tail_species = draw(st.integers(min_value=1, max_value=30))
    s_obs = f1 + f2 + f3 + f4 + tail_species
    n = f1 + 2 * f2 + 3 * f3 + 4 * f4 + 5 * tail_species + n_scale
    return AbundanceFrequencies.from_marginals(n=n, s_obs=s_obs, f1=f1, f2=f2, f3=f3, f4=f4)


@settings(max_examples=120, deadline=None)
@given(_random_freq())
def test_lower_bound_ordering(freq):
    lower = chao1(freq)
    improved = ichao1(freq)
    assert lower.s_hat >= freq.s_obs
    assert improved.s_hat >= lower.s_hat - 1e-9
    assert math.isfinite(lower.s_hat) and math.isfinite(improved.s_hat)
    assert jackknife(freq, 1).s_hat >= freq.s_obs
    assert jackknife(freq, 2).s_hat >= freq.s_obs


@settings(max_examples=80, deadline=None)
@given(_random_freq(), st.integers(min_value=0, max_value=10**6))
def test_extrapolation_bounds_random(freq, m):
    rich = chao1(freq)
    point = extrapolate_richness(freq, rich, m)
    assert freq.s_obs <= point.s_pred <= rich.s_hat + 1e-9
    assert 0.0 <= point.u_pred <= 1.0
