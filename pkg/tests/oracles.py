"""High-precision reference computations used by the test suite.

The discovery-probability closed form must equal the one-step difference
of the richness extrapolator.  Checking that numerically is delicate: the
difference of two richness values of magnitude S(n) can be 250 orders of
magnitude smaller, so the reference side is evaluated with mpmath at a
working precision chosen from the exponent range of each case.
"""

import math

from mpmath import mp, mpf

# below this magnitude the double result itself has denormal granularity,
# so relative comparison stops being meaningful
TINY = 1e-290


def _rel_error(s_obs: float, f0: float, rate_num: float, rate_den: float,
               lhs: float, m: int) -> float:
    """Relative error of lhs against S(n+m+1) - S(n+m) in high precision.

    The extrapolator is S(n) + f0 * (1 - (1 - r)^m) with r = rate_num /
    rate_den.  lhs is the library's float for the expected one-step gain.
    """
    if f0 <= 0 or rate_num <= 0:
        assert lhs == 0.0
        return 0.0
    log_keep = math.log1p(-rate_num / rate_den)
    digits = 50 + int((m + 1) * abs(log_keep) / math.log(10)) + len(str(int(s_obs) + 1))
    with mp.workdps(digits):
        keep = 1 - mpf(rate_num) / mpf(rate_den)
        s_now = mpf(s_obs) + mpf(f0) * (1 - keep ** m)
        s_next = mpf(s_obs) + mpf(f0) * (1 - keep ** (m + 1))
        diff = s_next - s_now
        if diff < TINY:
            assert abs(lhs) < TINY
            return 0.0
        return float(abs(mpf(lhs) - diff) / diff)


def multinomial_identity_error(n: int, f1: int, f0: float, s_obs: int,
                               u_pred: float, m: int) -> float:
    """U(n+m) should equal S(n+m+1) - S(n+m) exactly."""
    return _rel_error(s_obs, f0, f1, n * f0 + f1, u_pred, m)


def incidence_identity_error(n: int, q1: int, q0: float, v: int, s_obs: int,
                             u_pred: float, m: int) -> float:
    """(V/n) * U(n+m) should equal S(n+m+1) - S(n+m) exactly.

    The incidence U is a per-detection probability while the richness
    curve advances one sampling unit at a time; V/n detections arrive per
    unit, which is where the V/n factor comes from.
    """
    if v == 0:
        assert u_pred == 0.0
        return 0.0
    return _rel_error(s_obs, q0, q1, n * q0 + q1, v / n * u_pred, m)


def exact_effort(s_obs: float, s_hat: float, f0: float, rate_num: float,
                 rate_den: float, g_star: float) -> int:
    """Independent high-precision inversion of the extrapolator for m."""
    with mp.workdps(60):
        gap = (1 - mpf(g_star)) * mpf(s_hat)
        m = mp.log(gap / mpf(f0)) / mp.log(1 - mpf(rate_num) / mpf(rate_den))
        return int(mp.ceil(m))
