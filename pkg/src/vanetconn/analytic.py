"""Closed-form and semi-analytic connectivity metrics of the 1D network.

Distances enter through the Erlang gap distribution, the channel through the
threshold exceedance probability.  Everything here is deterministic; the
Monte-Carlo estimators in :mod:`vanetconn.montecarlo` provide the independent
statistical cross-checks.
"""

from __future__ import annotations

import math

import mpmath

from . import channel, scenario
from .numerics import QuadratureSpec, integrate_semi_infinite, log_factorial, upper_incomplete_gamma
from .scenario import ScenarioParams

__all__ = [
    "DivergentMeanError",
    "ClosedFormOverflowError",
    "p_sl_ud_first",
    "p_network_ud",
    "p_sl_ud_mth",
    "p_sl_rayleigh",
    "p_sl_rayleigh_closed_alpha2",
    "avg_snr_rayleigh",
    "avg_snr_ud",
    "avg_node_degree",
    "p_vehicle_one_side_rayleigh",
    "p_vehicle_rayleigh",
    "p_vehicle_ud",
]

# e^(rho^2 lam^2 / 4) must stay representable in double precision
_EXP_GUARD = 700.0
# beyond this measured cancellation a compensated double-precision sum cannot
# certify ~1e-9 relative accuracy, so the sum is redone in higher precision
_CANCELLATION_ESCALATE = 2e5


class DivergentMeanError(ValueError):
    """The requested average SNR is infinite for this neighbour index."""


class ClosedFormOverflowError(OverflowError):
    """Closed form would overflow; evaluate the quadrature path instead."""


def _require_neighbor_index(m) -> int:
    if m != int(m) or m < 1:
        raise ValueError(f"neighbour index must be a positive integer, got {m!r}")
    return int(m)


def _budget(params: ScenarioParams) -> channel.LinkBudget:
    return channel.LinkBudget.from_scenario(params)


def _snr_decay_coefficient(params: ScenarioParams) -> float:
    """Coefficient c in the exceedance probability e^(-c d^alpha) of a fading link."""
    return params.psi * params.noise_power / (params.beta * params.tx_power)


def communication_range(params: ScenarioParams) -> float:
    """Unit-disc radius; numerically also the length scale of the fading model."""
    return channel.unit_disc_range(_budget(params), params.psi)


def p_sl_ud_first(params: ScenarioParams) -> float:
    """Probability that a vehicle reaches its immediate neighbour in the unit disc."""
    return -math.expm1(-params.rho * communication_range(params))


def p_network_ud(params: ScenarioParams) -> float:
    """Unit-disc network connectivity: all N-1 successive links present."""
    log_single = math.log1p(-math.exp(-params.rho * communication_range(params)))
    return math.exp((params.n_vehicles - 1) * log_single)


def p_sl_ud_mth(params: ScenarioParams, m: int = 1) -> float:
    """Unit-disc link probability to the m-th neighbour: Erlang CDF at the radius."""
    m = _require_neighbor_index(m)
    return scenario.erlang_cdf(communication_range(params), m, params.rho)


def p_sl_rayleigh(
    params: ScenarioParams, m: int = 1, spec: QuadratureSpec | None = None
) -> float:
    """Fading link probability to the m-th neighbour.

    Averages the exceedance probability e^(-c x^alpha) over the Erlang gap
    density; the integrand carries the Erlang normalisation in log space.
    Either factor alone bounds the tail below tolerance beyond its own scale
    ((50+2m)/rho for the gap density, lam*(50+2m)^(1/alpha) for the channel
    factor), so the cutoff takes whichever is tighter; on near-empty roads
    only the channel scale keeps the interval comparable to the integrand's
    support.
    """
    m = _require_neighbor_index(m)
    rho = params.rho
    alpha = params.ple
    c = _snr_decay_coefficient(params)
    lam = communication_range(params)
    log_norm = m * math.log(rho) - log_factorial(m - 1)

    def integrand(x: float) -> float:
        if x <= 0.0:
            return rho if m == 1 else 0.0
        return math.exp(log_norm + (m - 1) * math.log(x) - rho * x - c * x**alpha)

    upper = min((50.0 + 2.0 * m) / rho, lam * (50.0 + 2.0 * m) ** (1.0 / alpha))
    value, _ = integrate_semi_infinite(integrand, spec, upper=upper)
    return min(1.0, max(0.0, value))


def _kahan_sum(values) -> tuple[float, float]:
    total = 0.0
    comp = 0.0
    abs_total = 0.0
    for v in values:
        abs_total += abs(v)
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total, abs_total


def _closed_form_mp(m: int, a: float, z: float) -> float:
    # The alternating sum loses roughly as many digits as the decades between
    # its largest term and its total, so evaluate at increasing precision
    # until two consecutive results agree.
    prev = None
    dps = 40
    while dps <= 640:
        with mpmath.workdps(dps):
            half_a = mpmath.mpf(a) / 2
            total = mpmath.fsum(
                mpmath.binomial(m - 1, k)
                * (-half_a) ** k
                * mpmath.gammainc(mpmath.mpf(m - k) / 2, a=z)
                for k in range(m)
            )
            value = float(
                mpmath.mpf(a) ** m * mpmath.exp(z) * total / (2 * mpmath.factorial(m - 1))
            )
        if prev is not None and abs(value - prev) <= 1e-13 * max(abs(value), 1e-300):
            return value
        prev = value
        dps *= 2
    raise ArithmeticError("alternating sum did not stabilise at high precision")


def p_sl_rayleigh_closed_alpha2(params: ScenarioParams, m: int = 1) -> float:
    """Closed form of the fading link probability for path-loss exponent 2.

    Completing the square in the exponent turns the gap average into an
    incomplete-gamma sum: with a = rho*lam and lam the threshold length scale,

        P(m) = (a^m e^(a^2/4) / (2 (m-1)!)) *
               sum_k C(m-1, k) (-a/2)^k Gamma((m-k)/2, a^2/4)

    For m = 1 this is (a sqrt(pi) / 2) e^(a^2/4) erfc(a/2).  The sum is
    compensated; when the measured cancellation is too deep for double
    precision the sum is re-evaluated in arbitrary precision, because the
    leading asymptotic orders of its terms cancel exactly.
    """
    m = _require_neighbor_index(m)
    if params.ple != 2:
        raise ValueError(f"closed form requires path-loss exponent 2, got {params.ple}")
    lam = communication_range(params)
    a = params.rho * lam
    z = 0.25 * a * a
    if z >= _EXP_GUARD:
        raise ClosedFormOverflowError(
            f"exp({z:.4g}) is not representable; use p_sl_rayleigh instead"
        )
    half_a = 0.5 * a
    terms = [
        math.comb(m - 1, k) * (-half_a) ** k * upper_incomplete_gamma(0.5 * (m - k), z)
        for k in range(m)
    ]
    total, abs_total = _kahan_sum(terms)
    if total <= 0.0 or abs_total / total > _CANCELLATION_ESCALATE:
        return min(1.0, _closed_form_mp(m, a, z))
    log_pref = m * math.log(a) + z - math.log(2.0) - math.lgamma(m)
    return min(1.0, math.exp(log_pref + math.log(total)))


def avg_snr_rayleigh(params: ScenarioParams, m: int) -> float:
    """Average received SNR at the m-th neighbour under fading.

    Finite only for m >= alpha + 1, where it equals
    beta*P_T*rho^alpha / P_noise * prod_{j=1..alpha} 1/(m-j); closer
    neighbours sit too often near zero distance and the mean diverges.
    """
    m = _require_neighbor_index(m)
    alpha = params.ple
    if m <= alpha:
        raise DivergentMeanError(
            f"average SNR is infinite for m <= {alpha} (got m={m})"
        )
    value = _budget(params).snr_scale * params.rho**alpha
    for j in range(1, alpha + 1):
        value /= m - j
    return value


def avg_snr_ud(params: ScenarioParams, m: int) -> float:
    """Average received SNR at the m-th neighbour in the unit disc.

    The conditional SNR is a point mass at the path-loss value, so the mean
    is the negative-alpha Erlang moment; it comes out identical to the fading
    average, here computed through the gamma-function moment for an
    arithmetically independent route.
    """
    m = _require_neighbor_index(m)
    alpha = params.ple
    if m <= alpha:
        raise DivergentMeanError(
            f"average SNR is infinite for m <= {alpha} (got m={m})"
        )
    log_moment = alpha * math.log(params.rho) + math.lgamma(m - alpha) - math.lgamma(m)
    return _budget(params).snr_scale * math.exp(log_moment)


def avg_node_degree(params: ScenarioParams, spec: QuadratureSpec | None = None) -> float:
    """Expected number of fading-linked neighbours of an interior vehicle.

    2 * rho * integral of e^(-c x^alpha) over [0, inf); equals
    rho * lam * sqrt(pi) for alpha = 2.
    """
    c = _snr_decay_coefficient(params)
    alpha = params.ple
    lam = communication_range(params)
    value, _ = integrate_semi_infinite(
        lambda x: math.exp(-c * x**alpha), spec, upper=lam * 60.0 ** (1.0 / alpha)
    )
    return 2.0 * params.rho * value


def _one_side_disconnect(params: ScenarioParams, big_m: int) -> float:
    if big_m != int(big_m) or big_m < 1:
        raise ValueError(f"neighbour span must be a positive integer, got {big_m!r}")
    prod = 1.0
    for m in range(1, int(big_m) + 1):
        prod *= max(0.0, 1.0 - p_sl_rayleigh(params, m))
    return prod


def p_vehicle_one_side_rayleigh(params: ScenarioParams, big_m: int = 10) -> float:
    """Probability a vehicle reaches at least one of its big_m one-side neighbours.

    Treats the links to different neighbours as independent, which makes this
    an approximation (the gaps are nested, hence positively dependent).
    """
    return 1.0 - _one_side_disconnect(params, big_m)


def p_vehicle_rayleigh(params: ScenarioParams, big_m: int = 10) -> float:
    """Probability a vehicle is linked on at least one side under fading.

    The two sides are independent, so the isolation probability squares; the
    per-side independence approximation makes this an upper bound on the
    simulated vehicle connectivity.
    """
    return 1.0 - _one_side_disconnect(params, big_m) ** 2


def p_vehicle_ud(params: ScenarioParams) -> float:
    """Unit-disc vehicle connectivity; collapses to the first-neighbour link."""
    return p_sl_ud_first(params)
