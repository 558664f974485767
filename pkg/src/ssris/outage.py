"""Outage probability of the faded link under the truncated-Gaussian model.

The sum of the per-element fading magnitudes, Y, is modeled as a Gaussian
restricted to y >= 0 with mean M*sqrt(pi)/2 and variance M*(4-pi)/4. The
SNR outage probability is the CDF of Y evaluated at sqrt(gamma/(N*gamma0)).
The feasibility boundary functions ``f1``/``f2`` are an algebraic
rearrangement of "outage <= epsilon" used by the root-finding solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcinv

_SQRT2 = np.sqrt(2.0)
_LN2 = np.log(2.0)

# Outage margins outside this range are rejected: beyond either end the
# truncated-Gaussian model or the tail arithmetic dominates the error.
EPSILON_MIN = 1e-9
EPSILON_MAX = 0.5


def q_function(x):
    """Gaussian tail probability Q(x) = erfc(x/sqrt(2))/2.

    Computed through erfc (never 1 - CDF) so the far tail keeps full
    relative accuracy; tight outage margins push roots into that region.
    """
    return 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)


def q_inverse(p):
    """Inverse of :func:`q_function` on (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("q_inverse requires probabilities strictly inside (0, 1)")
    return _SQRT2 * erfcinv(2.0 * p)


def check_epsilon(epsilon: float) -> None:
    if not EPSILON_MIN <= epsilon <= EPSILON_MAX:
        raise ValueError(
            f"outage margin must lie in [{EPSILON_MIN:g}, {EPSILON_MAX:g}], got {epsilon!r}"
        )


@dataclass(frozen=True)
class OutageModel:
    """Truncated-Gaussian parameters of Y for a given element count.

    ``c_norm`` renormalizes the tail so the CDF is exactly 0 at y = 0; it
    lies in (1, 2) and tends to 1 as the element count grows.
    """

    m_elements: float
    mu_y: float
    sigma_y: float
    c_norm: float


def outage_model(m_elements) -> OutageModel:
    """Build the Y-distribution model for a (possibly fractional) element count."""
    m = np.asarray(m_elements, dtype=float)
    if np.any(m <= 0.0):
        raise ValueError("element count must be positive")
    mu = m * np.sqrt(np.pi) / 2.0
    sigma = np.sqrt(m * (4.0 - np.pi)) / 2.0
    c = 1.0 / q_function(-mu / sigma)
    if m.ndim == 0:
        return OutageModel(float(m), float(mu), float(sigma), float(c))
    return OutageModel(m, mu, sigma, c)


def truncated_gaussian_cdf(y, model: OutageModel):
    """CDF of Y: 0 for y < 0, otherwise 1 - Q((y-mu)/sigma)/Q(-mu/sigma).

    The tail ratio form makes the value exactly 0 at y = 0.
    """
    y = np.asarray(y, dtype=float)
    z = (y - model.mu_y) / model.sigma_y
    tail = q_function(z) / q_function(-np.asarray(model.mu_y) / model.sigma_y)
    out = np.where(y < 0.0, 0.0, np.clip(1.0 - tail, 0.0, 1.0))
    return out.item() if out.ndim == 0 else out


def outage_probability(gamma, model: OutageModel, gamma0: float, n_antennas: int):
    """P{SNR < gamma} for the faded link: F_Y(sqrt(gamma/(N*gamma0)))."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0.0):
        raise ValueError("SNR threshold must be nonnegative")
    y = np.sqrt(gamma / (n_antennas * gamma0))
    return truncated_gaussian_cdf(y, model)


def gamma_for_outage(p_out: float, model: OutageModel, gamma0: float, n_antennas: int) -> float:
    """SNR threshold at which the analytic outage equals ``p_out``."""
    if not 0.0 < p_out < 1.0:
        raise ValueError("target outage must lie strictly inside (0, 1)")
    q0 = q_function(-model.mu_y / model.sigma_y)
    z = q_inverse((1.0 - p_out) * q0)
    y = model.mu_y + model.sigma_y * z
    if y < 0.0:
        raise ValueError("target outage unreachable: threshold below the truncation point")
    return float(n_antennas * gamma0 * y * y)


def snr_threshold_es(rate_bps: float, bandwidth_hz: float):
    """SNR needed to sustain the rate with the full bandwidth: 2^(R0/B) - 1."""
    if rate_bps < 0.0:
        raise ValueError("rate target must be nonnegative")
    return float(np.expm1(_LN2 * rate_bps / bandwidth_hz))


def snr_threshold_ts(rate_bps: float, bandwidth_hz: float, tau: float):
    """SNR needed when only a (1 - tau) time fraction carries data.

    Strictly increasing in tau; tau >= 1 leaves no time for reflection.
    """
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"harvesting time fraction must lie in [0, 1), got {tau!r}")
    return snr_threshold_es(rate_bps / (1.0 - tau), bandwidth_hz)


@dataclass(frozen=True)
class OutageSpec:
    """Validated bundle of an SNR threshold, outage margin, and rate target."""

    gamma_threshold: float
    epsilon: float
    rate_target_bps: float

    def __post_init__(self):
        if not self.gamma_threshold > 0.0:
            raise ValueError("gamma_threshold must be positive")
        check_epsilon(self.epsilon)
        if not self.rate_target_bps > 0.0:
            raise ValueError("rate_target_bps must be positive")


def f1(m_rf, epsilon: float):
    """Left feasibility boundary: (1 - eps) * Q(-sqrt(M*pi/(4-pi))).

    Evaluated on the continuous relaxation of the element count.
    """
    check_epsilon(epsilon)
    m = np.asarray(m_rf, dtype=float)
    if np.any(m <= 0.0):
        raise ValueError("element count must be positive")
    out = (1.0 - epsilon) * q_function(-np.sqrt(m * np.pi / (4.0 - np.pi)))
    return out.item() if out.ndim == 0 else out


def f2(m_rf, gamma: float, gamma0: float, n_antennas: int):
    """Right feasibility boundary:
    Q(2*sqrt(gamma/(N*gamma0*M*(4-pi))) - sqrt(M*pi/(4-pi))).

    ``f2 >= f1`` holds exactly when the outage probability at threshold
    ``gamma`` is at most epsilon.
    """
    m = np.asarray(m_rf, dtype=float)
    if np.any(m <= 0.0):
        raise ValueError("element count must be positive")
    arg = 2.0 * np.sqrt(gamma / (n_antennas * gamma0 * m * (4.0 - np.pi)))
    arg = arg - np.sqrt(m * np.pi / (4.0 - np.pi))
    out = q_function(arg)
    return out.item() if out.ndim == 0 else out
