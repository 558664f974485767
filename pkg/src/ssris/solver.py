"""Minimum element counts for the four scheme/channel combinations.

Closed forms cover the line-of-sight problems (element splitting and time
splitting); the faded problems reduce to finding the minimum root of
``f2 - f1`` by a bracketing scan plus bisection. ``oracle_grid_search``
re-derives every answer by exhaustive integer search with forward
constraint evaluation only, as the independent check of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from . import outage
from .model import DerivedConstants, LinkGeometry, SystemParams, derive_constants
from .phys import LOS, NLOS

ES = "ES"
TS = "TS"

SCHEMES = (ES, TS)
CONDITIONS = (LOS, NLOS)

#: Ceiling of the geometric bracket scan; roots beyond it are reported as
#: infeasible-within-cap rather than searched unboundedly.
M_SCAN_MAX = 2 ** 24
#: Bisection stops once |f2 - f1| is below this...
GAP_TOL = 1e-10
#: ...and the bracketing interval is this small relative to the root.
INTERVAL_RTOL = 1e-9
#: Interior points probed inside the bracketing octave to keep a
#: non-monotone gap function from skipping an earlier root.
SUBSCAN_POINTS = 64


class SolverError(RuntimeError):
    """Base class for solver failures."""


class BracketNotFoundError(SolverError):
    """No sign change of f2 - f1 up to the scan ceiling."""

    def __init__(self, m_max: float):
        super().__init__(
            f"no feasibility crossing found for element counts up to {m_max:g}"
        )
        self.m_max = m_max


class InfeasibleWithinCapError(SolverError):
    """Exhaustive search exhausted its integer cap without a feasible point."""

    def __init__(self, m_cap: int):
        super().__init__(f"no feasible configuration within {m_cap} elements per pool")
        self.m_cap = m_cap


@dataclass(frozen=True)
class Diagnostics:
    """Relative constraint slacks at the reported operating point.

    Each slack is (achieved / required) - 1, nonnegative when feasible and
    zero (to round-off) at a binding constraint. Fields not applicable to
    the problem are None.
    """

    rate_slack: Optional[float] = None
    ss_slack: Optional[float] = None
    outage_slack: Optional[float] = None


@dataclass(frozen=True)
class FeasibilityResult:
    """Element counts solving one minimization problem.

    ``m_reflect``/``m_harvest`` are the continuous optima (integers after
    :func:`integerize`); ``m_total_int`` always carries the deployable
    integer total. For time splitting the harvest pool is empty and
    ``tau`` is the harvesting time fraction; for element splitting
    ``tau`` is 0.
    """

    scheme: str
    condition: str
    m_reflect: float
    m_harvest: float
    m_total: float
    m_total_int: int
    tau: float
    diagnostics: Diagnostics
    rate_target_bps: float
    epsilon: Optional[float]
    params: SystemParams = field(repr=False, compare=False)
    geom: LinkGeometry = field(repr=False, compare=False)


def _integer_pools(scheme: str, m_reflect: float, alpha: float) -> Tuple[int, int]:
    """Ceil the reflect pool, then size the harvest pool for that integer
    count (element splitting only): ceiling both pools independently can
    leave the integer reflect pool underpowered."""
    m_rf = math.ceil(m_reflect)
    if scheme == TS:
        return m_rf, 0
    return m_rf, math.ceil(alpha * m_rf)


def _es_ss_slack(params: SystemParams, consts: DerivedConstants, m_reflect, m_harvest) -> float:
    harvested = (
        params.harvest_efficiency
        * params.tx_power_w
        * consts.rho_sr
        * params.num_bs_antennas
        * m_harvest
    )
    return harvested / (m_reflect * params.element_power_w) - 1.0

def _ts_ss_slack(params: SystemParams, consts: DerivedConstants, tau: float) -> float:
    harvested = (
        tau
        * params.harvest_efficiency
        * params.tx_power_w
        * consts.rho_sr
        * params.num_bs_antennas
    )
    return harvested / ((1.0 - tau) * params.element_power_w) - 1.0


def _los_rate_slack(params, consts, m, tau, rate_target_bps) -> float:
    gain = consts.gamma0 * params.num_bs_antennas * m * m
    rate = (1.0 - tau) * params.bandwidth_hz * math.log2(1.0 + gain)
    return rate / rate_target_bps - 1.0


def _outage_slack(consts, params, gamma, m_reflect, epsilon) -> float:
    p = outage.outage_probability(
        gamma, outage.outage_model(m_reflect), consts.gamma0, params.num_bs_antennas
    )
    return 1.0 - p / epsilon


def _check_rate(rate_target_bps: float) -> None:
    if not rate_target_bps > 0.0:
        raise ValueError(f"rate target must be positive, got {rate_target_bps!r}")


def solve_p1(params: SystemParams, geom: LinkGeometry, rate_target_bps: float) -> FeasibilityResult:
    """Element splitting, line-of-sight link.

    Both constraints bind at the optimum:
    M_Rf = sqrt((2^(R0/B) - 1)/(N*gamma0)) and M_Hr = alpha * M_Rf.
    """
    _check_rate(rate_target_bps)
    consts = derive_constants(params, geom)
    gamma = outage.snr_threshold_es(rate_target_bps, params.bandwidth_hz)
    m_rf = math.sqrt(gamma / (params.num_bs_antennas * consts.gamma0))
    m_hr = consts.alpha * m_rf
    rf_i, hr_i = _integer_pools(ES, m_rf, consts.alpha)
    diag = Diagnostics(
        rate_slack=_los_rate_slack(params, consts, m_rf, 0.0, rate_target_bps),
        ss_slack=_es_ss_slack(params, consts, m_rf, m_hr),
    )
    return FeasibilityResult(
        scheme=ES,
        condition=LOS,
        m_reflect=m_rf,
        m_harvest=m_hr,
        m_total=m_rf + m_hr,
        m_total_int=rf_i + hr_i,
        tau=0.0,
        diagnostics=diag,
        rate_target_bps=rate_target_bps,
        epsilon=None,
        params=params,
        geom=geom,
    )


def solve_p2(params: SystemParams, geom: LinkGeometry, rate_target_bps: float) -> FeasibilityResult:
    """Time splitting, line-of-sight link.

    The harvesting fraction tau = alpha/(1+alpha) makes the
    self-sustainability constraint independent of the element count; the
    rate constraint then fixes M = sqrt((2^(R0/((1-tau)B)) - 1)/(N*gamma0)).
    """
    _check_rate(rate_target_bps)
    consts = derive_constants(params, geom)
    tau = consts.alpha / (1.0 + consts.alpha)
    gamma = outage.snr_threshold_ts(rate_target_bps, params.bandwidth_hz, tau)
    m = math.sqrt(gamma / (params.num_bs_antennas * consts.gamma0))
    diag = Diagnostics(
        rate_slack=_los_rate_slack(params, consts, m, tau, rate_target_bps),
        ss_slack=_ts_ss_slack(params, consts, tau),
    )
    return FeasibilityResult(
        scheme=TS,
        condition=LOS,
        m_reflect=m,
        m_harvest=0.0,
        m_total=m,
        m_total_int=math.ceil(m),
        tau=tau,
        diagnostics=diag,
        rate_target_bps=rate_target_bps,
        epsilon=None,
        params=params,
        geom=geom,
    )


def minimum_root(
    gamma: float,
    epsilon: float,
    gamma0: float,
    n_antennas: int,
    m_max: float = M_SCAN_MAX,
) -> float:
    """Minimum element count where f2 - f1 crosses zero.

    Geometric doubling locates the first sign-change octave (starting well
    below one element so sub-unity roots are not skipped), a linear
    sub-scan inside that octave guards against multiple roots, and
    bisection polishes to |f2 - f1| <= GAP_TOL with the interval below
    INTERVAL_RTOL relative. The returned point sits on the feasible side.
    """
    outage.check_epsilon(epsilon)

    def gap(m: float) -> float:
        return float(
            outage.f2(m, gamma, gamma0, n_antennas) - outage.f1(m, epsilon)
        )

    lo = 2.0 ** -20
    g_lo = gap(lo)
    while g_lo >= 0.0:
        # Root below the scan floor; slide down. The gap is negative in the
        # m -> 0 limit whenever gamma > 0, so this terminates.
        if lo < 1e-280:
            return lo
        lo *= 0.5
        g_lo = gap(lo)

    hi = lo
    g_hi = g_lo
    while g_hi < 0.0:
        if hi >= m_max:
            raise BracketNotFoundError(m_max)
        lo, g_lo = hi, g_hi
        hi = min(hi * 2.0, m_max)
        g_hi = gap(hi)

    # Linear sub-scan inside the bracketing octave: keep the earliest crossing.
    for m in np.linspace(lo, hi, SUBSCAN_POINTS + 2)[1:-1]:
        g_m = gap(float(m))
        if g_m >= 0.0:
            hi, g_hi = float(m), g_m
            break
        lo, g_lo = float(m), g_m

    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at floating-point resolution
            break
        g_mid = gap(mid)
        if g_mid >= 0.0:
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
        if abs(g_hi) <= GAP_TOL and (hi - lo) <= INTERVAL_RTOL * hi:
            break
    if abs(g_hi) > GAP_TOL:
        raise SolverError(
            f"bisection stalled: |f2 - f1| = {abs(g_hi):.3e} at m = {hi:.6g}"
        )
    return hi


def solve_p3(
    params: SystemParams,
    geom: LinkGeometry,
    rate_target_bps: float,
    epsilon: float,
    m_max: float = M_SCAN_MAX,
) -> FeasibilityResult:
    """Element splitting, faded link: outage at the full-bandwidth SNR
    threshold must stay within the margin."""
    _check_rate(rate_target_bps)
    spec = outage.OutageSpec(
        gamma_threshold=outage.snr_threshold_es(rate_target_bps, params.bandwidth_hz),
        epsilon=epsilon,
        rate_target_bps=rate_target_bps,
    )
    consts = derive_constants(params, geom)
    m_rf = minimum_root(
        spec.gamma_threshold, epsilon, consts.gamma0, params.num_bs_antennas, m_max
    )
    m_hr = consts.alpha * m_rf
    rf_i, hr_i = _integer_pools(ES, m_rf, consts.alpha)
    diag = Diagnostics(
        ss_slack=_es_ss_slack(params, consts, m_rf, m_hr),
        outage_slack=_outage_slack(consts, params, spec.gamma_threshold, m_rf, epsilon),
    )
    return FeasibilityResult(
        scheme=ES,
        condition=NLOS,
        m_reflect=m_rf,
        m_harvest=m_hr,
        m_total=m_rf + m_hr,
        m_total_int=rf_i + hr_i,
        tau=0.0,
        diagnostics=diag,
        rate_target_bps=rate_target_bps,
        epsilon=epsilon,
        params=params,
        geom=geom,
    )


def solve_p4(
    params: SystemParams,
    geom: LinkGeometry,
    rate_target_bps: float,
    epsilon: float,
    m_max: float = M_SCAN_MAX,
) -> FeasibilityResult:
    """Time splitting, faded link.

    The outage probability grows with tau, so tau is pinned at the
    self-sustainability optimum alpha/(1+alpha) before root-finding with
    the correspondingly raised SNR threshold.
    """
    _check_rate(rate_target_bps)
    consts = derive_constants(params, geom)
    tau = consts.alpha / (1.0 + consts.alpha)
    gamma = outage.snr_threshold_ts(rate_target_bps, params.bandwidth_hz, tau)
    spec = outage.OutageSpec(
        gamma_threshold=gamma, epsilon=epsilon, rate_target_bps=rate_target_bps
    )
    m = minimum_root(
        spec.gamma_threshold, epsilon, consts.gamma0, params.num_bs_antennas, m_max
    )
    diag = Diagnostics(
        ss_slack=_ts_ss_slack(params, consts, tau),
        outage_slack=_outage_slack(consts, params, gamma, m, epsilon),
    )
    return FeasibilityResult(
        scheme=TS,
        condition=NLOS,
        m_reflect=m,
        m_harvest=0.0,
        m_total=m,
        m_total_int=math.ceil(m),
        tau=tau,
        diagnostics=diag,
        rate_target_bps=rate_target_bps,
        epsilon=epsilon,
        params=params,
        geom=geom,
    )


def solve(
    params: SystemParams,
    geom: LinkGeometry,
    scheme: str,
    condition: str,
    rate_target_bps: float,
    epsilon: Optional[float] = None,
) -> FeasibilityResult:
    """Dispatch to the solver for a (scheme, channel condition) pair."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if condition not in CONDITIONS:
        raise ValueError(f"unknown channel condition {condition!r}")
    if condition == LOS:
        if scheme == ES:
            return solve_p1(params, geom, rate_target_bps)
        return solve_p2(params, geom, rate_target_bps)
    if epsilon is None:
        raise ValueError("faded-link problems require an outage margin")
    if scheme == ES:
        return solve_p3(params, geom, rate_target_bps, epsilon)
    return solve_p4(params, geom, rate_target_bps, epsilon)


def closed_form_totals(
    params: SystemParams, geom: LinkGeometry, rate_target_bps: float
) -> Tuple[float, float]:
    """Total minimum element counts (M_ES, M_TS) for the line-of-sight case.

    M_ES = (1+alpha) * sqrt((2^(R0/B)-1)/(N*gamma0)) grows linearly with
    the harvesting difficulty, M_TS = sqrt((2^(R0(1+alpha)/B)-1)/(N*gamma0))
    exponentially.
    """
    _check_rate(rate_target_bps)
    consts = derive_constants(params, geom)
    n_gamma0 = params.num_bs_antennas * consts.gamma0
    r_over_b = rate_target_bps / params.bandwidth_hz
    m_es = (1.0 + consts.alpha) * math.sqrt(math.expm1(math.log(2.0) * r_over_b) / n_gamma0)
    m_ts = math.sqrt(
        math.expm1(math.log(2.0) * r_over_b * (1.0 + consts.alpha)) / n_gamma0
    )
    return m_es, m_ts


def integerize(result: FeasibilityResult) -> FeasibilityResult:
    """Round a continuous result up to deployable integer pools.

    The reflect pool is ceiled; for element splitting the harvest pool is
    then re-sized for the integer reflect pool, so self-sustainability is
    re-established rather than assumed. All slacks are recomputed at the
    integer point (and can only be nonnegative there).
    """
    consts = derive_constants(result.params, result.geom)
    rf_i, hr_i = _integer_pools(result.scheme, result.m_reflect, consts.alpha)
    old = result.diagnostics
    rate_slack = None
    outage_slack = None
    if old.rate_slack is not None:
        rate_slack = _los_rate_slack(
            result.params, consts, float(rf_i), result.tau, result.rate_target_bps
        )
    if old.outage_slack is not None:
        gamma = (
            outage.snr_threshold_es(result.rate_target_bps, result.params.bandwidth_hz)
            if result.scheme == ES
            else outage.snr_threshold_ts(
                result.rate_target_bps, result.params.bandwidth_hz, result.tau
            )
        )
        outage_slack = _outage_slack(
            consts, result.params, gamma, float(rf_i), result.epsilon
        )
    if result.scheme == ES:
        ss_slack = _es_ss_slack(result.params, consts, float(rf_i), float(hr_i))
    else:
        ss_slack = _ts_ss_slack(result.params, consts, result.tau)
    return replace(
        result,
        m_reflect=float(rf_i),
        m_harvest=float(hr_i),
        m_total=float(rf_i + hr_i),
        m_total_int=rf_i + hr_i,
        diagnostics=Diagnostics(
            rate_slack=rate_slack, ss_slack=ss_slack, outage_slack=outage_slack
        ),
    )


def _oracle_result(params, geom, scheme, condition, rate, epsilon, m_rf, m_hr, tau, consts):
    diag_rate = None
    diag_outage = None
    if condition == LOS:
        diag_rate = _los_rate_slack(params, consts, float(m_rf), tau, rate)
    else:
        gamma = (
            outage.snr_threshold_es(rate, params.bandwidth_hz)
            if scheme == ES
            else outage.snr_threshold_ts(rate, params.bandwidth_hz, tau)
        )
        diag_outage = _outage_slack(consts, params, gamma, float(m_rf), epsilon)
    if scheme == ES:
        ss = _es_ss_slack(params, consts, float(m_rf), float(m_hr))
    else:
        ss = _ts_ss_slack(params, consts, tau)
    return FeasibilityResult(
        scheme=scheme,
        condition=condition,
        m_reflect=float(m_rf),
        m_harvest=float(m_hr),
        m_total=float(m_rf + m_hr),
        m_total_int=int(m_rf + m_hr),
        tau=tau,
        diagnostics=Diagnostics(rate_slack=diag_rate, ss_slack=ss, outage_slack=diag_outage),
        rate_target_bps=rate,
        epsilon=epsilon,
        params=params,
        geom=geom,
    )


def oracle_grid_search(
    params: SystemParams,
    geom: LinkGeometry,
    rate_target_bps: float,
    epsilon: Optional[float] = None,
    scheme: str = ES,
    condition: str = LOS,
    m_cap: int = 5000,
    tau_step: float = 1e-4,
) -> FeasibilityResult:
    """True integer minimum by exhaustive search over element counts
    (and a tau grid for time splitting).

    Constraints are evaluated forward only -- achievable rate, harvested
    power, and outage probability at each candidate -- never through the
    closed-form inverses this routine exists to check.
    """
    _check_rate(rate_target_bps)
    if condition == NLOS:
        if epsilon is None:
            raise ValueError("faded-link search requires an outage margin")
        outage.check_epsilon(epsilon)
    consts = derive_constants(params, geom)
    n = params.num_bs_antennas
    m_grid = np.arange(1, m_cap + 1, dtype=float)

    if scheme == ES:
        if condition == LOS:
            achieved = params.bandwidth_hz * np.log2(1.0 + consts.gamma0 * n * m_grid * m_grid)
            rf_ok = achieved >= rate_target_bps
        else:
            gamma = outage.snr_threshold_es(rate_target_bps, params.bandwidth_hz)
            p_out = outage.outage_probability(
                gamma, outage.outage_model(m_grid), consts.gamma0, n
            )
            rf_ok = p_out <= epsilon
        if not rf_ok.any():
            raise InfeasibleWithinCapError(m_cap)
        harvested = (
            params.harvest_efficiency
            * params.tx_power_w
            * consts.rho_sr
            * n
            * np.arange(0, m_cap + 1, dtype=float)
        )
        needed = m_grid * params.element_power_w
        hr_need = np.searchsorted(harvested, needed, side="left")
        feasible = rf_ok & (hr_need <= m_cap)
        if not feasible.any():
            raise InfeasibleWithinCapError(m_cap)
        totals = np.where(feasible, m_grid + hr_need, np.inf)
        best = int(np.argmin(totals))
        return _oracle_result(
            params, geom, ES, condition, rate_target_bps, epsilon,
            best + 1, int(hr_need[best]), 0.0, consts,
        )

    if scheme != TS:
        raise ValueError(f"unknown scheme {scheme!r}")
    taus = np.arange(1, int(round(1.0 / tau_step)), dtype=float) * tau_step
    per_element = (
        params.harvest_efficiency * params.tx_power_w * consts.rho_sr * n
    )
    ss_ok = taus * per_element >= (1.0 - taus) * params.element_power_w
    taus = taus[ss_ok]
    if taus.size == 0:
        raise InfeasibleWithinCapError(m_cap)
    if condition == LOS:
        achieved = params.bandwidth_hz * np.log2(1.0 + consts.gamma0 * n * m_grid * m_grid)
        required = rate_target_bps / (1.0 - taus)
        idx = np.searchsorted(achieved, required, side="left")
        ok = idx < m_cap
        if not ok.any():
            raise InfeasibleWithinCapError(m_cap)
        m_need = np.where(ok, idx + 1, m_cap + 1)
    else:
        gammas = np.expm1(np.log(2.0) * rate_target_bps / ((1.0 - taus) * params.bandwidth_hz))

        def p_out_at(m_vec):
            return outage.outage_probability(
                gammas, outage.outage_model(m_vec), consts.gamma0, n
            )

        ok = p_out_at(np.full(taus.shape, float(m_cap))) <= epsilon
        if not ok.any():
            raise InfeasibleWithinCapError(m_cap)
        lo = np.ones(taus.shape, dtype=np.int64)
        hi = np.full(taus.shape, m_cap, dtype=np.int64)
        while np.any(lo < hi):
            mid = (lo + hi) // 2
            good = p_out_at(mid.astype(float)) <= epsilon
            hi = np.where(good, mid, hi)
            lo = np.where(good, lo, mid + 1)
        m_need = np.where(ok, lo, m_cap + 1)
    best = int(np.argmin(m_need))
    if m_need[best] > m_cap:
        raise InfeasibleWithinCapError(m_cap)
    return _oracle_result(
        params, geom, TS, condition, rate_target_bps, epsilon,
        int(m_need[best]), 0, float(taus[best]), consts,
    )
