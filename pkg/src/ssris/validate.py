"""Monte Carlo and matrix-level oracles for the analytic results.

``empirical_outage`` estimates the faded-link outage by drawing fading
magnitudes and counting threshold crossings; the sampling is partitioned
into fixed-size blocks whose substreams are keyed by (seed, block index),
so the result is byte-identical no matter how many worker streams run.
The ``verify_*`` routines rebuild channels as explicit matrices and check
the closed-form SNR/power identities end to end.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator, List, Optional, Sequence

import numpy as np

from . import backend
from .model import LinkGeometry, SystemParams, derive_constants
from .outage import outage_model, outage_probability, truncated_gaussian_cdf
from .phys import (
    array_response,
    los_channel,
    mrt_precoder,
    nlos_channel,
    optimal_phases,
    simulate_link,
)

#: Samples per RNG block. Fixed, so the sample->substream mapping never
#: depends on the worker count.
BLOCK_SAMPLES = 1 << 16


@dataclass(frozen=True)
class McConfig:
    """Sample count, seed, and worker parallelism of a Monte Carlo run."""

    num_samples: int = 1_000_000
    seed: int = 12345
    num_streams: int = 1

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        if self.num_streams < 1:
            raise ValueError("num_streams must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class McReport:
    """Empirical vs analytic outage at one (element count, threshold) point."""

    m_elements: int
    gamma: float
    empirical_outage: float
    analytic_outage: float
    abs_gap: float
    binomial_stderr: float
    num_samples: int
    ks_distance: Optional[float] = None


def _block_bitgen(seed: int, block_index: int) -> np.random.Philox:
    return np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(block_index,)))


def _block_sums(m_elements: int, cfg: McConfig) -> Iterator[np.ndarray]:
    """Per-block fading-magnitude sums, yielded in block order."""
    counts = []
    remaining = cfg.num_samples
    while remaining > 0:
        counts.append(min(BLOCK_SAMPLES, remaining))
        remaining -= counts[-1]

    def run(block_index: int) -> np.ndarray:
        return backend.rayleigh_block_sums(
            _block_bitgen(cfg.seed, block_index), counts[block_index], m_elements
        )

    if cfg.num_streams == 1:
        for b in range(len(counts)):
            yield run(b)
    else:
        with ThreadPoolExecutor(max_workers=cfg.num_streams) as pool:
            futures = [pool.submit(run, b) for b in range(len(counts))]
            for fut in futures:
                yield fut.result()


def rayleigh_sum_samples(m_elements: int, cfg: McConfig) -> np.ndarray:
    """All Y samples of a run as one array (for distribution-level checks)."""
    return np.concatenate(list(_block_sums(m_elements, cfg)))


def _ks_distance(sorted_y: np.ndarray, model) -> float:
    n = sorted_y.size
    cdf = truncated_gaussian_cdf(sorted_y, model)
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - cdf), np.max(cdf - (steps - 1.0 / n))))


def empirical_outage_curve(
    params: SystemParams,
    geom: LinkGeometry,
    m_elements: int,
    gammas: Sequence[float],
    cfg: McConfig,
    with_ks: bool = False,
) -> List[McReport]:
    """One Monte Carlo pass evaluated against several SNR thresholds.

    The fading samples are shared across thresholds; the instantaneous
    SNR is gamma0*N*Y^2, so outage counting happens in Y space.
    """
    if m_elements < 1:
        raise ValueError("m_elements must be >= 1")
    gammas = [float(g) for g in gammas]
    if any(g < 0.0 for g in gammas):
        raise ValueError("SNR thresholds must be nonnegative")
    consts = derive_constants(params, geom)
    n = params.num_bs_antennas
    model = outage_model(m_elements)
    y_thresholds = [math.sqrt(g / (n * consts.gamma0)) for g in gammas]
    counts = np.zeros(len(gammas), dtype=np.int64)
    kept: List[np.ndarray] = []
    for y in _block_sums(m_elements, cfg):
        for i, thr in enumerate(y_thresholds):
            counts[i] += int(np.count_nonzero(y < thr))
        if with_ks:
            kept.append(y)
    ks = None
    if with_ks:
        ks = _ks_distance(np.sort(np.concatenate(kept)), model)
    reports = []
    for gamma, count in zip(gammas, counts):
        p_hat = int(count) / cfg.num_samples
        analytic = float(outage_probability(gamma, model, consts.gamma0, n))
        reports.append(
            McReport(
                m_elements=m_elements,
                gamma=gamma,
                empirical_outage=p_hat,
                analytic_outage=analytic,
                abs_gap=abs(p_hat - analytic),
                binomial_stderr=math.sqrt(p_hat * (1.0 - p_hat) / cfg.num_samples),
                num_samples=cfg.num_samples,
                ks_distance=ks,
            )
        )
    return reports


def empirical_outage(
    params: SystemParams,
    geom: LinkGeometry,
    m_elements: int,
    gamma: float,
    cfg: McConfig,
    with_ks: bool = False,
) -> McReport:
    """Empirical outage probability at a single SNR threshold."""
    return empirical_outage_curve(params, geom, m_elements, [gamma], cfg, with_ks)[0]


def sample_fading(m_elements: int, rng: np.random.Generator) -> np.ndarray:
    """One CN(0, I) fading vector (unit variance per complex entry)."""
    if m_elements < 1:
        raise ValueError("m_elements must be >= 1")
    return (rng.standard_normal(m_elements) + 1j * rng.standard_normal(m_elements)) / math.sqrt(2.0)


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of a batch of matrix-pipeline identity checks."""

    trials: int
    failed_trials: tuple
    max_rel_err_snr: float
    max_rel_err_power: float
    max_rel_err_alignment: Optional[float] = None

    @property
    def passed(self) -> bool:
        return not self.failed_trials


def _random_geometry(rng: np.random.Generator) -> LinkGeometry:
    # Angles clear of grazing, distances at deployment scale.
    return LinkGeometry(
        psi_rad=float(rng.uniform(-1.3, 1.3)),
        theta_rad=float(rng.uniform(-1.3, 1.3)),
        d_sr_m=float(rng.uniform(5.0, 100.0)),
        d_rd_m=float(rng.uniform(5.0, 100.0)),
    )


def verify_los_identities(
    params: SystemParams,
    n_antennas: int,
    m_elements: int,
    trials: int,
    seed: int = 0,
    rel_tol: float = 1e-9,
) -> IdentityReport:
    """Check SNR = gamma0*N*M^2 and harvested power = P*N*M*rho_sr by
    running the full matrix pipeline on random geometries."""
    p = replace(params, num_bs_antennas=n_antennas)
    rng = np.random.default_rng(seed)
    failed = []
    worst_snr = 0.0
    worst_pow = 0.0
    for trial in range(trials):
        geom = _random_geometry(rng)
        consts = derive_constants(p, geom)
        chan = los_channel(p, geom, m_elements)
        phi = optimal_phases(chan.u1)
        w = mrt_precoder(chan.H, phi)
        got_snr, got_pow = simulate_link(p, chan, phi, w)
        want_snr = consts.gamma0 * n_antennas * m_elements ** 2
        want_pow = p.tx_power_w * n_antennas * m_elements * consts.rho_sr
        err_snr = abs(got_snr - want_snr) / want_snr
        err_pow = abs(got_pow - want_pow) / want_pow
        worst_snr = max(worst_snr, err_snr)
        worst_pow = max(worst_pow, err_pow)
        if err_snr > rel_tol or err_pow > rel_tol:
            failed.append(trial)
    return IdentityReport(
        trials=trials,
        failed_trials=tuple(failed),
        max_rel_err_snr=worst_snr,
        max_rel_err_power=worst_pow,
    )


def verify_nlos_identities(
    params: SystemParams,
    n_antennas: int,
    m_elements: int,
    trials: int,
    seed: int = 0,
    rel_tol: float = 1e-9,
) -> IdentityReport:
    """Check SNR = gamma0*N*(sum |fading|)^2, full harvested power, and
    that the MRT precoder stays collinear with the BS steering vector."""
    p = replace(params, num_bs_antennas=n_antennas)
    rng = np.random.default_rng(seed)
    failed = []
    worst_snr = 0.0
    worst_pow = 0.0
    worst_align = 0.0
    sqrt_n = math.sqrt(n_antennas)
    for trial in range(trials):
        geom = _random_geometry(rng)
        consts = derive_constants(p, geom)
        fading = sample_fading(m_elements, rng)
        chan = nlos_channel(p, geom, fading)
        phi = optimal_phases(chan.u1)
        w = mrt_precoder(chan.H, phi)
        got_snr, got_pow = simulate_link(p, chan, phi, w)
        want_snr = consts.gamma0 * n_antennas * float(np.sum(np.abs(fading))) ** 2
        want_pow = p.tx_power_w * n_antennas * m_elements * consts.rho_sr
        a_n = array_response(n_antennas, geom.psi_rad)
        err_snr = abs(got_snr - want_snr) / want_snr
        err_pow = abs(got_pow - want_pow) / want_pow
        err_align = abs(abs(np.vdot(a_n, w)) - sqrt_n) / sqrt_n
        worst_snr = max(worst_snr, err_snr)
        worst_pow = max(worst_pow, err_pow)
        worst_align = max(worst_align, err_align)
        if err_snr > rel_tol or err_pow > rel_tol or err_align > rel_tol:
            failed.append(trial)
    return IdentityReport(
        trials=trials,
        failed_trials=tuple(failed),
        max_rel_err_snr=worst_snr,
        max_rel_err_power=worst_pow,
        max_rel_err_alignment=worst_align,
    )
