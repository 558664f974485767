"""Channel matrices, beamforming, and signal-level evaluation.

The BS->surface hop is always line-of-sight; the surface->UE hop is
either line-of-sight or faded. For both cases the Gram matrix of the
cascaded channel is rank one, so its dominant eigenpair is available in
closed form and is stored on the :class:`ChannelRealization`. The
matrix-product path (:func:`simulate_link`) exists to verify those
closed forms, never to replace them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .model import LinkGeometry, SystemParams, derive_constants

LOS = "LOS"
NLOS = "NLOS"

#: Element spacing of every array, in wavelengths.
DEFAULT_SPACING = 0.5


@dataclass(frozen=True)
class ChannelRealization:
    """One realization of the cascaded BS->surface->UE channel.

    ``H = diag(g) @ G^H`` and ``(lambda1, u1)`` is the dominant eigenpair
    of ``H @ H^H``, exact by construction.
    """

    G: np.ndarray
    g: np.ndarray
    H: np.ndarray
    lambda1: float
    u1: np.ndarray
    condition: str
    fading: Optional[np.ndarray] = None

    @property
    def num_antennas(self) -> int:
        return self.G.shape[0]

    @property
    def num_elements(self) -> int:
        return self.G.shape[1]


@dataclass(frozen=True)
class BeamformingSolution:
    """Phase shifts, precoder, and the resulting link figures."""

    w: np.ndarray
    phi: np.ndarray
    snr: float
    harvested_power_w: float
    rate_bps: float


def array_response(size: int, angle_rad: float, spacing_wavelengths: float = DEFAULT_SPACING) -> np.ndarray:
    """Unit-modulus steering vector with linear azimuth phase progression.

    The scene is coplanar, so only the horizontal index accumulates phase.
    """
    if size < 1:
        raise ValueError(f"array size must be >= 1, got {size!r}")
    idx = np.arange(size)
    return np.exp(2j * np.pi * spacing_wavelengths * math.sin(angle_rad) * idx)


def _bs_ris_channel(params, geom, m_elements, ref_phase_sr):
    consts = derive_constants(params, geom)
    a_n = array_response(params.num_bs_antennas, geom.psi_rad)
    a_m_sr = array_response(m_elements, geom.psi_rad)
    G = math.sqrt(consts.rho_sr) * np.exp(-1j * ref_phase_sr) * np.outer(a_n, a_m_sr)
    return consts, a_m_sr, G


def los_channel(
    params: SystemParams,
    geom: LinkGeometry,
    m_elements: int,
    ref_phase_sr: float = 0.0,
    ref_phase_rd: float = 0.0,
) -> ChannelRealization:
    """Pure line-of-sight realization on both hops.

    The dominant eigenvalue is ``rho0 * N * M`` and the eigenvector is the
    conjugate-steered surface->UE response, both stored exactly.
    """
    if m_elements < 1:
        raise ValueError(f"m_elements must be >= 1, got {m_elements!r}")
    consts, a_m_sr, G = _bs_ris_channel(params, geom, m_elements, ref_phase_sr)
    a_m_rd = array_response(m_elements, geom.theta_rad)
    g = math.sqrt(consts.rho_rd) * np.exp(-1j * ref_phase_rd) * a_m_rd
    H = g[:, None] * G.conj().T
    a_bar = g * np.conj(a_m_sr)
    u1 = a_bar / math.sqrt(consts.rho_rd * m_elements)
    lambda1 = consts.rho0 * params.num_bs_antennas * m_elements
    return ChannelRealization(G=G, g=g, H=H, lambda1=lambda1, u1=u1, condition=LOS)


def nlos_channel(
    params: SystemParams,
    geom: LinkGeometry,
    fading: np.ndarray,
    ref_phase_sr: float = 0.0,
) -> ChannelRealization:
    """Faded surface->UE hop: ``g = sqrt(rho_rd) * fading``.

    The eigenpair follows from the auxiliary vector
    ``diag(fading) @ conj(a_M(psi))``, whose entries keep the fading
    magnitudes; ``lambda1 = rho0 * N * sum |fading_m|^2``.
    """
    fading = np.asarray(fading, dtype=complex)
    if fading.ndim != 1 or fading.size < 1:
        raise ValueError("fading must be a nonempty 1-D complex vector")
    m_elements = fading.size
    consts, a_m_sr, G = _bs_ris_channel(params, geom, m_elements, ref_phase_sr)
    a_til = fading * np.conj(a_m_sr)
    a_norm = np.linalg.norm(a_til)
    if a_norm == 0.0:
        raise ValueError("all-zero fading vector: dominant eigenvector undefined")
    g = math.sqrt(consts.rho_rd) * fading
    H = g[:, None] * G.conj().T
    u1 = a_til / a_norm
    lambda1 = consts.rho0 * params.num_bs_antennas * float(np.sum(np.abs(fading) ** 2))
    return ChannelRealization(
        G=G, g=g, H=H, lambda1=lambda1, u1=u1, condition=NLOS, fading=fading
    )


def optimal_phases(u1: np.ndarray) -> np.ndarray:
    """Phase shifts aligned with the dominant eigenvector: exp(j*angle(u1))."""
    mods = np.abs(u1)
    if np.any(mods == 0.0):
        raise ValueError("eigenvector has a zero entry: phase undefined")
    return u1 / mods


def mrt_precoder(H: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Maximum-ratio transmission against the effective channel phi^H H."""
    row = np.conj(phi) @ H
    nrm = np.linalg.norm(row)
    if nrm == 0.0:
        raise ValueError("effective channel phi^H H is zero: precoder undefined")
    return np.conj(row) / nrm


def snr(params: SystemParams, chan: ChannelRealization, phi: np.ndarray) -> float:
    """Receive SNR under MRT: P * lambda1 * |phi^H u1|^2 / (B * N0)."""
    proj = np.vdot(phi, chan.u1)
    return float(
        params.tx_power_w
        * chan.lambda1
        * abs(proj) ** 2
        / (params.bandwidth_hz * params.noise_psd_w_per_hz)
    )


def harvested_power(params: SystemParams, chan: ChannelRealization, w: np.ndarray) -> float:
    """Power collected by the surface: P * ||G^H w||^2."""
    return float(params.tx_power_w * np.linalg.norm(chan.G.conj().T @ w) ** 2)


def rate_los(params: SystemParams, geom: LinkGeometry, m_elements):
    """Achievable rate with m reflecting elements on a line-of-sight link.

    Accepts a scalar or an array of element counts.
    """
    consts = derive_constants(params, geom)
    m = np.asarray(m_elements, dtype=float)
    gain = consts.gamma0 * params.num_bs_antennas * m * m
    out = params.bandwidth_hz * np.log2(1.0 + gain)
    return out.item() if out.ndim == 0 else out


def simulate_link(
    params: SystemParams,
    chan: ChannelRealization,
    phi: np.ndarray,
    w: np.ndarray,
) -> Tuple[float, float]:
    """Evaluate SNR and harvested power by explicit matrix products.

    No analytic shortcut is taken: the SNR comes from |phi^H (H w)|^2 and
    the harvested power from ||G^H w||^2, making this the brute-force
    oracle for :func:`snr` and :func:`harvested_power`.
    """
    through = chan.H @ w
    eff = np.vdot(phi, through)
    snr_value = float(
        params.tx_power_w
        * abs(eff) ** 2
        / (params.bandwidth_hz * params.noise_psd_w_per_hz)
    )
    collected = float(params.tx_power_w * np.linalg.norm(chan.G.conj().T @ w) ** 2)
    return snr_value, collected


def design_beamforming(params: SystemParams, chan: ChannelRealization) -> BeamformingSolution:
    """Aligned phases plus MRT precoder, with the resulting link figures."""
    phi = optimal_phases(chan.u1)
    w = mrt_precoder(chan.H, phi)
    gamma = snr(params, chan, phi)
    collected = harvested_power(params, chan, w)
    rate = float(params.bandwidth_hz * np.log2(1.0 + gamma))
    return BeamformingSolution(
        w=w, phi=phi, snr=gamma, harvested_power_w=collected, rate_bps=rate
    )
