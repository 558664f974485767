"""System parameters, link geometry, and derived link-budget constants.

Everything downstream (channel construction, outage analysis, the element
solvers) consumes only the quantities defined here: the free-space path
gains of the two hops, the normalized single-element SNR ``gamma0``, and
the harvesting-difficulty constant ``alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Angles this close to grazing incidence are rejected: the cosine element
# gain vanishes and the model leaves its domain.
GRAZING_MARGIN_RAD = 1e-9


class GeometryError(ValueError):
    """Link geometry outside the cosine-gain domain (endpoint behind a surface)."""


def thermal_noise_psd(noise_figure_db: float = 0.0) -> float:
    """One-sided noise PSD in W/Hz: thermal floor -174 dBm/Hz plus a noise figure."""
    return 10.0 ** ((-174.0 + noise_figure_db) / 10.0) * 1e-3


@dataclass(frozen=True)
class SystemParams:
    """Scalar radio and harvesting parameters.

    Defaults reproduce the reference operating point used throughout the
    test suite: 15 GHz carrier, 50 MHz bandwidth, 128 BS antennas, 65 %
    harvesting efficiency, 2 uW per reflecting element, 0.1 W transmit
    power, and a 50 m square deployment region.
    """

    carrier_freq_hz: float = 15e9
    bandwidth_hz: float = 50e6
    noise_psd_w_per_hz: float = thermal_noise_psd()
    num_bs_antennas: int = 128
    harvest_efficiency: float = 0.65
    element_power_w: float = 2e-6
    tx_power_w: float = 0.1
    area_side_m: float = 50.0

    def __post_init__(self):
        positive = {
            "carrier_freq_hz": self.carrier_freq_hz,
            "bandwidth_hz": self.bandwidth_hz,
            "noise_psd_w_per_hz": self.noise_psd_w_per_hz,
            "harvest_efficiency": self.harvest_efficiency,
            "element_power_w": self.element_power_w,
            "area_side_m": self.area_side_m,
        }
        for name, value in positive.items():
            if not value > 0.0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        # tx_power_w == 0 is allowed so signal-level routines can express the
        # no-power limit; derived constants require it strictly positive.
        if self.tx_power_w < 0.0:
            raise ValueError(f"tx_power_w must be >= 0, got {self.tx_power_w!r}")
        if self.harvest_efficiency > 1.0:
            raise ValueError("harvest_efficiency must be in (0, 1]")
        if int(self.num_bs_antennas) != self.num_bs_antennas or self.num_bs_antennas < 1:
            raise ValueError("num_bs_antennas must be an integer >= 1")


@dataclass(frozen=True)
class LinkGeometry:
    """Angles and distances of the two hops (BS->surface, surface->UE).

    ``psi_rad`` is the azimuth of the surface seen from the BS broadside
    (equivalently, the incidence azimuth at the surface since the two
    planes are parallel); ``theta_rad`` is the azimuth of the UE seen from
    the surface normal. Coordinates are retained when the geometry was
    built from positions, purely for reporting.
    """

    psi_rad: float
    theta_rad: float
    d_sr_m: float
    d_rd_m: float
    bs_pos: Optional[Tuple[float, float]] = None
    ue_pos: Optional[Tuple[float, float]] = None
    ris_pos: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not self.d_sr_m > 0.0:
            raise ValueError(f"d_sr_m must be positive, got {self.d_sr_m!r}")
        if not self.d_rd_m > 0.0:
            raise ValueError(f"d_rd_m must be positive, got {self.d_rd_m!r}")
        limit = math.pi / 2.0 - GRAZING_MARGIN_RAD
        for name, angle in (("psi_rad", self.psi_rad), ("theta_rad", self.theta_rad)):
            if not abs(angle) < limit:
                raise GeometryError(
                    f"{name}={angle!r} outside (-pi/2, pi/2): endpoint behind the surface"
                )


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived from one (params, geometry) pair.

    ``gamma0`` is the normalized single-element SNR P*rho0/(B*N0);
    ``alpha`` is the harvesting-difficulty constant
    P0/(eta*P*N*rho_sr) -- small alpha means favorable harvesting.
    """

    lambda_m: float
    rho_sr: float
    rho_rd: float
    rho0: float
    gamma0: float
    alpha: float


def wavelength(freq_hz: float) -> float:
    """Free-space wavelength in meters."""
    if not freq_hz > 0.0:
        raise ValueError(f"frequency must be positive, got {freq_hz!r}")
    return SPEED_OF_LIGHT_M_S / freq_hz


def fspl(angle_rad: float, distance_m: float, lambda_m: float) -> float:
    """Free-space path gain with a cosine element-gain pattern.

    rho(angle, d) = lambda^2 / (4 pi d)^2 * pi * cos(angle), valid for
    |angle| < pi/2.
    """
    if not distance_m > 0.0:
        raise ValueError(f"distance must be positive, got {distance_m!r}")
    if not lambda_m > 0.0:
        raise ValueError(f"wavelength must be positive, got {lambda_m!r}")
    if not abs(angle_rad) < math.pi / 2.0 - GRAZING_MARGIN_RAD:
        raise GeometryError(f"angle {angle_rad!r} outside the cosine-gain domain")
    amp = lambda_m / (4.0 * math.pi * distance_m)
    return amp * amp * math.pi * math.cos(angle_rad)


def _signed_angle_from(normal: Tuple[float, float], vec: Tuple[float, float]) -> float:
    nx, ny = normal
    vx, vy = vec
    return math.atan2(nx * vy - ny * vx, nx * vx + ny * vy)


def geometry_from_positions(
    bs: Sequence[float],
    ue: Sequence[float],
    ris: Sequence[float],
    normal: Sequence[float] = (0.0, 1.0),
) -> LinkGeometry:
    """Build a LinkGeometry from 2-D coordinates.

    The surface normal (shared by the BS broadside and the surface, which
    are parallel) defaults to +y. Angles are the signed azimuths of the
    BS->surface and surface->UE rays relative to that normal; geometries
    with either ray at or beyond grazing raise :class:`GeometryError`.
    """
    bx, by = float(bs[0]), float(bs[1])
    ux, uy = float(ue[0]), float(ue[1])
    rx, ry = float(ris[0]), float(ris[1])
    nx, ny = float(normal[0]), float(normal[1])
    n_len = math.hypot(nx, ny)
    if n_len == 0.0:
        raise ValueError("surface normal must be nonzero")
    sr = (rx - bx, ry - by)
    rd = (ux - rx, uy - ry)
    d_sr = math.hypot(*sr)
    d_rd = math.hypot(*rd)
    if d_sr == 0.0 or d_rd == 0.0:
        raise ValueError("surface position must be distinct from BS and UE")
    psi = _signed_angle_from((nx, ny), sr)
    theta = _signed_angle_from((nx, ny), rd)
    return LinkGeometry(
        psi_rad=psi,
        theta_rad=theta,
        d_sr_m=d_sr,
        d_rd_m=d_rd,
        bs_pos=(bx, by),
        ue_pos=(ux, uy),
        ris_pos=(rx, ry),
    )


def default_geometry(area_side_m: float = 50.0) -> LinkGeometry:
    """Symmetric broadside reference geometry: both hops at zero azimuth
    and half the region side, which keeps both angles comfortably inside
    the valid domain."""
    half = area_side_m / 2.0
    return LinkGeometry(psi_rad=0.0, theta_rad=0.0, d_sr_m=half, d_rd_m=half)


def derive_constants(params: SystemParams, geom: LinkGeometry) -> DerivedConstants:
    """Compute wavelength, the two hop path gains, gamma0, and alpha."""
    if not params.tx_power_w > 0.0:
        raise ValueError("derived constants require tx_power_w > 0")
    lam = wavelength(params.carrier_freq_hz)
    rho_sr = fspl(geom.psi_rad, geom.d_sr_m, lam)
    rho_rd = fspl(geom.theta_rad, geom.d_rd_m, lam)
    rho0 = rho_sr * rho_rd
    gamma0 = params.tx_power_w * rho0 / (params.bandwidth_hz * params.noise_psd_w_per_hz)
    alpha = params.element_power_w / (
        params.harvest_efficiency * params.tx_power_w * params.num_bs_antennas * rho_sr
    )
    return DerivedConstants(
        lambda_m=lam,
        rho_sr=rho_sr,
        rho_rd=rho_rd,
        rho0=rho0,
        gamma0=gamma0,
        alpha=alpha,
    )
