"""Element-count feasibility of self-sustainable reflecting surfaces.

A surface that powers its own phase-shift electronics from harvested RF
energy can split resources between harvesting and reflecting either
across elements (ES) or across time (TS). This package computes the
minimum element count meeting a rate or outage target under either
scheme, for line-of-sight and Rayleigh-faded user links, and validates
every closed form against matrix simulation and Monte Carlo.
"""

from .backend import BACKEND
from .model import (
    DerivedConstants,
    GeometryError,
    LinkGeometry,
    SystemParams,
    default_geometry,
    derive_constants,
    fspl,
    geometry_from_positions,
    thermal_noise_psd,
    wavelength,
)
from .outage import (
    OutageModel,
    OutageSpec,
    f1,
    f2,
    gamma_for_outage,
    outage_model,
    outage_probability,
    q_function,
    q_inverse,
    snr_threshold_es,
    snr_threshold_ts,
    truncated_gaussian_cdf,
)
from .phys import (
    LOS,
    NLOS,
    BeamformingSolution,
    ChannelRealization,
    array_response,
    design_beamforming,
    harvested_power,
    los_channel,
    mrt_precoder,
    nlos_channel,
    optimal_phases,
    rate_los,
    simulate_link,
    snr,
)
from .solver import (
    ES,
    TS,
    BracketNotFoundError,
    Diagnostics,
    FeasibilityResult,
    InfeasibleWithinCapError,
    SolverError,
    closed_form_totals,
    integerize,
    minimum_root,
    oracle_grid_search,
    solve,
    solve_p1,
    solve_p2,
    solve_p3,
    solve_p4,
)
from .validate import (
    IdentityReport,
    McConfig,
    McReport,
    empirical_outage,
    empirical_outage_curve,
    rayleigh_sum_samples,
    sample_fading,
    verify_los_identities,
    verify_nlos_identities,
)

__version__ = "0.1.0"
