//! Near-field beam resolution and NOMA outage analysis for uniform linear
//! arrays.
//!
//! * [`geometry`]: array layout, polar/Cartesian positions, element distances.
//! * [`channel`]: spherical-wave steering vectors, path loss, beam gains.
//! * [`resolution`]: the correlation `Delta` between two beams on one ray and
//!   its quadratic-phase, small-`tau` and continuum approximations.
//! * [`noma`]: NOMA/SIC rates, outage thresholds, analysis coefficients.
//! * [`stochastic`]: Poisson user placement, closed-form and Monte Carlo outage.

pub mod channel;
pub mod error;
pub mod fresnel;
pub mod geometry;
pub mod noma;
pub mod resolution;
pub mod stochastic;

pub use channel::{beam_gain, channel_vector, path_loss, steering_vector, ChannelVector, DistanceModel, SteeringVector};
pub use error::{Error, Result};
pub use geometry::{
    approx_distance, cartesian_to_polar, exact_distance, polar_to_cartesian, rayleigh_distance, ArrayConfig,
    CartesianPosition, PolarPosition, SPEED_OF_LIGHT,
};
pub use noma::{
    analysis_coefficients, dbm_to_watts, legacy_own_rate, legacy_sic_rate, noma_rate, outage_thresholds,
    AnalysisCoefficients, LinkBudget, NetworkSnapshot, OutageThresholds, PowerAllocation,
};
pub use resolution::{
    delta_exact, delta_fresnel_integral, delta_fresnel_sum, delta_lemma1, delta_limit, monotonicity_shape, tau,
    LemmaVariant, ResolutionReport, TauParams,
};
pub use stochastic::{LineProcessConfig, LineScenario, OutageMethod, OutageResult};
