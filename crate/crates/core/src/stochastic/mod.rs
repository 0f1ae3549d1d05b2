//! Random NOMA-user placement and outage analysis.
//!
//! The single-beam analysis places NOMA users as a 1-D Poisson process on the
//! segment between the legacy user and the cell edge, along the legacy user's
//! beam. Its closed form reduces the outage event to the sign of a quartic in
//! `x = 1/(r_L + r)`; the Monte Carlo estimators evaluate the exact rates.

mod montecarlo;
mod outage;
mod poisson;
mod quartic;

pub use montecarlo::{
    legacy_semicircle, outage_monte_carlo_cluster, outage_monte_carlo_cluster_sweep, outage_monte_carlo_line,
    outage_monte_carlo_line_sweep, trial_rng, ClusterCenter, ClusterProcessConfig, Selection,
};
pub use outage::{
    midpoint_tau, outage_closed_form, outage_region, outage_region_by_scan, Interval, LineScenario, OutageMethod,
    OutageResult, DEFAULT_TAIL_TOLERANCE, TAU_VALIDITY_LIMIT,
};
pub use poisson::{neighbor_cdf, neighbor_pdf, poisson_count_pmf, regularized_lower_gamma, LineProcessConfig};
pub use quartic::{outage_boundary_roots, polynomial_real_roots, BoundaryRoots, OutageQuartic};
