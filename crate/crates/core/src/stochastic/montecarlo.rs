//! Monte Carlo outage estimators with exact steering vectors.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, trial)`, and
//! outage counts are reduced as integers, so results do not depend on the
//! number of worker threads. A sweep over link budgets reuses the same
//! geometry draws for every budget.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::channel::{correlation, path_loss_at, steering_vector, DistanceModel, SteeringVector};
use crate::error::{invalid, Result};
use crate::geometry::{ArrayConfig, PolarPosition};
use crate::noma::{noma_sinr, rate_bpcu, EffectiveGains, LinkBudget, PowerAllocation};

use super::outage::{LineScenario, OutageResult};
use super::poisson::LineProcessConfig;

/// Independent random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    // mean > 0 and finite, checked by the callers' configs
    Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0)
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    Ok(())
}

/// Runs `trials` independent trials; each reports, per budget, whether the
/// scheduled user is in outage (`None` means no user could be scheduled).
fn run_trials<F>(trials: u64, budgets: &[LinkBudget], power: &PowerAllocation, trial: F) -> Vec<OutageResult>
where
    F: Fn(u64) -> Option<EffectiveGains> + Sync,
{
    let nb = budgets.len();
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; nb],
            |mut acc, t| {
                match trial(t) {
                    None => acc.iter_mut().for_each(|c| *c += 1),
                    Some(g) => {
                        for (c, lb) in acc.iter_mut().zip(budgets) {
                            if rate_bpcu(noma_sinr(g, power, lb)) < lb.target_rate_bpcu {
                                *c += 1;
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; nb],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    counts
        .into_iter()
        .zip(budgets)
        .map(|(c, lb)| OutageResult::monte_carlo(c, trials, lb.target_rate_bpcu))
        .collect()
}

/// Line-process outage for several link budgets on common draws.
///
/// Per trial: `K ~ Poisson(lambda L)`; fewer than `k` users is an outage;
/// otherwise the k-th nearest of `K` uniform points on the segment is placed
/// at `(r_L + d_k, theta_0)` and its exact single-beam NOMA rate is compared
/// with each budget's target.
pub fn outage_monte_carlo_line_sweep(
    array: &ArrayConfig,
    process: &LineProcessConfig,
    power: &PowerAllocation,
    budgets: &[LinkBudget],
    trials: u64,
    seed: u64,
) -> Result<Vec<OutageResult>> {
    check_trials(trials)?;
    let legacy = PolarPosition::new(process.legacy_radius, process.theta0)?;
    let beam = steering_vector(array, &legacy, DistanceModel::Exact)?;
    let len = process.segment_length();
    let mean = process.mean_count();
    let k = process.neighbor_index as usize;
    let n = array.n_elements() as f64;

    Ok(run_trials(trials, budgets, power, |t| {
        let mut rng = trial_rng(seed, t);
        let count = poisson_count(mean, &mut rng);
        if count < k {
            return None;
        }
        let mut d: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * len).collect();
        let (_, &mut d_k, _) = d.select_nth_unstable_by(k - 1, f64::total_cmp);
        let r = process.legacy_radius + d_k;
        // r >= r_L, which already passed the aperture check via the beam
        let user = PolarPosition::new(r, process.theta0).ok()?;
        let b = steering_vector(array, &user, DistanceModel::Exact).ok()?;
        let corr = correlation(&beam, &b).ok()?;
        Some(EffectiveGains {
            serving: n * path_loss_at(array, r) * corr,
            interference: 0.0,
        })
    }))
}

pub fn outage_monte_carlo_line(s: &LineScenario, trials: u64, seed: u64) -> Result<OutageResult> {
    let mut v = outage_monte_carlo_line_sweep(&s.array, &s.process, &s.power, &[s.budget], trials, seed)?;
    Ok(v.remove(0))
}

/// Where the cluster centre is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusterCenter {
    /// Uniform over the disc of radius `R_D - R_c`, so every user is in the cell.
    Shrunk,
    /// Uniform over the whole cell; users falling outside it are discarded.
    Clip,
    /// Fixed centre, Cartesian metres.
    Fixed { x: f64, y: f64 },
}

/// How the scheduled NOMA user and its beam are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Largest `N gamma_k |b_m^H b_k|^2` over all users and beams.
    EffectiveGain,
    /// Largest path gain `N gamma_k`, then that user's best beam.
    RawGain,
}

/// Poisson cluster of NOMA users served by `M` legacy beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterProcessConfig {
    /// Users per square metre inside the cluster disc.
    pub density: f64,
    pub cluster_radius: f64,
    pub cell_radius: f64,
    pub legacy_count: usize,
    pub legacy_radius: f64,
    pub center: ClusterCenter,
    pub selection: Selection,
}

impl ClusterProcessConfig {
    pub fn new(density: f64, cluster_radius: f64, cell_radius: f64, legacy_count: usize, legacy_radius: f64) -> Result<Self> {
        if !(density.is_finite() && density >= 0.0) {
            return Err(invalid("density", format!("must be non-negative, got {density}")));
        }
        if !(cluster_radius.is_finite() && cluster_radius > 0.0 && cluster_radius < cell_radius) {
            return Err(invalid("cluster_radius", "must be positive and below the cell radius"));
        }
        if !cell_radius.is_finite() {
            return Err(invalid("cell_radius", "must be finite"));
        }
        if legacy_count == 0 {
            return Err(invalid("legacy_count", "must be at least 1"));
        }
        if !(legacy_radius.is_finite() && legacy_radius > 0.0) {
            return Err(invalid("legacy_radius", format!("must be positive, got {legacy_radius}")));
        }
        Ok(Self {
            density,
            cluster_radius,
            cell_radius,
            legacy_count,
            legacy_radius,
            center: ClusterCenter::Shrunk,
            selection: Selection::EffectiveGain,
        })
    }

    pub fn mean_count(&self) -> f64 {
        self.density * PI * self.cluster_radius * self.cluster_radius
    }
}

/// `M` legacy users at `theta_m = -pi/2 + pi m / (M + 1)`, `m = 1..M`.
pub fn legacy_semicircle(count: usize, radius: f64) -> Result<Vec<PolarPosition>> {
    (1..=count)
        .map(|m| PolarPosition::new(radius, -PI / 2.0 + PI * m as f64 / (count as f64 + 1.0)))
        .collect()
}

fn uniform_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> (f64, f64) {
    let rho = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    let (s, c) = phi.sin_cos();
    (rho * c, rho * s)
}

struct Candidate {
    metric: f64,
    gains: EffectiveGains,
}

/// Cluster-process outage for several link budgets on common draws.
///
/// Users behind the array plane are mirrored to the front (a linear array
/// cannot tell them apart); users inside the aperture are skipped. A trial
/// with no schedulable user is an outage.
pub fn outage_monte_carlo_cluster_sweep(
    array: &ArrayConfig,
    cluster: &ClusterProcessConfig,
    power: &PowerAllocation,
    budgets: &[LinkBudget],
    trials: u64,
    seed: u64,
) -> Result<Vec<OutageResult>> {
    check_trials(trials)?;
    let legacy = legacy_semicircle(cluster.legacy_count, cluster.legacy_radius)?;
    let beams: Vec<SteeringVector> = legacy
        .iter()
        .map(|p| steering_vector(array, p, DistanceModel::Exact))
        .collect::<Result<_>>()?;
    let mean = cluster.mean_count();
    let half = array.half_aperture();
    let n = array.n_elements() as f64;

    Ok(run_trials(trials, budgets, power, |t| {
        let mut rng = trial_rng(seed, t);
        let (cx, cy) = match cluster.center {
            ClusterCenter::Shrunk => uniform_in_disc(&mut rng, cluster.cell_radius - cluster.cluster_radius),
            ClusterCenter::Clip => uniform_in_disc(&mut rng, cluster.cell_radius),
            ClusterCenter::Fixed { x, y } => (x, y),
        };
        let count = poisson_count(mean, &mut rng);
        let mut best: Option<Candidate> = None;
        let mut corr = vec![0.0; beams.len()];
        for _ in 0..count {
            let (dx, dy) = uniform_in_disc(&mut rng, cluster.cluster_radius);
            let (x, y) = ((cx + dx).abs(), cy + dy);
            let r = x.hypot(y);
            if matches!(cluster.center, ClusterCenter::Clip) && r > cluster.cell_radius {
                continue;
            }
            if x == 0.0 || r <= half {
                continue;
            }
            let Ok(user) = PolarPosition::new(r, y.atan2(x)) else {
                continue;
            };
            let Ok(b) = steering_vector(array, &user, DistanceModel::Exact) else {
                continue;
            };
            for (c, beam) in corr.iter_mut().zip(&beams) {
                *c = correlation(beam, &b).unwrap_or(0.0);
            }
            let n_gamma = n * path_loss_at(array, r);
            let m = (0..corr.len()).max_by(|&a, &b| corr[a].total_cmp(&corr[b]).then(b.cmp(&a))).unwrap_or(0);
            let metric = match cluster.selection {
                Selection::EffectiveGain => n_gamma * corr[m],
                Selection::RawGain => n_gamma,
            };
            if best.as_ref().is_none_or(|b| metric > b.metric) {
                best = Some(Candidate {
                    metric,
                    gains: EffectiveGains::from_correlations(n_gamma, &corr, m),
                });
            }
        }
        best.map(|c| c.gains)
    }))
}

pub fn outage_monte_carlo_cluster(
    array: &ArrayConfig,
    cluster: &ClusterProcessConfig,
    power: &PowerAllocation,
    budget: &LinkBudget,
    trials: u64,
    seed: u64,
) -> Result<OutageResult> {
    let mut v = outage_monte_carlo_cluster_sweep(array, cluster, power, &[*budget], trials, seed)?;
    Ok(v.remove(0))
}
