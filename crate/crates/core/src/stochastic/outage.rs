use crate::error::{Error, Result};
use crate::geometry::ArrayConfig;
use crate::noma::{analysis_coefficients, outage_thresholds, LinkBudget, PowerAllocation};
use crate::resolution::{tau_for_distances, LemmaVariant};

use super::poisson::{poisson_count_pmf, regularized_lower_gamma, LineProcessConfig};
use super::quartic::{outage_boundary_roots, OutageQuartic};

/// Poisson tail mass below which the count sum is truncated.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// `tau` at the segment midpoint above which the small-`tau` closed form is
/// flagged as outside its regime.
pub const TAU_VALIDITY_LIMIT: f64 = 0.1;

const SCAN_POINTS: usize = 4096;

/// Closed interval `[start, end]` of distances behind the legacy user, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        (self.end - self.start).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, r: f64) -> bool {
        self.start <= r && r <= self.end
    }
}

fn merge(mut v: Vec<Interval>) -> Vec<Interval> {
    v.retain(|i| i.end >= i.start);
    v.sort_by(|a, b| a.start.total_cmp(&b.start));
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for i in v {
        match out.last_mut() {
            Some(last) if i.start <= last.end => last.end = last.end.max(i.end),
            _ => out.push(i),
        }
    }
    out
}

/// Distances `r` in `[0, R_D - r_L]` for which the NOMA user is in outage,
/// given the two positive roots `z1 >= z2 > 0` of the outage quartic:
/// `[max(0, 1/z2 - r_L), R_D - r_L]` together with
/// `[0, min(max(0, 1/z1 - r_L), R_D - r_L)]`.
pub fn outage_region(z1: f64, z2: f64, r_legacy: f64, cell_radius: f64) -> Vec<Interval> {
    let len = cell_radius - r_legacy;
    let far = Interval {
        start: (1.0 / z2 - r_legacy).max(0.0),
        end: len,
    };
    let near_end = (1.0 / z1 - r_legacy).max(0.0).min(len);
    let mut parts = vec![far];
    // a zero-length near interval at r = 0 carries no probability
    if near_end > 0.0 {
        parts.push(Interval { start: 0.0, end: near_end });
    }
    merge(parts)
}

/// Outage set found by scanning the sign of the quartic along the segment and
/// bisecting each sign change. Independent of the root finder.
pub fn outage_region_by_scan(q: &OutageQuartic, segment_length: f64) -> Vec<Interval> {
    let rl = q.r_legacy;
    let f = |r: f64| q.eval(1.0 / (rl + r)) <= 0.0;
    let h = segment_length / SCAN_POINTS as f64;
    let mut out = Vec::new();
    let mut start = if f(0.0) { Some(0.0) } else { None };
    let mut prev_r = 0.0;
    let mut prev_in = f(0.0);
    for i in 1..=SCAN_POINTS {
        let r = if i == SCAN_POINTS { segment_length } else { i as f64 * h };
        let inside = f(r);
        if inside != prev_in {
            // bisect on [prev_r, r]
            let (mut lo, mut hi) = (prev_r, r);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if f(mid) == prev_in {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let edge = 0.5 * (lo + hi);
            if inside {
                start = Some(edge);
            } else if let Some(s) = start.take() {
                out.push(Interval { start: s, end: edge });
            }
        }
        prev_r = r;
        prev_in = inside;
    }
    if let Some(s) = start {
        out.push(Interval {
            start: s,
            end: segment_length,
        });
    }
    merge(out)
}

/// Single legacy user, 1-D Poisson NOMA users on its ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineScenario {
    pub array: ArrayConfig,
    pub process: LineProcessConfig,
    pub power: PowerAllocation,
    pub budget: LinkBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutageMethod {
    ClosedForm {
        variant: LemmaVariant,
        /// The quartic did not have exactly two positive roots and the
        /// outage set came from a sign scan.
        scan_fallback: bool,
    },
    /// Power split cannot meet the target for any channel.
    AlwaysOutage,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageResult {
    pub probability: f64,
    pub method: OutageMethod,
    /// Monte Carlo trials; 0 for analytic results.
    pub trials: u64,
    /// 95% normal-approximation half-width; 0 for analytic results.
    pub ci_halfwidth: f64,
    /// `R (1 - P_out)`.
    pub outage_rate_bpcu: f64,
    /// Segment-midpoint `tau` exceeded [`TAU_VALIDITY_LIMIT`].
    pub tau_flag: bool,
    /// The analytic value left `[0, 1]` and was clamped.
    pub clamped: bool,
}

impl OutageResult {
    pub(crate) fn monte_carlo(outages: u64, trials: u64, rate: f64) -> Self {
        let p = outages as f64 / trials as f64;
        Self {
            probability: p,
            method: OutageMethod::MonteCarlo,
            trials,
            ci_halfwidth: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
            outage_rate_bpcu: rate * (1.0 - p),
            tau_flag: false,
            clamped: false,
        }
    }
}

/// `tau` between the legacy user and a NOMA user at the segment midpoint.
pub fn midpoint_tau(array: &ArrayConfig, process: &LineProcessConfig) -> f64 {
    let rl = process.legacy_radius;
    tau_for_distances(array, process.theta0, rl, rl + 0.5 * process.segment_length()).abs()
}

/// Closed-form outage probability of the k-th nearest neighbour:
///
/// `sum_{i<k} P(K=i) + sum_{i>=k} P(K=i) sum_{[a,b] in region} (P(k, lambda b) - P(k, lambda a))`
///
/// with `K ~ Poisson(lambda (R_D - r_L))`.
pub fn outage_closed_form(s: &LineScenario, variant: LemmaVariant, tail_tolerance: f64) -> Result<OutageResult> {
    let proc_ = &s.process;
    let rate = s.budget.target_rate_bpcu;
    let tau_flag = midpoint_tau(&s.array, proc_) > TAU_VALIDITY_LIMIT;
    let thresholds = match outage_thresholds(&s.power, &s.budget) {
        Ok(t) => t,
        Err(Error::AlwaysOutage { .. }) => {
            return Ok(OutageResult {
                probability: 1.0,
                method: OutageMethod::AlwaysOutage,
                trials: 0,
                ci_halfwidth: 0.0,
                outage_rate_bpcu: 0.0,
                tau_flag,
                clamped: false,
            })
        }
        Err(e) => return Err(e),
    };
    let coef = analysis_coefficients(&s.array, proc_.theta0, &s.budget, variant)?;
    let roots = outage_boundary_roots(coef.eta1, coef.eta2, thresholds.eps2, proc_.legacy_radius)?;
    let len = proc_.segment_length();
    let (region, scan_fallback) = match roots.positive_pair() {
        Ok((z1, z2)) => (outage_region(z1, z2, proc_.legacy_radius, proc_.cell_radius), false),
        Err(Error::NoPositiveRoots { .. }) => (outage_region_by_scan(&roots.quartic, len), true),
        Err(e) => return Err(e),
    };

    let k = proc_.neighbor_index;
    let lam = proc_.density;
    let mean = proc_.mean_count();
    let head: f64 = (0..k as u64).map(|i| poisson_count_pmf(mean, i)).sum();
    let tail = poisson_tail(mean, k as u64, tail_tolerance);
    let bracket: f64 = region
        .iter()
        .map(|iv| regularized_lower_gamma(k, lam * iv.end) - regularized_lower_gamma(k, lam * iv.start))
        .sum();
    let raw = head + tail * bracket;
    let probability = raw.clamp(0.0, 1.0);
    Ok(OutageResult {
        probability,
        method: OutageMethod::ClosedForm { variant, scan_fallback },
        trials: 0,
        ci_halfwidth: 0.0,
        outage_rate_bpcu: rate * (1.0 - probability),
        tau_flag,
        clamped: probability != raw,
    })
}

/// `sum_{i >= k} P(K = i)`, stopped once a geometric bound on the remaining
/// mass drops below `tol`.
fn poisson_tail(mean: f64, k: u64, tol: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut i = k;
    let mut term = poisson_count_pmf(mean, i);
    loop {
        sum += term;
        let ratio = mean / (i + 1) as f64;
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < tol {
            break;
        }
        i += 1;
        term *= mean / i as f64;
        if term == 0.0 && i as f64 > mean {
            break;
        }
    }
    sum
}
