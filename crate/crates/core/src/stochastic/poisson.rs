use crate::error::{invalid, Result};

/// 1-D homogeneous Poisson process of NOMA users behind the legacy user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineProcessConfig {
    /// Users per metre.
    pub density: f64,
    /// Legacy user's distance to the array, m.
    pub legacy_radius: f64,
    /// Cell radius, m.
    pub cell_radius: f64,
    /// Common angle of the legacy user and the segment, rad.
    pub theta0: f64,
    /// Which nearest neighbour of the legacy user is scheduled (1-based).
    pub neighbor_index: u32,
}

impl LineProcessConfig {
    pub fn new(density: f64, legacy_radius: f64, cell_radius: f64, theta0: f64, neighbor_index: u32) -> Result<Self> {
        if !(density.is_finite() && density >= 0.0) {
            return Err(invalid("density", format!("must be non-negative, got {density}")));
        }
        if !(legacy_radius.is_finite() && legacy_radius > 0.0) {
            return Err(invalid("legacy_radius", format!("must be positive, got {legacy_radius}")));
        }
        if !(cell_radius.is_finite() && cell_radius > legacy_radius) {
            return Err(invalid("cell_radius", "must exceed the legacy radius"));
        }
        if !(theta0.is_finite() && theta0.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(invalid("theta0", format!("must lie in (-pi/2, pi/2), got {theta0}")));
        }
        if neighbor_index == 0 {
            return Err(invalid("neighbor_index", "must be at least 1"));
        }
        Ok(Self {
            density,
            legacy_radius,
            cell_radius,
            theta0,
            neighbor_index,
        })
    }

    /// `R_D - r_L`.
    pub fn segment_length(&self) -> f64 {
        self.cell_radius - self.legacy_radius
    }

    /// Mean number of users on the segment.
    pub fn mean_count(&self) -> f64 {
        self.density * self.segment_length()
    }
}

fn ln_factorial(i: u64) -> f64 {
    (2..=i).map(|k| (k as f64).ln()).sum()
}

/// `e^{-mean} mean^i / i!`, evaluated in log space.
pub fn poisson_count_pmf(mean: f64, i: u64) -> f64 {
    if mean == 0.0 {
        return if i == 0 { 1.0 } else { 0.0 };
    }
    (-mean + i as f64 * mean.ln() - ln_factorial(i)).exp()
}

/// Regularized lower incomplete gamma `P(k, x)` for integer `k >= 1`.
pub fn regularized_lower_gamma(k: u32, x: f64) -> f64 {
    debug_assert!(k >= 1);
    if x <= 0.0 {
        return 0.0;
    }
    let k = k as u64;
    if x < k as f64 {
        // P(k, x) = sum_{i >= k} pmf(x, i); terms decay geometrically past x
        let mut term = poisson_count_pmf(x, k);
        let mut sum = 0.0;
        let mut i = k;
        while term > 0.0 {
            sum += term;
            i += 1;
            term *= x / i as f64;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum.min(1.0)
    } else {
        let head: f64 = (0..k).map(|i| poisson_count_pmf(x, i)).sum();
        (1.0 - head).clamp(0.0, 1.0)
    }
}

/// CDF of the distance from the legacy user to its k-th nearest neighbour.
pub fn neighbor_cdf(cfg: &LineProcessConfig, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    regularized_lower_gamma(cfg.neighbor_index, cfg.density * r)
}

/// Erlang(k, lambda) density `e^{-lambda r} lambda^k r^{k-1} / (k-1)!`.
pub fn neighbor_pdf(cfg: &LineProcessConfig, r: f64) -> f64 {
    let k = cfg.neighbor_index as u64;
    let lam = cfg.density;
    if r < 0.0 || lam == 0.0 {
        return 0.0;
    }
    if r == 0.0 {
        return if k == 1 { lam } else { 0.0 };
    }
    (-lam * r + k as f64 * lam.ln() + (k - 1) as f64 * r.ln() - ln_factorial(k - 1)).exp()
}
