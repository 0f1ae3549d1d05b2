//! Distance-domain resolution of near-field beams.
//!
//! `Delta = |b(psi_1)^H b(psi_2)|^2` for two users on the same ray. When both
//! distances scale with the Rayleigh distance, `r_i = beta_i d_Ray`, the
//! correlation collapses onto a quadratic-phase sum governed by the single
//! parameter `tau = cos^2(theta_0) (1/beta_1 - 1/beta_2)`, and for small `tau`
//! onto `1 - c(N) tau^2`.
//!
//! Two small-`tau` coefficients are provided. [`LemmaVariant::Paper`] is the
//! published closed form; [`LemmaVariant::Taylor`] keeps the `x^2 / 2` term of
//! the cosine expansion. [`adjudicate_lemma_variant`] decides between them
//! against the quadratic-phase sum and the Fresnel-integral continuum limit.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::channel::{correlation, steering_vector, DistanceModel, NeumaierSum};
use crate::error::{invalid, Error, Result};
use crate::fresnel::fresnel_cs;
use crate::geometry::{ArrayConfig, PolarPosition};

/// Which small-`tau` coefficient to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaVariant {
    /// `pi^2 (N+1)(26N^2-38) / (5760 (N-1)^3)`, limit `13 pi^2 / 2880`.
    Paper,
    /// Second-order Taylor coefficient, limit `pi^2 / 720`.
    Taylor,
}

impl LemmaVariant {
    pub const ALL: [LemmaVariant; 2] = [LemmaVariant::Paper, LemmaVariant::Taylor];

    pub fn name(self) -> &'static str {
        match self {
            LemmaVariant::Paper => "paper",
            LemmaVariant::Taylor => "taylor",
        }
    }
}

impl std::str::FromStr for LemmaVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(LemmaVariant::Paper),
            "taylor" => Ok(LemmaVariant::Taylor),
            other => Err(invalid("variant", format!("expected `paper` or `taylor`, got `{other}`"))),
        }
    }
}

/// Common angle and the two distances as fractions of the Rayleigh distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauParams {
    pub theta0: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl TauParams {
    pub fn new(theta0: f64, beta1: f64, beta2: f64) -> Result<Self> {
        if !theta0.is_finite() {
            return Err(invalid("theta0", "must be finite"));
        }
        for (name, b) in [("beta1", beta1), ("beta2", beta2)] {
            if !(b.is_finite() && b > 0.0) {
                return Err(invalid(name, format!("must be positive, got {b}")));
            }
        }
        Ok(Self { theta0, beta1, beta2 })
    }
}

/// `(1 - sin^2 theta_0)(1/beta_1 - 1/beta_2)`.
pub fn tau(params: &TauParams) -> f64 {
    let s = params.theta0.sin();
    (1.0 - s * s) * (1.0 / params.beta1 - 1.0 / params.beta2)
}

/// `tau` for absolute distances on the ray at `theta0`.
pub fn tau_for_distances(cfg: &ArrayConfig, theta0: f64, r1: f64, r2: f64) -> f64 {
    let s = theta0.sin();
    (1.0 - s * s) * cfg.rayleigh_distance() * (1.0 / r1 - 1.0 / r2)
}

/// `|b(p1)^H b(p2)|^2` with exact spherical-wave steering vectors.
pub fn delta_exact(cfg: &ArrayConfig, p1: &PolarPosition, p2: &PolarPosition) -> Result<f64> {
    let b1 = steering_vector(cfg, p1, DistanceModel::Exact)?;
    let b2 = steering_vector(cfg, p2, DistanceModel::Exact)?;
    correlation(&b1, &b2)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("n_elements", format!("need at least 2 elements, got {n}")));
    }
    Ok(())
}

/// `(1/N^2) |sum_k exp(j pi k^2 tau / (2 (N-1)^2))|^2` over
/// `k = -(N-1)/2, ..., (N-1)/2` in unit steps (half-integers for even N).
pub fn delta_fresnel_sum(n: usize, tau: f64) -> Result<f64> {
    check_n(n)?;
    let nm1 = (n - 1) as f64;
    let scale = PI * tau / (2.0 * nm1 * nm1);
    // fold the symmetric index set onto k >= 0
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    let (first, count) = if n % 2 == 1 {
        re.add(1.0);
        (1.0, (n - 1) / 2)
    } else {
        (0.5, n / 2)
    };
    for i in 0..count {
        let k = first + i as f64;
        let (s, c) = (scale * k * k).sin_cos();
        re.add(2.0 * c);
        im.add(2.0 * s);
    }
    let total = Complex64::new(re.total(), im.total());
    Ok(total.norm_sqr() / (n as f64 * n as f64))
}

/// `sum_{k=1}^n k^2`.
pub fn sum_of_squares(n: u64) -> u128 {
    let n = n as u128;
    n * (n + 1) * (2 * n + 1) / 6
}

/// `sum_{k=1}^n k^4`.
pub fn sum_of_fourth_powers(n: u64) -> u128 {
    let n = n as u128;
    n * (n + 1) * (2 * n + 1) * (3 * n * n + 3 * n - 1) / 30
}

/// `c(N)` in `Delta ≈ 1 - c(N) tau^2`.
pub fn deficit_coefficient(n: usize, variant: LemmaVariant) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    let nm1 = nf - 1.0;
    Ok(match variant {
        LemmaVariant::Paper => PI * PI * (nf + 1.0) * (26.0 * nf * nf - 38.0) / (5760.0 * nm1 * nm1 * nm1),
        LemmaVariant::Taylor => {
            // One-sided sums over k = 1..(N-1)/2. For odd N these are the
            // integer closed forms at n = (N-1)/2; the same polynomials in N
            // are exact over the half-integer index set of even N.
            let s2 = nf * (nf * nf - 1.0) / 24.0;
            let s4 = nf * (nf * nf - 1.0) * (3.0 * nf * nf - 7.0) / 480.0;
            PI * PI * (s4 / (2.0 * nf) - s2 * s2 / (nf * nf)) / (nm1 * nm1 * nm1 * nm1)
        }
    })
}

/// Small-`tau` approximation `1 - c(N) tau^2`. Not clamped.
pub fn delta_lemma1(n: usize, tau: f64, variant: LemmaVariant) -> Result<f64> {
    Ok(1.0 - deficit_coefficient(n, variant)? * tau * tau)
}

/// `N -> infinity` limit coefficient of [`deficit_coefficient`].
pub fn limit_coefficient(variant: LemmaVariant) -> f64 {
    match variant {
        LemmaVariant::Paper => 13.0 * PI * PI / 2880.0,
        LemmaVariant::Taylor => PI * PI / 720.0,
    }
}

/// Large-array limit `1 - c(inf) tau^2`. Not clamped.
pub fn delta_limit(tau: f64, variant: LemmaVariant) -> f64 {
    1.0 - limit_coefficient(variant) * tau * tau
}

/// Continuum limit of [`delta_fresnel_sum`]:
/// `|∫_{-1/2}^{1/2} exp(j pi tau u^2 / 2) du|^2 = (4/tau)(C^2 + S^2)(sqrt(tau)/2)`.
pub fn delta_fresnel_integral(tau: f64) -> f64 {
    let t = tau.abs();
    if t == 0.0 {
        return 1.0;
    }
    let (c, s) = fresnel_cs(t.sqrt() / 2.0);
    4.0 / t * (c * c + s * s)
}

/// `f(x) = (x+1)(26x^2-38)/(x-1)^3` and its derivative.
pub fn monotonicity_shape(x: f64) -> Result<(f64, f64)> {
    if !(x.is_finite() && x > 1.0) {
        return Err(Error::Pole { x });
    }
    let xm1 = x - 1.0;
    let f = (x + 1.0) * (26.0 * x * x - 38.0) / (xm1 * xm1 * xm1);
    let fp = (-104.0 * x * x + 24.0 * x + 152.0) / (xm1 * xm1 * xm1 * xm1);
    Ok((f, fp))
}

/// Largest root of the numerator of `f'`, `-104x^2 + 24x + 152`.
pub fn monotonicity_turning_point() -> f64 {
    (24.0 + (24.0f64 * 24.0 + 4.0 * 104.0 * 152.0).sqrt()) / 208.0
}

/// Every resolution estimate for one pair of users on a common ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionReport {
    pub tau: f64,
    pub delta_exact: f64,
    pub delta_fresnel_sum: f64,
    pub delta_lemma1_paper: f64,
    pub delta_lemma1_taylor: f64,
    pub delta_limit_paper: f64,
    pub delta_limit_taylor: f64,
    pub delta_fresnel_integral: f64,
}

impl ResolutionReport {
    /// True when any approximation left `[0, 1]` by more than rounding.
    pub fn out_of_range(&self) -> bool {
        [
            self.delta_fresnel_sum,
            self.delta_lemma1_paper,
            self.delta_lemma1_taylor,
            self.delta_limit_paper,
            self.delta_limit_taylor,
            self.delta_fresnel_integral,
        ]
        .iter()
        .any(|&d| !(-1e-12..=1.0 + 1e-12).contains(&d))
    }
}

/// Users at `r1`, `r2` metres on the ray `theta0`.
pub fn resolution_report(cfg: &ArrayConfig, theta0: f64, r1: f64, r2: f64) -> Result<ResolutionReport> {
    let n = cfg.n_elements();
    let p1 = PolarPosition::new(r1, theta0)?;
    let p2 = PolarPosition::new(r2, theta0)?;
    let t = tau_for_distances(cfg, theta0, r1, r2);
    Ok(ResolutionReport {
        tau: t,
        delta_exact: delta_exact(cfg, &p1, &p2)?,
        delta_fresnel_sum: delta_fresnel_sum(n, t)?,
        delta_lemma1_paper: delta_lemma1(n, t, LemmaVariant::Paper)?,
        delta_lemma1_taylor: delta_lemma1(n, t, LemmaVariant::Taylor)?,
        delta_limit_paper: delta_limit(t, LemmaVariant::Paper),
        delta_limit_taylor: delta_limit(t, LemmaVariant::Taylor),
        delta_fresnel_integral: delta_fresnel_integral(t),
    })
}

/// Array size used by the built-in adjudication run.
pub const ADJUDICATION_N: usize = 10_000;
/// `tau` values used by the built-in adjudication run.
pub const ADJUDICATION_TAUS: [f64; 3] = [0.005, 0.01, 0.02];
/// Relative tolerance on the deficit against the quadratic-phase sum.
pub const ADJUDICATION_SUM_TOL: f64 = 0.10;
/// Relative tolerance on the `tau^2` coefficient against the continuum limit.
pub const ADJUDICATION_INTEGRAL_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct AdjudicationPoint {
    pub tau: f64,
    pub sum_deficit: f64,
    pub integral_coefficient: f64,
    pub paper_deficit: f64,
    pub taylor_deficit: f64,
}

impl AdjudicationPoint {
    pub fn deficit(&self, v: LemmaVariant) -> f64 {
        match v {
            LemmaVariant::Paper => self.paper_deficit,
            LemmaVariant::Taylor => self.taylor_deficit,
        }
    }

    pub fn sum_rel_error(&self, v: LemmaVariant) -> f64 {
        (self.deficit(v) - self.sum_deficit).abs() / self.sum_deficit
    }

    pub fn integral_rel_error(&self, v: LemmaVariant) -> f64 {
        (limit_coefficient(v) - self.integral_coefficient).abs() / self.integral_coefficient
    }

    fn accepts(&self, v: LemmaVariant) -> bool {
        self.sum_rel_error(v) <= ADJUDICATION_SUM_TOL && self.integral_rel_error(v) <= ADJUDICATION_INTEGRAL_TOL
    }
}

/// Outcome of checking both small-`tau` variants against the exact reductions.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjudication {
    pub n: usize,
    pub points: Vec<AdjudicationPoint>,
    /// The unique variant passing every point, if exactly one does.
    pub selected: Option<LemmaVariant>,
}

impl Adjudication {
    pub fn passes(&self, v: LemmaVariant) -> bool {
        self.points.iter().all(|p| p.accepts(v))
    }
}

pub fn adjudicate_lemma_variant(n: usize, taus: &[f64]) -> Result<Adjudication> {
    let points = taus
        .iter()
        .map(|&t| {
            Ok(AdjudicationPoint {
                tau: t,
                sum_deficit: 1.0 - delta_fresnel_sum(n, t)?,
                integral_coefficient: (1.0 - delta_fresnel_integral(t)) / (t * t),
                paper_deficit: deficit_coefficient(n, LemmaVariant::Paper)? * t * t,
                taylor_deficit: deficit_coefficient(n, LemmaVariant::Taylor)? * t * t,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut adj = Adjudication { n, points, selected: None };
    let passing: Vec<_> = LemmaVariant::ALL.into_iter().filter(|&v| adj.passes(v)).collect();
    if passing.len() == 1 {
        adj.selected = Some(passing[0]);
    }
    Ok(adj)
}

/// The variant used by the closed-form analysis when none is requested:
/// the winner of [`adjudicate_lemma_variant`] at [`ADJUDICATION_N`] and
/// [`ADJUDICATION_TAUS`], or the published form if the run is inconclusive.
pub fn default_variant() -> LemmaVariant {
    static SELECTED: OnceLock<LemmaVariant> = OnceLock::new();
    *SELECTED.get_or_init(|| {
        adjudicate_lemma_variant(ADJUDICATION_N, &ADJUDICATION_TAUS)
            .ok()
            .and_then(|a| a.selected)
            .unwrap_or(LemmaVariant::Paper)
    })
}
