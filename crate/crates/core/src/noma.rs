//! Rates of a legacy user and a NOMA user sharing the legacy user's
//! preconfigured (matched) beam, with inter-beam interference.
//!
//! All rates are `log2(1 + SINR)` in bits per channel use.

use crate::channel::{correlation, path_loss, path_loss_at, steering_vector, DistanceModel, SteeringVector};
use crate::error::{invalid, Error, Result};
use crate::geometry::{ArrayConfig, PolarPosition};
use crate::resolution::{deficit_coefficient, LemmaVariant};

/// Power split on one beam; `alpha_legacy + alpha_noma = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    alpha_noma: f64,
}

impl PowerAllocation {
    pub fn new(alpha_noma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_noma) {
            return Err(invalid("alpha_noma", format!("must lie in [0, 1], got {alpha_noma}")));
        }
        Ok(Self { alpha_noma })
    }

    pub fn alpha_noma(&self) -> f64 {
        self.alpha_noma
    }

    pub fn alpha_legacy(&self) -> f64 {
        1.0 - self.alpha_noma
    }
}

impl Default for PowerAllocation {
    fn default() -> Self {
        Self { alpha_noma: 0.8 }
    }
}

/// Per-beam transmit power, receiver noise power and NOMA target rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p_tx_watts: f64,
    pub p_noise_watts: f64,
    pub target_rate_bpcu: f64,
}

impl LinkBudget {
    pub fn new(p_tx_watts: f64, p_noise_watts: f64, target_rate_bpcu: f64) -> Result<Self> {
        for (name, v) in [
            ("p_tx_watts", p_tx_watts),
            ("p_noise_watts", p_noise_watts),
            ("target_rate_bpcu", target_rate_bpcu),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            p_tx_watts,
            p_noise_watts,
            target_rate_bpcu,
        })
    }

    pub fn from_dbm(p_tx_dbm: f64, p_noise_dbm: f64, target_rate_bpcu: f64) -> Result<Self> {
        Self::new(dbm_to_watts(p_tx_dbm), dbm_to_watts(p_noise_dbm), target_rate_bpcu)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Legacy users with their matched beams and the candidate NOMA users.
#[derive(Debug, Clone)]
pub struct NetworkSnapshot {
    cfg: ArrayConfig,
    legacy_positions: Vec<PolarPosition>,
    beams: Vec<SteeringVector>,
    noma_positions: Vec<PolarPosition>,
    noma_steering: Vec<SteeringVector>,
}

impl NetworkSnapshot {
    /// Beams are the exact steering vectors of the legacy positions.
    pub fn new(cfg: ArrayConfig, legacy_positions: Vec<PolarPosition>, noma_positions: Vec<PolarPosition>) -> Result<Self> {
        let beams = legacy_positions
            .iter()
            .map(|p| steering_vector(&cfg, p, DistanceModel::Exact))
            .collect::<Result<Vec<_>>>()?;
        let noma_steering = noma_positions
            .iter()
            .map(|p| steering_vector(&cfg, p, DistanceModel::Exact))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cfg,
            legacy_positions,
            beams,
            noma_positions,
            noma_steering,
        })
    }

    pub fn cfg(&self) -> &ArrayConfig {
        &self.cfg
    }

    pub fn legacy_positions(&self) -> &[PolarPosition] {
        &self.legacy_positions
    }

    pub fn noma_positions(&self) -> &[PolarPosition] {
        &self.noma_positions
    }

    pub fn beams(&self) -> &[SteeringVector] {
        &self.beams
    }

    fn beam(&self, m: usize) -> Result<&SteeringVector> {
        self.beams.get(m).ok_or(Error::Index {
            what: "beam",
            index: m,
            len: self.beams.len(),
        })
    }

    fn noma(&self, k: usize) -> Result<(&PolarPosition, &SteeringVector)> {
        match (self.noma_positions.get(k), self.noma_steering.get(k)) {
            (Some(p), Some(b)) => Ok((p, b)),
            _ => Err(Error::Index {
                what: "NOMA user",
                index: k,
                len: self.noma_positions.len(),
            }),
        }
    }

    /// Gains `|b_i^H b(target)|^2` of every beam towards `target`.
    fn beam_correlations(&self, target: &SteeringVector) -> Result<Vec<f64>> {
        self.beams.iter().map(|b| correlation(b, target)).collect()
    }
}

/// Received powers normalised by the per-beam transmit power: the serving
/// beam's `N gamma G_m` and the interfering beams' `N gamma sum_{i != m} G_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveGains {
    pub serving: f64,
    pub interference: f64,
}

impl EffectiveGains {
    /// Splits correlations into serving and interfering parts for beam `m`.
    pub fn from_correlations(n_gamma: f64, correlations: &[f64], m: usize) -> Self {
        let interference: f64 = correlations
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != m)
            .map(|(_, g)| g)
            .sum();
        Self {
            serving: n_gamma * correlations[m],
            interference: n_gamma * interference,
        }
    }
}

/// SINR of the first-decoded (NOMA) message.
#[inline]
pub fn noma_sinr(g: EffectiveGains, pa: &PowerAllocation, lb: &LinkBudget) -> f64 {
    let p = lb.p_tx_watts;
    p * g.serving * pa.alpha_noma() / (p * g.serving * pa.alpha_legacy() + p * g.interference + lb.p_noise_watts)
}

/// SINR of the legacy message after the NOMA message is removed.
#[inline]
pub fn legacy_own_sinr(g: EffectiveGains, pa: &PowerAllocation, lb: &LinkBudget) -> f64 {
    let p = lb.p_tx_watts;
    p * g.serving * pa.alpha_legacy() / (p * g.interference + lb.p_noise_watts)
}

#[inline]
pub fn rate_bpcu(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// Rate of NOMA user `k` scheduled on beam `m`.
pub fn noma_rate(s: &NetworkSnapshot, k: usize, m: usize, pa: &PowerAllocation, lb: &LinkBudget) -> Result<f64> {
    s.beam(m)?;
    let (p, b) = s.noma(k)?;
    let n_gamma = s.cfg.n_elements() as f64 * path_loss(&s.cfg, p);
    let g = EffectiveGains::from_correlations(n_gamma, &s.beam_correlations(b)?, m);
    Ok(rate_bpcu(noma_sinr(g, pa, lb)))
}

fn legacy_gains(s: &NetworkSnapshot, m: usize) -> Result<EffectiveGains> {
    let own = s.beam(m)?;
    let n_gamma = s.cfg.n_elements() as f64 * path_loss(&s.cfg, &s.legacy_positions[m]);
    let mut corr = s.beam_correlations(own)?;
    // matched beam: |b_m^H b_m|^2 = 1
    corr[m] = 1.0;
    Ok(EffectiveGains::from_correlations(n_gamma, &corr, m))
}

/// Rate at which legacy user `m` decodes its NOMA partner's message (SIC stage).
pub fn legacy_sic_rate(s: &NetworkSnapshot, m: usize, pa: &PowerAllocation, lb: &LinkBudget) -> Result<f64> {
    Ok(rate_bpcu(noma_sinr(legacy_gains(s, m)?, pa, lb)))
}

/// Rate of legacy user `m`'s own message after SIC.
pub fn legacy_own_rate(s: &NetworkSnapshot, m: usize, pa: &PowerAllocation, lb: &LinkBudget) -> Result<f64> {
    Ok(rate_bpcu(legacy_own_sinr(legacy_gains(s, m)?, pa, lb)))
}

/// `eps1 = 2^R - 1` and `eps2 = P_N eps1 / (alpha_N - alpha_L eps1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageThresholds {
    pub eps1: f64,
    pub eps2: f64,
}

pub fn outage_thresholds(pa: &PowerAllocation, lb: &LinkBudget) -> Result<OutageThresholds> {
    let eps1 = lb.target_rate_bpcu.exp2() - 1.0;
    let margin = pa.alpha_noma() - pa.alpha_legacy() * eps1;
    if margin <= 0.0 {
        return Err(Error::AlwaysOutage { margin });
    }
    Ok(OutageThresholds {
        eps1,
        eps2: lb.p_noise_watts * eps1 / margin,
    })
}

/// Coefficients of the single-beam outage condition
/// `eta2 x^2 (1 - eta1 (1/r_L - x)^2) <= eps2`, `x = 1/(r_L + r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisCoefficients {
    /// `c(N) cos^4(theta_0) d_Ray^2`, m^2.
    pub eta1: f64,
    /// `P_S N c^2 / (16 pi^2 f_c^2)`, W m^2.
    pub eta2: f64,
}

impl AnalysisCoefficients {
    /// Small-`tau` model of `|b(r_L)^H b(r_L + r)|^2`.
    pub fn delta_model(&self, r_legacy: f64, r: f64) -> f64 {
        let u = 1.0 / r_legacy - 1.0 / (r_legacy + r);
        1.0 - self.eta1 * u * u
    }

    /// Whether the NOMA user `r` metres behind the legacy user is in outage
    /// under the small-`tau` model.
    pub fn outage_at(&self, eps2: f64, r_legacy: f64, r: f64) -> bool {
        let x = 1.0 / (r_legacy + r);
        self.eta2 * x * x * self.delta_model(r_legacy, r) <= eps2
    }
}

pub fn analysis_coefficients(cfg: &ArrayConfig, theta0: f64, lb: &LinkBudget, variant: LemmaVariant) -> Result<AnalysisCoefficients> {
    let s = theta0.sin();
    let cos2 = 1.0 - s * s;
    let d_ray = cfg.rayleigh_distance();
    let eta1 = deficit_coefficient(cfg.n_elements(), variant)? * cos2 * cos2 * d_ray * d_ray;
    // path_loss_at(r = 1) = c^2 / (16 pi^2 f_c^2)
    let eta2 = lb.p_tx_watts * cfg.n_elements() as f64 * path_loss_at(cfg, 1.0);
    Ok(AnalysisCoefficients { eta1, eta2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn mmwave(n: usize) -> ArrayConfig {
        ArrayConfig::half_wavelength(n, 28e9).unwrap()
    }

    fn budget(p_dbm: f64) -> LinkBudget {
        LinkBudget::from_dbm(p_dbm, -80.0, 0.5).unwrap()
    }

    #[test]
    fn units() {
        assert!((dbm_to_watts(-80.0) - 1e-11).abs() < 1e-25);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!(LinkBudget::new(0.0, 1.0, 1.0).is_err());
        assert!(PowerAllocation::new(1.2).is_err());
        let pa = PowerAllocation::default();
        assert_eq!(pa.alpha_noma() + pa.alpha_legacy(), 1.0);
    }

    #[test]
    fn zero_noma_power_gives_zero_rate() {
        let cfg = mmwave(65);
        let l = PolarPosition::new(20.0, 0.5).unwrap();
        let u = PolarPosition::new(35.0, 0.5).unwrap();
        let s = NetworkSnapshot::new(cfg, vec![l], vec![u]).unwrap();
        let pa = PowerAllocation::new(0.0).unwrap();
        assert_eq!(noma_rate(&s, 0, 0, &pa, &budget(20.0)).unwrap(), 0.0);
        assert_eq!(legacy_sic_rate(&s, 0, &pa, &budget(20.0)).unwrap(), 0.0);
        let pa = PowerAllocation::new(1.0).unwrap();
        assert_eq!(legacy_own_rate(&s, 0, &pa, &budget(20.0)).unwrap(), 0.0);
    }

    #[test]
    fn single_beam_collapse() {
        let cfg = mmwave(129);
        let l = PolarPosition::new(50.0, 0.7).unwrap();
        let s = NetworkSnapshot::new(cfg, vec![l], vec![l]).unwrap();
        let pa = PowerAllocation::default();
        let lb = budget(10.0);
        let ng = 129.0 * path_loss(&cfg, &l);
        let p = lb.p_tx_watts;
        let want = rate_bpcu(p * ng * 0.8 / (p * ng * pa.alpha_legacy() + lb.p_noise_watts));
        assert!((noma_rate(&s, 0, 0, &pa, &lb).unwrap() - want).abs() < 1e-12);
        assert!((legacy_sic_rate(&s, 0, &pa, &lb).unwrap() - want).abs() < 1e-12);
        let own = rate_bpcu(p * ng * pa.alpha_legacy() / lb.p_noise_watts);
        assert!((legacy_own_rate(&s, 0, &pa, &lb).unwrap() - own).abs() < 1e-12);
    }

    // Brute-force oracle: explicit per-element sums for every beam gain.
    fn brute_gain(cfg: &ArrayConfig, from: &PolarPosition, to: &PolarPosition) -> f64 {
        let k = 2.0 * PI / cfg.wavelength();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=cfg.n_elements() {
            let a = crate::geometry::exact_distance(cfg, from, n).unwrap();
            let b = crate::geometry::exact_distance(cfg, to, n).unwrap();
            acc += Complex64::from_polar(1.0, k * (a - b));
        }
        acc.norm_sqr() / (cfg.n_elements() as f64).powi(2)
    }

    fn brute_rates(cfg: &ArrayConfig, legacy: &[PolarPosition], user: &PolarPosition, m: usize, pa: &PowerAllocation, lb: &LinkBudget) -> (f64, f64, f64) {
        let n = cfg.n_elements() as f64;
        let p = lb.p_tx_watts;
        let gu = n * path_loss(cfg, user);
        let num = p * gu * pa.alpha_noma() * brute_gain(cfg, &legacy[m], user);
        let mut interf = 0.0;
        for (i, li) in legacy.iter().enumerate() {
            if i != m {
                interf += p * gu * brute_gain(cfg, li, user);
            }
        }
        let den = p * gu * pa.alpha_legacy() * brute_gain(cfg, &legacy[m], user) + interf + lb.p_noise_watts;
        let noma = (1.0 + num / den).log2();

        let gl = n * path_loss(cfg, &legacy[m]);
        let mut il = 0.0;
        for (i, li) in legacy.iter().enumerate() {
            if i != m {
                il += p * gl * brute_gain(cfg, li, &legacy[m]);
            }
        }
        let sic = (1.0 + p * gl * pa.alpha_noma() / (p * gl * pa.alpha_legacy() + il + lb.p_noise_watts)).log2();
        let own = (1.0 + p * gl * pa.alpha_legacy() / (il + lb.p_noise_watts)).log2();
        (noma, sic, own)
    }

    #[test]
    fn two_beam_brute_force() {
        let cfg = mmwave(33);
        let legacy = vec![PolarPosition::new(8.0, 0.3).unwrap(), PolarPosition::new(12.0, 0.35).unwrap()];
        let user = PolarPosition::new(10.0, 0.32).unwrap();
        let s = NetworkSnapshot::new(cfg, legacy.clone(), vec![user]).unwrap();
        let pa = PowerAllocation::default();
        let lb = budget(25.0);
        for m in 0..2 {
            let (noma, sic, own) = brute_rates(&cfg, &legacy, &user, m, &pa, &lb);
            assert!((noma_rate(&s, 0, m, &pa, &lb).unwrap() - noma).abs() < 1e-10);
            assert!((legacy_sic_rate(&s, m, &pa, &lb).unwrap() - sic).abs() < 1e-10);
            assert!((legacy_own_rate(&s, m, &pa, &lb).unwrap() - own).abs() < 1e-10);
        }
        assert!(noma_rate(&s, 1, 0, &pa, &lb).is_err());
        assert!(noma_rate(&s, 0, 2, &pa, &lb).is_err());
        assert!(legacy_sic_rate(&s, 5, &pa, &lb).is_err());
    }

    #[test]
    fn semicircle_36_legacy_brute_force() {
        let cfg = mmwave(129);
        let m_count = 36;
        let legacy: Vec<_> = (1..=m_count)
            .map(|m| PolarPosition::new(50.0, -PI / 2.0 + PI * m as f64 / (m_count as f64 + 1.0)).unwrap())
            .collect();
        let user = PolarPosition::new(80.0, 0.2).unwrap();
        let s = NetworkSnapshot::new(cfg, legacy.clone(), vec![user]).unwrap();
        let pa = PowerAllocation::default();
        let lb = budget(30.0);
        for m in [0usize, 17, 35] {
            let (noma, sic, _) = brute_rates(&cfg, &legacy, &user, m, &pa, &lb);
            assert!((legacy_sic_rate(&s, m, &pa, &lb).unwrap() - sic).abs() < 1e-9);
            assert!((noma_rate(&s, 0, m, &pa, &lb).unwrap() - noma).abs() < 1e-9);
        }
    }

    #[test]
    fn thresholds() {
        let pa = PowerAllocation::new(0.8).unwrap();
        let lb = LinkBudget::new(1.0, 1e-11, 0.5).unwrap();
        let t = outage_thresholds(&pa, &lb).unwrap();
        assert!((t.eps1 - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let margin = 0.8 - 0.2 * (2f64.sqrt() - 1.0);
        assert!((margin - 0.717_157).abs() < 1e-6);
        assert!((t.eps2 - 1e-11 * t.eps1 / margin).abs() < 1e-25);

        let lb = LinkBudget::new(1.0, 1e-11, 1e-9).unwrap();
        let t = outage_thresholds(&pa, &lb).unwrap();
        assert!(t.eps1 < 1e-8 && t.eps2 < 1e-18);

        let pa = PowerAllocation::new(0.5).unwrap();
        let lb = LinkBudget::new(1.0, 1e-11, 1.0).unwrap();
        assert!(matches!(outage_thresholds(&pa, &lb), Err(Error::AlwaysOutage { .. })));
    }

    #[test]
    fn coefficients() {
        let lb = budget(20.0);
        let cfg = mmwave(129);
        for v in LemmaVariant::ALL {
            let c = analysis_coefficients(&cfg, PI / 2.0, &lb, v).unwrap();
            assert!(c.eta1.abs() < 1e-25);
        }
        let c = analysis_coefficients(&cfg, 0.3, &lb, LemmaVariant::Paper).unwrap();
        for r in [1.0, 17.0, 300.0, 2500.0] {
            let want = lb.p_tx_watts * 129.0 * path_loss_at(&cfg, r);
            assert!((c.eta2 / (r * r) - want).abs() <= 1e-13 * want);
        }
        // compositional oracle at 45 degrees
        let theta = PI / 4.0;
        for v in LemmaVariant::ALL {
            let c = analysis_coefficients(&cfg, theta, &lb, v).unwrap();
            let d = cfg.rayleigh_distance();
            let want = deficit_coefficient(129, v).unwrap() * theta.cos().powi(4) * d * d;
            assert!((c.eta1 - want).abs() <= 1e-12 * want);
        }
    }
}
