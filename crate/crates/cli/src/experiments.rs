//! Figure-style parameter sweeps emitting CSV.
//!
//! Rows are produced in a fixed grid order regardless of how the work is
//! scheduled, and every Monte Carlo group gets a seed derived from the run
//! seed and its grid position, so a given resolved configuration always
//! yields the same bytes.

use std::fmt::Write as _;

use nearfield_core::noma::dbm_to_watts;
use nearfield_core::resolution::resolution_report;
use nearfield_core::stochastic::{
    midpoint_tau, outage_closed_form, outage_monte_carlo_cluster_sweep, outage_monte_carlo_line_sweep, ClusterCenter,
    ClusterProcessConfig, LineProcessConfig, LineScenario, OutageResult, Selection, DEFAULT_TAIL_TOLERANCE,
    TAU_VALIDITY_LIMIT,
};
use nearfield_core::{ArrayConfig, LemmaVariant, LinkBudget, PowerAllocation};
use rayon::prelude::*;

use crate::config::Config;
use crate::ExperimentError;

/// Which sweep to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Resolution,
    OutageLine,
    OutageCluster,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Resolution => "resolution",
            Experiment::OutageLine => "outage-line",
            Experiment::OutageCluster => "outage-cluster",
        }
    }

    /// Default value of every parameter the sweep accepts.
    pub fn defaults(self) -> Config {
        let common = [("carrier_ghz", "28"), ("seed", "1")];
        let specific: &[(&str, &str)] = match self {
            Experiment::Resolution => &[
                ("mode", "beta"),
                ("n_elements", "129,257"),
                ("theta_deg", "0,5,10,15,20,25,30,35,40,45,50,55,60,65,70,75,80,85"),
                ("beta1", "0.5"),
                ("beta2", "0.7"),
                ("r2_m", "5,10,20,40,80"),
                ("gap_m", "20"),
                ("trials", "1"),
            ],
            Experiment::OutageLine => &[
                ("noise_dbm", "-80"),
                ("target_rate", "0.5"),
                ("alpha_noma", "0.8"),
                ("legacy_radius_m", "50"),
                ("cell_radius_m", "1000"),
                ("ps_dbm", "0,10,20,30,40"),
                ("lambda", "0.01,0.05"),
                ("k", "1,2,4"),
                ("n_elements", "129,513"),
                ("theta_deg", "45"),
                ("trials", "10000"),
            ],
            Experiment::OutageCluster => &[
                ("noise_dbm", "-80"),
                ("target_rate", "0.5,1"),
                ("alpha_noma", "0.8"),
                ("legacy_count", "36"),
                ("legacy_radius_m", "50"),
                ("cell_radius_m", "1000"),
                ("cluster_radius_m", "10"),
                ("lambda", "0.05"),
                ("ps_dbm", "0,10,20,30,40"),
                ("n_elements", "129,513"),
                ("center", "shrunk"),
                ("selection", "effective"),
                ("trials", "20000"),
            ],
        };
        Config::from_pairs(common.iter().chain(specific).copied())
    }

    pub fn keys(self) -> Vec<String> {
        self.defaults().iter().map(|(k, _)| k.to_string()).collect()
    }

    pub fn run(self, cfg: &Config) -> Result<String, ExperimentError> {
        let keys = self.keys();
        let keys: Vec<&str> = keys.iter().map(String::as_str).collect();
        cfg.check_keys(&keys)?;
        match self {
            Experiment::Resolution => run_resolution_sweep(cfg),
            Experiment::OutageLine => run_outage_line(cfg),
            Experiment::OutageCluster => run_outage_cluster(cfg),
        }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn array(n: usize, carrier_ghz: f64) -> Result<ArrayConfig, ExperimentError> {
    ArrayConfig::half_wavelength(n, carrier_ghz * 1e9).map_err(usage)
}

fn usage(e: nearfield_core::Error) -> ExperimentError {
    ExperimentError::Usage(e.to_string())
}

/// SplitMix64 finaliser; decorrelates the per-group seeds.
fn group_seed(seed: u64, group: u64) -> u64 {
    let mut z = seed ^ group.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const RESOLUTION_HEADER: &str = "theta0_deg,N,r1_m,r2_m,delta_exact,delta_fresnel_sum,delta_lemma1_paper,delta_lemma1_taylor,delta_limit_paper,delta_limit_taylor,delta_fresnel_integral,tau,out_of_range";

/// Resolution sweep over `theta0` and `N`.
///
/// `mode = beta`: `r_i = beta_i d_Ray`. `mode = absolute`: `r_2` from `r2_m`
/// and `r_1 = r_2 + gap_m`.
pub fn run_resolution_sweep(cfg: &Config) -> Result<String, ExperimentError> {
    let carrier: f64 = cfg.value("carrier_ghz")?;
    let ns: Vec<usize> = cfg.list("n_elements")?;
    let thetas: Vec<f64> = cfg.list("theta_deg")?;
    let mode: String = cfg.value("mode")?;

    // (N, r1, r2) pairs per array size
    let mut jobs = Vec::new();
    for &n in &ns {
        let a = array(n, carrier)?;
        match mode.as_str() {
            "beta" => {
                let b1: f64 = cfg.value("beta1")?;
                let b2: f64 = cfg.value("beta2")?;
                if !(b1 > 0.0 && b2 > 0.0) {
                    return Err(ExperimentError::Usage("beta1 and beta2 must be positive".into()));
                }
                let d = a.rayleigh_distance();
                for &t in &thetas {
                    jobs.push((a, t, b1 * d, b2 * d));
                }
            }
            "absolute" => {
                let gap: f64 = cfg.value("gap_m")?;
                for r2 in cfg.list::<f64>("r2_m")? {
                    for &t in &thetas {
                        jobs.push((a, t, r2 + gap, r2));
                    }
                }
            }
            other => return Err(ExperimentError::Usage(format!("mode must be `beta` or `absolute`, got `{other}`"))),
        }
    }
    for &(a, t, r1, r2) in &jobs {
        if t.is_nan() || t.abs() >= 90.0 {
            return Err(ExperimentError::Usage(format!("theta_deg must lie in (-90, 90), got {t}")));
        }
        let half = a.half_aperture();
        if !(r1 > half && r2 > half) {
            return Err(ExperimentError::Usage(format!(
                "distances {r1} m and {r2} m must exceed the half aperture {half} m"
            )));
        }
    }

    let rows = jobs
        .par_iter()
        .map(|&(a, t, r1, r2)| {
            let rep = resolution_report(&a, t.to_radians(), r1, r2)?;
            Ok(format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                t,
                a.n_elements(),
                num(r1),
                num(r2),
                num(rep.delta_exact),
                num(rep.delta_fresnel_sum),
                num(rep.delta_lemma1_paper),
                num(rep.delta_lemma1_taylor),
                num(rep.delta_limit_paper),
                num(rep.delta_limit_taylor),
                num(rep.delta_fresnel_integral),
                num(rep.tau),
                u8::from(rep.out_of_range()),
            ))
        })
        .collect::<Result<Vec<_>, nearfield_core::Error>>()?;
    Ok(assemble(RESOLUTION_HEADER, rows))
}

fn assemble(header: &str, rows: Vec<String>) -> String {
    let mut s = String::with_capacity(rows.len() * 200);
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

pub const OUTAGE_LINE_HEADER: &str = "ps_dbm,lambda,k,N,theta0_deg,closed_paper,closed_taylor,closed_default_variant,tau_mid,tau_flag,mc_probability,mc_ci_halfwidth,mc_outage_rate,trials";

/// One `(lambda, k, N, theta0)` group of the line-process sweep, evaluated at
/// every transmit power.
#[derive(Debug, Clone)]
pub struct LineGroupResult {
    pub lambda: f64,
    pub k: u32,
    pub n_elements: usize,
    pub theta_deg: f64,
    pub tau_mid: f64,
    /// Per transmit power: (closed form paper, closed form taylor, Monte Carlo).
    pub points: Vec<(f64, OutageResult, OutageResult, OutageResult)>,
}

/// Line-process outage grid; rows ordered by `(lambda, k, N, theta0, P_S)`.
pub fn line_groups(cfg: &Config) -> Result<Vec<LineGroupResult>, ExperimentError> {
    let carrier: f64 = cfg.value("carrier_ghz")?;
    let noise: f64 = cfg.value("noise_dbm")?;
    let rate: f64 = cfg.value("target_rate")?;
    let power = PowerAllocation::new(cfg.value("alpha_noma")?).map_err(usage)?;
    let r_l: f64 = cfg.value("legacy_radius_m")?;
    let r_d: f64 = cfg.value("cell_radius_m")?;
    let ps: Vec<f64> = cfg.list("ps_dbm")?;
    let lambdas: Vec<f64> = cfg.list("lambda")?;
    let ks: Vec<u32> = cfg.list("k")?;
    let ns: Vec<usize> = cfg.list("n_elements")?;
    let thetas: Vec<f64> = cfg.list("theta_deg")?;
    let trials: u64 = cfg.value("trials")?;
    let seed: u64 = cfg.value("seed")?;
    if trials == 0 {
        return Err(ExperimentError::Usage("trials must be at least 1".into()));
    }
    let budgets = ps
        .iter()
        .map(|&p| LinkBudget::new(dbm_to_watts(p), dbm_to_watts(noise), rate))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;

    let mut groups = Vec::new();
    for &lambda in &lambdas {
        for &k in &ks {
            for &n in &ns {
                for &t in &thetas {
                    let process = LineProcessConfig::new(lambda, r_l, r_d, t.to_radians(), k).map_err(usage)?;
                    groups.push((lambda, k, array(n, carrier)?, t, process));
                }
            }
        }
    }
    for (_, _, a, _, p) in &groups {
        if p.legacy_radius <= a.half_aperture() {
            return Err(ExperimentError::Usage("legacy user lies inside the array aperture".into()));
        }
    }

    let mut out = Vec::with_capacity(groups.len());
    for (gi, (lambda, k, a, t, process)) in groups.into_iter().enumerate() {
        let mc = outage_monte_carlo_line_sweep(&a, &process, &power, &budgets, trials, group_seed(seed, gi as u64))?;
        let mut points = Vec::with_capacity(budgets.len());
        for ((&p, lb), mc) in ps.iter().zip(&budgets).zip(mc) {
            let s = LineScenario {
                array: a,
                process,
                power,
                budget: *lb,
            };
            let paper = outage_closed_form(&s, LemmaVariant::Paper, DEFAULT_TAIL_TOLERANCE)?;
            let taylor = outage_closed_form(&s, LemmaVariant::Taylor, DEFAULT_TAIL_TOLERANCE)?;
            points.push((p, paper, taylor, mc));
        }
        out.push(LineGroupResult {
            lambda,
            k,
            n_elements: a.n_elements(),
            theta_deg: t,
            tau_mid: midpoint_tau(&a, &process),
            points,
        });
    }
    Ok(out)
}

pub fn run_outage_line(cfg: &Config) -> Result<String, ExperimentError> {
    let default = nearfield_core::resolution::default_variant();
    let mut rows = Vec::new();
    for g in line_groups(cfg)? {
        for (p, paper, taylor, mc) in &g.points {
            let mut row = String::new();
            let _ = write!(
                row,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                p,
                g.lambda,
                g.k,
                g.n_elements,
                g.theta_deg,
                num(paper.probability),
                num(taylor.probability),
                default.name(),
                num(g.tau_mid),
                u8::from(g.tau_mid > TAU_VALIDITY_LIMIT),
                num(mc.probability),
                num(mc.ci_halfwidth),
                num(mc.outage_rate_bpcu),
                mc.trials,
            );
            rows.push(row);
        }
    }
    Ok(assemble(OUTAGE_LINE_HEADER, rows))
}

pub const OUTAGE_CLUSTER_HEADER: &str = "ps_dbm,N,target_rate,probability,ci_halfwidth,outage_rate,trials";

/// Cluster-process outage; rows ordered by `(N, target_rate, P_S)`.
/// Each `N` is one group: all powers and rates share its draws.
pub fn run_outage_cluster(cfg: &Config) -> Result<String, ExperimentError> {
    let carrier: f64 = cfg.value("carrier_ghz")?;
    let noise: f64 = cfg.value("noise_dbm")?;
    let rates: Vec<f64> = cfg.list("target_rate")?;
    let power = PowerAllocation::new(cfg.value("alpha_noma")?).map_err(usage)?;
    let ps: Vec<f64> = cfg.list("ps_dbm")?;
    let ns: Vec<usize> = cfg.list("n_elements")?;
    let trials: u64 = cfg.value("trials")?;
    let seed: u64 = cfg.value("seed")?;
    if trials == 0 {
        return Err(ExperimentError::Usage("trials must be at least 1".into()));
    }
    let mut cluster = ClusterProcessConfig::new(
        cfg.value("lambda")?,
        cfg.value("cluster_radius_m")?,
        cfg.value("cell_radius_m")?,
        cfg.value("legacy_count")?,
        cfg.value("legacy_radius_m")?,
    )
    .map_err(usage)?;
    cluster.center = match cfg.value::<String>("center")?.as_str() {
        "shrunk" => ClusterCenter::Shrunk,
        "clip" => ClusterCenter::Clip,
        other => return Err(ExperimentError::Usage(format!("center must be `shrunk` or `clip`, got `{other}`"))),
    };
    cluster.selection = match cfg.value::<String>("selection")?.as_str() {
        "effective" => Selection::EffectiveGain,
        "raw" => Selection::RawGain,
        other => return Err(ExperimentError::Usage(format!("selection must be `effective` or `raw`, got `{other}`"))),
    };

    // budgets laid out rate-major, then power
    let mut budgets = Vec::new();
    for &r in &rates {
        for &p in &ps {
            budgets.push(LinkBudget::new(dbm_to_watts(p), dbm_to_watts(noise), r).map_err(usage)?);
        }
    }
    let mut rows = Vec::new();
    for (gi, &n) in ns.iter().enumerate() {
        let a = array(n, carrier)?;
        if cluster.legacy_radius <= a.half_aperture() {
            return Err(ExperimentError::Usage("legacy users lie inside the array aperture".into()));
        }
        let res = outage_monte_carlo_cluster_sweep(&a, &cluster, &power, &budgets, trials, group_seed(seed, gi as u64))?;
        for (ri, &r) in rates.iter().enumerate() {
            for (pi, &p) in ps.iter().enumerate() {
                let o = &res[ri * ps.len() + pi];
                rows.push(format!(
                    "{},{},{},{},{},{},{}",
                    p,
                    n,
                    r,
                    num(o.probability),
                    num(o.ci_halfwidth),
                    num(o.outage_rate_bpcu),
                    o.trials
                ));
            }
        }
    }
    Ok(assemble(OUTAGE_CLUSTER_HEADER, rows))
}
