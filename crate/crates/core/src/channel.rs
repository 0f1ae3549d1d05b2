//! Spherical-wavefront array response and line-of-sight channel vectors.

use std::f64::consts::PI;

pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{approx_distance_at, exact_distance_at, ArrayConfig, PolarPosition, SPEED_OF_LIGHT};

/// Inner products at or above this length use compensated summation.
pub const COMPENSATED_SUM_THRESHOLD: usize = 10_000;

/// How source-to-element distances are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceModel {
    #[default]
    Exact,
    /// Second-order expansion of the distance in `d_n / r`.
    SecondOrder,
}

/// Unit-norm array response `b(psi)`, entries `exp(-j 2 pi |psi - psi_n| / lambda) / sqrt(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
}

impl SteeringVector {
    /// Wraps arbitrary entries; used for test vectors and planar references.
    pub fn from_entries(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }
}

/// `h = sqrt(N gamma) b(psi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    steering: SteeringVector,
    gain: f64,
}

impl ChannelVector {
    pub fn steering(&self) -> &SteeringVector {
        &self.steering
    }

    /// Large-scale gain `N gamma`, equal to `||h||^2`.
    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn entries(&self) -> Vec<Complex64> {
        let amp = self.gain.sqrt();
        self.steering.entries.iter().map(|e| e * amp).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.gain * self.steering.norm_sqr()
    }
}

pub fn steering_vector(cfg: &ArrayConfig, p: &PolarPosition, mode: DistanceModel) -> Result<SteeringVector> {
    let half = cfg.half_aperture();
    if p.r() <= half {
        return Err(Error::InsideAperture {
            r: p.r(),
            half_aperture: half,
        });
    }
    let n = cfg.n_elements();
    let k = 2.0 * PI / cfg.wavelength();
    let amp = 1.0 / (n as f64).sqrt();
    let entries = cfg
        .element_offsets()
        .map(|d_n| {
            let dist = match mode {
                DistanceModel::Exact => exact_distance_at(p, d_n),
                DistanceModel::SecondOrder => approx_distance_at(p, d_n),
            };
            Complex64::from_polar(amp, -k * dist)
        })
        .collect();
    Ok(SteeringVector { entries })
}

/// Free-space path loss `c^2 / (16 pi^2 f_c^2 r^2)`, referenced to the array centre.
pub fn path_loss(cfg: &ArrayConfig, p: &PolarPosition) -> f64 {
    path_loss_at(cfg, p.r())
}

#[inline]
pub fn path_loss_at(cfg: &ArrayConfig, r: f64) -> f64 {
    let fc = cfg.carrier_hz();
    SPEED_OF_LIGHT * SPEED_OF_LIGHT / (16.0 * PI * PI * fc * fc * r * r)
}

pub fn channel_vector(cfg: &ArrayConfig, p: &PolarPosition, mode: DistanceModel) -> Result<ChannelVector> {
    let steering = steering_vector(cfg, p, mode)?;
    Ok(ChannelVector {
        steering,
        gain: cfg.n_elements() as f64 * path_loss(cfg, p),
    })
}

/// `beam^H target` (conjugate-linear in the first argument).
pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() >= COMPENSATED_SUM_THRESHOLD {
        Ok(compensated_dot(a, b))
    } else {
        Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
    }
}

// Neumaier summation on the real and imaginary parts separately.
fn compensated_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    for (x, y) in a.iter().zip(b) {
        let p = x.conj() * y;
        re.add(p.re);
        im.add(p.im);
    }
    Complex64::new(re.total(), im.total())
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Normalised correlation `|a^H b|^2` of two steering vectors.
pub fn correlation(a: &SteeringVector, b: &SteeringVector) -> Result<f64> {
    Ok(inner_product(&a.entries, &b.entries)?.norm_sqr())
}

/// `|beam^H h|^2`.
pub fn beam_gain(beam: &SteeringVector, target: &ChannelVector) -> Result<f64> {
    Ok(target.gain * correlation(beam, &target.steering)?)
}
