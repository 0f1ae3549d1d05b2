//! Uniform linear array layout and source-to-element distances.
//!
//! The array lies on the y-axis, centred at the origin, with element `n`
//! (1-based) at `(0, d_n)`. Angles are measured from broadside (the x-axis),
//! so a source at polar `(r, theta)` sits at `(r cos theta, r sin theta)` and
//! the cosine rule gives `|psi - psi_n|^2 = r^2 + d_n^2 - 2 r d_n sin theta`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Geometry of a uniform linear array and its carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    n_elements: usize,
    spacing: f64,
    carrier_hz: f64,
}

impl ArrayConfig {
    /// Array with explicit element spacing in metres.
    pub fn new(n_elements: usize, spacing: f64, carrier_hz: f64) -> Result<Self> {
        if n_elements < 1 {
            return Err(invalid("n_elements", "must be at least 1"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(invalid("spacing", format!("must be positive, got {spacing}")));
        }
        if !(carrier_hz.is_finite() && carrier_hz > 0.0) {
            return Err(invalid("carrier_hz", format!("must be positive, got {carrier_hz}")));
        }
        Ok(Self {
            n_elements,
            spacing,
            carrier_hz,
        })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(n_elements: usize, carrier_hz: f64) -> Result<Self> {
        if !(carrier_hz.is_finite() && carrier_hz > 0.0) {
            return Err(invalid("carrier_hz", format!("must be positive, got {carrier_hz}")));
        }
        Self::new(n_elements, SPEED_OF_LIGHT / carrier_hz / 2.0, carrier_hz)
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Offset `d_n` of element `n` (1-based) from the array centre.
    pub fn element_offset(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.n_elements {
            return Err(Error::ElementIndex {
                index: n,
                n_elements: self.n_elements,
            });
        }
        Ok(self.offset_unchecked(n - 1))
    }

    #[inline]
    pub(crate) fn offset_unchecked(&self, zero_based: usize) -> f64 {
        self.spacing * (zero_based as f64 - (self.n_elements as f64 - 1.0) / 2.0)
    }

    /// All element offsets, element 1 first.
    pub fn element_offsets(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_elements).map(move |i| self.offset_unchecked(i))
    }

    /// Largest `|d_n|`, i.e. half the aperture.
    pub fn half_aperture(&self) -> f64 {
        self.spacing * (self.n_elements as f64 - 1.0) / 2.0
    }

    pub fn rayleigh_distance(&self) -> f64 {
        rayleigh_distance(self)
    }
}

/// User location in polar form around the array centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPosition {
    r: f64,
    theta: f64,
}

impl PolarPosition {
    /// `r` in metres, `theta` in radians from broadside, `|theta| < pi/2`.
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("r", format!("must be positive, got {r}")));
        }
        if !(theta.is_finite() && theta.abs() < FRAC_PI_2) {
            return Err(invalid("theta", format!("must lie in (-pi/2, pi/2), got {theta}")));
        }
        Ok(Self { r, theta })
    }

    pub fn from_degrees(r: f64, theta_deg: f64) -> Result<Self> {
        Self::new(r, theta_deg.to_radians())
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Location in the plane of the array (array along the y-axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPosition {
    pub x: f64,
    pub y: f64,
}

impl CartesianPosition {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &CartesianPosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

pub fn polar_to_cartesian(p: &PolarPosition) -> CartesianPosition {
    let (s, c) = p.theta.sin_cos();
    CartesianPosition::new(p.r * c, p.r * s)
}

/// Inverse of [`polar_to_cartesian`]. Points behind the array (`x <= 0`) have
/// no polar form in the half-plane convention and are rejected.
pub fn cartesian_to_polar(c: &CartesianPosition) -> Result<PolarPosition> {
    if !(c.x.is_finite() && c.y.is_finite()) || c.x <= 0.0 {
        return Err(invalid("x", format!("point must lie in front of the array, got x = {}", c.x)));
    }
    PolarPosition::new(c.x.hypot(c.y), c.y.atan2(c.x))
}

/// `|psi - psi_n|` by the cosine rule.
pub fn exact_distance(cfg: &ArrayConfig, p: &PolarPosition, n: usize) -> Result<f64> {
    let d_n = cfg.element_offset(n)?;
    Ok(exact_distance_at(p, d_n))
}

#[inline]
pub(crate) fn exact_distance_at(p: &PolarPosition, d_n: f64) -> f64 {
    (p.r * p.r + d_n * d_n - 2.0 * p.r * d_n * p.theta.sin()).sqrt()
}

/// Second-order (Fresnel) expansion `r - d_n sin(theta) + d_n^2 cos^2(theta) / (2r)`.
pub fn approx_distance(cfg: &ArrayConfig, p: &PolarPosition, n: usize) -> Result<f64> {
    let d_n = cfg.element_offset(n)?;
    Ok(approx_distance_at(p, d_n))
}

#[inline]
pub(crate) fn approx_distance_at(p: &PolarPosition, d_n: f64) -> f64 {
    let s = p.theta.sin();
    p.r * (1.0 - d_n * s / p.r + d_n * d_n * (1.0 - s * s) / (2.0 * p.r * p.r))
}

/// `2 d^2 (N-1)^2 / lambda`.
pub fn rayleigh_distance(cfg: &ArrayConfig) -> f64 {
    let aperture = cfg.spacing * (cfg.n_elements as f64 - 1.0);
    2.0 * aperture * aperture / cfg.wavelength()
}
