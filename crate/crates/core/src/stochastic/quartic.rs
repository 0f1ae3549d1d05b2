use nalgebra::{Complex, DMatrix, Schur};

use crate::error::{Error, Result};

/// Real roots of `sum_i coeffs[i] x^i`, descending, via the eigenvalues of
/// the companion matrix followed by Newton polishing.
pub fn polynomial_real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|&v| v == 0.0) {
        c.pop();
    }
    let degree = c.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let lead = c[degree];
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -c[i] / lead;
    }
    let mut roots: Vec<f64> = eigenvalues(companion)
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * z.re.abs().max(1.0))
        .map(|z| polish(&c, z.re))
        .collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

/// Eigenvalues through a capped Schur iteration. Companion matrices with
/// roots symmetric about the origin (e.g. `x^4 + 1`) can stall the unshifted
/// sweep, so failing matrices are retried with a diagonal shift.
fn eigenvalues(m: DMatrix<f64>) -> Vec<Complex<f64>> {
    const MAX_ITER: usize = 10_000;
    let n = m.nrows();
    for shift in [0.0, 0.1, -0.37, 1.3] {
        let shifted = &m + DMatrix::<f64>::identity(n, n) * shift;
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, MAX_ITER) {
            return schur.complex_eigenvalues().iter().map(|z| z - shift).collect();
        }
    }
    Vec::new()
}

fn eval_with_derivative(c: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &ci in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

fn polish(c: &[f64], mut x: f64) -> f64 {
    for _ in 0..3 {
        let (p, dp) = eval_with_derivative(c, x);
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let step = p / dp;
        let next = x - step;
        // keep the step only if it improves the residual
        if eval_with_derivative(c, next).0.abs() <= p.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// `q(x) = -eta1 x^4 + (2 eta1 / r_L) x^3 + (1 - eta1 / r_L^2) x^2 - eps2 / eta2`.
///
/// `q(x) <= 0` at `x = 1/(r_L + r)` is the single-beam outage event under
/// the small-`tau` resolution model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuartic {
    pub eta1: f64,
    pub eta2: f64,
    pub eps2: f64,
    pub r_legacy: f64,
}

impl OutageQuartic {
    /// Coefficients, constant term first.
    pub fn coefficients(&self) -> [f64; 5] {
        let rl = self.r_legacy;
        [
            -self.eps2 / self.eta2,
            0.0,
            1.0 - self.eta1 / (rl * rl),
            2.0 * self.eta1 / rl,
            -self.eta1,
        ]
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_with_derivative(&self.coefficients(), x).0
    }

    /// Largest `|c_i x^i|`; residuals are judged relative to this.
    pub fn scale(&self, x: f64) -> f64 {
        self.coefficients()
            .iter()
            .enumerate()
            .map(|(i, c)| (c * x.powi(i as i32)).abs())
            .fold(0.0, f64::max)
    }

    /// Same polynomial in `y = r_L x`, which is O(1) on the segment.
    fn scaled_coefficients(&self) -> [f64; 5] {
        let rl = self.r_legacy;
        let a = self.eta1 / (rl * rl);
        let c = self.eps2 * rl * rl / self.eta2;
        [-c, 0.0, 1.0 - a, 2.0 * a, -a]
    }
}

/// Real roots of the outage quartic, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRoots {
    pub quartic: OutageQuartic,
    pub roots: Vec<f64>,
}

impl BoundaryRoots {
    pub fn positive_count(&self) -> usize {
        self.roots.iter().filter(|&&z| z > 0.0).count()
    }

    /// `(z1, z2)` with `z1 >= z2 > 0`, when exactly two roots are positive.
    pub fn positive_pair(&self) -> Result<(f64, f64)> {
        let pos: Vec<f64> = self.roots.iter().copied().filter(|&z| z > 0.0).collect();
        if pos.len() != 2 {
            return Err(Error::NoPositiveRoots {
                count: pos.len(),
                roots: self.roots.clone(),
            });
        }
        Ok((pos[0], pos[1]))
    }
}

pub fn outage_boundary_roots(eta1: f64, eta2: f64, eps2: f64, r_legacy: f64) -> Result<BoundaryRoots> {
    use crate::error::invalid;
    if !(eta1.is_finite() && eta1 >= 0.0) {
        return Err(invalid("eta1", format!("must be non-negative, got {eta1}")));
    }
    for (name, v) in [("eta2", eta2), ("eps2", eps2), ("r_legacy", r_legacy)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(name, format!("must be positive, got {v}")));
        }
    }
    let quartic = OutageQuartic {
        eta1,
        eta2,
        eps2,
        r_legacy,
    };
    let roots = if eta1 == 0.0 {
        let z = (eps2 / eta2).sqrt();
        vec![z, -z]
    } else {
        let mut roots: Vec<f64> = polynomial_real_roots(&quartic.scaled_coefficients())
            .into_iter()
            .map(|y| y / r_legacy)
            .collect();
        for z in roots.iter_mut() {
            *z = polish(&quartic.coefficients(), *z);
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        roots
    };
    Ok(BoundaryRoots { quartic, roots })
}
