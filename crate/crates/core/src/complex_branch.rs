//! The auxiliary functions `f_{a,n}(z) = G_n(a + z) - z` and
//! `h_n(z) = G_n([a] - a_[1] + z) - z` on their cut planes, together with
//! the closed-form boundary values of `Im h_n` on the negative axis.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cut::{principal_ln, CutPoint};
use crate::error::{Error, Result};
use crate::means::{arithmetic_mean, geometric_mean_shifted_direct};
use crate::sequence::PositiveSequence;
use crate::summation::{self, NeumaierComplex};

/// `f_{a,n}(z) = G_n(a + z) - z`; tends to `A_n(a)` as `z -> inf`.
pub fn f_an(a: &PositiveSequence, z: Complex64) -> Result<Complex64> {
    Ok(geometric_mean_shifted_direct(a, z)? - z)
}

/// `h_n(z) = G_n([a] - a_[1] + z) - z` on `C \ (-inf, 0]`.
///
/// Satisfies `f_{a,n}(z) = h_n(z + a_[1]) + a_[1]`.
pub fn h_n(a: &PositiveSequence, z: Complex64) -> Result<Complex64> {
    let z = CutPoint::new(z, 0.0)?.value();
    Ok(h_n_unchecked(a, z))
}

/// `h_n` without the cut check, for probing the cut's edges at `-t + i eps`.
pub(crate) fn h_n_unchecked(a: &PositiveSequence, z: Complex64) -> Complex64 {
    let knots = a.knots();
    let base = knots.knots()[0];
    let mut acc = NeumaierComplex::default();
    for (k, m) in knots.iter() {
        acc.add(principal_ln(z + (k - base)) * m as f64);
    }
    (acc.value() / a.len() as f64).exp() - z
}

/// A point `-t + i eps` just above the cut of `h_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryProbe {
    t: f64,
    epsilon: f64,
}

impl BoundaryProbe {
    pub const DEFAULT_EPSILON: f64 = 1e-8;

    pub fn new(t: f64, epsilon: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0 && epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Domain(format!(
                "boundary probe needs t > 0 and eps > 0, got t = {t}, eps = {epsilon}"
            )));
        }
        Ok(Self { t, epsilon })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn point(&self) -> Complex64 {
        Complex64::new(-self.t, self.epsilon)
    }

    /// `Im h_n(-t + i eps)` evaluated directly.
    pub fn im_h(&self, a: &PositiveSequence) -> f64 {
        h_n_unchecked(a, self.point()).im
    }
}

/// Limit of `Im h_n(-t + i eps)` as `eps -> 0+`:
/// `[prod |a_[k] - a_[1] - t|]^{1/n} sin(l pi / n)` for
/// `t in (a_[l] - a_[1], a_[l+1] - a_[1]]`, and `0` once
/// `t >= a_[n] - a_[1]`.
///
/// Exactly at a knot the product vanishes, so the side the knot is assigned
/// to only matters formally; it goes to the interval on its left.
pub fn boundary_im_h(a: &PositiveSequence, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("boundary value needs t > 0, got {t}")));
    }
    let sorted = a.sorted();
    let n = sorted.len();
    let base = sorted[0];
    let offsets: Vec<f64> = sorted.iter().map(|v| v - base).collect();
    if t >= offsets[n - 1] {
        return Ok(0.0);
    }
    // number of offsets strictly below t
    let ell = offsets.partition_point(|&b| b < t);
    let mut any_zero = false;
    let log_sum = summation::sum(offsets.iter().map(|&b| {
        let d = (b - t).abs();
        any_zero |= d == 0.0;
        d.ln()
    }));
    if any_zero {
        return Ok(0.0);
    }
    let modulus = (log_sum / n as f64).exp();
    Ok(modulus * (ell as f64 * PI / n as f64).sin())
}

/// `|f_{a,n}(R e^{i theta}) - A_n(a)|`.
pub fn limit_at_infinity_deviation(a: &PositiveSequence, radius: f64, theta: f64) -> Result<f64> {
    if !(radius.is_finite() && radius > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("need R > 0 and finite theta, got R = {radius}, theta = {theta}")));
    }
    let z = Complex64::from_polar(radius, theta);
    let z = if theta == 0.0 { Complex64::new(radius, 0.0) } else { z };
    Ok((f_an(a, z)? - arithmetic_mean(a)).norm())
}

/// Bound constant `K(a) = 2 * sum a_k^2 / n` for the `O(1/R)` decay of
/// [`limit_at_infinity_deviation`]: the leading term is `var(a) / (2R)`.
pub fn infinity_deviation_constant(a: &PositiveSequence) -> f64 {
    2.0 * summation::sum(a.values().iter().map(|v| v * v)) / a.len() as f64
}
