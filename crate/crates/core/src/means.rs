//! Direct evaluation of the arithmetic and geometric means, and the
//! shifted bivariate means `M(x + t, y + t)` used as a verification corpus.

use num_complex::Complex64;

use crate::cut::{principal_ln, CutPoint};
use crate::error::{Error, Result};
use crate::sequence::PositiveSequence;
use crate::summation::{self, NeumaierComplex};

/// `A_n(a) = (1/n) sum a_k`.
pub fn arithmetic_mean(a: &PositiveSequence) -> f64 {
    summation::sum(a.values().iter().copied()) / a.len() as f64
}

/// `G_n(a) = (prod a_k)^{1/n}`, evaluated through logarithms.
pub fn geometric_mean_direct(a: &PositiveSequence) -> f64 {
    let log_sum = summation::sum(a.values().iter().map(|v| v.ln()));
    let g = (log_sum / a.len() as f64).exp();
    // exp/ln rounding can step just outside the hull
    g.clamp(a.min(), a.max())
}

/// Principal branch of `G_n(a + z) = exp((1/n) sum Log(a_k + z))` for `z`
/// off the cut `(-inf, -min a_k]`.
pub fn geometric_mean_shifted_direct(a: &PositiveSequence, z: Complex64) -> Result<Complex64> {
    let z = CutPoint::new(z, -a.min())?.value();
    Ok(shifted_geometric_unchecked(a, z))
}

pub(crate) fn shifted_geometric_unchecked(a: &PositiveSequence, z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        let shifted: Vec<f64> = a.values().iter().map(|v| v + z.re).collect();
        let log_sum = summation::sum(shifted.iter().map(|v| v.ln()));
        let g = (log_sum / a.len() as f64).exp();
        let (lo, hi) = (a.min() + z.re, a.max() + z.re);
        return Complex64::new(if lo > 0.0 { g.clamp(lo, hi) } else { g }, 0.0);
    }
    let mut acc = NeumaierComplex::default();
    for (k, m) in a.knots().iter() {
        acc.add(principal_ln(z + k) * m as f64);
    }
    (acc.value() / a.len() as f64).exp()
}

/// Bivariate means evaluated along the diagonal shift `t -> M(x + t, y + t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Harmonic,
    Logarithmic,
    Identric,
}

impl MeanKind {
    pub const ALL: [MeanKind; 5] = [
        MeanKind::Arithmetic,
        MeanKind::Geometric,
        MeanKind::Harmonic,
        MeanKind::Logarithmic,
        MeanKind::Identric,
    ];

    fn needs_distinct_args(self) -> bool {
        matches!(self, MeanKind::Harmonic | MeanKind::Logarithmic | MeanKind::Identric)
    }

    pub fn name(self) -> &'static str {
        match self {
            MeanKind::Arithmetic => "A",
            MeanKind::Geometric => "G",
            MeanKind::Harmonic => "H",
            MeanKind::Logarithmic => "L",
            MeanKind::Identric => "I",
        }
    }
}

/// Evaluator for `M(x + t, y + t)` on `t > -min(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedMean {
    kind: MeanKind,
    x: f64,
    y: f64,
}

/// Builds the corpus entry `t -> M(x + t, y + t)`.
pub fn shifted_mean_corpus(kind: MeanKind, x: f64, y: f64) -> Result<ShiftedMean> {
    if !(x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!("mean arguments must be positive, got ({x}, {y})")));
    }
    if kind.needs_distinct_args() && x == y {
        return Err(Error::DegenerateArgs("shifted H, L and I means require x != y"));
    }
    Ok(ShiftedMean { kind, x, y })
}

impl ShiftedMean {
    pub fn kind(&self) -> MeanKind {
        self.kind
    }

    pub fn args(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    /// Left end of the open domain, `-min(x, y)`.
    pub fn domain_low(&self) -> f64 {
        -self.x.min(self.y)
    }

    /// Evaluates at `t`; returns NaN outside the domain.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.domain_low() {
            return f64::NAN;
        }
        let (u, v) = (self.x + t, self.y + t);
        match self.kind {
            MeanKind::Arithmetic => 0.5 * (self.x + self.y) + t,
            MeanKind::Geometric => (u * v).sqrt(),
            MeanKind::Harmonic => 2.0 * u * v / (u + v),
            MeanKind::Logarithmic => (u - v) / (u / v).ln(),
            MeanKind::Identric => ((u * u.ln() - v * v.ln()) / (u - v) - 1.0).exp(),
        }
    }
}

/// `H'_{x,y}(t) = 1 + (x - y)^2 / (x + y + 2t)^2`.
pub fn harmonic_shifted_derivative(x: f64, y: f64, t: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!("mean arguments must be positive, got ({x}, {y})")));
    }
    if x == y {
        return Err(Error::DegenerateArgs("harmonic derivative requires x != y"));
    }
    if !(t > -x.min(y)) {
        return Err(Error::Domain(format!("t = {t} must exceed -min(x, y) = {}", -x.min(y))));
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let d = x - y;
    let s = x + y + 2.0 * t;
    Ok(1.0 + (d / s) * (d / s))
}
