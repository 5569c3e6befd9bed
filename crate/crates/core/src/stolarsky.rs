//! Stolarsky's extended mean `E(r, s; x, y)`.
//!
//! With `L = ln(y/x)` and `psi(w) = ln(expm1(w) / w)` every branch reduces to
//!
//! ```text
//! ln E = ln x + L * (psi(sL) - psi(rL)) / (sL - rL)
//! ```
//!
//! The `s = 0` branch is the same divided difference with `psi(0) = 0`, and
//! the confluent `r = s` branch is its limit `ln x + L psi'(rL)`. Evaluating
//! `psi` and `psi'` by series near zero keeps all branches accurate right up
//! to the dispatch thresholds.

use crate::error::{Error, Result};

/// `|r - s|` below this uses the confluent formula.
pub const CONFLUENT_THRESHOLD: f64 = 1e-8;
/// `|r|` or `|s|` below this counts as zero.
pub const ZERO_PARAM_THRESHOLD: f64 = 1e-12;
/// Relative `|x - y|` below this returns `x`.
pub const EQUAL_ARGS_THRESHOLD: f64 = 1e-12;

/// Which closed form `stolarsky_mean` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StolarskyBranch {
    /// `[r (y^s - x^s) / (s (y^r - x^r))]^{1/(s-r)}`
    Generic,
    /// One parameter is zero: `[(y^r - x^r) / (r ln(y/x))]^{1/r}`
    SZero,
    /// `r = s`: identric-type `e^{-1/r} (x^{x^r} / y^{y^r})^{1/(x^r - y^r)}`
    Confluent,
    /// `r = s = 0`: `sqrt(xy)`
    BothZero,
    /// `x = y`
    EqualArgs,
}

impl StolarskyBranch {
    pub fn name(self) -> &'static str {
        match self {
            StolarskyBranch::Generic => "Generic",
            StolarskyBranch::SZero => "SZero",
            StolarskyBranch::Confluent => "Confluent",
            StolarskyBranch::BothZero => "BothZero",
            StolarskyBranch::EqualArgs => "EqualArgs",
        }
    }
}

impl std::fmt::Display for StolarskyBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StolarskyParams {
    r: f64,
    s: f64,
    x: f64,
    y: f64,
    branch: StolarskyBranch,
}

impl StolarskyParams {
    pub fn new(r: f64, s: f64, x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!("Stolarsky mean needs x, y > 0, got ({x}, {y})")));
        }
        if !(r.is_finite() && s.is_finite()) {
            return Err(Error::Domain(format!("Stolarsky parameters must be finite, got ({r}, {s})")));
        }
        let branch = classify(r, s, x, y);
        Ok(Self { r, s, x, y, branch })
    }

    pub fn branch(&self) -> StolarskyBranch {
        self.branch
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

fn classify(r: f64, s: f64, x: f64, y: f64) -> StolarskyBranch {
    if (x - y).abs() < EQUAL_ARGS_THRESHOLD * x.max(y) {
        StolarskyBranch::EqualArgs
    } else if (r - s).abs() < CONFLUENT_THRESHOLD {
        if r.abs() < ZERO_PARAM_THRESHOLD && s.abs() < ZERO_PARAM_THRESHOLD {
            StolarskyBranch::BothZero
        } else {
            StolarskyBranch::Confluent
        }
    } else if r.abs() < ZERO_PARAM_THRESHOLD || s.abs() < ZERO_PARAM_THRESHOLD {
        StolarskyBranch::SZero
    } else {
        StolarskyBranch::Generic
    }
}

const SERIES_CUTOFF: f64 = 1e-2;

/// `psi(w) = ln(expm1(w) / w)`, with `psi(0) = 0`.
fn psi(w: f64) -> f64 {
    if w.abs() < SERIES_CUTOFF {
        let w2 = w * w;
        w / 2.0 + w2 / 24.0 - w2 * w2 / 2880.0 + w2 * w2 * w2 / 181_440.0
    } else if w > 0.0 {
        // expm1 overflows for large w
        w + (-(-w).exp_m1() / w).ln()
    } else {
        (w.exp_m1() / w).ln()
    }
}

/// `psi'(w) = 1 / (1 - e^{-w}) - 1 / w`.
fn psi_prime(w: f64) -> f64 {
    if w.abs() < SERIES_CUTOFF {
        let w2 = w * w;
        0.5 + w / 12.0 - w * w2 / 720.0 + w * w2 * w2 / 30_240.0
    } else {
        1.0 / -(-w).exp_m1() - 1.0 / w
    }
}

/// Evaluates `E(r, s; x, y)` on the branch chosen by [`StolarskyParams::new`].
pub fn stolarsky_mean(p: &StolarskyParams) -> f64 {
    let (r, s) = (p.r, p.s);
    // E is symmetric in (x, y); a fixed order makes the rounding symmetric too
    let (x, y) = if p.x <= p.y { (p.x, p.y) } else { (p.y, p.x) };
    let l = (y / x).ln();
    let log_e = match p.branch {
        StolarskyBranch::EqualArgs => return x,
        StolarskyBranch::BothZero => return (x * y).sqrt(),
        StolarskyBranch::Confluent => {
            let c = 0.5 * (r + s);
            x.ln() + l * psi_prime(c * l)
        }
        StolarskyBranch::SZero => {
            let q = if r.abs() < ZERO_PARAM_THRESHOLD { s } else { r };
            x.ln() + psi(q * l) / q
        }
        StolarskyBranch::Generic => x.ln() + (psi(s * l) - psi(r * l)) / (s - r),
    };
    log_e.exp().clamp(x.min(y), x.max(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn e(r: f64, s: f64, x: f64, y: f64) -> f64 {
        stolarsky_mean(&StolarskyParams::new(r, s, x, y).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn listed_examples() {
        assert!(rel(e(1.0, 2.0, 2.0, 4.0), 3.0) < 1e-15);
        assert!(rel(e(0.0, 0.0, 4.0, 1.0), 2.0) < 1e-15);
        let expected = (1.0 / (E - 1.0)).exp();
        assert!(rel(e(1.0, 1.0, 1.0, E), expected) < 1e-14);
        assert!(rel(e(1.0, 1.0, 1.0, E), 1.789_572_4) < 1e-7);
    }

    #[test]
    fn branch_dispatch() {
        let b = |r, s, x, y| StolarskyParams::new(r, s, x, y).unwrap().branch();
        assert_eq!(b(1.0, 2.0, 1.0, 2.0), StolarskyBranch::Generic);
        assert_eq!(b(1.0, 0.0, 1.0, 2.0), StolarskyBranch::SZero);
        assert_eq!(b(0.0, -3.0, 1.0, 2.0), StolarskyBranch::SZero);
        assert_eq!(b(1.0, 1.0 + 1e-9, 1.0, 2.0), StolarskyBranch::Confluent);
        assert_eq!(b(0.0, 1e-13, 1.0, 2.0), StolarskyBranch::BothZero);
        assert_eq!(b(5.0, -1.0, 3.0, 3.0), StolarskyBranch::EqualArgs);
        assert!(StolarskyParams::new(1.0, 2.0, 0.0, 1.0).is_err());
        assert!(StolarskyParams::new(1.0, 2.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn closed_forms_of_named_means() {
        for &(x, y) in &[(1.0f64, 4.0f64), (0.3, 17.0), (2.0, 2.5), (9.0, 0.01)] {
            let a = 0.5 * (x + y);
            let g = (x * y).sqrt();
            let h = 2.0 * x * y / (x + y);
            let lm = (y - x) / (y / x).ln();
            let im = ((y * f64::ln(y) - x * f64::ln(x)) / (y - x) - 1.0).exp();
            assert!(rel(e(1.0, 2.0, x, y), a) < 1e-12);
            assert!(rel(e(0.0, 0.0, x, y), g) < 1e-12);
            assert!(rel(e(-2.0, -1.0, x, y), h) < 1e-12);
            assert!(rel(e(0.0, 1.0, x, y), lm) < 1e-12);
            assert!(rel(e(1.0, 1.0, x, y), im) < 1e-12);
            // power mean of order 3
            let m3 = ((x.powi(3) + y.powi(3)) / 2.0).cbrt();
            assert!(rel(e(3.0, 6.0, x, y), m3) < 1e-12);
        }
    }

    #[test]
    fn generalized_logarithmic_mean() {
        // E(1, p) = [(y^p - x^p) / (p (y - x))]^{1/(p-1)}
        let (x, y, p) = (2.0f64, 5.0f64, 3.0f64);
        let lp = ((y.powf(p) - x.powf(p)) / (p * (y - x))).powf(1.0 / (p - 1.0));
        assert!(rel(e(1.0, p, x, y), lp) < 1e-13);
    }

    #[test]
    fn continuity_across_confluence() {
        for &r in &[-2.0, -0.5, 0.7, 1.0, 3.0] {
            for &(x, y) in &[(1.0, 4.0), (0.2, 0.9)] {
                let c = e(r, r, x, y);
                for ds in [1e-6, -1e-6] {
                    assert!((e(r, r + ds, x, y) - c).abs() < 1e-5);
                }
                // across the threshold itself the two formulas agree closely
                let below = e(r, r + 0.9e-8, x, y);
                let above = e(r, r + 1.1e-8, x, y);
                assert!(rel(below, above) < 1e-7);
            }
        }
    }

    #[test]
    fn continuity_across_zero_parameter() {
        let (x, y) = (1.5, 6.0);
        let at_zero = e(0.0, 2.0, x, y);
        assert!(rel(e(1e-11, 2.0, x, y), at_zero) < 1e-9);
        let both = e(0.0, 0.0, x, y);
        assert!(rel(e(2e-9, 1e-9, x, y), both) < 1e-9);
    }

    #[test]
    fn extreme_parameters_stay_finite() {
        let v = e(400.0, 800.0, 1.0, 10.0);
        assert!(v.is_finite() && (1.0..=10.0).contains(&v));
        let v = e(-300.0, -600.0, 1.0, 10.0);
        assert!(v.is_finite() && (1.0..=10.0).contains(&v));
    }

    proptest! {
        #[test]
        fn symmetric_and_within_hull(r in -5.0f64..5.0, s in -5.0f64..5.0, x in 0.05f64..20.0, y in 0.05f64..20.0) {
            let v = e(r, s, x, y);
            prop_assert!(x.min(y) <= v && v <= x.max(y));
            prop_assert!(rel(e(s, r, x, y), v) < 1e-12);
            prop_assert!(rel(e(r, s, y, x), v) < 1e-12);
        }
    }
}
