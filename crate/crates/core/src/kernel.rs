//! Two-variable representation of `G(x + t, y + t)` through the kernel
//!
//! ```text
//! rho(s) = int_0^{1/2} q(u) [1 - e^{-(1-2u)s}] e^{-us} du
//!        = int_0^{1/2} q(1/2 - u) (e^{us} - e^{-us}) e^{-s/2} du,
//! q(u)   = sqrt(1/u - 1) - 1/sqrt(1/u - 1),
//! ```
//!
//! and `G(x + t, y + t) = G(x, y) + t + (x - y)/(2 pi) int_0^inf rho((x-y)s)/s e^{-ys} (1 - e^{-st}) ds`.

use std::cell::RefCell;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_finite_checked, integrate_semiinfinite_decaying, Abscissa, QuadratureEstimate, QuadratureOptions};

/// `q(u) = sqrt(1/u - 1) - 1/sqrt(1/u - 1)` on `(0, 1)`.
pub fn q_function(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("q(u) is defined on (0, 1), got u = {u}")));
    }
    let r = (1.0 / u - 1.0).sqrt();
    Ok(r - 1.0 / r)
}

fn check_rho_arg(s: f64) -> Result<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Domain(format!("rho(s) needs s >= 0, got {s}")));
    }
    Ok(())
}

/// `rho(s)` from the first form, after the substitution `u = v^2`.
///
/// Since `q(u) = (1 - 2u) / sqrt(u (1 - u))`, the integrand becomes
/// `2 (1 - 2v^2) / sqrt(1 - v^2) * [1 - e^{-(1-2v^2)s}] e^{-v^2 s}` on
/// `[0, 1/sqrt 2]`, which is analytic.
pub fn rho(s: f64, opts: &QuadratureOptions) -> Result<QuadratureEstimate> {
    check_rho_arg(s)?;
    if s == 0.0 {
        return Ok(QuadratureEstimate {
            value: 0.0,
            error_estimate: 0.0,
            nodes_used: 0,
            converged: true,
        });
    }
    let integrand = |p: Abscissa| {
        let v = p.x;
        // 1 - 2v^2 = sqrt2 (1/sqrt2 - v)(1 + sqrt2 v), exact near the top
        let c = SQRT_2 * p.from_upper * (1.0 + SQRT_2 * v);
        let v2 = v * v;
        2.0 * c / (1.0 - v2).sqrt() * -(-c * s).exp_m1() * (-v2 * s).exp()
    };
    Ok(integrate_finite_checked(integrand, 0.0, FRAC_1_SQRT_2, opts).map(|e| QuadratureEstimate { value: e.value.max(0.0), ..e })?)
}

/// `rho(s)` from the second form, integrated in the original variable with
/// the `(1/2 - u)^{-1/2}` endpoint singularity left to the quadrature rule.
pub fn rho_second_form(s: f64, opts: &QuadratureOptions) -> Result<QuadratureEstimate> {
    check_rho_arg(s)?;
    let integrand = |p: Abscissa| {
        let w = p.from_upper;
        let r = (1.0 / w - 1.0).sqrt();
        let q = r - 1.0 / r;
        let u = p.x;
        q * ((u * s).exp() - (-u * s).exp()) * (-0.5 * s).exp()
    };
    Ok(integrate_finite_checked(integrand, 0.0, 0.5, opts)?)
}

/// `x > y > 0` for the two-variable representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoParams {
    x: f64,
    y: f64,
}

impl RhoParams {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y > 0.0 && x > y) {
            return Err(Error::Domain(format!("kernel representation needs x > y > 0, got ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// `G(x + t, y + t)` via the `rho` kernel, as a nested quadrature.
///
/// The outer integral decays like `e^{-(y + min(t, 0)) s}`.
pub fn bivariate_repr(p: RhoParams, t: f64, opts: &QuadratureOptions) -> Result<QuadratureEstimate> {
    let (x, y) = (p.x, p.y);
    if !(t.is_finite() && t > -y) {
        return Err(Error::Domain(format!("t = {t} must exceed -y = {}", -y)));
    }
    let g0 = (x * y).sqrt();
    if t == 0.0 {
        return Ok(QuadratureEstimate {
            value: g0,
            error_estimate: 0.0,
            nodes_used: 0,
            converged: true,
        });
    }
    let gap = x - y;
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_nodes = RefCell::new(0usize);
    let integrand = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        match rho(gap * s, opts) {
            Ok(r) => {
                *inner_nodes.borrow_mut() += r.nodes_used;
                r.value / s * (-y * s).exp() * -(-s * t).exp_m1()
            }
            Err(e) => {
                inner_failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let decay = y + t.min(0.0);
    let outer = integrate_semiinfinite_decaying(integrand, decay, opts);
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let factor = gap / (2.0 * PI);
    Ok(QuadratureEstimate {
        value: g0 + t + factor * outer.value,
        error_estimate: factor * outer.error_estimate,
        nodes_used: outer.nodes_used + inner_nodes.into_inner(),
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> QuadratureOptions {
        QuadratureOptions::default()
    }

    #[test]
    fn q_examples() {
        assert!(q_function(0.5).unwrap().abs() < 1e-15);
        assert!((q_function(0.25).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        // dominant term u^{-1/2}
        let u = 1e-10;
        assert!((q_function(u).unwrap() * u.sqrt() - 1.0).abs() < 1e-9);
        assert!(q_function(0.8).unwrap() < 0.0);
        assert!(q_function(0.0).is_err() && q_function(1.0).is_err() && q_function(-0.1).is_err());
    }

    #[test]
    fn q_matches_simplified_form() {
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let simplified = (1.0 - 2.0 * u) / (u * (1.0 - u)).sqrt();
            assert!((q_function(u).unwrap() - simplified).abs() < 1e-13);
        }
    }

    #[test]
    fn rho_vanishes_at_origin() {
        assert_eq!(rho(0.0, &opts()).unwrap().value, 0.0);
        let small = rho(1e-9, &opts()).unwrap().value;
        assert!(small > 0.0 && small < 1e-8);
        assert!(rho(-1.0, &opts()).is_err());
    }

    #[test]
    fn rho_forms_agree() {
        for &s in &[1e-3, 0.1, 1.0, 7.5, 50.0] {
            let a = rho(s, &opts()).unwrap().value;
            let b = rho_second_form(s, &opts()).unwrap().value;
            assert!(a > 0.0);
            assert!(((a - b) / a).abs() < 1e-10, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn bivariate_examples() {
        let p = RhoParams::new(4.0, 1.0).unwrap();
        assert_eq!(bivariate_repr(p, 0.0, &opts()).unwrap().value, 2.0);
        let v = bivariate_repr(p, 5.0, &opts()).unwrap().value;
        assert!((v - 54f64.sqrt()).abs() < 1e-6, "{v}");
        let q = RhoParams::new(2.0, 1.0).unwrap();
        let v = bivariate_repr(q, 1.0, &opts()).unwrap().value;
        assert!((v - 6f64.sqrt()).abs() < 1e-6, "{v}");
        assert!(RhoParams::new(1.0, 2.0).is_err());
        assert!(bivariate_repr(q, -1.0, &opts()).is_err());
    }

    #[test]
    fn bivariate_negative_shift() {
        let p = RhoParams::new(3.0, 1.0).unwrap();
        let v = bivariate_repr(p, -0.5, &opts()).unwrap().value;
        assert!((v - (2.5f64 * 0.5).sqrt()).abs() < 1e-6, "{v}");
    }
}
