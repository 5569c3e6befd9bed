//! Integral representation of the shifted geometric mean:
//!
//! ```text
//! G_n(a + z) = A_n(a) + z
//!            - sum_{l=1}^{n-1} sin(l pi / n) / pi
//!                * int_{a_[l]}^{a_[l+1]} |prod_k (a_k - t)|^{1/n} / (t + z) dt
//! ```
//!
//! valid on `C \ (-inf, -min a_k]`. Differentiating under the integral gives
//! every derivative in `z`, and `z = 0` gives the gap `A_n(a) - G_n(a)` as a
//! non-negative integral.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cut::{distance_to_cut, CutPoint};
use crate::error::{Error, Result};
use crate::means::arithmetic_mean;
use crate::quadrature::{integrate_finite_checked, Abscissa, QuadValue, QuadratureError, QuadratureOptions};
use crate::sequence::{PositiveSequence, SortedKnots};
use crate::summation::{Neumaier, NeumaierComplex};

/// Highest derivative order `derivative_repr` accepts.
pub const MAX_DERIVATIVE_ORDER: usize = 20;

/// Evaluation is refused when the kernel pole `t = -z` comes closer than
/// this to the support `[a_[1], a_[n]]`.
pub const POLE_MARGIN: f64 = 1e-6;

/// Relative length below which a segment between repeated knots is dropped.
const ZERO_LENGTH: f64 = 1e-15;

/// One term of the sum: the interval `[a_[l], a_[l+1]]` and its weight
/// `sin(l pi / n) / pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySegment {
    pub ell: usize,
    pub lower: f64,
    pub upper: f64,
    pub weight: f64,
    /// Zero length (repeated knot); contributes nothing.
    pub skippable: bool,
}

/// A represented value together with the quadrature bookkeeping behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReprEstimate<T = f64> {
    pub value: T,
    pub error_estimate: f64,
    pub nodes_used: usize,
}

/// `[prod_k |a_k - t|]^{1/n}`; exactly zero at every knot.
pub fn density(a: &PositiveSequence, t: f64) -> f64 {
    let knots = a.knots();
    log_density(&knots, a.len(), |k| (k - t).abs()).map_or(0.0, f64::exp)
}

/// `(1/n) sum m_j ln d(k_j)`, or `None` when some distance is zero.
fn log_density(knots: &SortedKnots, n: usize, dist: impl Fn(f64) -> f64) -> Option<f64> {
    let mut acc = Neumaier::new();
    for (k, m) in knots.iter() {
        let d = dist(k);
        if d == 0.0 {
            return None;
        }
        acc.add(m as f64 * d.ln());
    }
    Some(acc.value() / n as f64)
}

/// The `n - 1` segments `[a_[l], a_[l+1]]`, `l = 1..n-1`.
pub fn segments(a: &PositiveSequence) -> Vec<DensitySegment> {
    let sorted = a.sorted();
    let n = sorted.len();
    let scale = a.max();
    (1..n)
        .map(|ell| {
            let (lower, upper) = (sorted[ell - 1], sorted[ell]);
            DensitySegment {
                ell,
                lower,
                upper,
                weight: (ell as f64 * PI / n as f64).sin() / PI,
                skippable: upper - lower < ZERO_LENGTH * scale,
            }
        })
        .collect()
}

/// Shared driver: integrates `kernel(ln density(t), t - a_[l], a_[l])` over
/// every live segment and returns `sum weight_l * I_l` in ascending `l`.
///
/// `t - a_[l]` is exact near the segment's left knot.
fn weighted_segment_sum<T, K>(a: &PositiveSequence, opts: &QuadratureOptions, kernel: K) -> Result<ReprEstimate<T>>
where
    T: QuadValue,
    K: Fn(f64, f64, f64) -> T,
{
    let knots = a.knots();
    let n = a.len();
    let mut total = T::Acc::default();
    let mut err = Neumaier::new();
    let mut nodes_used = 0;
    for seg in segments(a).into_iter().filter(|s| !s.skippable) {
        let integrand = |p: Abscissa| {
            let log_d = log_density(&knots, n, |k| {
                if k == seg.lower {
                    p.from_lower
                } else if k == seg.upper {
                    p.from_upper
                } else {
                    (k - p.x).abs()
                }
            });
            match log_d {
                Some(ld) => kernel(ld, p.from_lower, seg.lower),
                None => T::zero(),
            }
        };
        let est = integrate_finite_checked(integrand, seg.lower, seg.upper, opts)?;
        T::accumulate(&mut total, est.value * seg.weight);
        err.add(est.error_estimate * seg.weight);
        nodes_used += est.nodes_used;
    }
    Ok(ReprEstimate {
        value: T::total(&total),
        error_estimate: err.value(),
        nodes_used,
    })
}

fn has_support(a: &PositiveSequence) -> bool {
    segments(a).iter().any(|s| !s.skippable)
}

fn check_pole(a: &PositiveSequence, z: Complex64) -> Result<()> {
    let d = distance_to_cut(z, -a.min());
    if has_support(a) && d < POLE_MARGIN {
        return Err(QuadratureError::PoleProximity { distance: d }.into());
    }
    Ok(())
}

/// `G_n(a + z)` through the integral representation.
///
/// Real `z` is integrated in real arithmetic and returns a value with zero
/// imaginary part.
pub fn geometric_mean_repr(a: &PositiveSequence, z: Complex64, opts: &QuadratureOptions) -> Result<ReprEstimate<Complex64>> {
    let z = CutPoint::new(z, -a.min())?.value();
    check_pole(a, z)?;
    let base = Complex64::new(arithmetic_mean(a), 0.0) + z;
    if z.im == 0.0 {
        let zr = z.re;
        let sum = weighted_segment_sum(a, opts, |ld, from_lower, lower| ld.exp() / ((lower + zr) + from_lower))?;
        return Ok(ReprEstimate {
            value: Complex64::new(base.re - sum.value, 0.0),
            error_estimate: sum.error_estimate,
            nodes_used: sum.nodes_used,
        });
    }
    let sum = weighted_segment_sum(a, opts, |ld, from_lower, lower| {
        Complex64::new(ld.exp(), 0.0) / ((z + lower) + from_lower)
    })?;
    Ok(ReprEstimate {
        value: base - sum.value,
        error_estimate: sum.error_estimate,
        nodes_used: sum.nodes_used,
    })
}

/// `d^k/dz^k G_n(a + z)` at real `z > -min a_k`:
///
/// ```text
/// G^(k)(z) = [k == 1] + (-1)^{k+1} k! sum w_l int density(t) / (t + z)^{k+1} dt
/// ```
///
/// so `(-1)^{k-1} G^(k) >= 0` for every `k`. The kernel is evaluated in log
/// space; `k` is capped at [`MAX_DERIVATIVE_ORDER`].
pub fn derivative_repr(a: &PositiveSequence, z: f64, order: usize, opts: &QuadratureOptions) -> Result<ReprEstimate> {
    if order == 0 || order > MAX_DERIVATIVE_ORDER {
        return Err(Error::OrderCap {
            order,
            cap: MAX_DERIVATIVE_ORDER,
        });
    }
    let z = CutPoint::real(z, -a.min())?.value().re;
    check_pole(a, Complex64::new(z, 0.0))?;
    let log_fact: f64 = (2..=order).map(|j| (j as f64).ln()).sum();
    let power = (order + 1) as f64;
    let sum = weighted_segment_sum(a, opts, |ld, from_lower, lower| {
        (ld + log_fact - power * ((lower + z) + from_lower).ln()).exp()
    })?;
    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
    let constant = if order == 1 { 1.0 } else { 0.0 };
    Ok(ReprEstimate {
        value: constant + sign * sum.value,
        error_estimate: sum.error_estimate,
        nodes_used: sum.nodes_used,
    })
}

/// `A_n(a) - G_n(a)` as `sum w_l int density(t) / t dt`; zero exactly when
/// all entries coincide.
pub fn ag_gap(a: &PositiveSequence, opts: &QuadratureOptions) -> Result<ReprEstimate> {
    let sum = weighted_segment_sum(a, opts, |ld, from_lower, lower| ld.exp() / (lower + from_lower))?;
    Ok(ReprEstimate {
        value: sum.value.max(0.0),
        ..sum
    })
}

/// Sum of [`segments`] lengths, for tiling checks.
pub fn support_length(a: &PositiveSequence) -> f64 {
    let mut acc = NeumaierComplex::default();
    for s in segments(a) {
        acc.add(Complex64::new(s.upper - s.lower, 0.0));
    }
    acc.value().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::{geometric_mean_direct, geometric_mean_shifted_direct};

    fn seq(v: &[f64]) -> PositiveSequence {
        PositiveSequence::new(v.to_vec()).unwrap()
    }

    fn opts() -> QuadratureOptions {
        QuadratureOptions::default()
    }

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn density_examples() {
        let a = seq(&[1.0, 4.0]);
        assert_eq!(density(&a, 1.0), 0.0);
        assert_eq!(density(&a, 4.0), 0.0);
        assert!((density(&a, 2.5) - 1.5).abs() < 1e-15);
        let b = seq(&[1.0, 2.0, 3.0]);
        assert!((density(&b, 1.5) - (0.375f64).cbrt()).abs() < 1e-15);
        assert!((density(&b, 1.5) - 0.72112).abs() < 1e-5);
    }

    #[test]
    fn segment_examples() {
        let s = segments(&seq(&[4.0, 1.0]));
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].ell, s[0].lower, s[0].upper), (1, 1.0, 4.0));
        assert!((s[0].weight - 1.0 / PI).abs() < 1e-16);
        assert!(!s[0].skippable);

        let c = segments(&seq(&[2.0, 2.0, 2.0]));
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|s| s.skippable));
        assert!(segments(&seq(&[2.0])).is_empty());

        let b = segments(&seq(&[3.0, 1.0, 2.0]));
        let w = (PI / 3.0).sin() / PI;
        assert!((b[0].weight - w).abs() < 1e-16 && (b[1].weight - w).abs() < 1e-16);
        assert!((w - 0.27566).abs() < 1e-5);
    }

    #[test]
    fn segments_tile_support() {
        let a = seq(&[0.7, 3.0, 3.0, 0.2, 9.5]);
        let s = segments(&a);
        assert_eq!(s.first().unwrap().lower, a.min());
        assert_eq!(s.last().unwrap().upper, a.max());
        assert!(s.windows(2).all(|w| w[0].upper == w[1].lower));
        assert!((support_length(&a) - (a.max() - a.min())).abs() < 1e-14);
    }

    #[test]
    fn repr_examples() {
        let a = seq(&[1.0, 4.0]);
        let g = geometric_mean_repr(&a, real(0.0), &opts()).unwrap();
        assert!((g.value.re - 2.0).abs() < 1e-12 && g.value.im == 0.0);
        let c = seq(&[3.0, 3.0, 3.0]);
        let z = Complex64::new(0.5, -2.0);
        let gc = geometric_mean_repr(&c, z, &opts()).unwrap();
        assert_eq!(gc.value, Complex64::new(3.0, 0.0) + z);
        assert_eq!(gc.nodes_used, 0);
        let b = seq(&[1.0, 2.0, 3.0]);
        let g3 = geometric_mean_repr(&b, real(1.0), &opts()).unwrap();
        assert!((g3.value.re - 24f64.cbrt()).abs() < 1e-11);
        assert!((g3.value.re - 2.884_499_1).abs() < 1e-7);
    }

    #[test]
    fn repr_complex_matches_direct() {
        let a = seq(&[0.5, 2.0, 2.0, 7.0]);
        for z in [Complex64::new(-3.0, 0.5), Complex64::new(10.0, -20.0), Complex64::new(-0.45, 0.0), Complex64::new(0.0, 1.0)] {
            let r = geometric_mean_repr(&a, z, &opts()).unwrap().value;
            let d = geometric_mean_shifted_direct(&a, z).unwrap();
            assert!((r - d).norm() <= 1e-9 * d.norm(), "z={z}: {r} vs {d}");
        }
    }

    #[test]
    fn repr_refuses_cut_and_pole() {
        let a = seq(&[1.0, 4.0]);
        assert!(matches!(geometric_mean_repr(&a, real(-2.0), &opts()), Err(Error::CutViolation { .. })));
        assert!(matches!(
            geometric_mean_repr(&a, real(-1.0 + 1e-7), &opts()),
            Err(Error::Quadrature(QuadratureError::PoleProximity { .. }))
        ));
        // constant sequences have no integral term, so no pole to fear
        let c = seq(&[1.0, 1.0]);
        assert!(geometric_mean_repr(&c, real(-1.0 + 1e-9), &opts()).is_ok());
    }

    #[test]
    fn derivative_examples() {
        let a = seq(&[1.0, 4.0]);
        let d1 = derivative_repr(&a, 0.0, 1, &opts()).unwrap();
        assert!((d1.value - 1.25).abs() < 1e-11);
        let far = derivative_repr(&a, 1e6, 1, &opts()).unwrap();
        assert!((far.value - 1.0).abs() < 1e-5);
        let b = seq(&[1.0, 2.0, 3.0]);
        let d2 = derivative_repr(&b, 0.0, 2, &opts()).unwrap();
        assert!(d2.value < 0.0);
        assert!(matches!(derivative_repr(&a, 0.0, 21, &opts()), Err(Error::OrderCap { .. })));
        assert!(matches!(derivative_repr(&a, 0.0, 0, &opts()), Err(Error::OrderCap { .. })));
        let c = seq(&[7.0, 7.0]);
        assert_eq!(derivative_repr(&c, 0.0, 1, &opts()).unwrap().value, 1.0);
        assert_eq!(derivative_repr(&c, 0.0, 5, &opts()).unwrap().value, 0.0);
    }

    #[test]
    fn second_derivative_closed_form_n2() {
        // G = sqrt((1+z)(4+z)); G'' = -(9/4) / G^3
        let a = seq(&[1.0, 4.0]);
        for z in [-0.5f64, 0.0, 2.0, 30.0] {
            let g = ((1.0 + z) * (4.0 + z)).sqrt();
            let exact = -2.25 / (g * g * g);
            let d2 = derivative_repr(&a, z, 2, &opts()).unwrap().value;
            assert!(((d2 - exact) / exact).abs() < 1e-9, "z={z}");
        }
    }

    #[test]
    fn gap_examples() {
        let a = seq(&[1.0, 4.0]);
        assert!((ag_gap(&a, &opts()).unwrap().value - 0.5).abs() < 1e-12);
        assert_eq!(ag_gap(&seq(&[2.0, 2.0]), &opts()).unwrap().value, 0.0);
        let b = seq(&[1.0, 2.0, 3.0]);
        let expected = 2.0 - geometric_mean_direct(&b);
        assert!((ag_gap(&b, &opts()).unwrap().value - expected).abs() < 1e-12);
        assert!((expected - 0.182_879_4).abs() < 1e-7);
    }

    #[test]
    fn gap_shrinks_under_shift() {
        let a = seq(&[0.3, 1.0, 6.0, 2.2]);
        let mut prev = f64::INFINITY;
        for i in 0..12 {
            let tau = 0.5 * i as f64;
            let g = ag_gap(&a.shifted(tau).unwrap(), &opts()).unwrap().value;
            assert!(g <= prev + 1e-12);
            prev = g;
        }
    }
}
