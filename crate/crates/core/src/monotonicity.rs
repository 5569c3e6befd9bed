//! Finite-order sign-pattern checks for completely monotonic,
//! logarithmically completely monotonic and Bernstein functions.
//!
//! A pass at order `K` is evidence, not proof: only derivatives up to `K`
//! are inspected, on a fixed 64-point grid.

use crate::error::{Error, Result};
use crate::means::{geometric_mean_direct, MeanKind, ShiftedMean};
use crate::quadrature::QuadratureOptions;
use crate::sequence::PositiveSequence;
use crate::stieltjes::{derivative_repr, MAX_DERIVATIVE_ORDER};

/// Grid size used by every classifier.
pub const GRID_POINTS: usize = 64;
/// Highest order accepted when derivatives come from finite differences.
pub const MAX_FD_ORDER: usize = 6;
/// Left margin of the grid, `min(1, span)` times this.
const GRID_MARGIN: f64 = 0.05;

type Eval<'a> = Box<dyn Fn(f64) -> f64 + 'a>;
type DerivEval<'a> = Box<dyn Fn(f64, usize) -> Result<f64> + 'a>;

/// A function on the open interval `(domain_low, domain_high)`, optionally
/// with exact derivatives.
pub struct FunctionSampler<'a> {
    domain_low: f64,
    domain_high: f64,
    eval: Eval<'a>,
    derivatives: Option<DerivEval<'a>>,
}

impl std::fmt::Debug for FunctionSampler<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionSampler")
            .field("domain_low", &self.domain_low)
            .field("domain_high", &self.domain_high)
            .field("analytic_derivatives", &self.derivatives.is_some())
            .finish()
    }
}

impl<'a> FunctionSampler<'a> {
    pub fn new(domain_low: f64, domain_high: f64, eval: impl Fn(f64) -> f64 + 'a) -> Result<Self> {
        if !(domain_low.is_finite() && domain_high.is_finite() && domain_low < domain_high) {
            return Err(Error::Domain(format!("empty sampling domain ({domain_low}, {domain_high})")));
        }
        Ok(Self {
            domain_low,
            domain_high,
            eval: Box::new(eval),
            derivatives: None,
        })
    }

    /// Attaches `(t, k) -> f^(k)(t)` for `k >= 1`.
    pub fn with_derivatives(mut self, d: impl Fn(f64, usize) -> Result<f64> + 'a) -> Self {
        self.derivatives = Some(Box::new(d));
        self
    }

    /// `t -> M(x + t, y + t)` on `(-min(x, y), domain_high)`. The geometric
    /// entry carries derivatives from the integral representation.
    pub fn shifted_mean(mean: ShiftedMean, domain_high: f64, opts: QuadratureOptions) -> Result<Self> {
        let sampler = Self::new(mean.domain_low(), domain_high, move |t| mean.eval(t))?;
        if mean.kind() == MeanKind::Geometric {
            let (x, y) = mean.args();
            let a = PositiveSequence::new(vec![x, y])?;
            return Ok(sampler.with_derivatives(move |t, k| Ok(derivative_repr(&a, t, k, &opts)?.value)));
        }
        Ok(sampler)
    }

    /// `t -> G_n^(order)(a + t)` with exact derivatives of every order up
    /// to the representation's cap.
    pub fn geometric_mean_derivative(a: PositiveSequence, order: usize, domain_high: f64, opts: QuadratureOptions) -> Result<Self> {
        let low = -a.min();
        let base = a.clone();
        let f = move |t: f64| {
            if order == 0 {
                base.shifted(t).map_or(f64::NAN, |s| geometric_mean_direct(&s))
            } else {
                derivative_repr(&base, t, order, &opts).map_or(f64::NAN, |e| e.value)
            }
        };
        Ok(Self::new(low, domain_high, f)?.with_derivatives(move |t, k| Ok(derivative_repr(&a, t, k + order, &opts)?.value)))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_low, self.domain_high)
    }

    pub fn has_derivatives(&self) -> bool {
        self.derivatives.is_some()
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// 64 points, geometrically spaced in `t - domain_low` from
    /// `0.05 min(1, span)` to `0.95 span`.
    pub fn grid(&self) -> Vec<f64> {
        let span = self.domain_high - self.domain_low;
        let lo = GRID_MARGIN * span.min(1.0);
        let hi = 0.95 * span;
        let ratio = (hi / lo).powf(1.0 / (GRID_POINTS - 1) as f64);
        (0..GRID_POINTS)
            .map(|i| self.domain_low + lo * ratio.powi(i as i32))
            .collect()
    }

    /// A step for order `k` at `t` whose stencil uses at most a quarter of
    /// the room to the nearer boundary.
    fn step_for(&self, t: f64, k: usize) -> f64 {
        let room = (t - self.domain_low).min(self.domain_high - t);
        0.5 * room / k.max(1) as f64
    }
}

/// A finite-difference derivative with its estimated uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub uncertainty: f64,
}

fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0f64; k + 1];
    for j in 1..k {
        row[j] = row[j - 1] * (k + 1 - j) as f64 / j as f64;
    }
    row
}

fn finite_difference(g: &dyn Fn(f64) -> Result<f64>, t: f64, k: usize, h: f64, low: f64, high: f64) -> Result<DerivativeEstimate> {
    if k == 0 {
        return Ok(DerivativeEstimate {
            value: g(t)?,
            uncertainty: 0.0,
        });
    }
    let reach = 0.5 * k as f64 * h;
    if !(h > 0.0 && t - reach > low && t + reach < high) {
        return Err(Error::StencilOutOfDomain { t, step: h, low, high });
    }
    let coeffs = binomial_row(k);
    // k-th central difference on the points t + (k/2 - j) h
    let central = |step: f64| -> Result<(f64, f64)> {
        let mut acc = crate::summation::Neumaier::new();
        let mut mass = 0.0;
        for (j, c) in coeffs.iter().enumerate() {
            let v = g(t + (0.5 * k as f64 - j as f64) * step)?;
            let signed = if j % 2 == 0 { *c } else { -*c };
            acc.add(signed * v);
            mass += c * v.abs();
        }
        let scale = step.powi(k as i32);
        Ok((acc.value() / scale, mass / scale))
    };
    // the central difference has an even expansion in the step, so each
    // halving removes the next h^2 term
    let (coarse, _) = central(h)?;
    let (mid, _) = central(0.5 * h)?;
    let (fine, fine_mass) = central(0.25 * h)?;
    let first = (4.0 * mid - coarse) / 3.0;
    let second = (4.0 * fine - mid) / 3.0;
    let value = (16.0 * second - first) / 15.0;
    let uncertainty = (second - first).abs() / 15.0 + 64.0 * f64::EPSILON * fine_mass;
    Ok(DerivativeEstimate { value, uncertainty })
}

fn finite_value(t: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("sampled function is not finite at t = {t}")))
    }
}

/// Central finite difference of order `k` with two Richardson steps on
/// `h`, `h/2` and `h/4`.
pub fn derivative_estimate(f: &FunctionSampler<'_>, t: f64, k: usize, h: f64) -> Result<DerivativeEstimate> {
    let g = |s: f64| finite_value(s, f.eval(s));
    finite_difference(&g, t, k, h, f.domain_low, f.domain_high)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    PassCM,
    PassBernstein,
    PassLogCM,
    FailAtOrder(usize),
}

impl Verdict {
    pub fn passed(self) -> bool {
        !matches!(self, Verdict::FailAtOrder(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub max_order_checked: usize,
    /// Entry `k` is the grid minimum of the signed order-`k` quantity.
    pub per_order_min: Vec<f64>,
    pub verdict: Verdict,
    pub tolerance_used: f64,
    /// Where the first violation occurred, if any.
    pub failure_at: Option<f64>,
}

#[derive(Clone, Copy)]
enum Class {
    Cm,
    Bernstein,
    LogCm,
}

impl Class {
    /// Required sign of the order-`k` derivative.
    fn sign(self, k: usize) -> f64 {
        let odd = k % 2 == 1;
        match self {
            Class::Cm | Class::LogCm => {
                if odd {
                    -1.0
                } else {
                    1.0
                }
            }
            Class::Bernstein => {
                if k == 0 || odd {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    fn pass(self) -> Verdict {
        match self {
            Class::Cm => Verdict::PassCM,
            Class::Bernstein => Verdict::PassBernstein,
            Class::LogCm => Verdict::PassLogCM,
        }
    }
}

fn check_order_limit(f: &FunctionSampler<'_>, max_order: usize, analytic: bool) -> Result<()> {
    let cap = if analytic && f.has_derivatives() {
        MAX_DERIVATIVE_ORDER
    } else {
        MAX_FD_ORDER
    };
    if max_order > cap {
        return Err(Error::OrderCap { order: max_order, cap });
    }
    Ok(())
}

/// Scans orders `0..=max_order`. A grid value counts as a violation only
/// when its signed value is below `-(tol * scale_k + uncertainty)`, with
/// `scale_k` the largest magnitude seen at that order.
fn classify(f: &FunctionSampler<'_>, max_order: usize, tol: f64, class: Class) -> Result<MonotonicityReport> {
    let use_analytic = !matches!(class, Class::LogCm);
    check_order_limit(f, max_order, use_analytic)?;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::Domain(format!("tolerance must be non-negative, got {tol}")));
    }
    let grid = f.grid();
    let (low, high) = f.domain();

    let log_f = |s: f64| -> Result<f64> {
        let v = f.eval(s);
        if !(v > 0.0) {
            return Err(Error::NonPositiveFunction { t: s, value: v });
        }
        finite_value(s, v.ln())
    };
    let plain = |s: f64| finite_value(s, f.eval(s));

    let mut per_order_min = Vec::with_capacity(max_order + 1);
    let mut verdict = class.pass();
    let mut failure_at = None;

    for k in 0..=max_order {
        let mut samples = Vec::with_capacity(grid.len());
        for &t in &grid {
            let est = match class {
                Class::LogCm if k == 0 => DerivativeEstimate {
                    value: plain(t)?,
                    uncertainty: 0.0,
                },
                Class::LogCm => finite_difference(&log_f, t, k, f.step_for(t, k), low, high)?,
                _ if k == 0 => DerivativeEstimate {
                    value: plain(t)?,
                    uncertainty: 0.0,
                },
                _ => match (&f.derivatives, use_analytic) {
                    (Some(d), true) => DerivativeEstimate {
                        value: finite_value(t, d(t, k)?)?,
                        uncertainty: 0.0,
                    },
                    _ => finite_difference(&plain, t, k, f.step_for(t, k), low, high)?,
                },
            };
            samples.push((t, class.sign(k) * est.value, est.uncertainty));
        }
        if matches!(class, Class::LogCm) && k == 0 {
            if let Some(&(t, v, _)) = samples.iter().find(|s| !(s.1 > 0.0)) {
                return Err(Error::NonPositiveFunction { t, value: v });
            }
        }
        let scale = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
        per_order_min.push(samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min));
        let checked = !(matches!(class, Class::LogCm) && k == 0);
        if checked && verdict.passed() {
            if let Some(&(t, _, _)) = samples.iter().find(|(_, v, u)| *v < -(tol * scale + u)) {
                verdict = Verdict::FailAtOrder(k);
                failure_at = Some(t);
            }
        }
    }

    Ok(MonotonicityReport {
        max_order_checked: max_order,
        per_order_min,
        verdict,
        tolerance_used: tol,
        failure_at,
    })
}

/// `(-1)^k f^(k) >= 0` for `k = 0..=max_order`.
pub fn check_completely_monotonic(f: &FunctionSampler<'_>, max_order: usize, tol: f64) -> Result<MonotonicityReport> {
    classify(f, max_order, tol, Class::Cm)
}

/// `f >= 0` and `f'` completely monotonic up to order `max_order - 1`,
/// i.e. `(-1)^{k-1} f^(k) >= 0` for `k = 1..=max_order`.
pub fn check_bernstein(f: &FunctionSampler<'_>, max_order: usize, tol: f64) -> Result<MonotonicityReport> {
    classify(f, max_order, tol, Class::Bernstein)
}

/// `(-1)^k (ln f)^(k) >= 0` for `k = 1..=max_order`; entry 0 of the report
/// holds `min f`. Always uses finite differences of `ln f`.
pub fn check_log_completely_monotonic(f: &FunctionSampler<'_>, max_order: usize, tol: f64) -> Result<MonotonicityReport> {
    classify(f, max_order, tol, Class::LogCm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::shifted_mean_corpus;

    fn exp_neg() -> FunctionSampler<'static> {
        FunctionSampler::new(0.1, 10.0, |t: f64| (-t).exp()).unwrap()
    }

    #[test]
    fn grid_shape() {
        let f = FunctionSampler::new(-1.0, 1000.0, |t| t).unwrap();
        let g = f.grid();
        assert_eq!(g.len(), GRID_POINTS);
        assert!((g[0] - (-0.95)).abs() < 1e-12);
        assert!((g[63] - (-1.0 + 950.95)).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fd_examples() {
        let sq = FunctionSampler::new(-5.0, 5.0, |t| t * t).unwrap();
        let d = derivative_estimate(&sq, 1.0, 2, 0.1).unwrap();
        assert!((d.value - 2.0).abs() < 1e-10);
        let e = derivative_estimate(&exp_neg(), 0.5, 3, 0.05).unwrap();
        assert!((e.value + (-0.5f64).exp()).abs() < 1e-7, "{}", e.value);
        let g = FunctionSampler::shifted_mean(shifted_mean_corpus(MeanKind::Geometric, 1.0, 4.0).unwrap(), 100.0, QuadratureOptions::default()).unwrap();
        let d1 = derivative_estimate(&g, 0.0, 1, 0.01).unwrap();
        assert!((d1.value - 1.25).abs() < 1e-8);
        assert!(matches!(derivative_estimate(&sq, 4.9, 2, 0.5), Err(Error::StencilOutOfDomain { .. })));
    }

    #[test]
    fn cm_examples() {
        let r = check_completely_monotonic(&exp_neg(), 6, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::PassCM);
        assert_eq!(r.per_order_min.len(), 7);
        let lin = FunctionSampler::new(0.1, 10.0, |t| t).unwrap();
        let r = check_completely_monotonic(&lin, 6, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::FailAtOrder(1));
        assert!(r.failure_at.is_some());
        assert!(matches!(check_completely_monotonic(&lin, 7, 1e-6), Err(Error::OrderCap { .. })));
    }

    #[test]
    fn bernstein_examples() {
        let opts = QuadratureOptions::default();
        for (x, y) in [(1.0, 3.0), (2.0, 2.0), (0.4, 9.0)] {
            let a = FunctionSampler::shifted_mean(shifted_mean_corpus(MeanKind::Arithmetic, x, y).unwrap(), 1000.0, opts).unwrap();
            assert_eq!(check_bernstein(&a, 5, 1e-6).unwrap().verdict, Verdict::PassBernstein);
        }
        let h = FunctionSampler::shifted_mean(shifted_mean_corpus(MeanKind::Harmonic, 1.0, 4.0).unwrap(), 1000.0, opts).unwrap();
        assert_eq!(check_bernstein(&h, 5, 1e-6).unwrap().verdict, Verdict::PassBernstein);
        assert_eq!(check_bernstein(&exp_neg(), 5, 1e-6).unwrap().verdict, Verdict::FailAtOrder(1));
    }

    #[test]
    fn log_cm_examples() {
        assert_eq!(check_log_completely_monotonic(&exp_neg(), 4, 1e-6).unwrap().verdict, Verdict::PassLogCM);
        let i = shifted_mean_corpus(MeanKind::Identric, 1.0, 4.0).unwrap();
        let recip = FunctionSampler::new(i.domain_low(), 1000.0, move |t| 1.0 / i.eval(t)).unwrap();
        assert_eq!(check_log_completely_monotonic(&recip, 4, 1e-6).unwrap().verdict, Verdict::PassLogCM);
        let g = shifted_mean_corpus(MeanKind::Geometric, 1.0, 4.0).unwrap();
        let gs = FunctionSampler::new(g.domain_low(), 1000.0, move |t| g.eval(t)).unwrap();
        assert_eq!(check_log_completely_monotonic(&gs, 4, 1e-6).unwrap().verdict, Verdict::FailAtOrder(1));
        let neg = FunctionSampler::new(0.0, 1.0, |t| t - 0.5).unwrap();
        assert!(matches!(check_log_completely_monotonic(&neg, 2, 1e-6), Err(Error::NonPositiveFunction { .. })));
    }

    #[test]
    fn geometric_derivative_is_cm_to_order_ten() {
        let a = PositiveSequence::new(vec![1.0, 4.0]).unwrap();
        let f = FunctionSampler::geometric_mean_derivative(a, 1, 1000.0, QuadratureOptions::default()).unwrap();
        let r = check_completely_monotonic(&f, 10, 1e-12).unwrap();
        assert_eq!(r.verdict, Verdict::PassCM, "{r:?}");
        assert!(r.per_order_min.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let f = FunctionSampler::new(0.0, 1.0, |t| if t > 0.5 { f64::NAN } else { t }).unwrap();
        assert!(matches!(check_completely_monotonic(&f, 1, 1e-6), Err(Error::Domain(_))));
    }
}
