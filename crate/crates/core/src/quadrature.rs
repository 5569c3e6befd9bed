//! Double-exponential (tanh-sinh) quadrature.
//!
//! The interval `[lower, upper]` is mapped onto the real line by
//! `x = mid + half * tanh(pi/2 * sinh(t))` and the resulting integrand is
//! summed with the trapezoidal rule at step `h = 2^-level`. Each level
//! reuses the previous one and only evaluates the new odd nodes. The
//! transformed weights decay double exponentially, so integrands with
//! algebraic endpoint behaviour `|x - endpoint|^p`, `p > -1`, still converge
//! quickly.
//!
//! Abscissae close to an endpoint are handed to the integrand together with
//! their exact distance from both endpoints (see [`Abscissa`]). Integrands
//! that blow up at an endpoint should use those distances rather than
//! recomputing `x - lower`, which has already lost all its digits there.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::summation::{Neumaier, NeumaierComplex};

/// Highest level the node table supports.
pub const MAX_LEVEL: usize = 15;

/// Levels below this are never accepted as converged.
const MIN_ACCEPT_LEVEL: usize = 3;

/// `e^-39 ~ 1.2e-17`: a decaying integrand is truncated where its
/// exponential envelope has fallen below double precision.
const TAIL_LOG: f64 = 39.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("invalid quadrature options: {0}")]
    InvalidOptions(String),

    #[error("invalid integration interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("kernel pole lies {distance:e} from the integration support")]
    PoleProximity { distance: f64 },

    #[error("integrand is not finite at interior node x = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("quadrature did not converge: error estimate {error_estimate:e} above target {target:e} after {nodes_used} nodes")]
    NotConverged {
        error_estimate: f64,
        target: f64,
        nodes_used: usize,
    },
}

/// Stopping controls for the engine.
///
/// A result is accepted once two successive levels differ by at most
/// `max(tolerance * |value|, absolute_tolerance)`, or by no more than the
/// rounding noise of the sum itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_level: usize,
    pub max_bisections: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            absolute_tolerance: 0.0,
            max_level: 12,
            max_bisections: 32,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.tolerance.is_finite() && self.tolerance >= 1e-14) {
            return Err(QuadratureError::InvalidOptions(format!(
                "tolerance {} must be finite and at least 1e-14",
                self.tolerance
            )));
        }
        if !(self.absolute_tolerance.is_finite() && self.absolute_tolerance >= 0.0) {
            return Err(QuadratureError::InvalidOptions(format!(
                "absolute tolerance {} must be finite and non-negative",
                self.absolute_tolerance
            )));
        }
        if self.max_level < MIN_ACCEPT_LEVEL || self.max_level > MAX_LEVEL {
            return Err(QuadratureError::InvalidOptions(format!(
                "max_level {} must lie in {MIN_ACCEPT_LEVEL}..={MAX_LEVEL}",
                self.max_level
            )));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        (self.tolerance * value).max(self.absolute_tolerance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate<T = f64> {
    pub value: T,
    pub error_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

/// A quadrature node in the original variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    /// `x - lower`, exact even when `x` has rounded onto `lower`.
    pub from_lower: f64,
    /// `upper - x`, exact even when `x` has rounded onto `upper`.
    pub from_upper: f64,
}

/// Values the engine can integrate: real and complex scalars.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    type Acc: Default + Copy;

    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
    fn accumulate(acc: &mut Self::Acc, x: Self);
    fn total(acc: &Self::Acc) -> Self;
}

impl QuadValue for f64 {
    type Acc = Neumaier;

    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn accumulate(acc: &mut Neumaier, x: f64) {
        acc.add(x)
    }
    fn total(acc: &Neumaier) -> f64 {
        acc.value()
    }
}

impl QuadValue for Complex64 {
    type Acc = NeumaierComplex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn accumulate(acc: &mut NeumaierComplex, x: Complex64) {
        acc.add(x)
    }
    fn total(acc: &NeumaierComplex) -> Complex64 {
        acc.value()
    }
}

/// One node of the transformed rule for `t >= 0`; the node at `-t` is its
/// mirror image.
#[derive(Debug, Clone, Copy)]
struct Node {
    weight: f64,
    /// `1 - tanh(pi/2 sinh t)`, computed without cancellation.
    delta: f64,
}

impl Node {
    fn at(t: f64) -> Self {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u).exp();
        let delta = 2.0 * e / (1.0 + e);
        // pi/2 cosh t / cosh^2 u, rewritten with e = exp(-2u)
        let weight = std::f64::consts::FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        Self { weight, delta }
    }
}

/// Nodes introduced at `level`: all integers `t = 0, 1, 2, ...` at level 0
/// and odd multiples of `2^-level` afterwards, stopping once the endpoint
/// distance underflows.
fn level_nodes(level: usize) -> &'static [Node] {
    static TABLE: [OnceLock<Vec<Node>>; MAX_LEVEL + 1] = [const { OnceLock::new() }; MAX_LEVEL + 1];
    TABLE[level].get_or_init(|| {
        let h = (0.5f64).powi(level as i32);
        let (start, stride) = if level == 0 { (0usize, 1usize) } else { (1, 2) };
        let mut nodes = Vec::new();
        let mut k = start;
        loop {
            let node = Node::at(k as f64 * h);
            if node.delta < f64::MIN_POSITIVE || node.weight == 0.0 {
                break;
            }
            nodes.push(node);
            k += stride;
        }
        nodes
    })
}

struct PieceRule<T: QuadValue> {
    value: T,
    error_estimate: f64,
    nodes_used: usize,
    converged: bool,
}

fn eval_point<T, F>(f: &F, p: Abscissa, weight: f64, lower: f64, upper: f64) -> Result<T, QuadratureError>
where
    T: QuadValue,
    F: Fn(Abscissa) -> T,
{
    let v = f(p);
    if v.is_finite_value() {
        Ok(v)
    } else if weight == 0.0 || p.x <= lower || p.x >= upper {
        // rounded onto an endpoint: the weight dominates any allowed blow-up
        Ok(T::zero())
    } else {
        Err(QuadratureError::NonFiniteIntegrand { at: p.x })
    }
}

/// Runs the level sequence on a single interval.
fn tanh_sinh_piece<T, F>(f: &F, lower: f64, upper: f64, opts: &QuadratureOptions) -> Result<PieceRule<T>, QuadratureError>
where
    T: QuadValue,
    F: Fn(Abscissa) -> T,
{
    let half = 0.5 * (upper - lower);
    let mut acc = T::Acc::default();
    let mut mass = Neumaier::new();
    let mut nodes_used = 0usize;
    let mut previous: Option<T> = None;
    let mut last = PieceRule {
        value: T::zero(),
        error_estimate: f64::INFINITY,
        nodes_used: 0,
        converged: false,
    };

    for level in 0..=opts.max_level {
        for (i, node) in level_nodes(level).iter().enumerate() {
            let far = half * (2.0 - node.delta);
            let near = half * node.delta;
            if level == 0 && i == 0 {
                let p = Abscissa {
                    x: lower + half,
                    from_lower: half,
                    from_upper: half,
                };
                let v = eval_point(f, p, node.weight, lower, upper)?;
                T::accumulate(&mut acc, v * node.weight);
                mass.add(v.magnitude() * node.weight);
                nodes_used += 1;
                continue;
            }
            let left = Abscissa {
                x: lower + near,
                from_lower: near,
                from_upper: far,
            };
            let right = Abscissa {
                x: upper - near,
                from_lower: far,
                from_upper: near,
            };
            let vl = eval_point(f, left, node.weight, lower, upper)?;
            let vr = eval_point(f, right, node.weight, lower, upper)?;
            T::accumulate(&mut acc, vl * node.weight);
            T::accumulate(&mut acc, vr * node.weight);
            mass.add((vl.magnitude() + vr.magnitude()) * node.weight);
            nodes_used += 2;
        }

        let h = (0.5f64).powi(level as i32);
        let value = T::total(&acc) * (h * half);
        let roundoff = 8.0 * f64::EPSILON * mass.value() * h * half.abs();
        if let Some(prev) = previous {
            let diff = (value - prev).magnitude();
            let error_estimate = diff.max(roundoff);
            let converged = level >= MIN_ACCEPT_LEVEL
                && (diff <= opts.target(value.magnitude()) || diff <= roundoff);
            last = PieceRule {
                value,
                error_estimate,
                nodes_used,
                converged,
            };
            if converged {
                break;
            }
        }
        previous = Some(value);
    }
    Ok(last)
}

fn check_interval(lower: f64, upper: f64) -> Result<(), QuadratureError> {
    if !(lower.is_finite() && upper.is_finite() && lower <= upper) {
        return Err(QuadratureError::InvalidInterval { lower, upper });
    }
    Ok(())
}

/// Integrates `f` over `[lower, upper]`, passing each node as an
/// [`Abscissa`].
///
/// Intervals whose level sequence stalls are bisected (largest error
/// first) until the summed estimate meets the target or
/// `opts.max_bisections` is spent. Pieces are always summed in ascending
/// order of their left endpoint.
pub fn integrate_finite_with<T, F>(f: F, lower: f64, upper: f64, opts: &QuadratureOptions) -> Result<QuadratureEstimate<T>, QuadratureError>
where
    T: QuadValue,
    F: Fn(Abscissa) -> T,
{
    opts.validate()?;
    check_interval(lower, upper)?;
    if lower == upper {
        return Ok(QuadratureEstimate {
            value: T::zero(),
            error_estimate: 0.0,
            nodes_used: 0,
            converged: true,
        });
    }

    // Each piece sees the global distances to the outer endpoints, so an
    // endpoint singularity keeps its exact offsets after bisection.
    let piece = |a: f64, b: f64| {
        let g = |p: Abscissa| {
            let from_lower = if a == lower { p.from_lower } else { p.x - lower };
            let from_upper = if b == upper { p.from_upper } else { upper - p.x };
            f(Abscissa {
                x: p.x,
                from_lower,
                from_upper,
            })
        };
        tanh_sinh_piece(&g, a, b, opts)
    };

    let mut pieces: Vec<(f64, f64, PieceRule<T>)> = vec![(lower, upper, piece(lower, upper)?)];
    let mut budget = opts.max_bisections;
    let mut nodes_used = pieces[0].2.nodes_used;

    let summarize = |pieces: &[(f64, f64, PieceRule<T>)]| {
        let mut acc = T::Acc::default();
        let mut err = Neumaier::new();
        for (_, _, p) in pieces {
            T::accumulate(&mut acc, p.value);
            err.add(p.error_estimate);
        }
        (T::total(&acc), err.value())
    };

    loop {
        let (value, err) = summarize(&pieces);
        let all_local = pieces.iter().all(|(_, _, p)| p.converged);
        let converged = all_local || err <= opts.target(value.magnitude());
        if converged || budget == 0 {
            return Ok(QuadratureEstimate {
                value,
                error_estimate: err,
                nodes_used,
                converged,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, (_, _, p))| !p.converged)
            .max_by(|x, y| x.1 .2.error_estimate.total_cmp(&y.1 .2.error_estimate))
            .map(|(i, _)| i)
            .expect("an unconverged piece exists");
        let (a, b, _) = pieces.remove(worst);
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            // interval exhausted at double precision
            budget = 0;
            pieces.insert(worst, (a, b, piece(a, b)?));
            continue;
        }
        let left = piece(a, mid)?;
        let right = piece(mid, b)?;
        nodes_used += left.nodes_used + right.nodes_used;
        pieces.insert(worst, (mid, b, right));
        pieces.insert(worst, (a, mid, left));
        budget -= 1;
    }
}

fn require_converged<T>(est: QuadratureEstimate<T>, opts: &QuadratureOptions) -> Result<QuadratureEstimate<T>, QuadratureError>
where
    T: QuadValue,
{
    if est.converged {
        Ok(est)
    } else {
        Err(QuadratureError::NotConverged {
            error_estimate: est.error_estimate,
            target: opts.target(est.value.magnitude()),
            nodes_used: est.nodes_used,
        })
    }
}

/// Integrates a real function over `[lower, upper]`.
///
/// Endpoint singularities `|x - endpoint|^p` with `p > -1` are allowed.
/// Returns [`QuadratureError::NotConverged`] if the target is missed after
/// `max_level` and `max_bisections`.
pub fn integrate_finite<F>(f: F, lower: f64, upper: f64, opts: &QuadratureOptions) -> Result<QuadratureEstimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let est = integrate_finite_with(|p: Abscissa| f(p.x), lower, upper, opts)?;
    require_converged(est, opts)
}

/// Like [`integrate_finite_with`], but fails unless the estimate converged.
pub fn integrate_finite_checked<T, F>(f: F, lower: f64, upper: f64, opts: &QuadratureOptions) -> Result<QuadratureEstimate<T>, QuadratureError>
where
    T: QuadValue,
    F: Fn(Abscissa) -> T,
{
    let est = integrate_finite_with(f, lower, upper, opts)?;
    require_converged(est, opts)
}

/// Integrates `f` over `[0, inf)` given that `|f(s)| <= C e^{-decay_rate s}`
/// for large `s`.
///
/// The range is truncated where the envelope drops below `e^-39`; the
/// remaining tail is approximated by `f(s_max) / decay_rate`, added to the
/// value and folded into the error estimate.
pub fn integrate_semiinfinite_decaying<F>(f: F, decay_rate: f64, opts: &QuadratureOptions) -> Result<QuadratureEstimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(decay_rate.is_finite() && decay_rate > 0.0) {
        return Err(QuadratureError::InvalidOptions(format!(
            "decay rate {decay_rate} must be finite and positive"
        )));
    }
    let s_max = TAIL_LOG / decay_rate;
    let body = integrate_finite_with(|p: Abscissa| f(p.x), 0.0, s_max, opts)?;
    let tail = f(s_max) / decay_rate;
    if !tail.is_finite() {
        return Err(QuadratureError::NonFiniteIntegrand { at: s_max });
    }
    let est = QuadratureEstimate {
        value: body.value + tail,
        error_estimate: body.error_estimate + tail.abs(),
        nodes_used: body.nodes_used + 1,
        converged: body.converged,
    };
    let est = QuadratureEstimate {
        converged: est.converged || est.error_estimate <= opts.target(est.value.abs()),
        ..est
    };
    require_converged(est, opts)
}
