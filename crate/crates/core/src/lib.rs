//! Numerics for the geometric mean of shifted positive sequences: its
//! Stieltjes-type integral representation, the derivatives that make
//! `t -> G_n(a + t)` a Bernstein function, the bivariate kernel `rho`,
//! Stolarsky means and finite-order monotonicity classifiers.
//!
//! ```
//! use geomean_core::{geometric_mean_repr, Complex64, PositiveSequence, QuadratureOptions};
//!
//! let a = PositiveSequence::new(vec![1.0, 4.0])?;
//! let g = geometric_mean_repr(&a, Complex64::new(0.0, 0.0), &QuadratureOptions::default())?;
//! assert!((g.value.re - 2.0).abs() < 1e-10);
//! # Ok::<(), geomean_core::Error>(())
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex_branch;
pub mod cut;
pub mod error;
pub mod kernel;
pub mod means;
pub mod monotonicity;
pub mod quadrature;
pub mod sequence;
pub mod stieltjes;
pub mod stolarsky;
pub mod summation;

pub use complex_branch::{boundary_im_h, f_an, h_n, infinity_deviation_constant, limit_at_infinity_deviation, BoundaryProbe};
pub use cut::{distance_to_cut, principal_ln, CutPoint};
pub use error::{Error, Result};
pub use kernel::{bivariate_repr, q_function, rho, rho_second_form, RhoParams};
pub use means::{arithmetic_mean, geometric_mean_direct, geometric_mean_shifted_direct, shifted_mean_corpus, MeanKind, ShiftedMean};
pub use monotonicity::{
    check_bernstein, check_completely_monotonic, check_log_completely_monotonic, derivative_estimate, DerivativeEstimate, FunctionSampler,
    MonotonicityReport, Verdict,
};
pub use quadrature::{QuadratureError, QuadratureEstimate, QuadratureOptions};
pub use sequence::{PositiveSequence, SortedKnots};
pub use stieltjes::{ag_gap, density, derivative_repr, geometric_mean_repr, segments, DensitySegment, ReprEstimate};
pub use stolarsky::{stolarsky_mean, StolarskyBranch, StolarskyParams};
pub use num_complex::Complex64;
