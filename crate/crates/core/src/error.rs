use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::QuadratureError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sequence must contain at least one entry")]
    EmptySequence,

    #[error("sequence entry {index} is {value}; entries must be finite and positive")]
    NonPositiveEntry { index: usize, value: f64 },

    #[error("point {z} lies within {distance:e} of the cut (-inf, {origin}]")]
    CutViolation { z: Complex64, origin: f64, distance: f64 },

    #[error("degenerate arguments: {0}")]
    DegenerateArgs(&'static str),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("derivative order {order} exceeds the cap of {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("finite-difference stencil at t = {t} with step {step:e} leaves the domain ({low}, {high})")]
    StencilOutOfDomain { t: f64, step: f64, low: f64, high: f64 },

    #[error("function is not positive at t = {t} (value {value})")]
    NonPositiveFunction { t: f64, value: f64 },

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}
