//! Principal-branch arithmetic on the cut plane `C \ (-inf, origin]`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimum distance from the cut for a point to be accepted.
pub const CUT_MARGIN: f64 = 1e-12;

/// Principal logarithm with argument in `(-pi, pi]`.
///
/// A negative real number carrying a negative zero imaginary part is read
/// as lying on the upper edge of the cut.
#[inline]
pub fn principal_ln(z: Complex64) -> Complex64 {
    let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
    Complex64::new(z.norm().ln(), z.im.atan2(z.re))
}

/// A complex argument validated against the half-line `(-inf, origin]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPoint {
    value: Complex64,
    origin: f64,
}

impl CutPoint {
    pub fn new(value: Complex64, origin: f64) -> Result<Self> {
        let distance = distance_to_cut(value, origin);
        if !(value.is_finite() && distance >= CUT_MARGIN) {
            return Err(Error::CutViolation {
                z: value,
                origin,
                distance,
            });
        }
        Ok(Self { value, origin })
    }

    pub fn real(x: f64, origin: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0), origin)
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn distance_to_cut(&self) -> f64 {
        distance_to_cut(self.value, self.origin)
    }

    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

/// Euclidean distance from `z` to the half-line `(-inf, origin]`.
pub fn distance_to_cut(z: Complex64, origin: f64) -> f64 {
    if z.re <= origin {
        z.im.abs()
    } else {
        (z - origin).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn principal_argument_range() {
        assert_eq!(principal_ln(Complex64::new(-1.0, 0.0)).im, PI);
        assert_eq!(principal_ln(Complex64::new(-1.0, -0.0)).im, PI);
        assert!(principal_ln(Complex64::new(-1.0, -1e-300)).im < 0.0);
        assert_eq!(principal_ln(Complex64::new(1.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cut_distance() {
        assert_eq!(distance_to_cut(Complex64::new(-5.0, 2.0), -1.0), 2.0);
        assert_eq!(distance_to_cut(Complex64::new(2.0, 0.0), -1.0), 3.0);
        assert!(CutPoint::real(-1.0, -1.0).is_err());
        assert!(CutPoint::real(-3.0, -1.0).is_err());
        assert!(CutPoint::new(Complex64::new(-3.0, 1e-13), -1.0).is_err());
        assert!(CutPoint::new(Complex64::new(-3.0, 1e-6), -1.0).is_ok());
        assert!(CutPoint::new(Complex64::new(f64::NAN, 1.0), 0.0).is_err());
    }
}
