//! Validated input tuples and their sorted knot structure.

use crate::error::{Error, Result};

/// A non-empty tuple of finite positive reals `a = (a_1, ..., a_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSequence {
    values: Vec<f64>,
}

impl PositiveSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveEntry { index, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The ascending rearrangement `[a]`.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn knots(&self) -> SortedKnots {
        SortedKnots::from_sorted(&self.sorted())
    }

    /// The sequence with every entry shifted by `tau`.
    pub fn shifted(&self, tau: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v + tau).collect())
    }
}

impl TryFrom<Vec<f64>> for PositiveSequence {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl TryFrom<&[f64]> for PositiveSequence {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }
}

/// Distinct knots of `[a]` in ascending order with their multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedKnots {
    knots: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl SortedKnots {
    fn from_sorted(sorted: &[f64]) -> Self {
        let mut knots: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<usize> = Vec::new();
        for &v in sorted {
            match knots.last() {
                Some(&last) if last == v => *multiplicities.last_mut().unwrap() += 1,
                _ => {
                    knots.push(v);
                    multiplicities.push(1);
                }
            }
        }
        Self {
            knots,
            multiplicities,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Total count `n` including repeats.
    pub fn total(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.knots
            .iter()
            .copied()
            .zip(self.multiplicities.iter().copied())
    }

    /// Expands back to the ascending rearrangement.
    pub fn expand(&self) -> Vec<f64> {
        self.iter()
            .flat_map(|(k, m)| std::iter::repeat_n(k, m))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_positive() {
        assert_eq!(PositiveSequence::new(vec![]), Err(Error::EmptySequence));
        assert!(matches!(
            PositiveSequence::new(vec![1.0, 0.0]),
            Err(Error::NonPositiveEntry { index: 1, .. })
        ));
        assert!(PositiveSequence::new(vec![1.0, f64::NAN]).is_err());
        assert!(PositiveSequence::new(vec![f64::INFINITY]).is_err());
        assert!(PositiveSequence::new(vec![-2.0]).is_err());
    }

    #[test]
    fn knots_group_repeats() {
        let a = PositiveSequence::new(vec![3.0, 1.0, 3.0, 2.0, 1.0, 3.0]).unwrap();
        let k = a.knots();
        assert_eq!(k.knots(), &[1.0, 2.0, 3.0]);
        assert_eq!(k.multiplicities(), &[2, 1, 3]);
        assert_eq!(k.total(), 6);
        assert_eq!(k.expand(), a.sorted());
    }
}
