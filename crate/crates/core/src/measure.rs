//! Empirical measures on the half-line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multiset of nonnegative reals, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    values: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Parse(format!(
                "empirical measure value {bad} is not a finite nonnegative real"
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn from_counts<I: IntoIterator<Item = usize>>(counts: I) -> Result<Self> {
        Self::new(counts.into_iter().map(|c| c as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in ascending order.
    pub fn sorted(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    /// Number of values strictly greater than `t`.
    pub fn count_above(&self, t: f64) -> usize {
        self.len() - self.values.partition_point(|&v| v <= t)
    }

    /// Right tail `mu_n(t, inf) = |{i : x_i > t}| / n`.
    pub fn tail(&self, t: f64) -> f64 {
        self.count_above(t) as f64 / self.len() as f64
    }

    /// `(1/n) * sum_{x_i > t} x_i`, the size-biased tail mass.
    pub fn size_biased_tail(&self, t: f64) -> f64 {
        let start = self.values.partition_point(|&v| v <= t);
        self.values[start..].iter().sum::<f64>() / self.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rejected() {
        assert!(matches!(EmpiricalMeasure::new(vec![]), Err(Error::EmptyMeasure)));
    }

    #[test]
    fn negative_rejected() {
        assert!(EmpiricalMeasure::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn tail_is_strict() {
        let m = EmpiricalMeasure::new(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(m.sorted(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(m.count_above(2.0), 1);
        assert_eq!(m.tail(0.5), 1.0);
        assert_eq!(m.tail(3.0), 0.0);
        assert_eq!(m.size_biased_tail(1.0), 7.0 / 4.0);
    }
}
