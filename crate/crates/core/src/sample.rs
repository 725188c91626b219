use crate::error::{Error, Result};

/// Observations sorted ascending. Estimators that need order statistics or
/// exceedances share one sort per replication through this type.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sorts `values`. Rejects empty input and non-finite observations.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateSample("empty sample".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::DegenerateSample(format!(
                "non-finite observation {bad}"
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Observations strictly greater than `u`, ascending.
    pub fn exceeding(&self, u: f64) -> &[f64] {
        let start = self.values.partition_point(|&v| v <= u);
        &self.values[start..]
    }

    /// Indices `[lo, hi)` of observations inside `[a, b]`.
    pub fn window(&self, a: f64, b: f64) -> (usize, usize) {
        let lo = self.values.partition_point(|&v| v < a);
        let hi = self.values.partition_point(|&v| v <= b);
        (lo, hi.max(lo))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample standard deviation (n − 1 denominator); 0 for a single point.
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m) * (v - m)).sum();
        (ss / (n - 1) as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_slices_exceedances() {
        let s = SortedSample::new(vec![3.0, 1.0, 2.0, 5.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0, 5.0]);
        assert_eq!(s.exceeding(2.0), &[3.0, 5.0]);
        assert_eq!(s.exceeding(5.0), &[] as &[f64]);
        assert_eq!(s.window(1.5, 3.0), (1, 3));
    }

    #[test]
    fn rejects_nan_and_empty() {
        assert!(SortedSample::new(vec![]).is_err());
        assert!(SortedSample::new(vec![1.0, f64::NAN]).is_err());
    }
}
