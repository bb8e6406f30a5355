use crate::error::{Error, Result};

/// Values `(f(r), f'(r), ..., f^(J)(r))` at a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    point: f64,
    values: Vec<f64>,
}

impl Jet {
    /// Rejects empty jets and non-positive `f(r)`.
    pub fn new(point: f64, values: Vec<f64>) -> Result<Self> {
        match values.first() {
            Some(&v) if v > 0.0 && v.is_finite() => Ok(Jet { point, values }),
            Some(&v) => Err(Error::NonpositiveWarp { r: point, value: v }),
            None => Err(Error::InsufficientJetOrder {
                needed: 0,
                available: 0,
            }),
        }
    }

    /// No positivity check; evaluation routines still validate.
    pub fn new_unchecked(point: f64, values: Vec<f64>) -> Self {
        Jet { point, values }
    }

    pub fn point(&self) -> f64 {
        self.point
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Highest derivative order stored.
    pub fn order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn value(&self) -> f64 {
        self.values[0]
    }

    pub fn derivative(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }
}
