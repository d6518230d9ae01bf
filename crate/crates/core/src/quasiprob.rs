//! Finite signed distributions and the normal/anomalous classification of
//! their weighted averages.
//!
//! A weighted average over outcome values is *normal* when it lies inside the
//! closed range spanned by the values, and *anomalous* when it escapes that
//! range. Escaping is only possible when at least one weight is negative.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sum::{compensated_sum, CompensatedSum};

/// Largest allowed deviation of a weight sum from unity.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("distribution needs at least one (value, weight) entry")]
    Empty,
    #[error("values and weights must all be finite")]
    NonFinite,
    #[error("values must be strictly decreasing (duplicates are not merged)")]
    ValuesNotStrictlyDecreasing,
    #[error("weights sum to {sum:?}, expected 1 within 1e-12")]
    WeightSumMismatch { sum: f64 },
}

/// Whether a weighted average lies inside or outside its value range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageKind {
    Normal,
    Anomalous,
}

/// A weighted average together with its classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageClassification {
    pub mean: f64,
    pub kind: AverageKind,
    pub has_negative_weight: bool,
}

/// Outcome values paired with real weights that sum to one.
///
/// Values are kept strictly decreasing; weights may have either sign. All
/// accumulation is compensated, since sign-mixed weights are allowed to be
/// orders of magnitude larger than their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDistribution {
    entries: Vec<(f64, f64)>,
}

impl SignedDistribution {
    /// Builds a distribution from `(value, weight)` pairs already ordered by
    /// strictly decreasing value.
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self, DistributionError> {
        if entries.is_empty() {
            return Err(DistributionError::Empty);
        }
        if entries
            .iter()
            .any(|(v, w)| !v.is_finite() || !w.is_finite())
        {
            return Err(DistributionError::NonFinite);
        }
        if entries.windows(2).any(|pair| pair[0].0 <= pair[1].0) {
            return Err(DistributionError::ValuesNotStrictlyDecreasing);
        }
        let sum = compensated_sum(entries.iter().map(|&(_, w)| w));
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(DistributionError::WeightSumMismatch { sum });
        }
        Ok(Self { entries })
    }

    /// Builds a distribution from pairs in any order, sorting by decreasing
    /// value first. Duplicate values are rejected, not merged.
    pub fn from_pairs(mut entries: Vec<(f64, f64)>) -> Result<Self, DistributionError> {
        if entries
            .iter()
            .any(|(v, w)| !v.is_finite() || !w.is_finite())
        {
            return Err(DistributionError::NonFinite);
        }
        entries.sort_by(|a, b| b.0.total_cmp(&a.0));
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty entry lists
    }

    /// Largest outcome value (the first entry).
    pub fn max_value(&self) -> f64 {
        self.entries[0].0
    }

    /// Smallest outcome value (the last entry).
    pub fn min_value(&self) -> f64 {
        self.entries[self.entries.len() - 1].0
    }

    pub fn has_negative_weight(&self) -> bool {
        self.entries.iter().any(|&(_, w)| w < 0.0)
    }

    /// Σ value·weight with compensated accumulation in entry order.
    pub fn weighted_average(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for &(value, weight) in &self.entries {
            acc.add(value * weight);
        }
        acc.value()
    }

    /// Classifies the weighted average against the closed value range.
    ///
    /// The range check carries a slack of `WEIGHT_SUM_TOLERANCE` times the
    /// value scale: that is exactly how far a genuinely nonnegative weight
    /// set can push the mean outside the range, given that weight sums are
    /// only required to equal one within that same tolerance. Means on the
    /// boundary count as normal.
    pub fn classify(&self) -> AverageClassification {
        let mean = self.weighted_average();
        let hi = self.max_value();
        let lo = self.min_value();
        let slack = WEIGHT_SUM_TOLERANCE * hi.abs().max(lo.abs()).max(1.0);
        let kind = if mean >= lo - slack && mean <= hi + slack {
            AverageKind::Normal
        } else {
            AverageKind::Anomalous
        };
        AverageClassification {
            mean,
            kind,
            has_negative_weight: self.has_negative_weight(),
        }
    }
}
