//! Pre/post-selected two-level transitions.
//!
//! A system prepared in one state and later found in another reaches the
//! final state through two interfering routes (one per basis state of the
//! measured quantity). This module computes the two route amplitudes, the
//! conditional average an accurate measurement would give, and the weak
//! value obtained when the measurement barely disturbs the interference —
//! together with the signed weight pair that weak value averages over.

use num_complex::Complex64;
use thiserror::Error;

use crate::quasiprob::{AverageClassification, SignedDistribution};

/// Largest allowed deviation of |c_up|² + |c_down|² from unity.
pub const STATE_NORM_TOLERANCE: f64 = 1e-12;

/// Relative threshold on |a1 + a2| below which post-selection counts as
/// orthogonal to the evolved state and the weak value is reported as
/// singular instead of a huge garbage number.
pub const SINGULAR_OVERLAP_FACTOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransitionError {
    #[error("state is not normalized: |c_up|^2 + |c_down|^2 = {norm_sqr:?}")]
    StateNotNormalized { norm_sqr: f64 },
    #[error("state amplitudes cannot be normalized (zero or non-finite norm)")]
    UnnormalizableState,
    #[error("route amplitudes must be finite")]
    NonFiniteAmplitude,
    #[error("both route amplitudes vanish: no transition connects the selected states")]
    BothAmplitudesZero,
    #[error("pre/post overlap |a1 + a2| = {overlap:e} is below {threshold:e}; the weak value is singular")]
    SingularPostselection { overlap: f64, threshold: f64 },
}

/// Normalized two-level state with complex amplitudes on the up/down basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    c_up: Complex64,
    c_down: Complex64,
}

impl QubitState {
    /// Accepts amplitudes whose squared norm is 1 within `STATE_NORM_TOLERANCE`.
    pub fn new(c_up: Complex64, c_down: Complex64) -> Result<Self, TransitionError> {
        let norm_sqr = c_up.norm_sqr() + c_down.norm_sqr();
        // Written so that a NaN norm falls through to the error branch.
        if (norm_sqr - 1.0).abs() <= STATE_NORM_TOLERANCE {
            Ok(Self { c_up, c_down })
        } else {
            Err(TransitionError::StateNotNormalized { norm_sqr })
        }
    }

    /// Normalizes arbitrary finite, nonzero amplitudes. Returns the state and
    /// the norm that was divided out.
    pub fn normalized(c_up: Complex64, c_down: Complex64) -> Result<(Self, f64), TransitionError> {
        let norm = (c_up.norm_sqr() + c_down.norm_sqr()).sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(TransitionError::UnnormalizableState);
        }
        Ok((
            Self {
                c_up: c_up / norm,
                c_down: c_down / norm,
            },
            norm,
        ))
    }

    pub fn up() -> Self {
        Self {
            c_up: Complex64::ONE,
            c_down: Complex64::ZERO,
        }
    }

    pub fn down() -> Self {
        Self {
            c_up: Complex64::ZERO,
            c_down: Complex64::ONE,
        }
    }

    pub fn c_up(&self) -> Complex64 {
        self.c_up
    }

    pub fn c_down(&self) -> Complex64 {
        self.c_down
    }
}

/// Route amplitudes (a1 through "up", a2 through "down") for one transition.
///
/// At least one amplitude is nonzero and both are finite; everything else
/// about the pair is unconstrained, including overall scale and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    a1: Complex64,
    a2: Complex64,
}

/// Weak value of the up/down variable (+1 on route 1, −1 on route 2), with
/// the signed quasi-weights it averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult {
    /// Re[(a1 − a2)/(a1 + a2)] = quasi_p1 − quasi_p2.
    pub weak_value: f64,
    /// Re[a1/(a1 + a2)]; may lie far outside [0, 1].
    pub quasi_p1: f64,
    /// Re[a2/(a1 + a2)]; complements quasi_p1 to exactly 1.
    pub quasi_p2: f64,
    ratio: Complex64,
}

impl WeakValueResult {
    /// Full complex ratio (a1 − a2)/(a1 + a2), whose real part is the weak
    /// value. The imaginary part does not feed the pointer mean but is kept
    /// for diagnostics.
    pub fn complex_weak_value(&self) -> Complex64 {
        self.ratio
    }
}

impl AmplitudePair {
    pub fn new(a1: Complex64, a2: Complex64) -> Result<Self, TransitionError> {
        if !a1.is_finite() || !a2.is_finite() {
            return Err(TransitionError::NonFiniteAmplitude);
        }
        if a1 == Complex64::ZERO && a2 == Complex64::ZERO {
            return Err(TransitionError::BothAmplitudesZero);
        }
        Ok(Self { a1, a2 })
    }

    pub fn a1(&self) -> Complex64 {
        self.a1
    }

    pub fn a2(&self) -> Complex64 {
        self.a2
    }

    /// Both amplitudes multiplied by a power of two chosen so the larger
    /// modulus lands near 1. Power-of-two scaling is exact in binary floating
    /// point, so every amplitude ratio is preserved bit-for-bit while
    /// otherwise harmless inputs near 1e±300 stop overflowing intermediates.
    pub(crate) fn scaled_to_unit(&self) -> (Complex64, Complex64) {
        let m = self.a1.norm().max(self.a2.norm());
        let exponent = m.log2().round().clamp(-1022.0, 1023.0);
        let scale = (-exponent).exp2();
        (self.a1 * scale, self.a2 * scale)
    }

    /// Conditional average of the up/down variable under an accurate (fully
    /// projective) intermediate measurement: the interference term is wiped
    /// out and the routes contribute |a1|², |a2|².
    pub fn strong_average(&self) -> f64 {
        let (r1, r2) = self.scaled_to_unit();
        let w1 = r1.norm_sqr();
        let w2 = r2.norm_sqr();
        (w1 - w2) / (w1 + w2)
    }

    /// Weak value and its quasi-weight decomposition.
    ///
    /// quasi_p1 is computed as Re[a1/(a1+a2)] and quasi_p2 as its exact
    /// complement 1 − quasi_p1, which keeps the pair summing to 1 at full
    /// precision even when both weights are enormous.
    pub fn weak_value(&self) -> Result<WeakValueResult, TransitionError> {
        let (r1, r2) = self.scaled_to_unit();
        let s = r1 + r2;
        let overlap = s.norm();
        let m = r1.norm().max(r2.norm());
        let threshold = SINGULAR_OVERLAP_FACTOR * m;
        if overlap <= threshold {
            return Err(TransitionError::SingularPostselection { overlap, threshold });
        }
        let quasi_p1 = (r1 / s).re;
        let quasi_p2 = 1.0 - quasi_p1;
        Ok(WeakValueResult {
            weak_value: quasi_p1 - quasi_p2,
            quasi_p1,
            quasi_p2,
            ratio: (r1 - r2) / s,
        })
    }

    /// Signed-distribution view of the weak value: values ±1 weighted by the
    /// quasi-weight pair, classified against [−1, 1].
    pub fn classify_weak(&self) -> Result<AverageClassification, TransitionError> {
        let wv = self.weak_value()?;
        let dist = SignedDistribution::new(vec![(1.0, wv.quasi_p1), (-1.0, wv.quasi_p2)])
            .expect("complementary quasi-weights always form a valid signed distribution");
        Ok(dist.classify())
    }
}

/// Route amplitudes for the transition from `pre` to `post`: a1 = ⟨post|up⟩⟨up|pre⟩
/// and a2 = ⟨post|down⟩⟨down|pre⟩, with no evolution between the selections.
pub fn transition_amplitudes(
    pre: &QubitState,
    post: &QubitState,
) -> Result<AmplitudePair, TransitionError> {
    let a1 = post.c_up().conj() * pre.c_up();
    let a2 = post.c_down().conj() * pre.c_down();
    AmplitudePair::new(a1, a2)
}
