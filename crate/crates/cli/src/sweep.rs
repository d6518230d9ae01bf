//! Sweep-step generation: which parameter varies, over what range, on which
//! scale. Step values hit both endpoints exactly so sweep CSV edges can be
//! compared bit-for-bit against single-shot runs.

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    DeltaF,
    Delta,
    Lambda,
    MixWidth,
}

impl SweepParameter {
    /// Name used for the first CSV column.
    pub fn column(&self) -> &'static str {
        match self {
            SweepParameter::DeltaF => "delta_f",
            SweepParameter::Delta => "delta",
            SweepParameter::Lambda => "lambda",
            SweepParameter::MixWidth => "mix_width",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub n_steps: usize,
    pub scale: SweepScale,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::input("sweep bounds must be finite"));
        }
        if self.start >= self.stop {
            return Err(CliError::input(format!(
                "sweep start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.n_steps < 2 {
            return Err(CliError::input("sweep needs at least 2 steps"));
        }
        if self.scale == SweepScale::Log && self.start <= 0.0 {
            return Err(CliError::input(format!(
                "log-scale sweep requires start > 0, got {}",
                self.start
            )));
        }
        Ok(())
    }

    /// The step values, first exactly `start`, last exactly `stop`.
    pub fn steps(&self) -> Vec<f64> {
        let n = self.n_steps;
        (0..n)
            .map(|i| {
                if i == 0 {
                    self.start
                } else if i == n - 1 {
                    self.stop
                } else {
                    let t = i as f64 / (n - 1) as f64;
                    match self.scale {
                        SweepScale::Linear => self.start + (self.stop - self.start) * t,
                        SweepScale::Log => {
                            (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp()
                        }
                    }
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(start: f64, stop: f64, n_steps: usize, scale: SweepScale) -> SweepSpec {
        SweepSpec {
            parameter: SweepParameter::DeltaF,
            start,
            stop,
            n_steps,
            scale,
        }
    }

    #[test]
    fn endpoints_are_exact_on_both_scales() {
        for scale in [SweepScale::Linear, SweepScale::Log] {
            let steps = spec(0.01, 100.0, 25, scale).steps();
            assert_eq!(steps.len(), 25);
            assert_eq!(steps[0], 0.01);
            assert_eq!(steps[24], 100.0);
            assert!(steps.windows(2).all(|w| w[0] < w[1]), "{scale:?} not increasing");
        }
    }

    #[test]
    fn log_steps_have_constant_ratio() {
        let steps = spec(0.01, 100.0, 5, SweepScale::Log).steps();
        for w in steps.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_steps_are_just_the_endpoints() {
        assert_eq!(
            spec(1.0, 2.0, 2, SweepScale::Linear).steps(),
            vec![1.0, 2.0]
        );
    }

    #[test]
    fn validation_rejects_bad_specs() {
        assert_eq!(spec(2.0, 1.0, 5, SweepScale::Linear).validate().unwrap_err().code, 2);
        assert_eq!(spec(1.0, 1.0, 5, SweepScale::Linear).validate().unwrap_err().code, 2);
        assert_eq!(spec(1.0, 2.0, 1, SweepScale::Linear).validate().unwrap_err().code, 2);
        assert_eq!(spec(0.0, 2.0, 5, SweepScale::Log).validate().unwrap_err().code, 2);
        assert_eq!(spec(-1.0, 2.0, 5, SweepScale::Log).validate().unwrap_err().code, 2);
        assert_eq!(spec(f64::NAN, 2.0, 5, SweepScale::Linear).validate().unwrap_err().code, 2);
        assert!(spec(-1.0, 2.0, 5, SweepScale::Linear).validate().is_ok());
    }
}
