//! Compensated accumulation for sums whose terms nearly cancel.

/// Running sum with first-order rounding-error compensation (Neumaier's
/// variant of Kahan summation).
///
/// Anomalous averages arise from large weights of opposite sign, so the
/// interesting sums here are exactly the ones naive accumulation handles
/// worst.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    total: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, term: f64) {
        let t = self.total + term;
        if self.total.abs() >= term.abs() {
            self.compensation += (self.total - t) + term;
        } else {
            self.compensation += (term - t) + self.total;
        }
        self.total = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.total + self.compensation
    }
}

pub(crate) fn compensated_sum<I>(terms: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut acc = CompensatedSum::new();
    for term in terms {
        acc.add(term);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_naive_sum_loses() {
        // 1 + 1e100 - 1e100 - 1 + 0.5: naive left-to-right gives 0.5 only by
        // luck of ordering; shuffle so the small terms sit inside the spikes.
        let terms = [1.0, 1e100, -1.0, -1e100, 0.5];
        assert_eq!(compensated_sum(terms), 0.5);
    }

    #[test]
    fn matches_exact_sum_on_small_input() {
        assert_eq!(compensated_sum([0.25, 0.5, 0.125]), 0.875);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(compensated_sum([]), 0.0);
    }
}
