//! Report structs emitted by the binary and their encodings.
//!
//! All floats are printed with 17 significant digits (`{:.16e}`), in JSON and
//! CSV alike, so outputs round-trip bit-exactly and golden files stay stable
//! across platforms.

use std::io;

use serde::{Deserialize, Serialize};
use weakmeas::AverageKind;

/// One transition's weak-measurement summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakReport {
    pub a1_re: f64,
    pub a1_im: f64,
    pub a2_re: f64,
    pub a2_im: f64,
    pub strong_average: f64,
    pub weak_value: f64,
    pub quasi_p1: f64,
    pub quasi_p2: f64,
    pub classification: AverageKind,
    pub has_negative_weight: bool,
}

/// Pointer-density summary: moments next to both limiting predictions.
/// The weak-value fields are null when post-selection is singular (the
/// density itself is still perfectly well defined).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerReport {
    pub delta_f: f64,
    pub f_prime: f64,
    pub mix_form: Option<String>,
    pub mix_width: Option<f64>,
    pub grid_points: u64,
    pub mean: f64,
    pub variance: f64,
    pub strong_average: f64,
    pub strong_limit_mean: f64,
    pub weak_value: Option<f64>,
    pub weak_limit_mean: Option<f64>,
}

/// `{:.16e}` rendering used for every float the binary emits.
pub fn fmt17(value: f64) -> String {
    format!("{value:.16e}")
}

struct Sci17Formatter;

impl serde_json::ser::Formatter for Sci17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Compact JSON with 17-significant-digit floats. Panics on non-finite
/// floats or unserializable values, which no report type can contain.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sci17Formatter);
    value
        .serialize(&mut ser)
        .expect("report types always serialize");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use weakmeas::ProtocolRunReport;

    fn weak_report() -> WeakReport {
        WeakReport {
            a1_re: 0.0,
            a1_im: 101.0,
            a2_re: 0.0,
            a2_im: -99.0,
            strong_average: 400.0 / 20002.0,
            weak_value: 100.0,
            quasi_p1: 50.5,
            quasi_p2: -49.5,
            classification: AverageKind::Anomalous,
            has_negative_weight: true,
        }
    }

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        assert_eq!(fmt17(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(fmt17(100.0), "1.0000000000000000e2");
        assert_eq!(fmt17(-0.0001), "-1.0000000000000000e-4");
        let json = to_json(&weak_report());
        assert!(json.contains("\"weak_value\":1.0000000000000000e2"));
        assert!(json.contains("\"classification\":\"anomalous\""));
    }

    #[test]
    fn seventeen_digits_round_trip_every_float() {
        for &x in &[
            0.1,
            1.0 / 3.0,
            400.0 / 20002.0,
            -49.5,
            1e300,
            5e-324,
            -0.0,
            123456789.12345679,
        ] {
            let back: f64 = fmt17(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} failed to round-trip");
        }
    }

    #[test]
    fn weak_report_round_trips_through_json() {
        let report = weak_report();
        let parsed: WeakReport = serde_json::from_str(&to_json(&report)).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn pointer_report_round_trips_with_and_without_weak_fields() {
        let mut report = PointerReport {
            delta_f: 0.05,
            f_prime: -1.25,
            mix_form: Some("gaussian".into()),
            mix_width: Some(5.0),
            grid_points: 1729,
            mean: 0.9999999923,
            variance: 25.0025,
            strong_average: 1.0,
            strong_limit_mean: -0.25,
            weak_value: Some(1.0),
            weak_limit_mean: Some(-0.25),
        };
        let parsed: PointerReport = serde_json::from_str(&to_json(&report)).unwrap();
        assert_eq!(parsed, report);

        report.weak_value = None;
        report.weak_limit_mean = None;
        report.mix_form = None;
        report.mix_width = None;
        let json = to_json(&report);
        assert!(json.contains("\"weak_value\":null"));
        let parsed: PointerReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn protocol_report_round_trips_through_json() {
        let report = ProtocolRunReport {
            n_trials: 1_000_000,
            sample_mean_rescaled: 99.8,
            exact_mean_rescaled: 99.99999999999991,
            bound: 200.0,
            within_bound: true,
            seed: 42,
        };
        let json = to_json(&report);
        let parsed: ProtocolRunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, report);
        for key in [
            "n_trials",
            "sample_mean_rescaled",
            "exact_mean_rescaled",
            "bound",
            "within_bound",
            "seed",
        ] {
            assert!(json.contains(&format!("\"{key}\":")), "missing {key} in {json}");
        }
    }
}
