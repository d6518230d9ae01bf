//! Parsers for the flag value formats: complex numbers as "re,im", states as
//! "reUp,imUp,reDown,imDown" quadruples or "theta,phi" Bloch angles.

use num_complex::Complex64;
use weakmeas::{transition_amplitudes, AmplitudePair, QubitState, TransitionError};

use crate::CliError;

/// States whose norm is further than this from 1 are normalized with a
/// warning; anything closer is treated as rounding in the flag value.
pub const NORM_WARNING_THRESHOLD: f64 = 1e-6;

fn parse_fields(value: &str, expected: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let fields: Vec<&str> = value.split(',').collect();
    if fields.len() != expected {
        return Err(CliError::input(format!(
            "{what} needs {expected} comma-separated numbers, got {} in {value:?}",
            fields.len()
        )));
    }
    fields
        .iter()
        .map(|field| {
            field.trim().parse::<f64>().map_err(|_| {
                CliError::input(format!("{what}: {field:?} is not a number in {value:?}"))
            })
        })
        .collect()
}

/// "re,im" → complex number.
pub fn parse_complex(value: &str) -> Result<Complex64, CliError> {
    let f = parse_fields(value, 2, "complex amplitude")?;
    Ok(Complex64::new(f[0], f[1]))
}

/// "reUp,imUp,reDown,imDown" → (c_up, c_down), unnormalized.
pub fn parse_state_quad(value: &str) -> Result<(Complex64, Complex64), CliError> {
    let f = parse_fields(value, 4, "state quadruple")?;
    Ok((Complex64::new(f[0], f[1]), Complex64::new(f[2], f[3])))
}

/// "theta,phi" in radians → (cos(θ/2), e^{iφ}·sin(θ/2)).
pub fn parse_bloch(value: &str) -> Result<(Complex64, Complex64), CliError> {
    let f = parse_fields(value, 2, "Bloch angles")?;
    let (theta, phi) = (f[0], f[1]);
    let c_up = Complex64::new((theta / 2.0).cos(), 0.0);
    let c_down = Complex64::from_polar((theta / 2.0).sin(), phi);
    Ok((c_up, c_down))
}

/// Builds a normalized state, reporting a warning message when the input
/// norm was off by more than `NORM_WARNING_THRESHOLD`.
pub fn state_from_amplitudes(
    c_up: Complex64,
    c_down: Complex64,
    label: &str,
) -> Result<(QubitState, Option<String>), CliError> {
    let norm = (c_up.norm_sqr() + c_down.norm_sqr()).sqrt();
    let (state, _) = QubitState::normalized(c_up, c_down)
        .map_err(|e| CliError::input(format!("{label} state: {e}")))?;
    let warning = if (norm - 1.0).abs() > NORM_WARNING_THRESHOLD {
        Some(format!(
            "warning: {label} state norm was {norm:.6}; normalizing"
        ))
    } else {
        None
    };
    Ok((state, warning))
}

/// Resolved transition input: the route amplitude pair plus any
/// normalization warnings to surface on stderr.
#[derive(Debug)]
pub struct ResolvedTransition {
    pub amps: AmplitudePair,
    pub warnings: Vec<String>,
}

/// Combines the mutually exclusive input modes: direct amplitudes, state
/// quadruples, or Bloch angles (the latter two may be mixed between pre and
/// post). Exactly one source must be given for each side unless amplitudes
/// are supplied, which replace both.
pub fn resolve_transition(
    a1: Option<&str>,
    a2: Option<&str>,
    pre: Option<&str>,
    pre_bloch: Option<&str>,
    post: Option<&str>,
    post_bloch: Option<&str>,
) -> Result<ResolvedTransition, CliError> {
    if let (Some(a1), Some(a2)) = (a1, a2) {
        let amps = AmplitudePair::new(parse_complex(a1)?, parse_complex(a2)?)
            .map_err(amplitude_error)?;
        return Ok(ResolvedTransition {
            amps,
            warnings: Vec::new(),
        });
    }

    let mut warnings = Vec::new();
    let side = |label: &str,
                    quad: Option<&str>,
                    bloch: Option<&str>,
                    warnings: &mut Vec<String>|
     -> Result<QubitState, CliError> {
        let (c_up, c_down) = match (quad, bloch) {
            (Some(q), None) => parse_state_quad(q)?,
            (None, Some(b)) => parse_bloch(b)?,
            _ => {
                return Err(CliError::input(format!(
                    "provide the {label} state as --{label} or --{label}-bloch \
                     (or give both --a1 and --a2 instead)"
                )))
            }
        };
        let (state, warning) = state_from_amplitudes(c_up, c_down, label)?;
        warnings.extend(warning);
        Ok(state)
    };

    let pre_state = side("pre", pre, pre_bloch, &mut warnings)?;
    let post_state = side("post", post, post_bloch, &mut warnings)?;
    let amps = transition_amplitudes(&pre_state, &post_state).map_err(amplitude_error)?;
    Ok(ResolvedTransition { amps, warnings })
}

fn amplitude_error(err: TransitionError) -> CliError {
    match err {
        // Orthogonal selection is a physics singularity, not a typo.
        TransitionError::BothAmplitudesZero | TransitionError::SingularPostselection { .. } => {
            CliError::singular(err.to_string())
        }
        other => CliError::input(other.to_string()),
    }
}

/// Maps any transition error from downstream computations (weak values on
/// already-validated pairs) to its exit code.
pub fn transition_error(err: TransitionError) -> CliError {
    amplitude_error(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn parses_complex_pairs() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_complex(" 0 , 101 ").unwrap(), Complex64::new(0.0, 101.0));
        assert_eq!(parse_complex("1").unwrap_err().code, 2);
        assert_eq!(parse_complex("1,2,3").unwrap_err().code, 2);
        assert_eq!(parse_complex("a,b").unwrap_err().code, 2);
    }

    #[test]
    fn parses_state_quadruples() {
        let (up, down) = parse_state_quad("1,0,0,0").unwrap();
        assert_eq!(up, Complex64::new(1.0, 0.0));
        assert_eq!(down, Complex64::new(0.0, 0.0));
        assert_eq!(parse_state_quad("1,0,0").unwrap_err().code, 2);
    }

    #[test]
    fn bloch_angles_land_on_the_expected_states() {
        let (up, down) = parse_bloch("0,0").unwrap();
        assert!((up.re - 1.0).abs() < 1e-15 && down.norm() < 1e-15);

        let (up, down) = parse_bloch(&format!("{},0", PI / 2.0)).unwrap();
        assert!((up.re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((down.re - FRAC_1_SQRT_2).abs() < 1e-15);

        let (_, down) = parse_bloch(&format!("{},{}", PI, PI / 2.0)).unwrap();
        assert!((down - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn normalization_warns_only_when_the_norm_is_far_off() {
        let (state, warning) =
            state_from_amplitudes(Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0), "pre")
                .unwrap();
        assert!(warning.unwrap().contains("normalizing"));
        assert!((state.c_up().re - 1.0).abs() < 1e-15);

        let near_one = 1.0 + 1e-9;
        let (_, warning) = state_from_amplitudes(
            Complex64::new(near_one, 0.0),
            Complex64::new(0.0, 0.0),
            "pre",
        )
        .unwrap();
        assert!(warning.is_none());

        let err = state_from_amplitudes(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), "pre")
            .unwrap_err();
        assert_eq!(err.code, 2);
    }

    #[test]
    fn transition_resolution_covers_all_modes() {
        let direct = resolve_transition(Some("0,101"), Some("0,-99"), None, None, None, None)
            .unwrap();
        assert_eq!(direct.amps.a1(), Complex64::new(0.0, 101.0));
        assert!(direct.warnings.is_empty());

        let via_states = resolve_transition(
            None,
            None,
            Some("0.70710678,0,0.70710678,0"),
            None,
            Some("0.70710678,0,0.70710678,0"),
            None,
        )
        .unwrap();
        assert!((via_states.amps.a1().re - 0.5).abs() < 1e-6);
        assert!(via_states.warnings.is_empty());

        let orthogonal =
            resolve_transition(None, None, Some("1,0,0,0"), None, Some("0,0,1,0"), None)
                .unwrap_err();
        assert_eq!(orthogonal.code, 3);

        let missing = resolve_transition(None, None, Some("1,0,0,0"), None, None, None)
            .unwrap_err();
        assert_eq!(missing.code, 2);
    }
}
