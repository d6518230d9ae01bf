//! `weakmeas` binary: weak-value analysis, pointer reading densities, the
//! classical reference protocol, and parameter sweeps, all as line-oriented
//! JSON/CSV with deterministic 17-significant-digit floats.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weakmeas::classical::ClassicalModelParams;
use weakmeas::pointer::{
    mixed_reading_density, pure_reading_density, MixtureForm, MixtureSpec, PointerConfig,
};
use weakmeas::transitions::AmplitudePair;
use weakmeas_cli::input::{resolve_transition, transition_error, ResolvedTransition};
use weakmeas_cli::report::{fmt17, to_json, PointerReport, WeakReport};
use weakmeas_cli::sweep::{SweepParameter, SweepScale, SweepSpec};
use weakmeas_cli::CliError;

/// Largest reading grid the CLI will allocate; asking for more exits with
/// code 4 before any allocation happens.
const MAX_GRID_POINTS: usize = 1 << 24;

#[derive(Parser)]
#[command(
    name = "weakmeas",
    version,
    about = "Conditional averages for pre- and post-selected two-route systems: \
             weak values, finite-accuracy pointer readings, and a classical \
             reference protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strong and weak conditional averages for one transition
    Weak(WeakArgs),
    /// Pointer reading density for a finite-accuracy measurement
    Pointer(PointerArgs),
    /// Monte Carlo run of the classical rescaled-outcome protocol
    Classical(ClassicalArgs),
    /// Vary one parameter and emit a CSV table
    Sweep(SweepArgs),
}

/// How the transition is specified: either both route amplitudes directly,
/// or a pre and a post state (each as an amplitude quadruple or Bloch angles).
#[derive(Args)]
struct SelectionArgs {
    /// Pre-selected state "reUp,imUp,reDown,imDown"
    #[arg(long, conflicts_with = "pre_bloch", allow_hyphen_values = true)]
    pre: Option<String>,

    /// Pre-selected state as Bloch angles "theta,phi"
    #[arg(long, allow_hyphen_values = true)]
    pre_bloch: Option<String>,

    /// Post-selected state "reUp,imUp,reDown,imDown"
    #[arg(long, conflicts_with = "post_bloch", allow_hyphen_values = true)]
    post: Option<String>,

    /// Post-selected state as Bloch angles "theta,phi"
    #[arg(long, allow_hyphen_values = true)]
    post_bloch: Option<String>,

    /// Route-1 amplitude "re,im" (replaces state input)
    #[arg(
        long,
        requires = "a2",
        conflicts_with_all = ["pre", "pre_bloch", "post", "post_bloch"],
        allow_hyphen_values = true
    )]
    a1: Option<String>,

    /// Route-2 amplitude "re,im"
    #[arg(long, requires = "a1", allow_hyphen_values = true)]
    a2: Option<String>,
}

impl SelectionArgs {
    fn resolve(&self) -> Result<ResolvedTransition, CliError> {
        let resolved = resolve_transition(
            self.a1.as_deref(),
            self.a2.as_deref(),
            self.pre.as_deref(),
            self.pre_bloch.as_deref(),
            self.post.as_deref(),
            self.post_bloch.as_deref(),
        )?;
        for warning in &resolved.warnings {
            eprintln!("{warning}");
        }
        Ok(resolved)
    }
}

#[derive(Args)]
struct WeakArgs {
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MixFormArg {
    Gaussian,
    Uniform,
}

impl MixFormArg {
    fn to_form(self) -> MixtureForm {
        match self {
            MixFormArg::Gaussian => MixtureForm::Gaussian,
            MixFormArg::Uniform => MixtureForm::Uniform,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MixFormArg::Gaussian => "gaussian",
            MixFormArg::Uniform => "uniform",
        }
    }
}

#[derive(Args)]
struct PointerArgs {
    #[command(flatten)]
    selection: SelectionArgs,

    /// Pointer accuracy (standard deviation of the reading spread)
    #[arg(long)]
    delta_f: f64,

    /// Initial pointer offset
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    f_prime: f64,

    /// Classical spread applied to the initial offset
    #[arg(long, value_enum, requires = "mix_width")]
    mix_form: Option<MixFormArg>,

    /// Width of the classical offset spread
    #[arg(long, requires = "mix_form")]
    mix_width: Option<f64>,

    /// Write the reading density as "f,p" CSV to this path
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ClassicalArgs {
    /// Outcome separation parameter, in (0, 1)
    #[arg(long)]
    lambda: f64,

    /// Rescaling parameter, in (0, 1) with lambda < 1 - delta
    #[arg(long)]
    delta: f64,

    /// Number of Monte Carlo trials
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,

    /// RNG seed
    #[arg(long, env = "WEAKMEAS_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParameterArg {
    #[value(name = "delta_f")]
    DeltaF,
    Delta,
    Lambda,
    #[value(name = "mix_width")]
    MixWidth,
}

impl From<SweepParameterArg> for SweepParameter {
    fn from(arg: SweepParameterArg) -> Self {
        match arg {
            SweepParameterArg::DeltaF => SweepParameter::DeltaF,
            SweepParameterArg::Delta => SweepParameter::Delta,
            SweepParameterArg::Lambda => SweepParameter::Lambda,
            SweepParameterArg::MixWidth => SweepParameter::MixWidth,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepScaleArg {
    Linear,
    Log,
}

impl From<SweepScaleArg> for SweepScale {
    fn from(arg: SweepScaleArg) -> Self {
        match arg {
            SweepScaleArg::Linear => SweepScale::Linear,
            SweepScaleArg::Log => SweepScale::Log,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Which parameter varies
    #[arg(long, value_enum)]
    parameter: SweepParameterArg,

    /// First value of the swept parameter
    #[arg(long, allow_negative_numbers = true)]
    start: f64,

    /// Last value of the swept parameter
    #[arg(long, allow_negative_numbers = true)]
    stop: f64,

    /// Number of rows (includes both endpoints)
    #[arg(long)]
    steps: usize,

    /// Spacing of the swept values
    #[arg(long, value_enum, default_value_t = SweepScaleArg::Linear)]
    scale: SweepScaleArg,

    #[command(flatten)]
    selection: SelectionArgs,

    /// Fixed pointer accuracy (mix_width sweeps)
    #[arg(long)]
    delta_f: Option<f64>,

    /// Initial pointer offset (pointer sweeps)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    f_prime: f64,

    /// Mixture form (mix_width sweeps)
    #[arg(long, value_enum)]
    mix_form: Option<MixFormArg>,

    /// Fixed outcome separation (delta sweeps)
    #[arg(long)]
    lambda: Option<f64>,

    /// Fixed rescaling parameter (lambda sweeps)
    #[arg(long)]
    delta: Option<f64>,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Weak(args) => run_weak(args),
        Command::Pointer(args) => run_pointer(args),
        Command::Classical(args) => run_classical(args),
        Command::Sweep(args) => run_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run_weak(args: &WeakArgs) -> Result<(), CliError> {
    let amps = args.selection.resolve()?.amps;
    let result = amps.weak_value().map_err(transition_error)?;
    let classification = amps.classify_weak().map_err(transition_error)?;
    let report = WeakReport {
        a1_re: amps.a1().re,
        a1_im: amps.a1().im,
        a2_re: amps.a2().re,
        a2_im: amps.a2().im,
        strong_average: amps.strong_average(),
        weak_value: result.weak_value,
        quasi_p1: result.quasi_p1,
        quasi_p2: result.quasi_p2,
        classification: classification.kind,
        has_negative_weight: classification.has_negative_weight,
    };
    println!("{}", to_json(&report));
    Ok(())
}

fn run_pointer(args: &PointerArgs) -> Result<(), CliError> {
    let amps = args.selection.resolve()?.amps;
    let mix = match (args.mix_form, args.mix_width) {
        (Some(form), Some(width)) => {
            Some(MixtureSpec::new(form.to_form(), width).map_err(pointer_error)?)
        }
        _ => None,
    };
    let cfg = pointer_config(args.delta_f, args.f_prime, mix.as_ref())?;
    let density = match &mix {
        Some(m) => mixed_reading_density(&amps, &cfg, m).map_err(pointer_error)?,
        None => pure_reading_density(&amps, &cfg).map_err(pointer_error)?,
    };
    if let Some(path) = &args.csv {
        let mut writer = BufWriter::new(create_file(path)?);
        density
            .write_csv(&mut writer)
            .and_then(|()| writer.flush())
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    let strong = amps.strong_average();
    // The density is well defined even for a singular post-selection; only
    // the weak-limit comparison drops out of the report in that case.
    let weak = amps.weak_value().ok().map(|r| r.weak_value);
    let report = PointerReport {
        delta_f: args.delta_f,
        f_prime: args.f_prime,
        mix_form: args.mix_form.map(|f| f.name().to_string()),
        mix_width: args.mix_width,
        grid_points: cfg.grid().n_points() as u64,
        mean: density.mean(),
        variance: density.variance(),
        strong_average: strong,
        strong_limit_mean: args.f_prime + strong,
        weak_value: weak,
        weak_limit_mean: weak.map(|v| args.f_prime + v),
    };
    println!("{}", to_json(&report));
    Ok(())
}

fn run_classical(args: &ClassicalArgs) -> Result<(), CliError> {
    let params = ClassicalModelParams::new(args.lambda, args.delta)
        .map_err(|e| CliError::input(e.to_string()))?;
    let report = params
        .monte_carlo(args.n, args.seed)
        .map_err(|e| CliError::input(e.to_string()))?;
    println!("{}", to_json(&report));
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let spec = SweepSpec {
        parameter: args.parameter.into(),
        start: args.start,
        stop: args.stop,
        n_steps: args.steps,
        scale: args.scale.into(),
    };
    spec.validate()?;
    let steps = spec.steps();

    let mut rows = Vec::with_capacity(steps.len() + 1);
    match spec.parameter {
        SweepParameter::DeltaF => {
            let amps = args.selection.resolve()?.amps;
            let (strong, weak) = sweep_averages(&amps);
            rows.push("delta_f,mean,variance,strong_average,weak_value".to_string());
            for &delta_f in &steps {
                let cfg = pointer_config(delta_f, args.f_prime, None)?;
                let density = pure_reading_density(&amps, &cfg).map_err(pointer_error)?;
                rows.push(format!(
                    "{},{},{},{},{}",
                    fmt17(delta_f),
                    fmt17(density.mean()),
                    fmt17(density.variance()),
                    fmt17(strong),
                    fmt17(weak)
                ));
            }
        }
        SweepParameter::MixWidth => {
            let delta_f = args
                .delta_f
                .ok_or_else(|| CliError::input("mix_width sweep requires --delta-f"))?;
            let form = args
                .mix_form
                .ok_or_else(|| CliError::input("mix_width sweep requires --mix-form"))?;
            let amps = args.selection.resolve()?.amps;
            let (strong, weak) = sweep_averages(&amps);
            rows.push("mix_width,mean,variance,strong_average,weak_value".to_string());
            for &width in &steps {
                let mix = MixtureSpec::new(form.to_form(), width).map_err(pointer_error)?;
                let cfg = pointer_config(delta_f, args.f_prime, Some(&mix))?;
                let density = mixed_reading_density(&amps, &cfg, &mix).map_err(pointer_error)?;
                rows.push(format!(
                    "{},{},{},{},{}",
                    fmt17(width),
                    fmt17(density.mean()),
                    fmt17(density.variance()),
                    fmt17(strong),
                    fmt17(weak)
                ));
            }
        }
        SweepParameter::Lambda => {
            let delta = args
                .delta
                .ok_or_else(|| CliError::input("lambda sweep requires --delta"))?;
            rows.push("lambda,p1,p2,rescaled_average,bound".to_string());
            for &lambda in &steps {
                rows.push(classical_row(lambda, lambda, delta)?);
            }
        }
        SweepParameter::Delta => {
            let lambda = args
                .lambda
                .ok_or_else(|| CliError::input("delta sweep requires --lambda"))?;
            rows.push("delta,p1,p2,rescaled_average,bound".to_string());
            for &delta in &steps {
                rows.push(classical_row(delta, lambda, delta)?);
            }
        }
    }

    let mut writer: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(create_file(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    for row in &rows {
        writeln!(writer, "{row}").map_err(|e| CliError::input(format!("cannot write: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| CliError::input(format!("cannot write: {e}")))?;
    Ok(())
}

/// Strong average plus the weak value, the latter NaN when post-selection is
/// singular so pointer sweeps still produce every row.
fn sweep_averages(amps: &AmplitudePair) -> (f64, f64) {
    let weak = amps.weak_value().map_or(f64::NAN, |r| r.weak_value);
    (amps.strong_average(), weak)
}

fn classical_row(swept: f64, lambda: f64, delta: f64) -> Result<String, CliError> {
    let params =
        ClassicalModelParams::new(lambda, delta).map_err(|e| CliError::input(e.to_string()))?;
    let (p1, p2) = params.route_probabilities();
    Ok(format!(
        "{},{},{},{},{}",
        fmt17(swept),
        fmt17(p1),
        fmt17(p2),
        fmt17(params.rescaled_average()),
        fmt17(params.outcome_bound())
    ))
}

/// Builds the reading grid for one pointer evaluation, refusing oversized
/// grids (exit code 4) before anything is allocated. The size estimate is
/// done in floating point so even absurd accuracies cannot overflow.
fn pointer_config(
    delta_f: f64,
    f_prime: f64,
    mix: Option<&MixtureSpec>,
) -> Result<PointerConfig, CliError> {
    if !(delta_f.is_finite() && delta_f > 0.0) {
        return Err(CliError::input(format!(
            "pointer accuracy delta_f must be positive and finite, got {delta_f}"
        )));
    }
    let margin = mix.map_or(0.0, |m| m.grid_margin());
    let span = 2.0 * (1.0 + 8.0 * delta_f) + 2.0 * margin;
    let spacing = (delta_f / 8.0).min(0.125);
    let estimate = span / spacing;
    if !estimate.is_finite() || estimate > MAX_GRID_POINTS as f64 {
        return Err(grid_too_large(estimate));
    }
    let cfg = PointerConfig::auto(delta_f, f_prime).map_err(pointer_error)?;
    let cfg = match mix {
        Some(m) if m.width() > 0.0 => cfg.expanded(m.grid_margin()).map_err(pointer_error)?,
        _ => cfg,
    };
    if cfg.grid().n_points() > MAX_GRID_POINTS {
        return Err(grid_too_large(cfg.grid().n_points() as f64));
    }
    Ok(cfg)
}

fn grid_too_large(points: f64) -> CliError {
    CliError::resource(format!(
        "reading grid would need about {points:.0} points (cap {MAX_GRID_POINTS}); \
         use a coarser accuracy or a narrower mixture"
    ))
}

fn pointer_error(err: weakmeas::pointer::PointerError) -> CliError {
    CliError::input(err.to_string())
}

fn create_file(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))
}
