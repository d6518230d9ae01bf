//! Finite-accuracy pointer readings for a two-route transition.
//!
//! The measured variable takes value +1 on route 1 and −1 on route 2, and a
//! pointer prepared in a real Gaussian packet of width `delta_f` around an
//! offset `f_prime` is shifted by the route value. The post-selected reading
//! density is the squared modulus of the route-amplitude-weighted sum of the
//! two shifted packets, evaluated on a uniform grid:
//!
//! p(f) ∝ |a1·G(f − f′ − 1) + a2·G(f − f′ + 1)|²
//!
//! A sloppy pointer (large `delta_f`) leaves the interference intact and the
//! mean reading approaches f′ + the weak value; an accurate one (small
//! `delta_f`) kills it and the mean approaches f′ + the strong average.
//! Classical mixtures over the initial offset broaden the density without
//! moving its mean, and readings can be drawn from any density by seeded
//! inverse-CDF sampling.

use std::f64::consts::PI;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::sum::CompensatedSum;
use crate::transitions::AmplitudePair;

/// The grid must extend this many pointer widths past both shifted packet
/// centers; the truncated Gaussian mass is ~6e-16 of the total.
pub const GRID_COVERAGE_WIDTHS: f64 = 8.0;

/// Grid spacing may never exceed 1/8 (to resolve the unit route shifts) nor
/// `delta_f`/8 (to resolve the packets themselves).
pub const MAX_GRID_SPACING: f64 = 0.125;

/// Node count for the fixed-order mixture quadrature over the offset.
pub const MIXTURE_QUADRATURE_NODES: usize = 65;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointerError {
    #[error("pointer accuracy delta_f must be positive and finite, got {0:?}")]
    InvalidAccuracy(f64),
    #[error("pointer offset f_prime must be finite, got {0:?}")]
    InvalidOffset(f64),
    #[error("grid bounds must be finite with f_min < f_max, got [{f_min:?}, {f_max:?}]")]
    InvalidGridBounds { f_min: f64, f_max: f64 },
    #[error("grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
    #[error("grid [{f_min}, {f_max}] does not cover the required span [{lo}, {hi}]")]
    GridDoesNotCoverSupport {
        f_min: f64,
        f_max: f64,
        lo: f64,
        hi: f64,
    },
    #[error("grid spacing {spacing} exceeds the allowed maximum {max_allowed}")]
    GridTooCoarse { spacing: f64, max_allowed: f64 },
    #[error("reading density integrates to {integral:?} and cannot be normalized")]
    NullDensity { integral: f64 },
    #[error("mixture width must be nonnegative and finite, got {0:?}")]
    InvalidMixtureWidth(f64),
}

/// Uniform reading grid with at least three points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    f_min: f64,
    f_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(f_min: f64, f_max: f64, n_points: usize) -> Result<Self, PointerError> {
        if !f_min.is_finite() || !f_max.is_finite() || f_min >= f_max {
            return Err(PointerError::InvalidGridBounds { f_min, f_max });
        }
        if n_points < 3 {
            return Err(PointerError::GridTooSmall(n_points));
        }
        Ok(Self {
            f_min,
            f_max,
            n_points,
        })
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.f_max - self.f_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, index: usize) -> f64 {
        self.f_min + index as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n_points).map(move |i| self.f_min + i as f64 * h)
    }
}

/// Pointer accuracy, initial offset, and reading grid, validated together.
///
/// The grid must cover `[f′ − 1 − 8Δf, f′ + 1 + 8Δf]` with spacing at most
/// `min(Δf/8, 1/8)`, so every density built from a config resolves both
/// packets and loses only negligible tail mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerConfig {
    delta_f: f64,
    f_prime: f64,
    grid: Grid,
}

impl PointerConfig {
    pub fn new(delta_f: f64, f_prime: f64, grid: Grid) -> Result<Self, PointerError> {
        if !(delta_f.is_finite() && delta_f > 0.0) {
            return Err(PointerError::InvalidAccuracy(delta_f));
        }
        if !f_prime.is_finite() {
            return Err(PointerError::InvalidOffset(f_prime));
        }
        let (lo, hi) = required_span(delta_f, f_prime);
        let span_slack = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
        if grid.f_min() > lo + span_slack || grid.f_max() < hi - span_slack {
            return Err(PointerError::GridDoesNotCoverSupport {
                f_min: grid.f_min(),
                f_max: grid.f_max(),
                lo,
                hi,
            });
        }
        let max_allowed = max_spacing(delta_f);
        if grid.spacing() > max_allowed * (1.0 + 1e-9) {
            return Err(PointerError::GridTooCoarse {
                spacing: grid.spacing(),
                max_allowed,
            });
        }
        Ok(Self {
            delta_f,
            f_prime,
            grid,
        })
    }

    /// Smallest compliant grid for the given accuracy and offset.
    pub fn auto(delta_f: f64, f_prime: f64) -> Result<Self, PointerError> {
        if !(delta_f.is_finite() && delta_f > 0.0) {
            return Err(PointerError::InvalidAccuracy(delta_f));
        }
        if !f_prime.is_finite() {
            return Err(PointerError::InvalidOffset(f_prime));
        }
        let (lo, hi) = required_span(delta_f, f_prime);
        let grid = minimal_grid(lo, hi, max_spacing(delta_f))?;
        Self::new(delta_f, f_prime, grid)
    }

    /// Same accuracy and offset on a grid widened by `extra` on both sides,
    /// keeping the spacing requirement. Used to make room for mixtures over
    /// the offset.
    pub fn expanded(&self, extra: f64) -> Result<Self, PointerError> {
        let (lo, hi) = required_span(self.delta_f, self.f_prime);
        let grid = minimal_grid(lo - extra, hi + extra, max_spacing(self.delta_f))?;
        Self::new(self.delta_f, self.f_prime, grid)
    }

    pub fn delta_f(&self) -> f64 {
        self.delta_f
    }

    pub fn f_prime(&self) -> f64 {
        self.f_prime
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
}

fn required_span(delta_f: f64, f_prime: f64) -> (f64, f64) {
    let reach = 1.0 + GRID_COVERAGE_WIDTHS * delta_f;
    (f_prime - reach, f_prime + reach)
}

fn max_spacing(delta_f: f64) -> f64 {
    (delta_f / 8.0).min(MAX_GRID_SPACING)
}

fn minimal_grid(lo: f64, hi: f64, h_max: f64) -> Result<Grid, PointerError> {
    let cells = ((hi - lo) / h_max).ceil().max(2.0);
    Grid::new(lo, hi, cells as usize + 1)
}

/// Normalized reading density tabulated on a uniform grid.
///
/// All integrals are trapezoidal with compensated accumulation; both packets
/// are smooth on the scale of the mandated spacing, so the quadrature error
/// is far below every tolerance used against these densities.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingDensity {
    grid: Grid,
    values: Vec<f64>,
}

impl ReadingDensity {
    fn from_unnormalized(grid: Grid, mut values: Vec<f64>) -> Result<Self, PointerError> {
        let integral = trapezoid(&values, grid.spacing());
        if !integral.is_finite() || integral <= 1e-300 {
            return Err(PointerError::NullDensity { integral });
        }
        for v in &mut values {
            *v /= integral;
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Density values, one per grid point, in grid order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoidal ∫p df; equals 1 up to accumulated rounding.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.grid.spacing())
    }

    /// Trapezoidal ∫f·p df / ∫p df.
    pub fn mean(&self) -> f64 {
        let h = self.grid.spacing();
        let weighted: Vec<f64> = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(f, &p)| f * p)
            .collect();
        trapezoid(&weighted, h) / self.integral()
    }

    /// Trapezoidal central second moment about `mean()`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let h = self.grid.spacing();
        let weighted: Vec<f64> = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(f, &p)| (f - mean) * (f - mean) * p)
            .collect();
        trapezoid(&weighted, h) / self.integral()
    }

    /// Draws `n_samples` readings by inverting the piecewise-linear CDF of
    /// the tabulated density. The same seed always reproduces the same draws.
    pub fn sample(&self, n_samples: usize, seed: u64) -> Vec<f64> {
        let h = self.grid.spacing();
        let n_cells = self.values.len() - 1;
        let mut cumulative = Vec::with_capacity(n_cells);
        let mut acc = CompensatedSum::new();
        for i in 0..n_cells {
            acc.add(0.5 * h * (self.values[i] + self.values[i + 1]));
            cumulative.push(acc.value());
        }
        let total = cumulative[n_cells - 1];

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            let u = rng.random::<f64>() * total;
            let cell = cumulative.partition_point(|&c| c <= u).min(n_cells - 1);
            let below = if cell == 0 { 0.0 } else { cumulative[cell - 1] };
            let target = (u - below).max(0.0);
            let p0 = self.values[cell];
            let p1 = self.values[cell + 1];
            let slope = (p1 - p0) / h;
            // Solve p0·x + slope·x²/2 = target for x in [0, h]. In the form
            // below the discriminant is the squared interpolated density at
            // the solution, so it is nonnegative up to rounding, and the
            // formula degrades gracefully to target/p0 as the cell flattens.
            let disc = (p0 * p0 + 2.0 * slope * target).max(0.0);
            let denom = p0 + disc.sqrt();
            let x = if denom > 0.0 {
                (2.0 * target / denom).clamp(0.0, h)
            } else {
                0.5 * h // cell carries no mass; any point in it is as good
            };
            out.push(self.grid.point(cell) + x);
        }
        out
    }

    /// Writes `f,p` rows (one per grid point) after a header line, with all
    /// floats at 17 significant digits and LF line endings.
    pub fn write_csv<W: io::Write>(&self, mut writer: W) -> io::Result<()> {
        writeln!(writer, "f,p")?;
        for (f, p) in self.grid.points().zip(&self.values) {
            writeln!(writer, "{:.16e},{:.16e}", f, p)?;
        }
        Ok(())
    }
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.add(0.5 * values[0]);
    for &v in &values[1..values.len() - 1] {
        acc.add(v);
    }
    acc.add(0.5 * values[values.len() - 1]);
    h * acc.value()
}

/// How the initial pointer offset is spread in a classical mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixtureForm {
    /// Offsets drawn from a Gaussian of standard deviation `width`.
    Gaussian,
    /// Offsets drawn uniformly from `[−width, width]`.
    Uniform,
}

/// Classical spread of the initial pointer offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    form: MixtureForm,
    width: f64,
}

impl MixtureSpec {
    pub fn new(form: MixtureForm, width: f64) -> Result<Self, PointerError> {
        if !(width.is_finite() && width >= 0.0) {
            return Err(PointerError::InvalidMixtureWidth(width));
        }
        Ok(Self { form, width })
    }

    pub fn form(&self) -> MixtureForm {
        self.form
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Symmetric trapezoidal quadrature nodes (offset, weight) for averaging
    /// over the spread. Nodes are mirrored exactly (c[64−k] = −c[k] to the
    /// last bit) and weights are normalized to sum to 1, so mixing cannot
    /// move a mean by construction. The Gaussian form is truncated at six
    /// widths, which discards ~2e-9 of symmetric tail mass.
    fn quadrature_nodes(&self) -> Vec<(f64, f64)> {
        debug_assert!(self.width > 0.0);
        let half_range = match self.form {
            MixtureForm::Gaussian => 6.0 * self.width,
            MixtureForm::Uniform => self.width,
        };
        let mid = (MIXTURE_QUADRATURE_NODES - 1) / 2;
        let step = half_range / mid as f64;
        let mut nodes: Vec<(f64, f64)> = (0..MIXTURE_QUADRATURE_NODES)
            .map(|k| {
                let c = (k as f64 - mid as f64) * step;
                let end_factor = if k == 0 || k == MIXTURE_QUADRATURE_NODES - 1 {
                    0.5
                } else {
                    1.0
                };
                let w = match self.form {
                    MixtureForm::Gaussian => {
                        (-c * c / (2.0 * self.width * self.width)).exp()
                    }
                    MixtureForm::Uniform => 1.0,
                };
                (c, end_factor * w)
            })
            .collect();
        let total: f64 = crate::sum::compensated_sum(nodes.iter().map(|&(_, w)| w));
        for node in &mut nodes {
            node.1 /= total;
        }
        nodes
    }

    /// How far beyond the pure-reading span the grid must extend to hold
    /// every node's shifted density.
    pub fn grid_margin(&self) -> f64 {
        GRID_COVERAGE_WIDTHS * self.width
    }
}

fn wave_values(amps: &AmplitudePair, delta_f: f64, center: f64, grid: &Grid) -> Vec<f64> {
    let (r1, r2) = amps.scaled_to_unit();
    let prefactor = (2.0 * PI * delta_f * delta_f).powf(-0.25);
    let inv_four_var = 1.0 / (4.0 * delta_f * delta_f);
    grid.points()
        .map(|f| {
            let x1 = f - center - 1.0;
            let x2 = f - center + 1.0;
            let g1 = prefactor * (-x1 * x1 * inv_four_var).exp();
            let g2 = prefactor * (-x2 * x2 * inv_four_var).exp();
            (r1 * g1 + r2 * g2).norm_sqr()
        })
        .collect()
}

/// Post-selected reading density for a pointer prepared sharp at `f_prime`.
pub fn pure_reading_density(
    amps: &AmplitudePair,
    cfg: &PointerConfig,
) -> Result<ReadingDensity, PointerError> {
    let values = wave_values(amps, cfg.delta_f(), cfg.f_prime(), cfg.grid());
    ReadingDensity::from_unnormalized(*cfg.grid(), values)
}

/// Mean of the pure reading density.
pub fn mean_reading(amps: &AmplitudePair, cfg: &PointerConfig) -> Result<f64, PointerError> {
    Ok(pure_reading_density(amps, cfg)?.mean())
}

/// Post-selection route probabilities under an accurate measurement:
/// (|a1|², |a2|²) normalized to sum to one.
pub fn strong_outcome_probabilities(amps: &AmplitudePair) -> (f64, f64) {
    let strong = amps.strong_average();
    // strong = q1 − q2 with q1 + q2 = 1; reconstruct the pair so the two
    // functions can never disagree with each other.
    let q1 = (0.5 * (1.0 + strong)).clamp(0.0, 1.0);
    (q1, 1.0 - q1)
}

/// Reading density for an offset spread classically around `f_prime`.
///
/// Each quadrature node contributes the normalized pure density it would
/// produce at its shifted offset; the grid is widened so no node loses
/// support. A zero-width mixture reproduces `pure_reading_density` exactly.
pub fn mixed_reading_density(
    amps: &AmplitudePair,
    cfg: &PointerConfig,
    mix: &MixtureSpec,
) -> Result<ReadingDensity, PointerError> {
    if mix.width() == 0.0 {
        return pure_reading_density(amps, cfg);
    }
    let wide = cfg.expanded(mix.grid_margin())?;
    let grid = *wide.grid();
    let h = grid.spacing();
    let mut mixture = vec![0.0; grid.n_points()];
    for (offset, weight) in mix.quadrature_nodes() {
        let values = wave_values(amps, cfg.delta_f(), cfg.f_prime() + offset, &grid);
        let norm = trapezoid(&values, h);
        if !norm.is_finite() || norm <= 1e-300 {
            return Err(PointerError::NullDensity { integral: norm });
        }
        for (acc, v) in mixture.iter_mut().zip(&values) {
            *acc += weight * v / norm;
        }
    }
    ReadingDensity::from_unnormalized(grid, mixture)
}

/// Draws `n_samples` seeded readings from the pure density.
pub fn sample_readings(
    amps: &AmplitudePair,
    cfg: &PointerConfig,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>, PointerError> {
    Ok(pure_reading_density(amps, cfg)?.sample(n_samples, seed))
}
