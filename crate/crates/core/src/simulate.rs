//! Sampling the point process with intensity `n·1(y ≥ g(x))` on the window
//! `[0, 1] × (−∞, y_cap]`.
//!
//! A homogeneous process of rate `n` is drawn on the box
//! `[0, 1] × [floor, y_cap]` with `floor ≤ inf g`, and every point below the
//! boundary is dropped. Independent thinning of a Poisson process is again
//! Poisson, so the retained points form exactly the process restricted to
//! `{g(x) ≤ y ≤ y_cap}`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::quadrature::DEFAULT_GRID;
use crate::rng::{purpose, Streams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Observed points plus the truncation ceiling they were drawn under.
#[derive(Debug, Clone, PartialEq)]
pub struct PppSample {
    points: Vec<Point>,
    n: u64,
    y_cap: f64,
    cap_valid: bool,
    seed: u64,
}

impl PppSample {
    /// Wraps externally supplied points. `cap_valid` is recomputed from
    /// `radius`: it holds iff `min y + radius ≤ y_cap` or there are no points.
    pub fn from_points(points: Vec<Point>, n: u64, y_cap: f64, radius: f64, seed: u64) -> Self {
        let cap_valid = cap_is_valid(&points, y_cap, radius);
        Self {
            points,
            n,
            y_cap,
            cap_valid,
            seed,
        }
    }

    /// Wraps points with a caller-asserted validity flag.
    pub fn with_validity(points: Vec<Point>, n: u64, y_cap: f64, cap_valid: bool, seed: u64) -> Self {
        Self {
            points,
            n,
            y_cap,
            cap_valid,
            seed,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn y_cap(&self) -> f64 {
        self.y_cap
    }

    pub fn cap_valid(&self) -> bool {
        self.cap_valid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn min_y(&self) -> Option<f64> {
        self.points.iter().map(|p| p.y).reduce(f64::min)
    }

    /// Observations `(x, y − offset(x))`, reducing a known null boundary to 0.
    /// The ceiling becomes `y_cap − max offset`, and validity is rechecked
    /// against it.
    pub fn shifted_by(&self, offset: impl Fn(f64) -> f64, max_offset: f64, radius: f64) -> Self {
        let points: Vec<Point> = self
            .points
            .iter()
            .map(|p| Point {
                x: p.x,
                y: p.y - offset(p.x),
            })
            .collect();
        let y_cap = self.y_cap - max_offset;
        let cap_valid = self.cap_valid && cap_is_valid(&points, y_cap, radius);
        Self {
            points,
            n: self.n,
            y_cap,
            cap_valid,
            seed: self.seed,
        }
    }
}

fn cap_is_valid(points: &[Point], y_cap: f64, radius: f64) -> bool {
    match points.iter().map(|p| p.y).reduce(f64::min) {
        None => true,
        Some(min_y) => min_y + radius <= y_cap,
    }
}

/// `max g + 2R + margin`, high enough that truncation cannot affect the
/// envelope except with probability at most `e^{−nR}`.
pub fn default_cap(config: &ModelConfig, margin: f64) -> Result<f64> {
    if !(margin >= 0.0) {
        return Err(Error::InvalidParameter(format!("margin must be nonnegative, got {margin}")));
    }
    let (_, max_g) = config.boundary().grid_range(DEFAULT_GRID);
    Ok(max_g + 2.0 * config.holder().radius() + margin)
}

/// Lower edge of the proposal box: grid minimum less the Hölder slack
/// between nodes (exact for constants).
fn proposal_floor(config: &ModelConfig) -> (f64, f64) {
    let (lo, hi) = config.boundary().grid_range(DEFAULT_GRID);
    if config.boundary().is_constant() {
        return (lo, hi);
    }
    let half_step = 0.5 / (DEFAULT_GRID - 1) as f64;
    (lo - config.holder().cone(half_step), hi)
}

/// Draws one sample with the stream of `seed`.
pub fn sample_ppp(config: &ModelConfig, y_cap: f64, seed: u64) -> Result<PppSample> {
    let mut rng = Streams::new(seed).stream(&[purpose::SAMPLE]);
    sample_ppp_with(config, y_cap, seed, &mut rng)
}

/// Draws one sample from a caller-owned stream; `seed` is recorded only.
pub fn sample_ppp_with<R: Rng + ?Sized>(
    config: &ModelConfig,
    y_cap: f64,
    seed: u64,
    rng: &mut R,
) -> Result<PppSample> {
    let (floor, max_g) = proposal_floor(config);
    if !(y_cap >= max_g) || !y_cap.is_finite() {
        return Err(Error::CapBelowBoundary { cap: y_cap, max: max_g });
    }
    let radius = config.holder().radius();
    let height = y_cap - floor;
    let mean = config.n() as f64 * height;
    if mean <= 0.0 {
        return Ok(PppSample::from_points(Vec::new(), config.n(), y_cap, radius, seed));
    }
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    let boundary = config.boundary();
    let constant = boundary.is_constant().then(|| boundary.eval(0.0));
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let x: f64 = rng.random();
        let y = floor + height * rng.random::<f64>();
        let g = constant.unwrap_or_else(|| boundary.eval(x));
        if y >= g {
            points.push(Point { x, y });
        }
    }
    Ok(PppSample::from_points(points, config.n(), y_cap, radius, seed))
}
