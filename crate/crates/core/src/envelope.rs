//! The maximum-likelihood envelope `ĝ(x) = min_k (Y_k + R|x − X_k|^β)`.
//!
//! Only points that are not strictly dominated by another point's cone can
//! attain the minimum: if `Y_k + R|X_j − X_k|^β < Y_j` then, by subadditivity
//! of `t ↦ t^β` for `β ≤ 1`, the cone of `k` lies below the cone of `j`
//! everywhere. The envelope therefore keeps the undominated ("active")
//! points sorted by abscissa, and evaluation scans outward from `x`,
//! stopping once `R|x − X_k|^β` alone exceeds the current best minus the
//! lowest active ordinate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::harness::replicate;
use crate::model::{HolderClass, ModelConfig};
use crate::quadrature::unit_node;
use crate::rng::{purpose, Streams};
use crate::simulate::{default_cap, sample_ppp_with, PppSample};

#[derive(Debug, Clone)]
pub struct Envelope<'a> {
    sample: &'a PppSample,
    holder: HolderClass,
    xs: Vec<f64>,
    ys: Vec<f64>,
    on_envelope: Vec<bool>,
    min_y: f64,
}

impl<'a> Envelope<'a> {
    pub fn new(sample: &'a PppSample, holder: HolderClass) -> Result<Self> {
        let points = sample.points();
        if points.is_empty() {
            return Err(Error::NoObservations);
        }
        let min_y = sample.min_y().unwrap();
        let radius = holder.radius();
        // Anything above min_y + R is strictly dominated by the lowest point.
        let mut order: Vec<usize> = (0..points.len())
            .filter(|&j| points[j].y <= min_y + radius)
            .collect();
        order.sort_unstable_by(|&a, &b| points[a].y.total_cmp(&points[b].y));

        let mut env = Self {
            sample,
            holder,
            xs: Vec::new(),
            ys: Vec::new(),
            on_envelope: vec![false; points.len()],
            min_y,
        };
        for j in order {
            let p = points[j];
            if !env.dominated(p.x, p.y) {
                let at = env.xs.partition_point(|&x| x < p.x);
                env.xs.insert(at, p.x);
                env.ys.insert(at, p.y);
                env.on_envelope[j] = true;
            }
        }
        Ok(env)
    }

    /// Whether some active cone passes strictly below `(x, y)`.
    fn dominated(&self, x: f64, y: f64) -> bool {
        let slack = y - self.min_y;
        let start = self.xs.partition_point(|&t| t < x);
        for k in (0..start).rev() {
            let rise = self.holder.cone(x - self.xs[k]);
            if rise >= slack {
                break;
            }
            if self.ys[k] + rise < y {
                return true;
            }
        }
        for k in start..self.xs.len() {
            let rise = self.holder.cone(self.xs[k] - x);
            if rise >= slack {
                break;
            }
            if self.ys[k] + rise < y {
                return true;
            }
        }
        false
    }

    pub fn sample(&self) -> &PppSample {
        self.sample
    }

    pub fn holder(&self) -> HolderClass {
        self.holder
    }

    /// `ĝ(x)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let start = self.xs.partition_point(|&t| t < x);
        let mut best = f64::INFINITY;
        for k in (0..start).rev() {
            let rise = self.holder.cone(x - self.xs[k]);
            if rise >= best - self.min_y {
                break;
            }
            best = best.min(self.ys[k] + rise);
        }
        for k in start..self.xs.len() {
            let rise = self.holder.cone(self.xs[k] - x);
            if rise >= best - self.min_y {
                break;
            }
            best = best.min(self.ys[k] + rise);
        }
        best
    }

    /// `ĝ(x)` by the defining minimum over every observation.
    pub fn evaluate_naive(&self, x: f64) -> f64 {
        self.sample
            .points()
            .iter()
            .map(|p| p.y + self.holder.cone((x - p.x).abs()))
            .fold(f64::INFINITY, f64::min)
    }

    /// `ĝ` on the uniform grid of `nodes` nodes.
    pub fn evaluate_grid(&self, nodes: usize) -> Vec<f64> {
        (0..nodes).map(|i| self.evaluate(unit_node(i, nodes))).collect()
    }

    /// Per-observation indicator `min_{k≠j}(Y_k + R|X_j − X_k|^β) ≥ Y_j`.
    pub fn on_envelope(&self) -> &[bool] {
        &self.on_envelope
    }

    pub fn count_on_envelope(&self) -> usize {
        self.xs.len()
    }

    /// Active points `(x, y)` sorted by `x`.
    pub fn active_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    /// Exact `∫₀¹ |ĝ|^p` for `β = 1`, where `ĝ` is piecewise linear with
    /// slopes `±R`.
    pub fn lipschitz_power_integral(&self, p: f64) -> Result<f64> {
        if self.holder.beta() != 1.0 {
            return Err(invalid("exact integration needs beta = 1"));
        }
        let r = self.holder.radius();
        // Breakpoints: 0, each active abscissa, each crossing of neighbouring
        // cones, 1. Between breakpoints ĝ is linear.
        let mut knots = vec![0.0];
        for w in 0..self.xs.len() {
            knots.push(self.xs[w]);
            if w + 1 < self.xs.len() {
                let (x0, y0, x1, y1) = (self.xs[w], self.ys[w], self.xs[w + 1], self.ys[w + 1]);
                // y0 + r(t − x0) = y1 + r(x1 − t)
                let t = 0.5 * (x0 + x1) + (y1 - y0) / (2.0 * r);
                if t > x0 && t < x1 {
                    knots.push(t);
                }
            }
        }
        knots.push(1.0);
        knots.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b > a {
                total += linear_power_integral(a, self.evaluate(a), b, self.evaluate(b), p);
            }
        }
        Ok(total)
    }
}

/// `∫_a^b |ℓ(t)|^p dt` for the linear ℓ with `ℓ(a) = fa`, `ℓ(b) = fb`.
fn linear_power_integral(a: f64, fa: f64, b: f64, fb: f64, p: f64) -> f64 {
    let width = b - a;
    if fa * fb < 0.0 {
        let t = a + width * fa / (fa - fb);
        return linear_power_integral(a, fa, t, 0.0, p) + linear_power_integral(t, 0.0, b, fb, p);
    }
    let (fa, fb) = (fa.abs(), fb.abs());
    if (fb - fa).abs() < 1e-300 {
        return width * fa.powf(p);
    }
    width * (fb.powf(p + 1.0) - fa.powf(p + 1.0)) / ((p + 1.0) * (fb - fa))
}

/// Monte Carlo estimate of `P(ĝ(x) − g(x) ≥ u)` at one `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceedancePoint {
    pub u: f64,
    pub p_hat: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceCurve {
    pub x: f64,
    pub points: Vec<ExceedancePoint>,
    pub kept: usize,
    pub discarded: usize,
}

/// Empirical exceedance probabilities of the envelope at a single abscissa.
pub fn envelope_exceedance(
    config: &ModelConfig,
    x: f64,
    u_grid: &[f64],
    reps: usize,
    seed: u64,
) -> Result<ExceedanceCurve> {
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    if u_grid.iter().any(|&u| !(u >= 0.0)) {
        return Err(invalid("exceedance levels must be nonnegative"));
    }
    let table = exceedance_table(config, &[x], u_grid, reps, seed)?;
    let kept = table.kept;
    let points = u_grid
        .iter()
        .enumerate()
        .map(|(j, &u)| {
            let p_hat = table.p_hat(0, j);
            ExceedancePoint {
                u,
                p_hat,
                stderr: binomial_stderr(p_hat, kept),
            }
        })
        .collect();
    Ok(ExceedanceCurve {
        x,
        points,
        kept,
        discarded: table.discarded,
    })
}

pub(crate) fn binomial_stderr(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// `p̂(x, u) = P̂(ĝ(x) − g(x) ≥ u)` on a rectangular `(x, u)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceTable {
    pub xs: Vec<f64>,
    pub us: Vec<f64>,
    /// Row-major, one row of `us.len()` entries per abscissa.
    pub probabilities: Vec<f64>,
    pub kept: usize,
    pub discarded: usize,
}

impl ExceedanceTable {
    /// Builds the table from per-abscissa deviation samples `ĝ(x) − g(x)`.
    pub fn from_deviations(xs: Vec<f64>, us: Vec<f64>, mut deviations: Vec<Vec<f64>>, discarded: usize) -> Self {
        let kept = deviations.first().map_or(0, Vec::len);
        let mut probabilities = Vec::with_capacity(xs.len() * us.len());
        for column in deviations.iter_mut() {
            column.sort_by(f64::total_cmp);
            for &u in &us {
                let below = column.partition_point(|&d| d < u);
                let exceed = column.len() - below;
                probabilities.push(if kept == 0 { f64::NAN } else { exceed as f64 / kept as f64 });
            }
        }
        Self {
            xs,
            us,
            probabilities,
            kept,
            discarded,
        }
    }

    /// Closed-form table with `p(x, u) = f(x, u)`.
    pub fn from_fn(xs: Vec<f64>, us: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Self {
        let probabilities = xs
            .iter()
            .flat_map(|&x| us.iter().map(move |&u| (x, u)))
            .map(|(x, u)| f(x, u))
            .collect();
        Self {
            xs,
            us,
            probabilities,
            kept: 0,
            discarded: 0,
        }
    }

    #[inline]
    pub fn p_hat(&self, xi: usize, ui: usize) -> f64 {
        self.probabilities[xi * self.us.len() + ui]
    }
}

/// Simulates `reps` samples and tabulates envelope exceedances at `xs × us`.
/// Empty or cap-invalid replications are discarded and counted.
pub fn exceedance_table(
    config: &ModelConfig,
    xs: &[f64],
    us: &[f64],
    reps: usize,
    seed: u64,
) -> Result<ExceedanceTable> {
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    let y_cap = default_cap(config, 0.0)?;
    let streams = Streams::new(seed);
    let g_at: Vec<f64> = xs.iter().map(|&x| config.boundary().eval(x)).collect();
    let per_rep: Vec<Option<Vec<f64>>> = replicate(reps, |rep| {
        let mut rng = streams.stream(&[purpose::AUXILIARY, config.n(), rep as u64]);
        let sample = sample_ppp_with(config, y_cap, seed, &mut rng)?;
        if sample.is_empty() || !sample.cap_valid() {
            return Ok(None);
        }
        let env = Envelope::new(&sample, config.holder())?;
        Ok(Some(
            xs.iter()
                .zip(&g_at)
                .map(|(&x, &g)| env.evaluate(x) - g)
                .collect(),
        ))
    })?;
    let mut deviations = vec![Vec::with_capacity(reps); xs.len()];
    let mut discarded = 0;
    for row in per_rep {
        match row {
            Some(row) => {
                for (column, d) in deviations.iter_mut().zip(row) {
                    column.push(d);
                }
            }
            None => discarded += 1,
        }
    }
    Ok(ExceedanceTable::from_deviations(xs.to_vec(), us.to_vec(), deviations, discarded))
}
