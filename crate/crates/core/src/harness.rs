//! Monte Carlo replication engine: risk tables over n-grids, the shared
//! exceedance table behind the variance identity, and log-log rate fits.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::variance_rhs;
use crate::envelope::{Envelope, ExceedanceTable};
use crate::error::{invalid, Error, Result};
use crate::functionals::{estimate_from_envelope, positive_part_root};
use crate::model::{functional_value, BoundaryFunction, FunctionalSpec, ModelConfig};
use crate::quadrature::{unit_grid, DEFAULT_GRID};
use crate::rng::{purpose, Streams};
use crate::simulate::{default_cap, sample_ppp_with};

/// Runs `f(0), …, f(reps − 1)` in parallel and returns the results in index
/// order, so the output never depends on scheduling.
pub fn replicate<T, F>(reps: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..reps).into_par_iter().map(f).collect()
}

/// Floats in every CSV the crate writes: 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimatorKind {
    /// `F̂_Φ` for an arbitrary functional.
    FPhi,
    /// `F̂_p`, the power preset.
    Fp,
    /// `T̂ = (F̂_p)_+^{1/p}`.
    THat,
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fphi" => Ok(Self::FPhi),
            "fp" => Ok(Self::Fp),
            "that" => Ok(Self::THat),
            other => Err(Error::Parse(format!("unknown estimator {other:?} (fphi, fp, that)"))),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FPhi => "fphi",
            Self::Fp => "fp",
            Self::THat => "that",
        })
    }
}

/// Everything about a risk experiment except `n`, `reps` and the seed.
#[derive(Debug, Clone)]
pub struct RiskGridConfig {
    pub boundary: BoundaryFunction,
    pub spec: FunctionalSpec,
    pub estimator: EstimatorKind,
    pub grid_size: usize,
    /// Abscissae of the shared exceedance table (uniform on `[0, 1]`).
    pub exceedance_x_nodes: usize,
    /// Levels of the shared exceedance table, quadratically spaced on `[0, 2R]`.
    pub exceedance_u_nodes: usize,
}

impl RiskGridConfig {
    pub fn new(boundary: BoundaryFunction, spec: FunctionalSpec, estimator: EstimatorKind) -> Result<Self> {
        if estimator != EstimatorKind::FPhi && spec.power_exponent().is_none() {
            return Err(invalid(format!(
                "estimator {estimator} needs a power functional, got {}",
                spec.label()
            )));
        }
        Ok(Self {
            boundary,
            spec,
            estimator,
            grid_size: DEFAULT_GRID,
            exceedance_x_nodes: 65,
            exceedance_u_nodes: 513,
        })
    }

    /// The quantity the estimator targets.
    pub fn truth(&self) -> Result<f64> {
        let value = functional_value(&self.spec, &self.boundary, 4 * DEFAULT_GRID + 1)?;
        Ok(match (self.estimator, self.spec.power_exponent()) {
            (EstimatorKind::THat, Some(p)) => value.max(0.0).powf(1.0 / p),
            _ => value,
        })
    }

    fn exceedance_levels(&self) -> Vec<f64> {
        let top = 2.0 * self.boundary.holder().radius();
        let k = self.exceedance_u_nodes - 1;
        (0..=k)
            .map(|i| {
                let t = i as f64 / k as f64;
                top * t * t
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub n: u64,
    /// Replications kept (discarded ones excluded).
    pub reps: usize,
    pub mean_estimate: f64,
    pub bias: f64,
    pub mse: f64,
    pub rmse: f64,
    pub mean_abs_error: f64,
    /// Sample variance with the `reps − 1` denominator.
    pub var_empirical: f64,
    /// Variance-identity prediction for `F̂` (for `T̂`, of the underlying `F̂_p`).
    pub var_rhs: f64,
    pub discarded: usize,
}

impl RiskRow {
    pub fn discard_fraction(&self) -> f64 {
        let total = self.reps + self.discarded;
        if total == 0 {
            1.0
        } else {
            self.discarded as f64 / total as f64
        }
    }
}

pub const RISK_HEADER: [&str; 10] = [
    "n",
    "reps",
    "mean_estimate",
    "bias",
    "mse",
    "rmse",
    "mean_abs_error",
    "var_empirical",
    "var_rhs",
    "discarded",
];

/// Discarded fraction above which a row invalidates the run.
pub const MAX_DISCARD_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskTable {
    pub rows: Vec<RiskRow>,
}

impl RiskTable {
    /// False when any row discarded more than 1% of its replications.
    pub fn is_valid(&self) -> bool {
        self.rows.iter().all(|r| r.discard_fraction() <= MAX_DISCARD_FRACTION)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RISK_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.reps.to_string(),
                fmt17(r.mean_estimate),
                fmt17(r.bias),
                fmt17(r.mse),
                fmt17(r.rmse),
                fmt17(r.mean_abs_error),
                fmt17(r.var_empirical),
                fmt17(r.var_rhs),
                r.discarded.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(input);
        let headers = rd.headers()?.clone();
        if headers.iter().ne(RISK_HEADER.iter().copied()) {
            return Err(Error::Parse(format!(
                "risk table header must be {}, got {}",
                RISK_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for record in rd.records() {
            let record = record?;
            let f = |i: usize| -> Result<f64> {
                record[i]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("column {}: {:?}", RISK_HEADER[i], &record[i])))
            };
            let u = |i: usize| -> Result<u64> {
                record[i]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("column {}: {:?}", RISK_HEADER[i], &record[i])))
            };
            rows.push(RiskRow {
                n: u(0)?,
                reps: u(1)? as usize,
                mean_estimate: f(2)?,
                bias: f(3)?,
                mse: f(4)?,
                rmse: f(5)?,
                mean_abs_error: f(6)?,
                var_empirical: f(7)?,
                var_rhs: f(8)?,
                discarded: u(9)? as usize,
            });
        }
        Ok(Self { rows })
    }
}

struct RepOutcome {
    estimate: f64,
    deviations: Vec<f64>,
}

/// Runs `reps` replications at every `n` and summarises each into a row.
///
/// Each `(n, rep)` pair draws from its own stream, so the table is a pure
/// function of `(config, ns, reps, seed)`. The exceedance table behind
/// `var_rhs` reuses the same replications.
pub fn run_risk_grid(config: &RiskGridConfig, ns: &[u64], reps: usize, seed: u64) -> Result<RiskTable> {
    if reps < 100 {
        return Err(invalid(format!("reps must be at least 100, got {reps}")));
    }
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(invalid("ns must be positive and strictly increasing"));
    }
    if config.grid_size < 2 || config.exceedance_x_nodes < 2 || config.exceedance_u_nodes < 2 {
        return Err(invalid("grid sizes must be at least 2"));
    }
    let truth = config.truth()?;
    let holder = config.boundary.holder();
    let models: Vec<ModelConfig> = ns
        .iter()
        .map(|&n| ModelConfig::with_boundary(n, config.boundary.clone()))
        .collect::<Result<_>>()?;
    let caps: Vec<f64> = models.iter().map(|m| default_cap(m, 0.0)).collect::<Result<_>>()?;
    let xs = unit_grid(config.exceedance_x_nodes);
    let g_at: Vec<f64> = xs.iter().map(|&x| config.boundary.eval(x)).collect();
    let streams = Streams::new(seed);
    let p = config.spec.power_exponent();

    let outcomes: Vec<Option<RepOutcome>> = replicate(ns.len() * reps, |job| {
        let (ni, rep) = (job / reps, job % reps);
        let model = &models[ni];
        let mut rng = streams.stream(&[purpose::SAMPLE, model.n(), rep as u64]);
        let sample = sample_ppp_with(model, caps[ni], seed, &mut rng)?;
        if sample.is_empty() || !sample.cap_valid() {
            return Ok(None);
        }
        let env = Envelope::new(&sample, holder)?;
        let fhat = estimate_from_envelope(&env, &config.spec, config.grid_size)?.value;
        let estimate = match (config.estimator, p) {
            (EstimatorKind::THat, Some(p)) => positive_part_root(fhat, p),
            _ => fhat,
        };
        let deviations = xs.iter().zip(&g_at).map(|(&x, &g)| env.evaluate(x) - g).collect();
        Ok(Some(RepOutcome { estimate, deviations }))
    })?;

    let levels = config.exceedance_levels();
    let mut rows = Vec::with_capacity(ns.len());
    for (ni, chunk) in outcomes.chunks(reps).enumerate() {
        let kept: Vec<&RepOutcome> = chunk.iter().flatten().collect();
        let discarded = reps - kept.len();
        let estimates: Vec<f64> = kept.iter().map(|o| o.estimate).collect();
        let mut columns = vec![Vec::with_capacity(kept.len()); xs.len()];
        for o in &kept {
            for (col, &d) in columns.iter_mut().zip(&o.deviations) {
                col.push(d);
            }
        }
        let table = ExceedanceTable::from_deviations(xs.clone(), levels.clone(), columns, discarded);
        let var_rhs = if kept.is_empty() {
            f64::NAN
        } else {
            variance_rhs(&models[ni], &config.spec, &table)?.value
        };
        rows.push(summarise(ns[ni], &estimates, truth, var_rhs, discarded));
    }
    Ok(RiskTable { rows })
}

fn summarise(n: u64, estimates: &[f64], truth: f64, var_rhs: f64, discarded: usize) -> RiskRow {
    let k = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / k;
    let mse = estimates.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / k;
    let mae = estimates.iter().map(|e| (e - truth).abs()).sum::<f64>() / k;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0);
    RiskRow {
        n,
        reps: estimates.len(),
        mean_estimate: mean,
        bias: mean - truth,
        mse,
        rmse: mse.sqrt(),
        mean_abs_error: mae,
        var_empirical: var,
        var_rhs,
        discarded,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiskColumn {
    Rmse,
    MeanAbsError,
}

impl RiskColumn {
    pub fn get(self, row: &RiskRow) -> f64 {
        match self {
            Self::Rmse => row.rmse,
            Self::MeanAbsError => row.mean_abs_error,
        }
    }
}

impl FromStr for RiskColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rmse" => Ok(Self::Rmse),
            "mean_abs_error" | "mae" => Ok(Self::MeanAbsError),
            other => Err(Error::Parse(format!("unknown risk column {other:?} (rmse, mean_abs_error)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub target_exponent: f64,
    /// `|slope + target_exponent| ≤ tol`.
    pub within_tolerance: bool,
}

/// Least-squares fit of `log(column)` on `log(n)`.
pub fn fit_rate_slope(table: &RiskTable, column: RiskColumn, target: f64, tol: f64) -> Result<RateFit> {
    if table.rows.len() < 4 {
        return Err(invalid(format!(
            "a rate fit needs at least 4 rows, got {}",
            table.rows.len()
        )));
    }
    let mut pts = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let v = column.get(row);
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("risk at n = {} is {v}; cannot take its log", row.n)));
        }
        pts.push(((row.n as f64).ln(), v.ln()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("all rows share the same n"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let slope_stderr = (ssr / (k - 2.0) / sxx).sqrt();
    Ok(RateFit {
        slope,
        intercept,
        slope_stderr,
        target_exponent: target,
        within_tolerance: (slope + target).abs() <= tol,
    })
}

/// The default geometric n-grid `2⁵, …, 2¹²`.
pub fn default_ns() -> Vec<u64> {
    (5..=12).map(|k| 1u64 << k).collect()
}
