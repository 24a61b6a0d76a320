//! Unbiased estimators of `F_Φ(g) = ∫Φ(g)` built on the envelope.
//!
//! `F̂_Φ = ∫Φ(ĝ) − (1/n)·Σ_j Φ′(Y_j)·1(ĝ(X_j) ≥ Y_j)`, where the indicator is
//! evaluated with the `k = j` cone removed, so no floating-point tie test
//! `Y_j = ĝ(X_j)` is ever made.

use serde::{Deserialize, Serialize};

use crate::envelope::Envelope;
use crate::error::{invalid, Error, Result};
use crate::model::{BoundaryFunction, FunctionalSpec, HolderClass};
use crate::quadrature::{trapezoid, unit_node};
use crate::simulate::PppSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub value: f64,
    /// `∫Φ(ĝ)` (or `∫Φ(ḡ)` for the pseudo-estimator).
    pub integral_term: f64,
    /// `(1/n)·Σ Φ′(Y_j)·indicator_j`.
    pub sum_term: f64,
    pub count_on_envelope: usize,
    pub cap_valid: bool,
}

impl EstimateResult {
    fn assemble(integral_term: f64, sum_term: f64, count: usize, cap_valid: bool) -> Self {
        Self {
            value: integral_term - sum_term,
            integral_term,
            sum_term,
            count_on_envelope: count,
            cap_valid,
        }
    }
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 2 {
        return Err(invalid(format!("grid_size must be at least 2, got {grid_size}")));
    }
    Ok(())
}

/// `∫Φ(f)` by trapezoid over the uniform grid.
fn integrate_phi(f: impl Fn(f64) -> f64, spec: &FunctionalSpec, grid_size: usize) -> Result<f64> {
    let mut values = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let v = spec.phi(f(unit_node(i, grid_size)));
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("Φ along the envelope ({})", spec.label())));
        }
        values.push(v);
    }
    Ok(trapezoid(&values, 1.0 / (grid_size - 1) as f64))
}

fn weighted_sum<'s>(
    spec: &FunctionalSpec,
    ys: impl Iterator<Item = f64> + 's,
    n: u64,
) -> Result<f64> {
    let mut acc = 0.0;
    for y in ys {
        let d = spec.phi_prime(y);
        if !d.is_finite() {
            return Err(Error::NonFinite(format!("Φ′({y}) for {}", spec.label())));
        }
        acc += d;
    }
    Ok(acc / n as f64)
}

/// Computes `F̂_Φ` from an already constructed envelope.
pub fn estimate_from_envelope(env: &Envelope<'_>, spec: &FunctionalSpec, grid_size: usize) -> Result<EstimateResult> {
    check_grid(grid_size)?;
    let sample = env.sample();
    let integral = integrate_phi(|x| env.evaluate(x), spec, grid_size)?;
    let ys = sample
        .points()
        .iter()
        .zip(env.on_envelope())
        .filter(|(_, &on)| on)
        .map(|(p, _)| p.y);
    let sum = weighted_sum(spec, ys, sample.n())?;
    Ok(EstimateResult::assemble(
        integral,
        sum,
        env.count_on_envelope(),
        sample.cap_valid(),
    ))
}

/// `F̂_Φ`. A cap-invalid sample still yields a result, flagged through
/// `cap_valid` so that callers can discard it.
pub fn estimate_functional(
    sample: &PppSample,
    holder: HolderClass,
    spec: &FunctionalSpec,
    grid_size: usize,
) -> Result<EstimateResult> {
    check_grid(grid_size)?;
    let env = Envelope::new(sample, holder)?;
    estimate_from_envelope(&env, spec, grid_size)
}

/// Pseudo-estimator `∫Φ(ḡ) − (1/n)Σ Φ′(Y_j)·1(ḡ(X_j) ≥ Y_j)` for a known
/// deterministic `ḡ ≥ g`. Domination is the caller's responsibility.
pub fn estimate_pseudo(
    sample: &PppSample,
    gbar: &BoundaryFunction,
    spec: &FunctionalSpec,
    grid_size: usize,
) -> Result<EstimateResult> {
    check_grid(grid_size)?;
    let integral = integrate_phi(|x| gbar.eval(x), spec, grid_size)?;
    let below: Vec<f64> = sample
        .points()
        .iter()
        .filter(|p| gbar.eval(p.x) >= p.y)
        .map(|p| p.y)
        .collect();
    let sum = weighted_sum(spec, below.iter().copied(), sample.n())?;
    Ok(EstimateResult::assemble(integral, sum, below.len(), sample.cap_valid()))
}

/// `(F̂)_+^{1/p}`.
pub fn positive_part_root(estimate: f64, p: f64) -> f64 {
    estimate.max(0.0).powf(1.0 / p)
}

/// `T̂ = (F̂_p)_+^{1/p}`, the estimator of `∥g∥_p`.
pub fn estimate_lp_norm(sample: &PppSample, holder: HolderClass, p: f64, grid_size: usize) -> Result<f64> {
    let spec = FunctionalSpec::power(p)?;
    let fhat = estimate_functional(sample, holder, &spec, grid_size)?;
    Ok(positive_part_root(fhat.value, p))
}
