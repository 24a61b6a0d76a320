//! Fuzzy-hypotheses prior for the lower bounds.
//!
//! Perturbations `g_θ = f + Σ_k θ_k g_k` of a base curve `f` use bumps
//! `g_k(x) = cRh^β·K((x − (k−1)h)/h)` on `m = 1/h` cells and independent
//! activations `θ_k ~ Bernoulli(p_k)`. Under the base law the likelihood
//! ratio of the mixture factorises over cells, which gives the χ² divergence
//! in closed form.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envelope::binomial_stderr;
use crate::error::{invalid, Result};
use crate::harness::replicate;
use crate::model::{
    kernel_power_integral, triangular_kernel, BoundaryFunction, FunctionalSpec, HolderClass, ModelConfig,
};
use crate::quadrature::{simpson_fn, DEFAULT_GRID};
use crate::rng::{purpose, Streams};
use crate::simulate::{sample_ppp_with, PppSample};

#[derive(Debug, Clone, PartialEq)]
pub struct PriorConfig {
    m: usize,
    c: f64,
    holder: HolderClass,
    weights: Vec<f64>,
    base: BoundaryFunction,
}

impl PriorConfig {
    pub fn new(m: usize, c: f64, holder: HolderClass, weights: Vec<f64>, base: BoundaryFunction) -> Result<Self> {
        if m == 0 {
            return Err(invalid("prior needs at least one cell"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid(format!("bump amplitude must be positive, got {c}")));
        }
        if weights.len() != m {
            return Err(invalid(format!("expected {m} weights, got {}", weights.len())));
        }
        if weights.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(invalid("success probabilities must lie in [0, 1]"));
        }
        Ok(Self {
            m,
            c,
            holder,
            weights,
            base,
        })
    }

    /// `p_k = 1/√m` with base `f ≡ 0`.
    pub fn uniform(m: usize, c: f64, holder: HolderClass) -> Result<Self> {
        let base = BoundaryFunction::constant(0.0, holder);
        Self::new(m, c, holder, uniform_weights(m), base)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn holder(&self) -> HolderClass {
        self.holder
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn base(&self) -> &BoundaryFunction {
        &self.base
    }

    /// Bump scale `cRh^β`; the kernel peaks at 2, so bumps reach twice this.
    pub fn bump_scale(&self) -> f64 {
        self.c * self.holder.radius() * self.h().powf(self.holder.beta())
    }

    /// `∫_{I_k} g_k = cRh^{β+1}` (the kernel integrates to one).
    pub fn cell_mass(&self) -> f64 {
        self.bump_scale() * self.h()
    }

    /// `g_k(x)` for the zero-based cell `k`.
    pub fn bump(&self, k: usize, x: f64) -> f64 {
        self.bump_scale() * triangular_kernel((x - k as f64 * self.h()) / self.h())
    }

    /// Zero-based cell containing `x`: `[(k)h, (k+1)h)`, the last one closed.
    pub fn cell_of(&self, x: f64) -> usize {
        ((x * self.m as f64) as usize).min(self.m - 1)
    }

    pub fn weight_square_sum(&self) -> f64 {
        self.weights.iter().map(|p| p * p).sum()
    }

    /// Whether `Σ p_k² = 1` holds up to `1e-12`.
    pub fn is_normalized(&self) -> bool {
        (self.weight_square_sum() - 1.0).abs() <= 1e-12
    }

    /// `g_θ` for a given activation vector.
    pub fn perturbed(&self, theta: &[bool]) -> Result<BoundaryFunction> {
        let bumps = BoundaryFunction::bump_sum(theta.to_vec(), self.c, self.holder)?;
        Ok(BoundaryFunction::sum(self.base.clone(), bumps))
    }

    /// `∥Σθ_k g_k∥_p = (Σθ_k)^{1/p}·cRh^{β+1/p}·∥K∥_p`.
    pub fn bump_norm(&self, active: usize, p: f64) -> f64 {
        (active as f64).powf(1.0 / p)
            * self.c
            * self.holder.radius()
            * self.h().powf(self.holder.beta() + 1.0 / p)
            * kernel_power_integral(p).powf(1.0 / p)
    }
}

pub fn uniform_weights(m: usize) -> Vec<f64> {
    vec![1.0 / (m as f64).sqrt(); m]
}

/// `p_k = a_{k+}/∥a_+∥₂` with `a_k = ⟨Φ′∘f, K_h(· − (k−1)h)⟩`; the negative
/// parts are dropped.
pub fn matched_weights(spec: &FunctionalSpec, base: &BoundaryFunction, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(invalid("prior needs at least one cell"));
    }
    let h = 1.0 / m as f64;
    let nodes_per_cell = (DEFAULT_GRID / m).max(16);
    let a: Vec<f64> = (0..m)
        .map(|k| {
            let left = k as f64 * h;
            simpson_fn(
                |x| spec.phi_prime(base.eval(x)) * triangular_kernel((x - left) / h) / h,
                left,
                left + h,
                nodes_per_cell,
            )
            .max(0.0)
        })
        .collect();
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(invalid("Φ′∘f has no positive part; matched weights are undefined"));
    }
    Ok(a.iter().map(|v| (v / norm).min(1.0)).collect())
}

/// `m = ⌊2(cRn)^{1/(β+1)}⌋`, the cell count for estimation lower bounds.
pub fn estimation_cells(c: f64, holder: HolderClass, n: f64) -> usize {
    (2.0 * (c * holder.radius() * n).powf(1.0 / (holder.beta() + 1.0))).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorGeometry {
    pub m: usize,
    pub h: f64,
    /// `c₁` in `h ≈ c₁·r^{1/(β + 1/(2p))}`.
    pub c1: f64,
}

/// Largest cell count `m` for which `m^{1/(2p)}·2^{−1/p}·cRh^{β+1/p}∥K∥_p ≥ r`,
/// so that `∥g_θ∥_p ≥ r` whenever at least `√m/2` bumps are active.
pub fn prior_geometry(c: f64, holder: HolderClass, r_target: f64, p: f64) -> Result<PriorGeometry> {
    if !(r_target > 0.0) {
        return Err(invalid(format!("target radius must be positive, got {r_target}")));
    }
    if !(p >= 1.0) {
        return Err(invalid(format!("power must satisfy p >= 1, got {p}")));
    }
    let exponent = holder.beta() + 0.5 / p;
    let scale = c * holder.radius() * kernel_power_integral(p).powf(1.0 / p) / 2f64.powf(1.0 / p);
    let m_real = (scale / r_target).powf(1.0 / exponent);
    let m = (m_real * (1.0 + 1e-9)).floor();
    if m < 1.0 {
        return Err(invalid(format!(
            "target radius {r_target} needs fewer than one cell (m = {m_real:.4})"
        )));
    }
    let m = m as usize;
    Ok(PriorGeometry {
        m,
        h: 1.0 / m as f64,
        c1: (1.0 / scale).powf(1.0 / exponent),
    })
}

/// Draws `θ` from the prior and returns it with `g_θ`.
pub fn draw_prior(config: &PriorConfig, seed: u64) -> Result<(Vec<bool>, BoundaryFunction)> {
    let mut rng = Streams::new(seed).stream(&[purpose::PRIOR]);
    draw_prior_with(config, &mut rng)
}

pub fn draw_prior_with<R: Rng + ?Sized>(config: &PriorConfig, rng: &mut R) -> Result<(Vec<bool>, BoundaryFunction)> {
    let theta: Vec<bool> = config
        .weights
        .iter()
        .map(|&p| rng.random::<f64>() < p)
        .collect();
    let g = config.perturbed(&theta)?;
    Ok((theta, g))
}

/// Per-cell indicator `∀ X_j ∈ I_k: Y_j ≥ f(X_j) + g_k(X_j)`.
pub fn cells_clear(sample: &PppSample, config: &PriorConfig) -> Vec<bool> {
    let mut clear = vec![true; config.m];
    for p in sample.points() {
        let k = config.cell_of(p.x);
        if clear[k] && p.y < config.base.eval(p.x) + config.bump(k, p.x) {
            clear[k] = false;
        }
    }
    clear
}

/// `dP₁/dP₀ = Π_k (1 − p_k + p_k·e^{n∫g_k}·clear_k)` for a sample drawn
/// under the base curve.
pub fn likelihood_ratio(sample: &PppSample, config: &PriorConfig) -> f64 {
    let lift = (sample.n() as f64 * config.cell_mass()).exp();
    cells_clear(sample, config)
        .into_iter()
        .zip(&config.weights)
        .map(|(clear, &p)| 1.0 - p + if clear { p * lift } else { 0.0 })
        .product()
}

/// `Π_k (1 + p_k²(e^{n∫g_k} − 1)) − 1`.
pub fn chi2_exact(config: &PriorConfig, n: f64) -> f64 {
    let excess = (n * config.cell_mass()).exp_m1();
    config
        .weights
        .iter()
        .map(|p| 1.0 + p * p * excess)
        .product::<f64>()
        - 1.0
}

/// `exp(exp(n∫g₁) − 1) − 1`, valid when `Σp_k² = 1`.
pub fn chi2_lemma_bound(config: &PriorConfig, n: f64) -> f64 {
    (n * config.cell_mass()).exp_m1().exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi2Report {
    pub exact_value: f64,
    pub lemma_bound: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    /// Sample mean of the likelihood ratio under the base law (should be 1).
    pub lr_mean: f64,
    pub lr_stderr: f64,
    pub weights_normalized: bool,
    pub mc_reps: usize,
}

fn base_model(config: &PriorConfig, n: u64) -> Result<(ModelConfig, f64)> {
    let model = ModelConfig::with_boundary(n, config.base.clone())?;
    let (_, max_f) = config.base.grid_range(DEFAULT_GRID);
    // Points above f + g_k never affect the indicators.
    let y_cap = max_f + 2.0 * config.bump_scale() + config.holder.cone(0.5 / DEFAULT_GRID as f64) + 1e-12;
    Ok((model, y_cap))
}

/// Likelihood ratios of `reps` samples drawn under the base curve.
pub fn likelihood_ratios(config: &PriorConfig, n: u64, reps: usize, seed: u64) -> Result<Vec<f64>> {
    let (model, y_cap) = base_model(config, n)?;
    let streams = Streams::new(seed);
    replicate(reps, |rep| {
        let mut rng = streams.stream(&[purpose::NULL, n, rep as u64]);
        let sample = sample_ppp_with(&model, y_cap, seed, &mut rng)?;
        Ok(likelihood_ratio(&sample, config))
    })
}

/// Empirical rate at which each cell indicator fires under the base law,
/// with binomial standard errors.
pub fn cell_clear_rates(config: &PriorConfig, n: u64, reps: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    let (model, y_cap) = base_model(config, n)?;
    let streams = Streams::new(seed);
    let rows = replicate(reps, |rep| {
        let mut rng = streams.stream(&[purpose::NULL, n, rep as u64]);
        let sample = sample_ppp_with(&model, y_cap, seed, &mut rng)?;
        Ok(cells_clear(&sample, config))
    })?;
    let mut counts = vec![0usize; config.m];
    for row in &rows {
        for (c, &clear) in counts.iter_mut().zip(row) {
            *c += clear as usize;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| {
            let rate = c as f64 / reps as f64;
            (rate, binomial_stderr(rate, reps))
        })
        .collect())
}

/// Exact χ², the lemma bound and (when `mc_reps > 0`) Monte Carlo estimates
/// of `E₀[LR²] − 1` and `E₀[LR]`.
pub fn chi2_certificate(config: &PriorConfig, n: u64, mc_reps: usize, seed: u64) -> Result<Chi2Report> {
    let exact_value = chi2_exact(config, n as f64);
    let lemma_bound = chi2_lemma_bound(config, n as f64);
    let (mut mc_estimate, mut mc_stderr, mut lr_mean, mut lr_stderr) = (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    if mc_reps > 0 {
        let ratios = likelihood_ratios(config, n, mc_reps, seed)?;
        let squares: Vec<f64> = ratios.iter().map(|r| r * r).collect();
        let (m2, s2) = mean_and_stderr(&squares);
        let (m1, s1) = mean_and_stderr(&ratios);
        mc_estimate = m2 - 1.0;
        mc_stderr = s2;
        lr_mean = m1;
        lr_stderr = s1;
    }
    Ok(Chi2Report {
        exact_value,
        lemma_bound,
        mc_estimate,
        mc_stderr,
        lr_mean,
        lr_stderr,
        weights_normalized: config.is_normalized(),
        mc_reps,
    })
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
