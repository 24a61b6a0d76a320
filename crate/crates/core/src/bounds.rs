//! Closed-form analytic quantities: the envelope deviation bound, its
//! Gamma-moment integrals, the variance identity, the explicit risk bound
//! for power functionals, the local asymptotic constant, the Hölder
//! interpolation inequality and the minimax rate exponents.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta as beta_fn;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::envelope::ExceedanceTable;
use crate::error::{invalid, Result};
use crate::model::{BoundaryFunction, FunctionalSpec, HolderClass, ModelConfig};
use crate::quadrature::trapezoid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationBoundParams {
    pub holder: HolderClass,
    pub n: u64,
    pub u: f64,
}

/// Upper bound on `P(ĝ(x) − g(x) ≥ u)`, uniform in `x` and in `g ∈ C^β(R)`:
/// `exp(−nβ(2R)^{−1/β}u^{(β+1)/β}/(β+1))` for `u ≤ 2R`,
/// `exp(−n(u − 2R/(β+1)))` beyond.
pub fn deviation_bound(params: &DeviationBoundParams) -> Result<f64> {
    let DeviationBoundParams { holder, n, u } = *params;
    if !(u >= 0.0) {
        return Err(invalid(format!("deviation level must be nonnegative, got {u}")));
    }
    Ok(deviation_bound_value(holder.beta(), holder.radius(), n as f64, u))
}

pub(crate) fn deviation_bound_value(beta: f64, radius: f64, n: f64, u: f64) -> f64 {
    let two_r = 2.0 * radius;
    if u <= two_r {
        (-n * beta * two_r.powf(-1.0 / beta) * u.powf((beta + 1.0) / beta) / (beta + 1.0)).exp()
    } else {
        (-n * (u - two_r / (beta + 1.0))).exp()
    }
}

/// Closed form of `∫₀^∞ u^q exp(−nβ(2R)^{−1/β}u^{(β+1)/β}/(β+1)) du`,
/// an upper bound for the same integral over `[0, 2R]`:
/// `((β+1)/β)^{(βq−1)/(β+1)}·(2R)^{(q+1)/(β+1)}·Γ(β(q+1)/(β+1))·n^{−β(q+1)/(β+1)}`.
pub fn gamma_moment(q: f64, beta: f64, radius: f64, n: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(invalid(format!("moment order must be nonnegative, got {q}")));
    }
    let b1 = beta + 1.0;
    Ok(((b1 / beta).powf((beta * q - 1.0) / b1))
        * (2.0 * radius).powf((q + 1.0) / b1)
        * gamma(beta * (q + 1.0) / b1)
        * n.powf(-beta * (q + 1.0) / b1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceRhs {
    pub value: f64,
    /// Largest `p̂(x, u_max)` over the abscissae.
    pub tail_probability: f64,
    /// Set when `tail_probability > 1e-3`, i.e. the u-grid stops too early.
    pub tail_warning: bool,
}

/// Trapezoid weights for arbitrary increasing nodes.
fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let k = nodes.len();
    let mut w = vec![0.0; k];
    for i in 0..k.saturating_sub(1) {
        let half = 0.5 * (nodes[i + 1] - nodes[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    w
}

/// Right side of the variance identity,
/// `(1/n)·∫₀¹∫₀^∞ Φ′(g(x) + u)²·P(ĝ(x) − g(x) ≥ u) du dx`,
/// by double trapezoid over the table's `(x, u)` grid.
pub fn variance_rhs(config: &ModelConfig, spec: &FunctionalSpec, table: &ExceedanceTable) -> Result<VarianceRhs> {
    if table.xs.len() < 2 || table.us.len() < 2 {
        return Err(invalid("exceedance table needs at least two abscissae and two levels"));
    }
    let wx = trapezoid_weights(&table.xs);
    let wu = trapezoid_weights(&table.us);
    let last = table.us.len() - 1;
    let mut total = 0.0;
    let mut tail = 0.0f64;
    for (xi, &x) in table.xs.iter().enumerate() {
        let g = config.boundary().eval(x);
        let mut inner = 0.0;
        for (ui, &u) in table.us.iter().enumerate() {
            let d = spec.phi_prime(g + u);
            inner += wu[ui] * d * d * table.p_hat(xi, ui);
        }
        total += wx[xi] * inner;
        tail = tail.max(table.p_hat(xi, last));
    }
    Ok(VarianceRhs {
        value: total / config.n() as f64,
        tail_probability: tail,
        tail_warning: tail > 1e-3,
    })
}

/// The four terms of the explicit mean-squared-error bound for `F̂_p`, with
/// constants taken from the proof rather than left symbolic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskUpperBound {
    /// `K·∥g∥^{2p−2}_{2p−2}·M(0)` with `K = p²2^{2p−2}/n` and `M` the Gamma moment.
    pub smooth: f64,
    /// `K·M(2p−2)`, the term that survives at `g = 0`.
    pub singular: f64,
    /// `K·∥g∥^{2p−2}_{2p−2}·n^{−1}·e^{−2βRn/(β+1)}`.
    pub smooth_tail: f64,
    /// `K·((β+1)/(nβ))^{2p−1}·Γ(2p−1, 2βRn/(β+1))`.
    pub singular_tail: f64,
    pub total: f64,
}

/// Bound on `E[(F̂_p − ∥g∥_p^p)²]`. `g_norm_power` is `∥g∥^{2p−2}_{2p−2}`,
/// with the convention `∥g∥_0^0 = 1` at `p = 1`.
pub fn risk_upper_bound_power(p: f64, beta: f64, radius: f64, n: f64, g_norm_power: f64) -> Result<RiskUpperBound> {
    if !(p >= 1.0) {
        return Err(invalid(format!("power must satisfy p >= 1, got {p}")));
    }
    // E[(F̂_p − ∥g∥_p^p)²] = (1/n)∫∫ p²|u + g|^{2p−2} P(ĝ − g ≥ u),
    // |u + g|^{2p−2} ≤ 2^{2p−2}(u^{2p−2} + |g|^{2p−2}), then split at u = 2R.
    let k = p * p * 2f64.powf(2.0 * p - 2.0) / n;
    let smooth = k * g_norm_power * gamma_moment(0.0, beta, radius, n)?;
    let singular = k * gamma_moment(2.0 * p - 2.0, beta, radius, n)?;
    let decay = 2.0 * beta * radius * n / (beta + 1.0);
    let smooth_tail = k * g_norm_power * (-decay).exp() / n;
    let shape = 2.0 * p - 1.0;
    let singular_tail =
        k * ((beta + 1.0) / (n * beta)).powf(shape) * gamma(shape) * gamma_ur(shape, decay);
    Ok(RiskUpperBound {
        smooth,
        singular,
        smooth_tail,
        singular_tail,
        total: smooth + singular + smooth_tail + singular_tail,
    })
}

/// `Γ(β/(β+1))·(2Rβ/(β+1))^{1/(β+1)}·∥Φ′∘f∥²₂`, the limit of
/// `n^{(2β+1)/(β+1)}·MSE` near `f`.
pub fn local_asymptotic_constant(beta: f64, radius: f64, phi_prime_norm_sq: f64) -> Result<f64> {
    if !(beta > 0.0 && radius > 0.0 && phi_prime_norm_sq >= 0.0) {
        return Err(invalid("local constant needs beta, radius > 0 and a nonnegative norm"));
    }
    Ok(gamma(beta / (beta + 1.0))
        * (2.0 * radius * beta / (beta + 1.0)).powf(1.0 / (beta + 1.0))
        * phi_prime_norm_sq)
}

/// `∥1 − y^β∥_p` on `[0, 1]`, via `∫(1 − y^β)^p = B(1/β, p + 1)/β`.
pub fn one_minus_power_norm(beta: f64, p: f64) -> f64 {
    (beta_fn(1.0 / beta, p + 1.0) / beta).powf(1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationCheck {
    /// `∥f∥_p` on the grid.
    pub lhs: f64,
    /// `∥f∥_∞·min(1, ∥f∥_∞/R)^{1/(βp)}·∥1 − y^β∥_p` with the grid supremum.
    pub rhs: f64,
    /// Discretisation allowance `2R·grid^{−β}` credited to the left side.
    pub margin: f64,
    pub holds: bool,
}

/// Checks `∥f∥_p ≥ ∥f∥_∞·min(1, ∥f∥_∞/R)^{1/(βp)}·∥1 − y^β∥_p` for
/// `f ∈ C^β(R)`, using the class claimed by `f`.
pub fn interpolation_check(f: &BoundaryFunction, p: f64, grid_size: usize) -> Result<InterpolationCheck> {
    if !(p >= 1.0) {
        return Err(invalid(format!("power must satisfy p >= 1, got {p}")));
    }
    if grid_size < 2 {
        return Err(invalid("grid_size must be at least 2"));
    }
    let holder = f.holder();
    let (beta, radius) = (holder.beta(), holder.radius());
    let values = f.sample_grid(grid_size);
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let powers: Vec<f64> = values.iter().map(|v| v.abs().powf(p)).collect();
    let lhs = trapezoid(&powers, 1.0 / (grid_size - 1) as f64).powf(1.0 / p);
    let rhs = if sup == 0.0 {
        0.0
    } else {
        sup * (sup / radius).min(1.0).powf(1.0 / (beta * p)) * one_minus_power_norm(beta, p)
    };
    let margin = 2.0 * radius * (grid_size as f64).powf(-beta);
    Ok(InterpolationCheck {
        lhs,
        rhs,
        margin,
        holds: lhs + margin >= rhs,
    })
}

/// Rate exponents: `n^{−e}` is the minimax rate for each problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    pub beta: f64,
    pub p: f64,
    /// Estimating `∥g∥_p^p` (and linear functionals): `(β + 1/2)/(β + 1)`.
    pub ppp_estimation: f64,
    /// Estimating `∥g∥_p` and testing: `(β + 1/(2p))/(β + 1)`.
    pub ppp_lp_norm_and_testing: f64,
    /// Gaussian white noise testing: `β/(2β + 1/2 + (1/2 − 1/p)_+)`.
    pub gwn_testing: f64,
}

pub fn rate_exponents(beta: f64, p: f64) -> Result<ExponentTable> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
    }
    if !(p >= 1.0) {
        return Err(invalid(format!("power must satisfy p >= 1, got {p}")));
    }
    Ok(ExponentTable {
        beta,
        p,
        ppp_estimation: (beta + 0.5) / (beta + 1.0),
        ppp_lp_norm_and_testing: (beta + 0.5 / p) / (beta + 1.0),
        gwn_testing: beta / (2.0 * beta + 0.5 + (0.5 - 1.0 / p).max(0.0)),
    })
}

/// `r_n* = n^{−(β + 1/(2p))/(β + 1)}`.
pub fn separation_rate(beta: f64, p: f64, n: f64) -> Result<f64> {
    Ok(n.powf(-rate_exponents(beta, p)?.ppp_lp_norm_and_testing))
}
