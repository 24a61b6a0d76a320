//! Domain types: Hölder classes, boundary curves, functionals and the model
//! configuration `λ_g(x, y) = n·1(y ≥ g(x))`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{self, unit_node};

/// Default bump amplitude factor. The triangular kernel is 4-Lipschitz, so
/// `c ≤ 1/4` keeps every bump sum inside the Hölder ball it is built for.
pub const DEFAULT_BUMP_C: f64 = 0.25;

/// The Hölder ball `C^β(R)` with `0 < β ≤ 1`, `R > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderClass {
    beta: f64,
    radius: f64,
}

impl HolderClass {
    pub fn new(beta: f64, radius: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { beta, radius })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `R·d^β`, the largest increment allowed over a distance `d ≥ 0`.
    #[inline]
    pub fn cone(&self, dist: f64) -> f64 {
        if self.beta == 1.0 {
            self.radius * dist
        } else if self.beta == 0.5 {
            self.radius * dist.sqrt()
        } else {
            self.radius * dist.powf(self.beta)
        }
    }
}

/// Triangular kernel `K(u) = 4·min(u, 1 − u)` on `[0, 1]`, zero elsewhere.
#[inline]
pub fn triangular_kernel(u: f64) -> f64 {
    if (0.0..=1.0).contains(&u) {
        4.0 * u.min(1.0 - u)
    } else {
        0.0
    }
}

/// `∥K∥_p^p = ∫K^p = 2^p / (p + 1)`.
pub fn kernel_power_integral(p: f64) -> f64 {
    2f64.powf(p) / (p + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKind {
    Constant(f64),
    /// `scale·x^exponent`.
    Power { scale: f64, exponent: f64 },
    /// `Σ_k θ_k·c·R·h^β·K((x − (k−1)h)/h)` with `h = 1/θ.len()`.
    BumpSum {
        theta: Vec<bool>,
        c: f64,
        bump_class: HolderClass,
    },
    Sum(Box<BoundaryFunction>, Box<BoundaryFunction>),
    /// Piecewise-linear interpolant through `(x, value)` knots spanning `[0, 1]`.
    GridInterpolant { xs: Vec<f64>, values: Vec<f64> },
    Shifted { base: Box<BoundaryFunction>, offset: f64 },
}

/// A boundary curve on `[0, 1]` together with the Hölder ball it claims.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    kind: BoundaryKind,
    holder: HolderClass,
}

impl BoundaryFunction {
    pub fn constant(value: f64, holder: HolderClass) -> Self {
        Self {
            kind: BoundaryKind::Constant(value),
            holder,
        }
    }

    /// `R·x^β`, the extremal member of `C^β(R)` at the origin.
    pub fn power_ball(holder: HolderClass) -> Self {
        Self::power(holder.radius(), holder.beta(), holder)
    }

    /// `scale·x^exponent`; membership of `holder` is not checked here.
    pub fn power(scale: f64, exponent: f64, holder: HolderClass) -> Self {
        Self {
            kind: BoundaryKind::Power { scale, exponent },
            holder,
        }
    }

    /// Bump sum `g_θ` on `θ.len()` equal cells. With `c ≤ 1/4` the result lies
    /// in `holder`; larger `c` claims the inflated radius `4cR`.
    pub fn bump_sum(theta: Vec<bool>, c: f64, holder: HolderClass) -> Result<Self> {
        if theta.is_empty() {
            return Err(invalid("bump sum needs at least one cell"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid(format!("bump amplitude must be positive, got {c}")));
        }
        let claimed = HolderClass::new(holder.beta(), holder.radius() * (4.0 * c).max(1.0))?;
        Ok(Self {
            kind: BoundaryKind::BumpSum {
                theta,
                c,
                bump_class: holder,
            },
            holder: claimed,
        })
    }

    /// `a + b`. A constant summand keeps the other's class; otherwise the
    /// radii add at the smaller exponent.
    pub fn sum(a: BoundaryFunction, b: BoundaryFunction) -> Self {
        let holder = if a.is_constant() {
            b.holder
        } else if b.is_constant() {
            a.holder
        } else {
            HolderClass {
                beta: a.holder.beta.min(b.holder.beta),
                radius: a.holder.radius + b.holder.radius,
            }
        };
        Self {
            kind: BoundaryKind::Sum(Box::new(a), Box::new(b)),
            holder,
        }
    }

    /// Piecewise-linear interpolant through knots; `xs` must be strictly
    /// increasing from 0 to 1.
    pub fn grid_interpolant(xs: Vec<f64>, values: Vec<f64>, holder: HolderClass) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(invalid("interpolant needs at least two (x, value) knots"));
        }
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return Err(invalid("interpolant knots must span exactly [0, 1]"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("interpolant knots must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("interpolant value".into()));
        }
        Ok(Self {
            kind: BoundaryKind::GridInterpolant { xs, values },
            holder,
        })
    }

    /// Interpolant through values on the uniform grid of `values.len()` nodes.
    pub fn uniform_interpolant(values: Vec<f64>, holder: HolderClass) -> Result<Self> {
        let nodes = values.len();
        if nodes < 2 {
            return Err(invalid("interpolant needs at least two values"));
        }
        let xs = quadrature::unit_grid(nodes);
        Self::grid_interpolant(xs, values, holder)
    }

    pub fn shifted(base: BoundaryFunction, offset: f64) -> Self {
        let holder = base.holder;
        Self {
            kind: BoundaryKind::Shifted {
                base: Box::new(base),
                offset,
            },
            holder,
        }
    }

    pub fn kind(&self) -> &BoundaryKind {
        &self.kind
    }

    pub fn holder(&self) -> HolderClass {
        self.holder
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, BoundaryKind::Constant(_))
    }

    /// `g(x)`; arguments outside `[0, 1]` are clamped.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.kind {
            BoundaryKind::Constant(v) => *v,
            BoundaryKind::Power { scale, exponent } => scale * x.powf(*exponent),
            BoundaryKind::BumpSum {
                theta,
                c,
                bump_class,
            } => {
                let m = theta.len();
                let cell = ((x * m as f64) as usize).min(m - 1);
                if theta[cell] {
                    let h = 1.0 / m as f64;
                    let u = x * m as f64 - cell as f64;
                    c * bump_class.radius() * h.powf(bump_class.beta()) * triangular_kernel(u)
                } else {
                    0.0
                }
            }
            BoundaryKind::Sum(a, b) => a.eval(x) + b.eval(x),
            BoundaryKind::GridInterpolant { xs, values } => {
                let k = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                let w = (x - x0) / (x1 - x0);
                values[k - 1] + w * (values[k] - values[k - 1])
            }
            BoundaryKind::Shifted { base, offset } => base.eval(x) + offset,
        }
    }

    /// Values on the uniform grid of `nodes` nodes.
    pub fn sample_grid(&self, nodes: usize) -> Vec<f64> {
        (0..nodes).map(|i| self.eval(unit_node(i, nodes))).collect()
    }

    /// `(min, max)` of `g` over the uniform grid of `nodes` nodes.
    pub fn grid_range(&self, nodes: usize) -> (f64, f64) {
        self.sample_grid(nodes)
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// `∥g∥_p` by trapezoid on `nodes` nodes.
    pub fn lp_norm(&self, p: f64, nodes: usize) -> f64 {
        quadrature::unit_trapezoid(|x| self.eval(x).abs().powf(p), nodes).powf(1.0 / p)
    }
}

/// Checks `|f(x_i) − f(x_j)| ≤ R|x_i − x_j|^β` over all pairs of the uniform
/// grid, with a relative rounding slack of `1e-12`.
pub fn holder_membership_check(f: &BoundaryFunction, grid_size: usize) -> Result<bool> {
    if grid_size < 2 {
        return Err(invalid(format!("grid_size must be at least 2, got {grid_size}")));
    }
    let values = f.sample_grid(grid_size);
    Ok(grid_values_are_holder(&values, f.holder()))
}

/// Pairwise Hölder test of samples on the uniform unit grid.
pub fn grid_values_are_holder(values: &[f64], holder: HolderClass) -> bool {
    let nodes = values.len();
    if nodes < 2 {
        return true;
    }
    let allowed: Vec<f64> = (0..nodes)
        .map(|d| holder.cone(unit_node(d, nodes)))
        .collect();
    for i in 0..nodes {
        let vi = values[i];
        if !vi.is_finite() {
            return false;
        }
        for j in i + 1..nodes {
            let vj = values[j];
            let slack = 1e-12 * (1.0 + vi.abs() + vj.abs());
            if (vi - vj).abs() > allowed[j - i] + slack {
                return false;
            }
        }
    }
    true
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The pair `(Φ, Φ′)` defining `F_Φ(g) = ∫₀¹ Φ(g(x)) dx`.
#[derive(Clone)]
pub struct FunctionalSpec {
    phi: RealFn,
    phi_prime: RealFn,
    label: String,
    power: Option<f64>,
}

impl fmt::Debug for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionalSpec")
            .field("label", &self.label)
            .field("power", &self.power)
            .finish()
    }
}

impl FunctionalSpec {
    /// `Φ(u) = |u|^p`, `Φ′(u) = p|u|^{p−1}sgn(u)` with `Φ′(0) = 0`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid(format!("power must satisfy p >= 1, got {p}")));
        }
        let phi: RealFn = if p == 1.0 {
            Arc::new(|u: f64| u.abs())
        } else if p == 2.0 {
            Arc::new(|u: f64| u * u)
        } else {
            Arc::new(move |u: f64| u.abs().powf(p))
        };
        let phi_prime: RealFn = if p == 1.0 {
            Arc::new(|u: f64| sign(u))
        } else if p == 2.0 {
            Arc::new(|u: f64| 2.0 * u)
        } else {
            Arc::new(move |u: f64| p * u.abs().powf(p - 1.0) * sign(u))
        };
        Ok(Self {
            phi,
            phi_prime,
            label: format!("power:{p}"),
            power: Some(p),
        })
    }

    /// `Φ ≡ value`, `Φ′ ≡ 0`.
    pub fn constant(value: f64) -> Self {
        Self {
            phi: Arc::new(move |_| value),
            phi_prime: Arc::new(|_| 0.0),
            label: format!("const:{value}"),
            power: None,
        }
    }

    /// User-supplied pair; `phi_prime` must be the weak derivative of `phi`.
    pub fn custom(
        label: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            phi: Arc::new(phi),
            phi_prime: Arc::new(phi_prime),
            label: label.into(),
            power: None,
        }
    }

    #[inline]
    pub fn phi(&self, u: f64) -> f64 {
        (self.phi)(u)
    }

    #[inline]
    pub fn phi_prime(&self, u: f64) -> f64 {
        (self.phi_prime)(u)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn power_exponent(&self) -> Option<f64> {
        self.power
    }

    /// `|Φ(u) − Φ(0) − ∫₀^u Φ′|`, the weak-differentiability defect at `u`.
    pub fn consistency_defect(&self, u: f64) -> f64 {
        let integral = quadrature::simpson_fn(|v| self.phi_prime(v), 0.0, u, 1 << 14);
        (self.phi(u) - self.phi(0.0) - integral).abs()
    }
}

impl FromStr for FunctionalSpec {
    type Err = Error;

    /// `power:<p>` or `const:<v>`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("functional `{s}`: expected power:<p>")))?;
        let value: f64 = tail
            .parse()
            .map_err(|_| Error::Parse(format!("functional `{s}`: bad number")))?;
        match head {
            "power" => Self::power(value),
            "const" => Ok(Self::constant(value)),
            _ => Err(Error::Parse(format!("unknown functional `{head}`"))),
        }
    }
}

#[inline]
fn sign(u: f64) -> f64 {
    if u > 0.0 {
        1.0
    } else if u < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `F_Φ(g)` by composite trapezoid on `grid_size` nodes.
pub fn functional_value(spec: &FunctionalSpec, g: &BoundaryFunction, grid_size: usize) -> Result<f64> {
    if grid_size < 2 {
        return Err(invalid(format!("grid_size must be at least 2, got {grid_size}")));
    }
    let mut values = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let x = unit_node(i, grid_size);
        let v = spec.phi(g.eval(x));
        if !v.is_finite() {
            return Err(Error::NonFinite(format!(
                "Φ({}) = {v} at x = {x} for {}",
                g.eval(x),
                spec.label()
            )));
        }
        values.push(v);
    }
    Ok(quadrature::trapezoid(&values, 1.0 / (grid_size - 1) as f64))
}

/// Intensity scale, boundary and Hölder class of one PPP experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    n: u64,
    boundary: BoundaryFunction,
    holder: HolderClass,
}

impl ModelConfig {
    pub fn new(n: u64, boundary: BoundaryFunction, holder: HolderClass) -> Result<Self> {
        if n == 0 {
            return Err(invalid("intensity scale n must be positive"));
        }
        if boundary.holder() != holder {
            return Err(invalid(format!(
                "boundary claims {:?} but the model uses {:?}",
                boundary.holder(),
                holder
            )));
        }
        Ok(Self { n, boundary, holder })
    }

    /// Configuration using the boundary's own Hölder class.
    pub fn with_boundary(n: u64, boundary: BoundaryFunction) -> Result<Self> {
        let holder = boundary.holder();
        Self::new(n, boundary, holder)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn boundary(&self) -> &BoundaryFunction {
        &self.boundary
    }

    pub fn holder(&self) -> HolderClass {
        self.holder
    }

    pub fn with_n(&self, n: u64) -> Result<Self> {
        Self::new(n, self.boundary.clone(), self.holder)
    }
}

/// Boundary mini-language: `const:<v>`, `powb`, `bumps:<bits>:<c>`,
/// `grid:<path.csv>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum BoundarySpec {
    Const(f64),
    PowerBall,
    Bumps { theta: Vec<bool>, c: f64 },
    Grid(PathBuf),
}

impl BoundarySpec {
    pub fn build(&self, holder: HolderClass) -> Result<BoundaryFunction> {
        match self {
            BoundarySpec::Const(v) => Ok(BoundaryFunction::constant(*v, holder)),
            BoundarySpec::PowerBall => Ok(BoundaryFunction::power_ball(holder)),
            BoundarySpec::Bumps { theta, c } => BoundaryFunction::bump_sum(theta.clone(), *c, holder),
            BoundarySpec::Grid(path) => {
                let mut reader = csv::Reader::from_path(path)?;
                let mut xs = Vec::new();
                let mut values = Vec::new();
                for record in reader.deserialize() {
                    let (x, v): (f64, f64) = record?;
                    xs.push(x);
                    values.push(v);
                }
                BoundaryFunction::grid_interpolant(xs, values, holder)
            }
        }
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundarySpec::Const(v) => write!(f, "const:{v}"),
            BoundarySpec::PowerBall => write!(f, "powb"),
            BoundarySpec::Bumps { theta, c } => {
                let bits: String = theta.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "bumps:{bits}:{c}")
            }
            BoundarySpec::Grid(path) => write!(f, "grid:{}", path.display()),
        }
    }
}

impl FromStr for BoundarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("boundary `{s}`: {why}"));
        if s == "powb" {
            return Ok(BoundarySpec::PowerBall);
        }
        if let Some(v) = s.strip_prefix("const:") {
            return v.parse().map(BoundarySpec::Const).map_err(|_| bad("bad constant"));
        }
        if let Some(rest) = s.strip_prefix("bumps:") {
            let (bits, c) = rest.split_once(':').ok_or_else(|| bad("expected bumps:<bits>:<c>"))?;
            let theta = bits
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(bad("bitstring may only contain 0 and 1")),
                })
                .collect::<Result<Vec<_>>>()?;
            if theta.is_empty() {
                return Err(bad("empty bitstring"));
            }
            let c = c.parse().map_err(|_| bad("bad amplitude"))?;
            return Ok(BoundarySpec::Bumps { theta, c });
        }
        if let Some(path) = s.strip_prefix("grid:") {
            return Ok(BoundarySpec::Grid(PathBuf::from(path)));
        }
        Err(bad("unknown form"))
    }
}

impl From<BoundarySpec> for String {
    fn from(spec: BoundarySpec) -> String {
        spec.to_string()
    }
}

impl TryFrom<String> for BoundarySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(beta: f64, radius: f64) -> HolderClass {
        HolderClass::new(beta, radius).unwrap()
    }

    #[test]
    fn holder_class_rejects_out_of_range() {
        assert!(HolderClass::new(0.0, 1.0).is_err());
        assert!(HolderClass::new(1.5, 1.0).is_err());
        assert!(HolderClass::new(0.5, 0.0).is_err());
        assert!(HolderClass::new(1.0, 2.0).is_ok());
    }

    #[test]
    fn membership_examples() {
        let h = class(0.7, 1.3);
        assert!(holder_membership_check(&BoundaryFunction::constant(1.0, h), 64).unwrap());
        let h = class(0.4, 2.0);
        assert!(holder_membership_check(&BoundaryFunction::power_ball(h), 256).unwrap());
        let h = class(1.0, 1.5);
        let steep = BoundaryFunction::power(3.0, 1.0, h);
        assert!(!holder_membership_check(&steep, 64).unwrap());
        assert!(holder_membership_check(&steep, 1).is_err());
    }

    #[test]
    fn functional_value_examples() {
        let h = class(1.0, 1.0);
        let p2 = FunctionalSpec::power(2.0).unwrap();
        let p1 = FunctionalSpec::power(1.0).unwrap();
        let one = BoundaryFunction::constant(1.0, h);
        let id = BoundaryFunction::power(1.0, 1.0, h);
        assert!((functional_value(&p2, &one, 64).unwrap() - 1.0).abs() < 1e-15);
        assert!((functional_value(&p1, &id, 64).unwrap() - 0.5).abs() < 1e-15);
        // trapezoid error for x² is h²/6
        let nodes = 8192;
        let tol = 1.0 / (6.0 * ((nodes - 1) as f64).powi(2)) + 1e-15;
        assert!((functional_value(&p2, &id, nodes).unwrap() - 1.0 / 3.0).abs() <= tol);
    }

    #[test]
    fn functional_value_rejects_non_finite() {
        let h = class(1.0, 1.0);
        let blow = FunctionalSpec::custom("inv", |u| 1.0 / u, |u| -1.0 / (u * u));
        let zero = BoundaryFunction::constant(0.0, h);
        assert!(matches!(functional_value(&blow, &zero, 8), Err(Error::NonFinite(_))));
    }

    #[test]
    fn power_preset_derivative_at_zero() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let spec = FunctionalSpec::power(p).unwrap();
            assert_eq!(spec.phi_prime(0.0), 0.0);
            assert!((spec.phi(-2.0) - 2f64.powf(p)).abs() < 1e-12);
            assert!((spec.phi_prime(-2.0) + p * 2f64.powf(p - 1.0)).abs() < 1e-12);
        }
        assert!(FunctionalSpec::power(0.5).is_err());
    }

    #[test]
    fn bump_sum_evaluates_triangles() {
        let h = class(1.0, 1.0);
        let g = BoundaryFunction::bump_sum(vec![true, false], 0.25, h).unwrap();
        // peak of the first cell: c R h^β K(1/2) = 0.25·0.5·2
        assert!((g.eval(0.25) - 0.25).abs() < 1e-15);
        assert_eq!(g.eval(0.75), 0.0);
        assert_eq!(g.eval(0.5), 0.0);
        assert_eq!(g.holder(), h);
        let wide = BoundaryFunction::bump_sum(vec![true], 1.0, h).unwrap();
        assert_eq!(wide.holder().radius(), 4.0);
    }

    #[test]
    fn kernel_integrals() {
        assert!((kernel_power_integral(1.0) - 1.0).abs() < 1e-15);
        assert!((kernel_power_integral(2.0) - 4.0 / 3.0).abs() < 1e-15);
        let direct = quadrature::simpson_fn(|u| triangular_kernel(u).powi(3), 0.0, 1.0, 1 << 12);
        assert!((direct - kernel_power_integral(3.0)).abs() < 1e-9);
    }

    #[test]
    fn interpolant_and_shift() {
        let h = class(1.0, 1.0);
        let g = BoundaryFunction::uniform_interpolant(vec![0.0, 0.5, 0.0], h).unwrap();
        assert!((g.eval(0.25) - 0.25).abs() < 1e-15);
        assert!((g.eval(0.5) - 0.5).abs() < 1e-15);
        let s = BoundaryFunction::shifted(g, 2.0);
        assert!((s.eval(1.0) - 2.0).abs() < 1e-15);
        assert!(BoundaryFunction::grid_interpolant(vec![0.0, 0.5], vec![1.0, 2.0], h).is_err());
    }

    #[test]
    fn model_config_requires_matching_class() {
        let h = class(1.0, 1.0);
        let g = BoundaryFunction::constant(0.0, h);
        assert!(ModelConfig::new(10, g.clone(), class(0.5, 1.0)).is_err());
        assert!(ModelConfig::new(0, g.clone(), h).is_err());
        assert!(ModelConfig::new(10, g, h).is_ok());
    }

    #[test]
    fn boundary_spec_round_trip() {
        for text in ["const:1.5", "powb", "bumps:0110:0.25", "grid:/tmp/g.csv"] {
            let spec: BoundarySpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!("bumps:01x:0.2".parse::<BoundarySpec>().is_err());
        assert!("wave".parse::<BoundarySpec>().is_err());
    }

    #[test]
    fn functional_parse() {
        let f: FunctionalSpec = "power:2".parse().unwrap();
        assert_eq!(f.power_exponent(), Some(2.0));
        assert!("power:0.5".parse::<FunctionalSpec>().is_err());
        assert!("cube".parse::<FunctionalSpec>().is_err());
    }
}
