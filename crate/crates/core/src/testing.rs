//! The plug-in test `ψ = 1(F̂_p ≥ r_n^p/2)` and its Monte Carlo error
//! experiment.

use serde::{Deserialize, Serialize};

use crate::bounds::risk_upper_bound_power;
use crate::envelope::binomial_stderr;
use crate::error::{invalid, Error, Result};
use crate::functionals::estimate_functional;
use crate::harness::replicate;
use crate::model::{kernel_power_integral, BoundaryFunction, FunctionalSpec, HolderClass, ModelConfig};
use crate::quadrature::{unit_trapezoid, DEFAULT_GRID};
use crate::rng::{purpose, Streams};
use crate::simulate::{default_cap, sample_ppp_with, PppSample};

/// Relative slack allowed when checking `∥g − g0∥_p ≥ r_n` on a grid.
const NORM_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TestConfig {
    p: f64,
    r_n: f64,
    holder: HolderClass,
    n: u64,
    g0: BoundaryFunction,
    grid_size: usize,
}

impl TestConfig {
    /// Null boundary `g0 ≡ 0`.
    pub fn new(p: f64, r_n: f64, holder: HolderClass, n: u64) -> Result<Self> {
        Self::with_null(p, r_n, holder, n, BoundaryFunction::constant(0.0, holder))
    }

    pub fn with_null(p: f64, r_n: f64, holder: HolderClass, n: u64, g0: BoundaryFunction) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid(format!("power must satisfy p >= 1, got {p}")));
        }
        if !(r_n > 0.0 && r_n.is_finite()) {
            return Err(invalid(format!("separation radius must be positive, got {r_n}")));
        }
        if n == 0 {
            return Err(invalid("intensity scale n must be positive"));
        }
        if g0.holder() != holder {
            return Err(invalid("null boundary must use the test's Hölder class"));
        }
        Ok(Self {
            p,
            r_n,
            holder,
            n,
            g0,
            grid_size: DEFAULT_GRID,
        })
    }

    pub fn with_grid_size(mut self, grid_size: usize) -> Self {
        self.grid_size = grid_size;
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r_n(&self) -> f64 {
        self.r_n
    }

    pub fn holder(&self) -> HolderClass {
        self.holder
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn g0(&self) -> &BoundaryFunction {
        &self.g0
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// `r_n^p / 2`.
    pub fn threshold(&self) -> f64 {
        0.5 * self.r_n.powf(self.p)
    }

    /// Chebyshev bound `E₀[F̂_p²]/(r_n^p/2)²` on the type-I error, using
    /// the explicit risk bound at `g = 0`. Only meaningful for `g0 ≡ 0`.
    pub fn type1_chebyshev_bound(&self) -> Result<f64> {
        let g_norm_power = if self.p == 1.0 { 1.0 } else { 0.0 };
        let risk = risk_upper_bound_power(
            self.p,
            self.holder.beta(),
            self.holder.radius(),
            self.n as f64,
            g_norm_power,
        )?;
        Ok(risk.total / self.threshold().powi(2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    /// `true` rejects the null.
    pub decision: bool,
    pub statistic: f64,
}

/// `1(statistic ≥ threshold)`.
pub fn decide(statistic: f64, threshold: f64) -> bool {
    statistic >= threshold
}

/// Applies the test to a sample from the model with boundary `g`. The
/// observations are first shifted by `g0`, reducing the null to `g ≡ 0`.
pub fn run_test(sample: &PppSample, config: &TestConfig, grid_size: usize) -> Result<TestOutcome> {
    let spec = FunctionalSpec::power(config.p)?;
    let shifted;
    let sample = if config.g0.is_constant() && config.g0.eval(0.0) == 0.0 {
        sample
    } else {
        let (_, max_g0) = config.g0.grid_range(DEFAULT_GRID);
        shifted = sample.shifted_by(|x| config.g0.eval(x), max_g0, config.holder.radius());
        &shifted
    };
    let statistic = estimate_functional(sample, config.holder, &spec, grid_size)?.value;
    Ok(TestOutcome {
        decision: decide(statistic, config.threshold()),
        statistic,
    })
}

/// Checks that `g` is a legitimate alternative: same Hölder class, grid
/// Hölder condition, and `∥g − g0∥_p ≥ r_n` (up to a `1e-6` relative grid
/// allowance).
pub fn validate_alternative(config: &TestConfig, g: &BoundaryFunction) -> Result<()> {
    if g.holder() != config.holder {
        return Err(Error::InvalidAlternative(format!(
            "alternative claims {:?}, test uses {:?}",
            g.holder(),
            config.holder
        )));
    }
    if !crate::model::holder_membership_check(g, 1025)? {
        return Err(Error::InvalidAlternative("fails the grid Hölder check".into()));
    }
    let norm = distance(g, &config.g0, config.p, config.grid_size.max(2));
    if norm < config.r_n * (1.0 - NORM_SLACK) {
        return Err(Error::InvalidAlternative(format!(
            "∥g − g0∥_{} = {norm} is below r_n = {}",
            config.p, config.r_n
        )));
    }
    Ok(())
}

fn distance(g: &BoundaryFunction, g0: &BoundaryFunction, p: f64, nodes: usize) -> f64 {
    unit_trapezoid(|x| (g.eval(x) - g0.eval(x)).abs().powf(p), nodes).powf(1.0 / p)
}

/// Default alternatives: `g0` plus full bump sums on `m = 1, 2, 4, …` cells
/// scaled to `∥·∥_p = r_n` (kept while the amplitude stays `≤ 1/4`), and
/// `g0 + r_n`.
pub fn default_alternatives(config: &TestConfig) -> Result<Vec<BoundaryFunction>> {
    let (beta, radius) = (config.holder.beta(), config.holder.radius());
    let k_norm = kernel_power_integral(config.p).powf(1.0 / config.p);
    let mut out = Vec::new();
    let mut m = 1usize;
    loop {
        let h = 1.0 / m as f64;
        // all cells active: ∥g∥_p = cRh^β∥K∥_p
        let c = config.r_n / (radius * h.powf(beta) * k_norm) * (1.0 + 1e-12);
        if c > 0.25 || m > 1 << 12 {
            break;
        }
        let bumps = BoundaryFunction::bump_sum(vec![true; m], c, config.holder)?;
        out.push(with_null(config, bumps));
        m *= 2;
    }
    let lift = BoundaryFunction::constant(config.r_n, config.holder);
    out.push(with_null(config, lift));
    Ok(out)
}

fn with_null(config: &TestConfig, g: BoundaryFunction) -> BoundaryFunction {
    if config.g0.is_constant() {
        let level = config.g0.eval(0.0);
        if level == 0.0 {
            g
        } else {
            BoundaryFunction::shifted(g, level)
        }
    } else {
        // the sum claims the added radius and fails validation unless the
        // caller widens the class
        BoundaryFunction::sum(config.g0.clone(), g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    /// `null` or `alt<i>`.
    pub hypothesis: String,
    pub rep: usize,
    pub statistic: f64,
    pub decision: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub type1: f64,
    pub type1_stderr: f64,
    pub worst_type2: f64,
    pub worst_type2_stderr: f64,
    /// Acceptance rate under each alternative.
    pub type2: Vec<f64>,
    pub discarded: usize,
    pub records: Vec<TestRecord>,
}

/// Rejection rate under `g0` and acceptance rates under every alternative.
pub fn error_experiment(
    config: &TestConfig,
    alternatives: &[BoundaryFunction],
    reps: usize,
    seed: u64,
) -> Result<ErrorReport> {
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    for g in alternatives {
        validate_alternative(config, g)?;
    }
    let streams = Streams::new(seed);
    let mut hypotheses = vec![("null".to_string(), config.g0.clone(), purpose::NULL, 0u64)];
    for (i, g) in alternatives.iter().enumerate() {
        hypotheses.push((format!("alt{i}"), g.clone(), purpose::ALTERNATIVE, i as u64));
    }
    let mut records = Vec::new();
    let mut rates = Vec::new();
    let mut discarded = 0;
    for (label, g, tag, index) in hypotheses {
        let model = ModelConfig::new(config.n, g, config.holder)?;
        let y_cap = default_cap(&model, 0.0)?;
        let outcomes: Vec<Option<TestOutcome>> = replicate(reps, |rep| {
            let mut rng = streams.stream(&[tag, index, config.n, rep as u64]);
            let sample = sample_ppp_with(&model, y_cap, seed, &mut rng)?;
            if sample.is_empty() || !sample.cap_valid() {
                return Ok(None);
            }
            run_test(&sample, config, config.grid_size).map(Some)
        })?;
        let mut kept = 0usize;
        let mut rejected = 0usize;
        for (rep, o) in outcomes.into_iter().enumerate() {
            match o {
                Some(o) => {
                    kept += 1;
                    rejected += o.decision as usize;
                    records.push(TestRecord {
                        hypothesis: label.clone(),
                        rep,
                        statistic: o.statistic,
                        decision: o.decision,
                    });
                }
                None => discarded += 1,
            }
        }
        if kept == 0 {
            return Err(invalid(format!("every replication under {label} was discarded")));
        }
        rates.push((rejected as f64 / kept as f64, kept));
    }
    let (type1, null_kept) = rates[0];
    let type2: Vec<f64> = rates[1..].iter().map(|&(r, _)| 1.0 - r).collect();
    let (worst_type2, worst_kept) = rates[1..]
        .iter()
        .map(|&(r, k)| (1.0 - r, k))
        .fold((0.0, 1), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
    Ok(ErrorReport {
        type1,
        type1_stderr: binomial_stderr(type1, null_kept),
        worst_type2,
        worst_type2_stderr: binomial_stderr(worst_type2, worst_kept),
        type2,
        discarded,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::Point;

    fn lipschitz() -> HolderClass {
        HolderClass::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn threshold_rule() {
        assert!(decide(0.6, 0.5));
        assert!(!decide(0.4, 0.5));
        assert!(decide(0.5, 0.5));
        let cfg = TestConfig::new(2.0, 1.0, lipschitz(), 10).unwrap();
        assert_eq!(cfg.threshold(), 0.5);
    }

    #[test]
    fn run_test_reports_the_estimate() {
        // single point at (1/2, 1): F̂_1 = 1.25 − 1 = 0.25
        let cfg = TestConfig::new(1.0, 0.5, lipschitz(), 1).unwrap();
        let s = PppSample::with_validity(vec![Point { x: 0.5, y: 1.0 }], 1, 10.0, true, 0);
        let out = run_test(&s, &cfg, 8193).unwrap();
        assert!((out.statistic - 0.25).abs() < 1e-12);
        assert!(out.decision);
    }

    #[test]
    fn shift_by_constant_null() {
        let h = lipschitz();
        let cfg = TestConfig::with_null(1.0, 0.5, h, 1, BoundaryFunction::constant(2.0, h)).unwrap();
        let s = PppSample::with_validity(vec![Point { x: 0.5, y: 3.0 }], 1, 10.0, true, 0);
        let out = run_test(&s, &cfg, 8193).unwrap();
        assert!((out.statistic - 0.25).abs() < 1e-12);
    }

    #[test]
    fn default_alternatives_hit_the_radius() {
        let h = lipschitz();
        for &p in &[1.0, 2.0] {
            let cfg = TestConfig::new(p, 0.03, h, 1024).unwrap();
            let alts = default_alternatives(&cfg).unwrap();
            assert!(alts.len() >= 2);
            for g in &alts {
                validate_alternative(&cfg, g).unwrap();
                assert!((g.lp_norm(p, 8193) - 0.03).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_small_alternatives() {
        let h = lipschitz();
        let cfg = TestConfig::new(1.0, 0.1, h, 64).unwrap();
        let small = BoundaryFunction::constant(0.05, h);
        assert!(matches!(
            error_experiment(&cfg, &[small], 10, 1),
            Err(Error::InvalidAlternative(_))
        ));
        let other = BoundaryFunction::constant(1.0, HolderClass::new(0.5, 1.0).unwrap());
        assert!(validate_alternative(&cfg, &other).is_err());
    }

    #[test]
    fn zero_reps_is_an_error() {
        let cfg = TestConfig::new(1.0, 0.1, lipschitz(), 64).unwrap();
        assert!(error_experiment(&cfg, &[], 0, 1).is_err());
    }

    #[test]
    fn huge_alternative_is_always_detected() {
        let h = lipschitz();
        let cfg = TestConfig::new(1.0, 0.1, h, 64).unwrap().with_grid_size(257);
        let far = BoundaryFunction::constant(50.0, h);
        let r = error_experiment(&cfg, &[far], 200, 3).unwrap();
        assert_eq!(r.worst_type2, 0.0);
        assert_eq!(r.records.len(), 400);
    }
}
