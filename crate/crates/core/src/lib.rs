//! Support-boundary inference for Poisson point processes with intensity
//! `n·1(y ≥ g(x))` on `[0, 1] × ℝ`, where `g` is Hölder.
//!
//! The crate covers simulation, the Hölder envelope (maximum likelihood)
//! estimator, unbiased estimators of integral functionals `∫Φ(g)`,
//! closed-form deviation and risk bounds, the plug-in test for `∥g∥_p`, the
//! fuzzy-hypotheses χ² certificate used in lower bounds, and a deterministic
//! parallel Monte Carlo harness.
//!
//! ```
//! use boundary_lab_core::{estimate_functional, sample_ppp, BoundaryFunction, FunctionalSpec, HolderClass, ModelConfig};
//!
//! let holder = HolderClass::new(1.0, 1.0)?;
//! let config = ModelConfig::new(256, BoundaryFunction::constant(1.0, holder), holder)?;
//! let sample = sample_ppp(&config, 3.0, 7)?;
//! let fhat = estimate_functional(&sample, holder, &FunctionalSpec::power(1.0)?, 1025)?;
//! assert!((fhat.value - 1.0).abs() < 0.1);
//! # Ok::<(), boundary_lab_core::Error>(())
//! ```

// `!(x >= 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod corpus;
pub mod envelope;
pub mod error;
pub mod functionals;
pub mod harness;
pub mod io;
pub mod lowerbound;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod testing;

pub use bounds::{
    deviation_bound, gamma_moment, interpolation_check, local_asymptotic_constant, rate_exponents,
    risk_upper_bound_power, separation_rate, variance_rhs, DeviationBoundParams, ExponentTable, InterpolationCheck,
    RiskUpperBound, VarianceRhs,
};
pub use envelope::{envelope_exceedance, exceedance_table, Envelope, ExceedanceCurve, ExceedanceTable};
pub use error::{Error, Result};
pub use functionals::{estimate_functional, estimate_lp_norm, estimate_pseudo, positive_part_root, EstimateResult};
pub use harness::{fit_rate_slope, run_risk_grid, EstimatorKind, RateFit, RiskColumn, RiskGridConfig, RiskRow, RiskTable};
pub use lowerbound::{chi2_certificate, draw_prior, likelihood_ratio, prior_geometry, Chi2Report, PriorConfig};
pub use model::{
    functional_value, holder_membership_check, BoundaryFunction, BoundarySpec, FunctionalSpec, HolderClass, ModelConfig,
};
pub use simulate::{default_cap, sample_ppp, Point, PppSample};
pub use testing::{error_experiment, run_test, ErrorReport, TestConfig, TestOutcome};
