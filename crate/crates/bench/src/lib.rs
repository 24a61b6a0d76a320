//! Fixtures shared by the benchmarks.

use boundary_lab_core::{sample_ppp, BoundaryFunction, HolderClass, ModelConfig, PppSample, Result};

/// A Lipschitz sample at intensity `n` over `g ≡ 1`, capped at `max g + 2R`.
pub fn lipschitz_sample(n: u64, seed: u64) -> Result<(PppSample, HolderClass)> {
    let holder = HolderClass::new(1.0, 1.0)?;
    let config = ModelConfig::new(n, BoundaryFunction::constant(1.0, holder), holder)?;
    Ok((sample_ppp(&config, 3.0, seed)?, holder))
}
