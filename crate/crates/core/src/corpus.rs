//! Randomised functions that lie in a Hölder ball by construction, used to
//! exercise the interpolation inequality without a numerical membership test.

use rand::Rng;

use crate::bounds::{interpolation_check, InterpolationCheck};
use crate::error::{invalid, Result};
use crate::model::{BoundaryFunction, HolderClass};
use crate::rng::{purpose, Streams};

pub const CORPUS_BETAS: [f64; 3] = [0.3, 0.5, 1.0];
pub const CORPUS_POWERS: [f64; 3] = [1.0, 2.0, 4.0];
/// Grid used for every corpus check.
pub const CORPUS_GRID: usize = 4097;

#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub index: usize,
    pub p: f64,
    pub function: BoundaryFunction,
}

/// One certified member of `C^β(R)`. The constructors used are
/// - constants;
/// - `a + sR·x^β` with `|s| ≤ 1` (`t ↦ t^β` is `β`-Hölder with constant 1);
/// - `a +` bump sums with amplitude `c ≤ 1/4`;
/// - sums of two members of `C^β(R/2)`;
/// - the near-extremal `M − R·x^β`.
pub fn certified_function<R: Rng + ?Sized>(holder: HolderClass, rng: &mut R) -> Result<BoundaryFunction> {
    let (beta, radius) = (holder.beta(), holder.radius());
    let f = match rng.random_range(0..5u32) {
        0 => BoundaryFunction::constant(rng.random_range(-2.0..=2.0), holder),
        1 => {
            let s = rng.random_range(-1.0..=1.0);
            BoundaryFunction::shifted(BoundaryFunction::power(s * radius, beta, holder), rng.random_range(-1.0..=1.0))
        }
        2 => BoundaryFunction::shifted(random_bumps(holder, rng)?, rng.random_range(-1.0..=1.0)),
        3 => {
            let half = HolderClass::new(beta, 0.5 * radius)?;
            let s = rng.random_range(-1.0..=1.0);
            BoundaryFunction::sum(
                random_bumps(half, rng)?,
                BoundaryFunction::power(s * half.radius(), beta, half),
            )
        }
        _ => {
            let top = rng.random_range(0.0..=2.0) * radius;
            BoundaryFunction::shifted(BoundaryFunction::power(-radius, beta, holder), top)
        }
    };
    debug_assert_eq!(f.holder(), holder);
    Ok(f)
}

fn random_bumps<R: Rng + ?Sized>(holder: HolderClass, rng: &mut R) -> Result<BoundaryFunction> {
    let m = rng.random_range(1..=16usize);
    let theta: Vec<bool> = (0..m).map(|_| rng.random_bool(0.6)).collect();
    let c = rng.random_range(0.01..=0.25);
    BoundaryFunction::bump_sum(theta, c, holder)
}

/// `size` cases. When `beta`/`p` are `None` they cycle through
/// [`CORPUS_BETAS`] and [`CORPUS_POWERS`] (all nine pairs).
pub fn certified_corpus(
    size: usize,
    beta: Option<f64>,
    p: Option<f64>,
    radius: f64,
    seed: u64,
) -> Result<Vec<CorpusCase>> {
    if let Some(p) = p {
        if !(p >= 1.0) {
            return Err(invalid(format!("power must satisfy p >= 1, got {p}")));
        }
    }
    let streams = Streams::new(seed);
    (0..size)
        .map(|index| {
            let b = beta.unwrap_or(CORPUS_BETAS[index % 3]);
            let p = p.unwrap_or(CORPUS_POWERS[(index / 3) % 3]);
            let holder = HolderClass::new(b, radius)?;
            let mut rng = streams.stream(&[purpose::CORPUS, index as u64]);
            Ok(CorpusCase {
                index,
                p,
                function: certified_function(holder, &mut rng)?,
            })
        })
        .collect()
}

/// Runs the interpolation check on every case.
pub fn check_corpus(cases: &[CorpusCase]) -> Result<Vec<InterpolationCheck>> {
    cases
        .iter()
        .map(|c| interpolation_check(&c.function, c.p, CORPUS_GRID))
        .collect()
}
