//! Independent oracles for the integration tests. Nothing here calls into
//! the crate's own quadrature or envelope code.

#![allow(dead_code)]

use boundary_lab_core::simulate::Point;

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}

/// `∫₀^∞ f` by adaptive Simpson on doubling panels until a panel is
/// negligible.
pub fn integrate_to_infinity(f: &dyn Fn(f64) -> f64, scale: f64, tol: f64) -> f64 {
    let mut total = 0.0;
    let (mut a, mut b) = (0.0, scale);
    for _ in 0..200 {
        let piece = adaptive_simpson(f, a, b, tol);
        total += piece;
        if piece.abs() < tol * 1e-3 && a > 0.0 {
            break;
        }
        a = b;
        b *= 2.0;
    }
    total
}

/// Brute-force `min_k (Y_k + R|x − X_k|^β)`.
pub fn brute_envelope(points: &[Point], beta: f64, radius: f64, x: f64) -> f64 {
    points
        .iter()
        .map(|p| p.y + radius * (x - p.x).abs().powf(beta))
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force indicator `min_{k≠j}(Y_k + R|X_j − X_k|^β) ≥ Y_j`.
pub fn brute_indicator(points: &[Point], beta: f64, radius: f64, j: usize) -> bool {
    let pj = points[j];
    points
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .all(|(_, p)| p.y + radius * (pj.x - p.x).abs().powf(beta) >= pj.y)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
}

pub fn standard_error(v: &[f64]) -> f64 {
    (sample_variance(v) / v.len() as f64).sqrt()
}

/// Kolmogorov–Smirnov distance between the empirical law of `v` and `cdf`.
pub fn ks_statistic(v: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
