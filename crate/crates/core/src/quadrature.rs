//! Uniform-grid quadrature shared by every module.
//!
//! The integrands met here (envelopes, bump priors) are at best Hölder
//! continuous, so a composite trapezoid rule on a uniform grid is used
//! throughout. Its error on a `C^β` integrand is `O(grid^{-(1+β)})`.

/// Default number of nodes on `[0, 1]`.
pub const DEFAULT_GRID: usize = 8192;

/// `nodes` equispaced points covering `[0, 1]`, endpoints included.
pub fn unit_grid(nodes: usize) -> Vec<f64> {
    debug_assert!(nodes >= 2);
    let last = (nodes - 1) as f64;
    (0..nodes).map(|i| i as f64 / last).collect()
}

/// Node `i` of the `nodes`-point unit grid.
#[inline]
pub fn unit_node(i: usize, nodes: usize) -> f64 {
    i as f64 / (nodes - 1) as f64
}

/// Composite trapezoid of equispaced samples with spacing `step`.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        len => {
            let inner: f64 = values[1..len - 1].iter().sum();
            step * (inner + 0.5 * (values[0] + values[len - 1]))
        }
    }
}

/// Composite trapezoid of `f` over `[a, b]` with `nodes` nodes.
pub fn trapezoid_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    debug_assert!(nodes >= 2);
    let step = (b - a) / (nodes - 1) as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for i in 1..nodes - 1 {
        acc += f(a + i as f64 * step);
    }
    acc * step
}

/// Composite Simpson rule of `f` over `[a, b]` with `intervals` (rounded up
/// to even) subintervals.
pub fn simpson_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let intervals = (intervals.max(2) + 1) & !1;
    let step = (b - a) / intervals as f64;
    let mut acc = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * step);
    }
    acc * step / 3.0
}

/// Trapezoid of `f` over the unit grid with `nodes` nodes.
pub fn unit_trapezoid(f: impl Fn(f64) -> f64, nodes: usize) -> f64 {
    trapezoid_fn(f, 0.0, 1.0, nodes)
}
