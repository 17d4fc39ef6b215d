//! Tanh-sinh (double exponential) quadrature.
//!
//! The integrand receives the distances of the node from both interval
//! endpoints instead of the node itself. Integrable endpoint singularities
//! (log kernels split at the singular point, square-root densities) can then
//! be evaluated without the cancellation that `x - a` would suffer once the
//! nodes crowd an endpoint.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::par;

/// Finest level; the step is `2^-MAX_LEVEL`.
pub const MAX_LEVEL: usize = 9;
const MIN_LEVEL: usize = 3;
const T_MAX: f64 = 6.0;

#[derive(Debug, Clone, Copy)]
struct Node {
    /// `1 - |tanh(π/2 sinh t)|`, the scaled distance to the nearer endpoint.
    c: f64,
    /// Weight for unit step.
    w: f64,
}

fn table() -> &'static [Vec<Node>] {
    static TABLE: OnceLock<Vec<Vec<Node>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_LEVEL)
            .map(|level| {
                let h = 0.5f64.powi(level as i32);
                let (first, step) = if level == 0 { (1.0, 1.0) } else { (h, 2.0 * h) };
                let mut nodes = Vec::new();
                let mut t: f64 = first;
                while t <= T_MAX {
                    let y = FRAC_PI_2 * t.sinh();
                    let cy = y.cosh();
                    let c = (-y).exp() / cy;
                    let w = FRAC_PI_2 * t.cosh() / (cy * cy);
                    if c > 0.0 && w > 0.0 {
                        nodes.push(Node { c, w });
                    }
                    t += step;
                }
                nodes
            })
            .collect()
    })
}

/// Outcome of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    /// Difference between the last two levels plus propagated integrand error.
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Integrates over an interval of the given length.
///
/// `f(left, right)` gets the node's distances to both endpoints and returns
/// the integrand value and an absolute error bound on it (zero for exactly
/// evaluated integrands). Nodes are mapped in parallel when `parallel` is set;
/// partial sums are always formed in a fixed node order.
pub fn tanh_sinh<F>(length: f64, tol: f64, parallel: bool, f: F) -> Quad
where
    F: Fn(f64, f64) -> (f64, f64) + Sync + Send,
{
    let table = table();
    let half = 0.5 * length;
    let eval = |c: f64, mirrored: bool| -> (f64, f64) {
        let near = half * c;
        let far = length - near;
        let (l, r) = if mirrored { (near, far) } else { (far, near) };
        if l <= 0.0 || r <= 0.0 {
            return (0.0, 0.0);
        }
        f(l, r)
    };

    // Weighted sums of values, |values| and integrand errors at unit step.
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut err_sum = 0.0;
    let mut evaluations = 0;
    let mut previous = f64::NAN;
    let mut last_diff = f64::INFINITY;

    for (level, nodes) in table.iter().enumerate() {
        let level_terms = |i: usize| -> (f64, f64, f64) {
            if level == 0 && i == 0 {
                let (v, e) = f(half, half);
                return (FRAC_PI_2 * v, FRAC_PI_2 * v.abs(), FRAC_PI_2 * e);
            }
            let node = nodes[if level == 0 { i - 1 } else { i }];
            let (v1, e1) = eval(node.c, false);
            let (v2, e2) = eval(node.c, true);
            (node.w * (v1 + v2), node.w * (v1.abs() + v2.abs()), node.w * (e1 + e2))
        };
        let count = if level == 0 { nodes.len() + 1 } else { nodes.len() };
        let terms: Vec<(f64, f64, f64)> =
            if parallel { par::map_range(count, level_terms) } else { (0..count).map(level_terms).collect() };
        evaluations += if level == 0 { 2 * count - 1 } else { 2 * count };
        for (v, a, e) in terms {
            sum += v;
            abs_sum += a;
            err_sum += e;
        }
        let h = 0.5f64.powi(level as i32);
        let estimate = half * h * sum;
        let propagated = half * h * err_sum;
        let roundoff = 1e-15 * half * h * abs_sum;
        if level > 0 {
            last_diff = (estimate - previous).abs();
            if level >= MIN_LEVEL && last_diff <= tol.max(roundoff) {
                return Quad {
                    value: estimate,
                    error: last_diff + propagated,
                    converged: !estimate.is_nan() && propagated <= tol.max(roundoff),
                    evaluations,
                };
            }
        }
        previous = estimate;
    }
    let h = 0.5f64.powi(MAX_LEVEL as i32);
    Quad { value: previous, error: last_diff + half * h * err_sum, converged: false, evaluations }
}

/// Convenience wrapper for exactly evaluated integrands on `[a, b]`.
pub fn integrate<F>(a: f64, b: f64, tol: f64, f: F) -> Quad
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    tanh_sinh(b - a, tol, false, |l, r| {
        let x = if l <= r { a + l } else { b - r };
        (f(x), 0.0)
    })
}
