//! Gauss–Legendre quadrature on the unit interval, used to mix Poisson laws
//! and evaluate moments over continuous weight distributions.

use std::sync::OnceLock;

pub const GL_ORDER: usize = 64;

/// Mass of the upper quantile range `[1 - UPPER_TRUNCATION, 1)` left out of
/// every continuous mixture.
pub const UPPER_TRUNCATION: f64 = 1e-10;

/// Nodes and weights of the `GL_ORDER`-point rule on [-1, 1].
pub fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(GL_ORDER))
}

fn legendre_rule(order: usize) -> Vec<(f64, f64)> {
    let n = order as f64;
    let mut rule = Vec::with_capacity(order);
    for i in 0..order {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule over `[0, 1 - UPPER_TRUNCATION]` in quantile space.
///
/// The interval is split at each breakpoint in `(0, 1)` and then geometrically
/// toward 1 (`[1 - 2^-j, 1 - 2^-(j+1)]`), so integrands with a singularity at
/// `u = 1` (heavy-tailed quantile functions) stay smooth on every panel.
/// Returns `(u, weight)` pairs whose weights sum to `1 - UPPER_TRUNCATION`.
pub fn unit_interval_nodes(breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let upper = 1.0 - UPPER_TRUNCATION;
    let mut cuts = vec![0.0];
    let mut gap = 0.5;
    while 1.0 - gap < upper {
        cuts.push(1.0 - gap);
        gap *= 0.5;
    }
    cuts.push(upper);
    cuts.extend(breakpoints.iter().copied().filter(|&b| b > 0.0 && b < upper));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let rule = gauss_legendre();
    let mut nodes = Vec::with_capacity((cuts.len() - 1) * rule.len());
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for &(x, w) in rule {
            nodes.push((mid + half * x, half * w));
        }
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre();
        assert_eq!(rule.len(), GL_ORDER);
        let total: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-13);
        for degree in [2u32, 10, 40, 126] {
            let integral: f64 = rule.iter().map(|&(x, w)| w * x.powi(degree as i32)).sum();
            let exact = 2.0 / (degree as f64 + 1.0);
            assert!((integral - exact).abs() < 1e-12, "degree {degree}: {integral}");
        }
    }

    #[test]
    fn unit_nodes_cover_truncated_interval() {
        let nodes = unit_interval_nodes(&[0.3]);
        let mass: f64 = nodes.iter().map(|&(_, w)| w).sum();
        assert!((mass - (1.0 - UPPER_TRUNCATION)).abs() < 1e-13);
        assert!(nodes.iter().all(|&(u, _)| u > 0.0 && u < 1.0 - UPPER_TRUNCATION));
    }

    #[test]
    fn log_singularity_integrates() {
        // E[-ln(1-U)] = 1 for U uniform; the truncated tail contributes
        // about 1e-10 * (1 + 23) which is below the tolerance.
        let nodes = unit_interval_nodes(&[]);
        let value: f64 = nodes.iter().map(|&(u, w)| -w * (1.0 - u).ln()).sum();
        assert!((value - 1.0).abs() < 1e-8, "{value}");
    }
}
