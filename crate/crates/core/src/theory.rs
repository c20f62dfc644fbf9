//! Closed-form limits for the clustering coefficients and the limiting
//! degree laws, all driven by exact weight moments.

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SeqStream;
use crate::weights::{NodeWeightConfig, WeightDist};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("moment {name} = {value} must be finite")]
    InfiniteMoment { name: &'static str, value: f64 },
    #[error("moment {name} = {value} must be strictly positive")]
    NonPositiveMoment { name: &'static str, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn finite(name: &'static str, value: f64) -> Result<f64, TheoryError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(TheoryError::InfiniteMoment { name, value })
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, TheoryError> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(TheoryError::NonPositiveMoment { name, value })
    }
}

fn nonneg_arg(name: &str, value: f64) -> Result<f64, TheoryError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(TheoryError::InvalidArgument(format!("{name} = {value} must be finite and >= 0")))
    }
}

/// Power moments of `X`, `Y`, `Z` plus the two mixed moments used by the
/// transitivity limit. `x[r - 1] = E X^r`, and likewise for `y` and `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub z: [f64; 4],
    /// `E(X Y)`
    pub cross_xy: f64,
    /// `E(X ∧ Y)`
    pub cross_min: f64,
}

impl MomentSet {
    pub fn from_distributions(nodes: &NodeWeightConfig, z: &WeightDist) -> Self {
        Self {
            x: [1, 2, 3].map(|r| nodes.x.moment(r)),
            y: [1, 2, 3].map(|r| nodes.y.moment(r)),
            z: [1, 2, 3, 4].map(|r| z.moment(r)),
            cross_xy: nodes.cross_product_moment(),
            cross_min: nodes.cross_min_moment(),
        }
    }

    /// Every weight identically 1.
    pub fn unit() -> Self {
        Self { x: [1.0; 3], y: [1.0; 3], z: [1.0; 4], cross_xy: 1.0, cross_min: 1.0 }
    }

    /// Jensen/Cauchy–Schwarz consistency of the power moments that are finite.
    pub fn check_consistency(&self) -> Result<(), TheoryError> {
        let rows: [(&str, &[f64]); 3] = [("X", &self.x), ("Y", &self.y), ("Z", &self.z)];
        for (name, m) in rows {
            if m.iter().any(|v| v.is_nan() || *v < 0.0) {
                return Err(TheoryError::InvalidArgument(format!("negative or NaN moment of {name}")));
            }
            if m[0].is_finite() && m[1].is_finite() && m[0] * m[0] > m[1] * (1.0 + 1e-12) {
                return Err(TheoryError::InvalidArgument(format!("(E {name})^2 > E {name}^2")));
            }
        }
        Ok(())
    }

    /// `(E X^2 / E X, E Y^2 / E Y)`
    fn size_bias_ratios(&self) -> Result<(f64, f64), TheoryError> {
        let sx = finite("E X^2", self.x[1])? / positive("E X", self.x[0])?;
        let sy = finite("E Y^2", self.y[1])? / positive("E Y", self.y[0])?;
        Ok((sx, sy))
    }
}

/// `(h2 h3 / h4, h2^3 / h4)` from `[E Z, E Z^2, E Z^3, E Z^4]`.
fn attribute_factors(z: &[f64; 4]) -> Result<(f64, f64), TheoryError> {
    let h2 = finite("E Z^2", z[1])?;
    let h3 = finite("E Z^3", z[2])?;
    let h4 = positive("E Z^4", z[3])?;
    Ok((h2 * h3 / h4, h2.powi(3) / h4))
}

/// Limit of the diclique clustering coefficient when `gamma m -> alpha`:
/// `(1 + alpha (a2/a1 + b2/b1) h2 h3/h4 + alpha^2 (a2/a1)(b2/b1) h2^3/h4)^-1`.
pub fn dicc_limit(alpha: f64, mom: &MomentSet) -> Result<f64, TheoryError> {
    let alpha = nonneg_arg("alpha", alpha)?;
    let (sx, sy) = mom.size_bias_ratios()?;
    let (c1, c2) = attribute_factors(&mom.z)?;
    Ok(1.0 / (1.0 + alpha * (sx + sy) * c1 + alpha * alpha * sx * sy * c2))
}

/// Local limit given the ego's supply weight `y3`.
pub fn dicc_local_limit_ego(alpha: f64, y3: f64, mom: &MomentSet) -> Result<f64, TheoryError> {
    let alpha = nonneg_arg("alpha", alpha)?;
    let y3 = nonneg_arg("y3", y3)?;
    let sx = finite("E X^2", mom.x[1])? / positive("E X", mom.x[0])?;
    let (c1, c2) = attribute_factors(&mom.z)?;
    Ok(1.0 / (1.0 + alpha * (sx + y3) * c1 + alpha * alpha * y3 * sx * c2))
}

/// Limit given the follower's demand weight `x1` and the ego's supply weight
/// `y3`; only attribute moments enter.
pub fn dicc_pair_limit(alpha: f64, x1: f64, y3: f64, z: &[f64; 4]) -> Result<f64, TheoryError> {
    let alpha = nonneg_arg("alpha", alpha)?;
    let x1 = nonneg_arg("x1", x1)?;
    let y3 = nonneg_arg("y3", y3)?;
    let (c1, c2) = attribute_factors(z)?;
    Ok(1.0 / (1.0 + alpha * (x1 + y3) * c1 + alpha * alpha * x1 * y3 * c2))
}

/// Transitivity limit under the independent-product kernel.
pub fn trcc_limit_independent() -> f64 {
    0.0
}

/// Transitivity limit under the `epsilon`-min kernel in the sparse regime
/// with `m / n -> beta`.
pub fn trcc_limit_eps_min(beta: f64, epsilon: f64, mom: &MomentSet) -> Result<f64, TheoryError> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(TheoryError::InvalidArgument(format!("beta = {beta} must be > 0")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(TheoryError::InvalidArgument(format!("epsilon = {epsilon} must lie in (0, 1]")));
    }
    let cross_xy = finite("E(X Y)", mom.cross_xy)?;
    let cross_min = positive("E(X ∧ Y)", mom.cross_min)?;
    let h2 = finite("E Z^2", mom.z[1])?;
    let h3 = positive("E Z^3", mom.z[2])?;
    Ok(1.0 / (1.0 + beta.sqrt() / epsilon * (cross_xy / cross_min) * (h2 * h2 / h3)))
}

/// Growth of `m` relative to `n` in the sparse regime `gamma = (n m)^(-1/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Regime {
    /// `m / n -> 0`
    Vanishing,
    /// `m / n -> beta`
    Balanced { beta: f64 },
    /// `m / n -> inf`
    AttributeRich,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeRole {
    Out,
    In,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitDegreeParams {
    pub regime: Regime,
    pub nodes: NodeWeightConfig,
    pub z: WeightDist,
    pub role: DegreeRole,
}

impl LimitDegreeParams {
    /// `(own, other)` weight laws: `(X, Y)` for out-degrees, `(Y, X)` for in-degrees.
    fn sides(&self) -> (WeightDist, WeightDist) {
        match self.role {
            DegreeRole::Out => (self.nodes.x, self.nodes.y),
            DegreeRole::In => (self.nodes.y, self.nodes.x),
        }
    }

    fn check(&self) -> Result<(), TheoryError> {
        let (_, other) = self.sides();
        let other_name = match self.role {
            DegreeRole::Out => "E Y",
            DegreeRole::In => "E X",
        };
        finite(other_name, other.mean())?;
        finite("E Z^2", self.z.moment(2))?;
        if let Regime::Balanced { beta } = self.regime {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(TheoryError::InvalidArgument(format!("beta = {beta} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Limit pmf on `0..=r_max`. `tail_mass` is the probability above `r_max`
/// (plus any mass lost to quadrature truncation, which is reported
/// separately in `mixing_truncation`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPmf {
    pub pmf: Vec<f64>,
    pub tail_mass: f64,
    pub mixing_truncation: f64,
}

impl LimitPmf {
    fn from_pmf(pmf: Vec<f64>, mixing_truncation: f64) -> Self {
        let tail_mass = (1.0 - pmf.iter().sum::<f64>()).max(0.0);
        Self { pmf, tail_mass, mixing_truncation }
    }
}

fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    out.push(0.0);
    for r in 1..len {
        acc += (r as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson(`lambda`) pmf on `0..len`.
pub fn poisson_pmf(lambda: f64, len: usize) -> Vec<f64> {
    if lambda <= 0.0 {
        let mut pmf = vec![0.0; len];
        if len > 0 {
            pmf[0] = 1.0;
        }
        return pmf;
    }
    let ln_lambda = lambda.ln();
    let ln_fact = ln_factorials(len);
    (0..len).map(|r| (-lambda + r as f64 * ln_lambda - ln_fact[r]).exp()).collect()
}

/// Mixed Poisson pmf with rate `scale * W`, `W` given by mixing atoms.
pub fn mixed_poisson_pmf(atoms: &[(f64, f64)], scale: f64, len: usize) -> Vec<f64> {
    let mut pmf = vec![0.0; len];
    for &(value, weight) in atoms {
        for (acc, p) in pmf.iter_mut().zip(poisson_pmf(scale * value, len)) {
            *acc += weight * p;
        }
    }
    pmf
}

/// Downshifted size-biased law `(r + 1) P(L = r + 1) / E L` on `0..len`,
/// from the pmf of `L` on `0..=len`.
pub fn downshifted_size_biased(pmf: &[f64], mean: f64, len: usize) -> Vec<f64> {
    (0..len).map(|r| (r + 1) as f64 * pmf.get(r + 1).copied().unwrap_or(0.0) / mean).collect()
}

/// Compound Poisson(`lambda`) pmf with jump law `jumps` (which may put mass
/// on 0), by Panjer recursion: `f(r) = lambda / r * sum_j j g(j) f(r - j)`.
pub fn compound_poisson_pmf(lambda: f64, jumps: &[f64], len: usize) -> Vec<f64> {
    let mut f = vec![0.0; len];
    if len == 0 {
        return f;
    }
    let g0 = jumps.first().copied().unwrap_or(0.0);
    f[0] = (-lambda * (1.0 - g0)).exp();
    for r in 1..len {
        let s: f64 = (1..=r.min(jumps.len() - 1)).map(|j| j as f64 * jumps[j] * f[r - j]).sum();
        f[r] = lambda / r as f64 * s;
    }
    f
}

/// Limit law of the out-degree (or in-degree, by `params.role`) on `0..=r_max`.
///
/// * vanishing: point mass at 0;
/// * balanced: `sum_{j <= L1} L2*_j`, with `L1` mixed Poisson of rate
///   `X sqrt(beta) E Z` and `L2*` the downshifted size-biased version of the
///   mixed Poisson `L2` of rate `Z E Y / sqrt(beta)`;
/// * attribute-rich: mixed Poisson of rate `X E Y E Z^2`.
pub fn limit_outdegree_pmf(params: &LimitDegreeParams, r_max: usize) -> Result<LimitPmf, TheoryError> {
    let len = r_max + 1;
    if let Regime::Vanishing = params.regime {
        return Ok(LimitPmf::from_pmf(poisson_pmf(0.0, len), 0.0));
    }
    params.check()?;
    let (own, other) = params.sides();
    let z = params.z;
    match params.regime {
        Regime::Vanishing => unreachable!(),
        Regime::AttributeRich => {
            let pmf = mixed_poisson_pmf(&own.mixing_nodes(), other.mean() * z.moment(2), len);
            Ok(LimitPmf::from_pmf(pmf, own.truncated_mass()))
        }
        Regime::Balanced { beta } => {
            let root = beta.sqrt();
            let jump_mean = other.mean() * z.mean() / root;
            let truncation = own.truncated_mass() + z.truncated_mass();
            if jump_mean <= 0.0 {
                return Ok(LimitPmf::from_pmf(poisson_pmf(0.0, len), truncation));
            }
            let l2 = mixed_poisson_pmf(&z.mixing_nodes(), other.mean() / root, len + 1);
            let jumps = downshifted_size_biased(&l2, jump_mean, len);
            let mut pmf = vec![0.0; len];
            for (value, weight) in own.mixing_nodes() {
                let f = compound_poisson_pmf(value * root * z.mean(), &jumps, len);
                for (acc, p) in pmf.iter_mut().zip(f) {
                    *acc += weight * p;
                }
            }
            Ok(LimitPmf::from_pmf(pmf, truncation))
        }
    }
}

fn poisson_draw(lambda: f64, rng: &mut SeqStream) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    match Poisson::new(lambda) {
        Ok(dist) => dist.sample(rng) as u64,
        // Rates beyond the sampler's range only arise from extreme weights.
        Err(_) => u64::MAX,
    }
}

/// One draw from the law of [`limit_outdegree_pmf`].
///
/// Each `L2*` is drawn as a Poisson variable whose rate uses an attribute
/// weight sampled from the size-biased law of `Z`.
pub fn sample_limit_outdegree(params: &LimitDegreeParams, rng: &mut SeqStream) -> Result<u64, TheoryError> {
    if let Regime::Vanishing = params.regime {
        return Ok(0);
    }
    params.check()?;
    let (own, other) = params.sides();
    let z = params.z;
    let x = own.quantile(rng.uniform());
    match params.regime {
        Regime::Vanishing => unreachable!(),
        Regime::AttributeRich => Ok(poisson_draw(x * other.mean() * z.moment(2), rng)),
        Regime::Balanced { beta } => {
            let root = beta.sqrt();
            let count = poisson_draw(x * root * z.mean(), rng);
            let mut total = 0u64;
            for _ in 0..count {
                let zb = z
                    .sample_size_biased(rng)
                    .ok_or(TheoryError::InfiniteMoment { name: "E Z", value: z.mean() })?;
                total = total.saturating_add(poisson_draw(zb * other.mean() / root, rng));
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Coupling;

    fn unit_nodes() -> NodeWeightConfig {
        let c = WeightDist::constant(1.0).unwrap();
        NodeWeightConfig::new(c, c, Coupling::Independent).unwrap()
    }

    #[test]
    fn dicc_limit_values() {
        let unit = MomentSet::unit();
        assert_eq!(dicc_limit(0.0, &unit).unwrap(), 1.0);
        assert!((dicc_limit(1.0, &unit).unwrap() - 0.25).abs() < 1e-15);
        assert!((dicc_limit(0.5, &unit).unwrap() - 1.0 / 2.25).abs() < 1e-15);
        assert!(dicc_limit(1e3, &unit).unwrap() < 1e-3);
    }

    #[test]
    fn dicc_limit_rejects_missing_moments() {
        let mut m = MomentSet::unit();
        m.z[3] = f64::INFINITY;
        assert!(matches!(dicc_limit(1.0, &m), Err(TheoryError::NonPositiveMoment { .. }) | Err(TheoryError::InfiniteMoment { .. })));
        let mut m = MomentSet::unit();
        m.x[0] = 0.0;
        assert!(dicc_limit(1.0, &m).is_err());
        assert!(dicc_limit(-1.0, &MomentSet::unit()).is_err());
    }

    #[test]
    fn local_limits() {
        let unit = MomentSet::unit();
        assert!((dicc_local_limit_ego(1.0, 1.0, &unit).unwrap() - 0.25).abs() < 1e-15);
        // y3 equal to the size-bias ratio b2/b1 recovers the global limit
        let tp = WeightDist::two_point(1.0, 3.0, 0.5).unwrap();
        let cfg = NodeWeightConfig::new(tp, tp, Coupling::Independent).unwrap();
        let mom = MomentSet::from_distributions(&cfg, &WeightDist::exponential(1.0).unwrap());
        let ratio = mom.y[1] / mom.y[0];
        let a = dicc_local_limit_ego(0.7, ratio, &mom).unwrap();
        let b = dicc_limit(0.7, &mom).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn local_limit_scales_inversely_with_y3() {
        let mom = MomentSet::unit();
        let (alpha, y3) = (1.0, 1e6);
        let scaled = dicc_local_limit_ego(alpha, y3, &mom).unwrap() * y3;
        let asymptote = 1.0 / (alpha + alpha * alpha);
        assert!((scaled - asymptote).abs() / asymptote < 1e-4);
    }

    #[test]
    fn pair_limit_values() {
        let ones = [1.0; 4];
        assert!((dicc_pair_limit(1.0, 1.0, 1.0, &ones).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(dicc_pair_limit(1.0, 0.0, 0.0, &ones).unwrap(), 1.0);
        assert!((dicc_pair_limit(1.0, 2.0, 3.0, &ones).unwrap() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn trcc_limit_values() {
        let unit = MomentSet::unit();
        assert!((trcc_limit_eps_min(1.0, 1.0, &unit).unwrap() - 0.5).abs() < 1e-15);
        assert!((trcc_limit_eps_min(1.0, 0.5, &unit).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((trcc_limit_eps_min(4.0, 1.0, &unit).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let mut m = unit;
        m.cross_min = 0.0;
        assert!(trcc_limit_eps_min(1.0, 1.0, &m).is_err());
        assert_eq!(trcc_limit_independent(), 0.0);
    }

    #[test]
    fn consistency_check() {
        assert!(MomentSet::unit().check_consistency().is_ok());
        let mut bad = MomentSet::unit();
        bad.x = [2.0, 1.0, 1.0];
        assert!(bad.check_consistency().is_err());
    }

    #[test]
    fn vanishing_is_point_mass() {
        let p = LimitDegreeParams { regime: Regime::Vanishing, nodes: unit_nodes(), z: WeightDist::constant(1.0).unwrap(), role: DegreeRole::Out };
        let pmf = limit_outdegree_pmf(&p, 5).unwrap();
        assert_eq!(pmf.pmf, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(pmf.tail_mass, 0.0);
        let mut rng = crate::rng::StreamKey::from_seed(1).sequential();
        assert!((0..100).all(|_| sample_limit_outdegree(&p, &mut rng).unwrap() == 0));
    }

    #[test]
    fn attribute_rich_unit_is_poisson_one() {
        let p = LimitDegreeParams { regime: Regime::AttributeRich, nodes: unit_nodes(), z: WeightDist::constant(1.0).unwrap(), role: DegreeRole::Out };
        let pmf = limit_outdegree_pmf(&p, 30).unwrap();
        assert!((pmf.pmf[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((pmf.pmf[0] - 0.367879).abs() < 1e-6);
        assert!(pmf.tail_mass < 1e-15);
    }

    #[test]
    fn balanced_unit_generating_function() {
        // Compound Poisson(1) of Poisson(1) jumps: P(0) = exp(-(1 - 1/e)).
        let p = LimitDegreeParams { regime: Regime::Balanced { beta: 1.0 }, nodes: unit_nodes(), z: WeightDist::constant(1.0).unwrap(), role: DegreeRole::Out };
        let pmf = limit_outdegree_pmf(&p, 60).unwrap();
        let p0 = (-(1.0 - (-1.0f64).exp())).exp();
        assert!((pmf.pmf[0] - p0).abs() < 1e-15);
        assert!((pmf.pmf[0] - 0.531).abs() < 1e-3);
        // P(1) = lambda g1 f0 with g1 = e^-1
        assert!((pmf.pmf[1] - (-1.0f64).exp() * p0).abs() < 1e-15);
        assert!(pmf.tail_mass < 1e-12);
    }

    #[test]
    fn exponential_mixing_matches_geometric() {
        // Poisson with Exp(1) rate is Geometric(1/2) on {0, 1, ...}.
        let e = WeightDist::exponential(1.0).unwrap();
        let c = WeightDist::constant(1.0).unwrap();
        let nodes = NodeWeightConfig::new(e, c, Coupling::Independent).unwrap();
        let p = LimitDegreeParams { regime: Regime::AttributeRich, nodes, z: c, role: DegreeRole::Out };
        let pmf = limit_outdegree_pmf(&p, 40).unwrap();
        for (r, &v) in pmf.pmf.iter().enumerate() {
            assert!((v - 0.5f64.powi(r as i32 + 1)).abs() < 1e-9, "r = {r}");
        }
        assert!((pmf.mixing_truncation - 1e-10).abs() < 1e-20);
    }

    #[test]
    fn indegree_swaps_roles() {
        let e = WeightDist::exponential(1.0).unwrap();
        let c = WeightDist::constant(1.0).unwrap();
        let nodes = NodeWeightConfig::new(c, e, Coupling::Independent).unwrap();
        let p_in = LimitDegreeParams { regime: Regime::AttributeRich, nodes, z: c, role: DegreeRole::In };
        let swapped = NodeWeightConfig::new(e, c, Coupling::Independent).unwrap();
        let p_out = LimitDegreeParams { regime: Regime::AttributeRich, nodes: swapped, z: c, role: DegreeRole::Out };
        assert_eq!(limit_outdegree_pmf(&p_in, 20).unwrap(), limit_outdegree_pmf(&p_out, 20).unwrap());
    }

    #[test]
    fn infinite_required_moment_errors() {
        let c = WeightDist::constant(1.0).unwrap();
        let heavy = WeightDist::pareto(1.0, 1.5).unwrap();
        let p = LimitDegreeParams { regime: Regime::AttributeRich, nodes: unit_nodes(), z: heavy, role: DegreeRole::Out };
        assert!(matches!(limit_outdegree_pmf(&p, 10), Err(TheoryError::InfiniteMoment { .. })));
        let nodes = NodeWeightConfig::new(c, WeightDist::pareto(1.0, 0.8).unwrap(), Coupling::Independent).unwrap();
        let p = LimitDegreeParams { regime: Regime::Balanced { beta: 1.0 }, nodes, z: c, role: DegreeRole::Out };
        assert!(limit_outdegree_pmf(&p, 10).is_err());
    }

    #[test]
    fn panjer_matches_iterated_convolution() {
        // Independent route: sum over k of Poisson(lambda)(k) times the k-fold
        // convolution of the jump law.
        let jumps = vec![0.2, 0.5, 0.3];
        let lambda = 1.7;
        let len = 25;
        let panjer = compound_poisson_pmf(lambda, &jumps, len);
        let counts = poisson_pmf(lambda, 80);
        let mut conv = vec![0.0; len];
        conv[0] = 1.0;
        let mut direct = vec![0.0; len];
        for &pk in &counts {
            for r in 0..len {
                direct[r] += pk * conv[r];
            }
            let mut next = vec![0.0; len];
            for (r, &c) in conv.iter().enumerate() {
                for (j, &g) in jumps.iter().enumerate() {
                    if r + j < len {
                        next[r + j] += c * g;
                    }
                }
            }
            conv = next;
        }
        for r in 0..len {
            assert!((panjer[r] - direct[r]).abs() < 1e-14, "r = {r}");
        }
    }

    #[test]
    fn downshifted_two_point_is_size_biased_mixture() {
        // L2 mixed Poisson over Z in {1, 3}; L2* is mixed Poisson over the
        // size-biased Z, which puts weight p v / E Z on each atom.
        let z = WeightDist::two_point(1.0, 3.0, 0.4).unwrap();
        let len = 30;
        let l2 = mixed_poisson_pmf(&z.mixing_nodes(), 0.8, len + 1);
        let star = downshifted_size_biased(&l2, 0.8 * z.mean(), len);
        let ez = z.mean();
        let biased = [(1.0, 0.4 * 1.0 / ez), (3.0, 0.6 * 3.0 / ez)];
        let expected = mixed_poisson_pmf(&biased, 0.8, len);
        for r in 0..len {
            assert!((star[r] - expected[r]).abs() < 1e-14);
        }
    }

    #[test]
    fn pmf_entries_nonnegative_and_bounded() {
        let nodes = NodeWeightConfig::new(
            WeightDist::pareto(1.0, 2.5).unwrap(),
            WeightDist::exponential(2.0).unwrap(),
            Coupling::Comonotone,
        )
        .unwrap();
        let p = LimitDegreeParams { regime: Regime::Balanced { beta: 2.0 }, nodes, z: WeightDist::pareto(0.5, 3.5).unwrap(), role: DegreeRole::Out };
        let pmf = limit_outdegree_pmf(&p, 80).unwrap();
        assert!(pmf.pmf.iter().all(|&v| v >= 0.0));
        let total: f64 = pmf.pmf.iter().sum();
        assert!((total + pmf.tail_mass - 1.0).abs() < 1e-9);
    }
}
