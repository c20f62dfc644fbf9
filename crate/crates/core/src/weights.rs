//! Actor and attribute weight laws.
//!
//! Actor `i` carries a demand weight `x_i` and a supply weight `y_i`; attribute
//! `k` carries a popularity weight `z_k > 0`. All samplers work by inverse
//! transform so that a comonotone `(x, y)` pair is one uniform pushed through
//! both quantile functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{unit_interval_nodes, UPPER_TRUNCATION};
use crate::rng::{SeqStream, StreamKey, StreamTag};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("invalid {kind} parameter: {detail}")]
    InvalidParameter { kind: &'static str, detail: String },
    #[error("attribute weights must be strictly positive, but {0:?} can emit 0")]
    ZeroAttributeWeight(WeightDist),
    #[error("weight sample has {got} {what}, expected {expected}")]
    Dimension { what: &'static str, got: usize, expected: usize },
    #[error("weight sample contains an invalid {what} value {value} at index {index}")]
    InvalidValue { what: &'static str, index: usize, value: f64 },
}

/// One of the four built-in weight laws.
///
/// Constant and two-point values may be zero (a zero demand weight switches
/// an actor's demand off); every other parameter is strictly positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightDist {
    Constant { value: f64 },
    Exponential { rate: f64 },
    Pareto { scale: f64, tail_index: f64 },
    TwoPoint { v1: f64, v2: f64, prob_v1: f64 },
}

fn invalid(kind: &'static str, detail: String) -> WeightError {
    WeightError::InvalidParameter { kind, detail }
}

impl WeightDist {
    pub fn constant(value: f64) -> Result<Self, WeightError> {
        Self::Constant { value }.validated()
    }

    pub fn exponential(rate: f64) -> Result<Self, WeightError> {
        Self::Exponential { rate }.validated()
    }

    pub fn pareto(scale: f64, tail_index: f64) -> Result<Self, WeightError> {
        Self::Pareto { scale, tail_index }.validated()
    }

    pub fn two_point(v1: f64, v2: f64, prob_v1: f64) -> Result<Self, WeightError> {
        Self::TwoPoint { v1, v2, prob_v1 }.validated()
    }

    pub fn validated(self) -> Result<Self, WeightError> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let pos = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            Self::Constant { value } if !nonneg(value) => {
                Err(invalid("constant", format!("value {value} must be finite and >= 0")))
            }
            Self::Exponential { rate } if !pos(rate) => {
                Err(invalid("exponential", format!("rate {rate} must be > 0")))
            }
            Self::Pareto { scale, tail_index } if !pos(scale) || !pos(tail_index) => Err(invalid(
                "pareto",
                format!("scale {scale} and tail_index {tail_index} must be > 0"),
            )),
            Self::TwoPoint { v1, v2, prob_v1 }
                if !nonneg(v1) || !nonneg(v2) || !(0.0..=1.0).contains(&prob_v1) =>
            {
                Err(invalid(
                    "two_point",
                    format!("values ({v1}, {v2}) must be >= 0 and prob_v1 {prob_v1} in [0, 1]"),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Whether a draw equals zero with positive probability.
    pub fn can_emit_zero(&self) -> bool {
        match *self {
            Self::Constant { value } => value == 0.0,
            Self::TwoPoint { v1, v2, prob_v1 } => {
                (v1 == 0.0 && prob_v1 > 0.0) || (v2 == 0.0 && prob_v1 < 1.0)
            }
            Self::Exponential { .. } | Self::Pareto { .. } => false,
        }
    }

    /// Exact moment `E W^order`; `+inf` when it diverges.
    pub fn moment(&self, order: u32) -> f64 {
        let r = order as i32;
        match *self {
            Self::Constant { value } => value.powi(r),
            Self::Exponential { rate } => {
                let fact: f64 = (1..=order).map(f64::from).product();
                fact / rate.powi(r)
            }
            Self::Pareto { scale, tail_index } => {
                if tail_index > order as f64 {
                    tail_index * scale.powi(r) / (tail_index - order as f64)
                } else {
                    f64::INFINITY
                }
            }
            Self::TwoPoint { v1, v2, prob_v1 } => {
                prob_v1 * v1.powi(r) + (1.0 - prob_v1) * v2.powi(r)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Inverse distribution function on (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::Pareto { scale, tail_index } => scale * (1.0 - u).powf(-1.0 / tail_index),
            Self::TwoPoint { v1, v2, prob_v1 } => {
                if u < prob_v1 {
                    v1
                } else {
                    v2
                }
            }
        }
    }

    /// `E min(t, W)`.
    pub fn truncated_mean(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { value } => t.min(value),
            Self::TwoPoint { v1, v2, prob_v1 } => prob_v1 * t.min(v1) + (1.0 - prob_v1) * t.min(v2),
            Self::Exponential { rate } => -(-rate * t).exp_m1() / rate,
            Self::Pareto { scale, tail_index } => {
                if t <= scale {
                    t
                } else if (tail_index - 1.0).abs() < 1e-12 {
                    scale + scale * (t / scale).ln()
                } else {
                    let a = tail_index;
                    scale + scale.powf(a) * (t.powf(1.0 - a) - scale.powf(1.0 - a)) / (1.0 - a)
                }
            }
        }
    }

    /// Quantile levels at which the quantile function jumps.
    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Self::TwoPoint { prob_v1, .. } => vec![prob_v1],
            _ => Vec::new(),
        }
    }

    fn is_discrete(&self) -> bool {
        matches!(self, Self::Constant { .. } | Self::TwoPoint { .. })
    }

    /// Discretization of the law as `(value, weight)` atoms.
    ///
    /// Exact for constant and two-point laws. Continuous laws get a composite
    /// Gauss–Legendre rule in quantile space whose weights sum to
    /// `1 - truncated_mass()`.
    pub fn mixing_nodes(&self) -> Vec<(f64, f64)> {
        match *self {
            Self::Constant { value } => vec![(value, 1.0)],
            Self::TwoPoint { v1, v2, prob_v1 } => vec![(v1, prob_v1), (v2, 1.0 - prob_v1)],
            _ => unit_interval_nodes(&[])
                .into_iter()
                .map(|(u, w)| (self.quantile(u), w))
                .collect(),
        }
    }

    pub fn truncated_mass(&self) -> f64 {
        if self.is_discrete() {
            0.0
        } else {
            UPPER_TRUNCATION
        }
    }

    /// One draw from the law size-biased by its value, i.e. with density
    /// proportional to `w * f(w)`. `None` when the mean is infinite or zero.
    pub fn sample_size_biased(&self, rng: &mut SeqStream) -> Option<f64> {
        let mean = self.mean();
        if !mean.is_finite() || mean <= 0.0 {
            return None;
        }
        Some(match *self {
            Self::Constant { value } => value,
            Self::TwoPoint { v1, v2, prob_v1 } => {
                if rng.uniform() < prob_v1 * v1 / mean {
                    v1
                } else {
                    v2
                }
            }
            // Gamma(2, rate)
            Self::Exponential { rate } => -(rng.uniform().ln() + rng.uniform().ln()) / rate,
            Self::Pareto { scale, tail_index } => {
                scale * (1.0 - rng.uniform()).powf(-1.0 / (tail_index - 1.0))
            }
        })
    }
}

/// Joint law of `(X_i, Y_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    #[default]
    Independent,
    /// One shared uniform per actor feeds both quantile functions.
    Comonotone,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeWeightConfig {
    pub x: WeightDist,
    pub y: WeightDist,
    #[serde(default)]
    pub coupling: Coupling,
}

impl NodeWeightConfig {
    pub fn new(x: WeightDist, y: WeightDist, coupling: Coupling) -> Result<Self, WeightError> {
        let cfg = Self { x, y, coupling };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        self.x.validate()?;
        self.y.validate()
    }

    /// `E(X Y)`.
    pub fn cross_product_moment(&self) -> f64 {
        let (x, y) = (self.x, self.y);
        match self.coupling {
            Coupling::Independent => x.mean() * y.mean(),
            Coupling::Comonotone => {
                use WeightDist::*;
                match (x, y) {
                    (Pareto { scale: s1, tail_index: a1 }, Pareto { scale: s2, tail_index: a2 }) => {
                        let exponent = 1.0 / a1 + 1.0 / a2;
                        if exponent < 1.0 {
                            s1 * s2 / (1.0 - exponent)
                        } else {
                            f64::INFINITY
                        }
                    }
                    (Exponential { rate: r1 }, Exponential { rate: r2 }) => 2.0 / (r1 * r2),
                    _ => {
                        if !x.mean().is_finite() || !y.mean().is_finite() {
                            return f64::INFINITY;
                        }
                        comonotone_expectation(&x, &y, |a, b| a * b)
                    }
                }
            }
        }
    }

    /// `E(X ∧ Y)`.
    pub fn cross_min_moment(&self) -> f64 {
        let (x, y) = (self.x, self.y);
        match self.coupling {
            Coupling::Independent => {
                // E min(X, Y) = E_X[ E min(X, Y) | X ]; mix over whichever law
                // has exact atoms.
                let (outer, inner) = if y.is_discrete() && !x.is_discrete() {
                    (y, x)
                } else {
                    (x, y)
                };
                outer
                    .mixing_nodes()
                    .into_iter()
                    .map(|(v, w)| w * inner.truncated_mean(v))
                    .sum()
            }
            Coupling::Comonotone => comonotone_expectation(&x, &y, f64::min),
        }
    }
}

fn comonotone_expectation(x: &WeightDist, y: &WeightDist, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut cuts = x.breakpoints();
    cuts.extend(y.breakpoints());
    unit_interval_nodes(&cuts)
        .into_iter()
        .map(|(u, w)| w * f(x.quantile(u), y.quantile(u)))
        .sum()
}

/// Draws `n` actor weight pairs.
///
/// Under `Independent` coupling `x` and `y` come from separate sub-streams;
/// under `Comonotone` they share one uniform. Pair `i` depends only on
/// `(key, i)`.
pub fn sample_node_weights(cfg: &NodeWeightConfig, n: usize, key: StreamKey) -> Vec<(f64, f64)> {
    match cfg.coupling {
        Coupling::Independent => {
            let kx = key.derive(StreamTag::NodeX, 0);
            let ky = key.derive(StreamTag::NodeY, 0);
            (0..n as u64)
                .map(|i| (cfg.x.quantile(kx.uniform_at(i)), cfg.y.quantile(ky.uniform_at(i))))
                .collect()
        }
        Coupling::Comonotone => {
            let ks = key.derive(StreamTag::NodeShared, 0);
            (0..n as u64)
                .map(|i| {
                    let u = ks.uniform_at(i);
                    (cfg.x.quantile(u), cfg.y.quantile(u))
                })
                .collect()
        }
    }
}

pub fn sample_attribute_weights(
    dist: &WeightDist,
    m: usize,
    key: StreamKey,
) -> Result<Vec<f64>, WeightError> {
    dist.validate()?;
    if dist.can_emit_zero() {
        return Err(WeightError::ZeroAttributeWeight(*dist));
    }
    let kz = key.derive(StreamTag::Attribute, 0);
    Ok((0..m as u64).map(|k| dist.quantile(kz.uniform_at(k))).collect())
}

/// Realized weights of one model instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSample {
    xy: Vec<(f64, f64)>,
    z: Vec<f64>,
}

impl WeightSample {
    pub fn new(xy: Vec<(f64, f64)>, z: Vec<f64>) -> Result<Self, WeightError> {
        for (i, &(x, y)) in xy.iter().enumerate() {
            if !(x.is_finite() && x >= 0.0) {
                return Err(WeightError::InvalidValue { what: "x", index: i, value: x });
            }
            if !(y.is_finite() && y >= 0.0) {
                return Err(WeightError::InvalidValue { what: "y", index: i, value: y });
            }
        }
        for (k, &v) in z.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(WeightError::InvalidValue { what: "z", index: k, value: v });
            }
        }
        Ok(Self { xy, z })
    }

    /// Constant weights `x_i = x`, `y_i = y`, `z_k = z`.
    pub fn constant(n: usize, m: usize, x: f64, y: f64, z: f64) -> Result<Self, WeightError> {
        Self::new(vec![(x, y); n], vec![z; m])
    }

    pub fn draw(
        cfg: &NodeWeightConfig,
        z_dist: &WeightDist,
        n: usize,
        m: usize,
        key: StreamKey,
    ) -> Result<Self, WeightError> {
        cfg.validate()?;
        let xy = sample_node_weights(cfg, n, key);
        let z = sample_attribute_weights(z_dist, m, key)?;
        Ok(Self { xy, z })
    }

    pub fn n(&self) -> usize {
        self.xy.len()
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    pub fn xy(&self) -> &[(f64, f64)] {
        &self.xy
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn check_dimensions(&self, n: usize, m: usize) -> Result<(), WeightError> {
        if self.n() != n {
            return Err(WeightError::Dimension { what: "actors", got: self.n(), expected: n });
        }
        if self.m() != m {
            return Err(WeightError::Dimension { what: "attributes", got: self.m(), expected: m });
        }
        Ok(())
    }
}
