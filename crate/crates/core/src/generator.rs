//! Random bipartite digraph between actors and attributes.
//!
//! Each actor/attribute pair independently draws a (demand, supply) indicator
//! pair with marginals `p`, `q` and joint probability `r` given by the
//! reciprocity kernel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{StreamKey, StreamTag};
use crate::weights::{WeightError, WeightSample};

/// Slack allowed on the kernel bounds for floating point round-off.
const KERNEL_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("actor {actor}, attribute {attribute}: {violation}")]
    Kernel { actor: usize, attribute: usize, violation: KernelViolation },
    #[error("geometric skipping needs constant weights: {0}")]
    FastPathUnavailable(&'static str),
    #[error("invalid bipartite link {what} ({a}, {b}): {reason}")]
    InvalidLink { what: &'static str, a: usize, b: usize, reason: &'static str },
}

/// Model size and link intensity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    m: usize,
    gamma: f64,
}

impl ModelParams {
    pub fn new(n: usize, m: usize, gamma: f64) -> Result<Self, GenerateError> {
        if n == 0 || m == 0 {
            return Err(GenerateError::InvalidParams(format!("n = {n} and m = {m} must be >= 1")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(GenerateError::InvalidParams(format!("gamma = {gamma} must be > 0")));
        }
        Ok(Self { n, m, gamma })
    }

    /// `gamma = (n m)^(-1/2)`.
    pub fn sparse(n: usize, m: usize) -> Result<Self, GenerateError> {
        Self::new(n, m, 1.0 / ((n as f64) * (m as f64)).sqrt())
    }

    /// `gamma = alpha / m`.
    pub fn with_alpha(n: usize, m: usize, alpha: f64) -> Result<Self, GenerateError> {
        Self::new(n, m, alpha / m as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `gamma * m`.
    pub fn alpha(&self) -> f64 {
        self.gamma * self.m as f64
    }

    /// `m / n`.
    pub fn beta(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

/// Joint probability `r(x, y, z, gamma)` of simultaneous demand and supply.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReciprocityKernel {
    /// `r = p q`: demand and supply independent given the weights.
    #[default]
    IndependentProduct,
    /// `r = epsilon * min(p, q, 1)` with unclamped `p = gamma x z`, `q = gamma y z`.
    EpsilonMin { epsilon: f64 },
}

impl ReciprocityKernel {
    pub fn epsilon_min(epsilon: f64) -> Result<Self, GenerateError> {
        let k = Self::EpsilonMin { epsilon };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        match *self {
            Self::EpsilonMin { epsilon } if !(epsilon > 0.0 && epsilon <= 1.0) => Err(
                GenerateError::InvalidParams(format!("epsilon = {epsilon} must lie in (0, 1]")),
            ),
            _ => Ok(()),
        }
    }
}

/// `(p, q) = (min(1, gamma x z), min(1, gamma y z))`.
#[inline]
pub fn link_probabilities(x: f64, y: f64, z: f64, gamma: f64) -> (f64, f64) {
    ((gamma * x * z).min(1.0), (gamma * y * z).min(1.0))
}

#[inline]
pub fn joint_probability(kernel: ReciprocityKernel, x: f64, y: f64, z: f64, gamma: f64) -> f64 {
    match kernel {
        ReciprocityKernel::IndependentProduct => {
            let (p, q) = link_probabilities(x, y, z, gamma);
            p * q
        }
        ReciprocityKernel::EpsilonMin { epsilon } => {
            epsilon * (gamma * x * z).min(gamma * y * z).min(1.0)
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("kernel violation: r = {r} outside [max(p + q - 1, 0), min(p, q)] for p = {p}, q = {q}")]
pub struct KernelViolation {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

/// Checks `max(p + q - 1, 0) <= r <= min(p, q)`.
#[inline]
pub fn validate_kernel(p: f64, q: f64, r: f64) -> Result<(), KernelViolation> {
    let lower = (p + q - 1.0).max(0.0);
    let upper = p.min(q);
    if r + KERNEL_SLACK >= lower && r <= upper + KERNEL_SLACK && r >= 0.0 {
        Ok(())
    } else {
        Err(KernelViolation { p, q, r })
    }
}

/// Outcome of one actor/attribute pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOutcome {
    Both,
    DemandOnly,
    SupplyOnly,
    Neither,
}

impl PairOutcome {
    /// Partitions `u` by cumulative thresholds in the fixed order
    /// (1,1), (1,0), (0,1), (0,0).
    #[inline]
    pub fn from_uniform(u: f64, p: f64, q: f64, r: f64) -> Self {
        if u < r {
            Self::Both
        } else if u < p {
            Self::DemandOnly
        } else if u < p + q - r {
            Self::SupplyOnly
        } else {
            Self::Neither
        }
    }

    pub fn demand(self) -> bool {
        matches!(self, Self::Both | Self::DemandOnly)
    }

    pub fn supply(self) -> bool {
        matches!(self, Self::Both | Self::SupplyOnly)
    }
}

/// The demand/supply relation between `n` actors and `m` attributes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteDigraph {
    n: usize,
    m: usize,
    /// Attributes demanded by each actor, strictly increasing.
    demand: Vec<Vec<u32>>,
    /// Actors supplying each attribute, strictly increasing.
    supply: Vec<Vec<u32>>,
}

impl BipartiteDigraph {
    pub fn empty(n: usize, m: usize) -> Self {
        Self { n, m, demand: vec![Vec::new(); n], supply: vec![Vec::new(); m] }
    }

    /// Builds from `(actor, attribute)` demand links and `(attribute, actor)`
    /// supply links. Rejects out-of-range ids and duplicates.
    pub fn from_links(
        n: usize,
        m: usize,
        demand_links: &[(usize, usize)],
        supply_links: &[(usize, usize)],
    ) -> Result<Self, GenerateError> {
        let mut g = Self::empty(n, m);
        for &(i, k) in demand_links {
            if i >= n || k >= m {
                return Err(GenerateError::InvalidLink { what: "demand", a: i, b: k, reason: "id out of range" });
            }
            g.demand[i].push(k as u32);
        }
        for &(k, i) in supply_links {
            if i >= n || k >= m {
                return Err(GenerateError::InvalidLink { what: "supply", a: k, b: i, reason: "id out of range" });
            }
            g.supply[k].push(i as u32);
        }
        for (i, row) in g.demand.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(GenerateError::InvalidLink { what: "demand", a: i, b: w[0] as usize, reason: "duplicate" });
            }
        }
        for (k, row) in g.supply.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(GenerateError::InvalidLink { what: "supply", a: k, b: w[0] as usize, reason: "duplicate" });
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Attributes demanded by actor `i`.
    pub fn demand(&self, i: usize) -> &[u32] {
        &self.demand[i]
    }

    /// Actors supplying attribute `k`.
    pub fn supply(&self, k: usize) -> &[u32] {
        &self.supply[k]
    }

    pub fn demand_count(&self) -> usize {
        self.demand.iter().map(Vec::len).sum()
    }

    pub fn supply_count(&self) -> usize {
        self.supply.iter().map(Vec::len).sum()
    }

    /// Demand links `(i, k)` sorted by actor then attribute.
    pub fn demand_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.demand
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&k| (i, k as usize)))
    }

    /// Supply links `(k, i)` sorted by attribute then actor.
    pub fn supply_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.supply
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().map(move |&i| (k, i as usize)))
    }

    fn from_rows(n: usize, m: usize, rows: Vec<(Vec<u32>, Vec<u32>)>) -> Self {
        let mut demand = Vec::with_capacity(n);
        let mut supply = vec![Vec::new(); m];
        for (i, (d, s)) in rows.into_iter().enumerate() {
            for k in s {
                supply[k as usize].push(i as u32);
            }
            demand.push(d);
        }
        Self { n, m, demand, supply }
    }
}

/// Attribute ids demanded and supplied by one actor.
type LinkRow = (Vec<u32>, Vec<u32>);

/// How the Bernoulli grid is traversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplingPath {
    /// One uniform per pair, pair `(i, k)` at position `i m + k` of the link stream.
    #[default]
    Direct,
    /// Geometric jumps between non-empty pairs; constant weights only.
    GeometricSkip,
}

/// Samples the bipartite digraph for one model instance.
///
/// The output is a pure function of `(key, params, weights, kernel, path)`;
/// rows are generated in parallel but each row only reads its own stream
/// positions. The first kernel violation in `(actor, attribute)` order aborts.
pub fn sample_bipartite(
    params: &ModelParams,
    weights: &WeightSample,
    kernel: ReciprocityKernel,
    key: StreamKey,
    path: SamplingPath,
) -> Result<BipartiteDigraph, GenerateError> {
    kernel.validate()?;
    weights.check_dimensions(params.n(), params.m())?;
    match path {
        SamplingPath::Direct => sample_direct(params, weights, kernel, key),
        SamplingPath::GeometricSkip => sample_geometric(params, weights, kernel, key),
    }
}

fn sample_direct(
    params: &ModelParams,
    weights: &WeightSample,
    kernel: ReciprocityKernel,
    key: StreamKey,
) -> Result<BipartiteDigraph, GenerateError> {
    let (n, m, gamma) = (params.n(), params.m(), params.gamma());
    let links = key.derive(StreamTag::Links, 0);
    let z = weights.z();
    let rows: Vec<Result<LinkRow, GenerateError>> = weights
        .xy()
        .par_iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let mut demand = Vec::new();
            let mut supply = Vec::new();
            let base = i as u64 * m as u64;
            for (k, &zk) in z.iter().enumerate() {
                let (p, q) = link_probabilities(x, y, zk, gamma);
                let r = joint_probability(kernel, x, y, zk, gamma);
                validate_kernel(p, q, r).map_err(|violation| GenerateError::Kernel {
                    actor: i,
                    attribute: k,
                    violation,
                })?;
                let outcome = PairOutcome::from_uniform(links.uniform_at(base + k as u64), p, q, r);
                if outcome.demand() {
                    demand.push(k as u32);
                }
                if outcome.supply() {
                    supply.push(k as u32);
                }
            }
            Ok((demand, supply))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(BipartiteDigraph::from_rows(n, m, rows))
}

fn sample_geometric(
    params: &ModelParams,
    weights: &WeightSample,
    kernel: ReciprocityKernel,
    key: StreamKey,
) -> Result<BipartiteDigraph, GenerateError> {
    let (n, m, gamma) = (params.n(), params.m(), params.gamma());
    let (x, y) = weights.xy()[0];
    let z = weights.z()[0];
    if weights.xy().iter().any(|&pair| pair != (x, y)) {
        return Err(GenerateError::FastPathUnavailable("actor weights differ"));
    }
    if weights.z().iter().any(|&v| v != z) {
        return Err(GenerateError::FastPathUnavailable("attribute weights differ"));
    }
    let (p, q) = link_probabilities(x, y, z, gamma);
    let r = joint_probability(kernel, x, y, z, gamma);
    validate_kernel(p, q, r)
        .map_err(|violation| GenerateError::Kernel { actor: 0, attribute: 0, violation })?;
    // Probability that a pair carries at least one link.
    let hit = (p + q - r).clamp(0.0, 1.0);

    let rows: Vec<(Vec<u32>, Vec<u32>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut demand = Vec::new();
            let mut supply = Vec::new();
            if hit == 0.0 {
                return (demand, supply);
            }
            let mut rng = key.derive(StreamTag::LinkRow, i as u64).sequential();
            let log_miss = (-hit).ln_1p();
            let mut k: u64 = 0;
            loop {
                let skip = if hit >= 1.0 { 0.0 } else { (rng.uniform().ln() / log_miss).floor() };
                if skip >= (m as u64 - k) as f64 {
                    break;
                }
                k += skip as u64;
                // Conditional outcome given at least one link.
                let v = rng.uniform() * hit;
                let outcome = PairOutcome::from_uniform(v, p, q, r);
                if outcome.demand() {
                    demand.push(k as u32);
                }
                if outcome.supply() {
                    supply.push(k as u32);
                }
                k += 1;
                if k >= m as u64 {
                    break;
                }
            }
            (demand, supply)
        })
        .collect();
    Ok(BipartiteDigraph::from_rows(n, m, rows))
}
