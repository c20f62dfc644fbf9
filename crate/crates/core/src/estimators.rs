//! Monte Carlo experiments: replicated generate → project → measure pipelines
//! aggregated into pooled ratio estimates, degree pmfs and reference values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{
    sample_bipartite, BipartiteDigraph, GenerateError, ModelParams, ReciprocityKernel, SamplingPath,
};
use crate::motifs::{dicc_local, motif_report, MotifReport, Ratio};
use crate::projection::{project, Digraph};
use crate::rng::{StreamKey, StreamTag};
use crate::theory::{
    dicc_limit, dicc_local_limit_ego, limit_outdegree_pmf, trcc_limit_eps_min, trcc_limit_independent,
    DegreeRole, LimitDegreeParams, LimitPmf, MomentSet, Regime,
};
use crate::weights::{NodeWeightConfig, WeightDist, WeightSample};

pub type Direction = DegreeRole;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("pmf entry {index} is negative or not finite: {value}")]
    NegativeMass { index: usize, value: f64 },
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("could not build worker pool: {0}")]
    ThreadPool(String),
}

/// Degree counts: `counts[d]` nodes have degree `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DegreeHistogram {
    pub counts: Vec<u64>,
}

impl DegreeHistogram {
    pub fn of(d: &Digraph, direction: Direction) -> Self {
        let mut counts = vec![0u64; 1];
        for i in 0..d.n() {
            let deg = match direction {
                Direction::Out => d.out_neighbors(i).len(),
                Direction::In => d.in_neighbors(i).len(),
            };
            if deg >= counts.len() {
                counts.resize(deg + 1, 0);
            }
            counts[deg] += 1;
        }
        Self { counts }
    }

    pub fn merge(&mut self, other: &DegreeHistogram) {
        if other.counts.len() > self.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn pmf(&self) -> Vec<f64> {
        let total = self.total();
        if total == 0 {
            return vec![1.0];
        }
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

/// Normalized degree histogram of `d`.
pub fn empirical_degree_pmf(d: &Digraph, direction: Direction) -> Vec<f64> {
    DegreeHistogram::of(d, direction).pmf()
}

/// `(1/2) sum_r |p_r - q_r| + (1/2) |tail_p - tail_q|`, where each tail is
/// the mass missing from a sub-probability vector. Tail mass is counted as
/// disjoint from the listed entries, so the value bounds the true distance
/// from above.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64, EstimatorError> {
    for (index, &value) in p.iter().chain(q).enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            let index = if index < p.len() { index } else { index - p.len() };
            return Err(EstimatorError::NegativeMass { index, value });
        }
    }
    let len = p.len().max(q.len());
    let at = |v: &[f64], r: usize| v.get(r).copied().unwrap_or(0.0);
    let body: f64 = (0..len).map(|r| (at(p, r) - at(q, r)).abs()).sum();
    let tail = |v: &[f64]| (1.0 - v.iter().sum::<f64>()).max(0.0);
    Ok((0.5 * body + 0.5 * (tail(p) - tail(q)).abs()).clamp(0.0, 1.0))
}

/// Leave-one-out jackknife standard error of the pooled ratio.
pub fn jackknife_ratio_se(parts: &[Ratio]) -> Option<f64> {
    let r = parts.len();
    if r < 2 {
        return None;
    }
    let total = parts.iter().fold(Ratio::default(), |acc, &p| acc + p);
    let leave_one_out: Option<Vec<f64>> = parts
        .iter()
        .map(|p| Ratio::new(total.numerator - p.numerator, total.denominator - p.denominator).value())
        .collect();
    let thetas = leave_one_out?;
    let mean = thetas.iter().sum::<f64>() / r as f64;
    let ss: f64 = thetas.iter().map(|t| (t - mean).powi(2)).sum();
    Some(((r as f64 - 1.0) / r as f64 * ss).sqrt())
}

/// Pooled coefficient estimate over replicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate {
    pub numerator: u128,
    pub denominator: u128,
    /// Pooled numerator over pooled denominator; `None` when undefined.
    pub pooled: Option<f64>,
    pub std_error: Option<f64>,
    pub replicate_mean: Option<f64>,
    pub replicate_min: Option<f64>,
    pub replicate_max: Option<f64>,
    pub defined_replicates: usize,
    pub replicate_values: Vec<Option<f64>>,
}

impl CoefficientEstimate {
    pub fn from_parts(parts: &[Ratio]) -> Self {
        let total = parts.iter().fold(Ratio::default(), |acc, &p| acc + p);
        let values: Vec<Option<f64>> = parts.iter().map(Ratio::value).collect();
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
        Self {
            numerator: total.numerator,
            denominator: total.denominator,
            pooled: total.value(),
            std_error: jackknife_ratio_se(parts),
            replicate_mean: mean,
            replicate_min: defined.iter().copied().reduce(f64::min),
            replicate_max: defined.iter().copied().reduce(f64::max),
            defined_replicates: defined.len(),
            replicate_values: values,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    Dicc,
    Trcc,
    LocalDicc,
    OutPmf,
    InPmf,
}

/// Which node serves as ego for the local coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EgoPolicy {
    Node0,
    /// Largest in-degree; ties go to the smallest id.
    #[default]
    MaxInDegree,
}

impl EgoPolicy {
    pub fn select(self, d: &Digraph) -> usize {
        match self {
            Self::Node0 => 0,
            Self::MaxInDegree => (0..d.n())
                .max_by_key(|&i| (d.in_neighbors(i).len(), std::cmp::Reverse(i)))
                .unwrap_or(0),
        }
    }
}

/// Rule giving `gamma` for a grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRule {
    Fixed(f64),
    /// `gamma = alpha / m`
    AlphaOverM(f64),
    /// `gamma = (n m)^(-1/2)`
    Sparse,
}

impl GammaRule {
    pub fn params(self, n: usize, m: usize) -> Result<ModelParams, GenerateError> {
        match self {
            Self::Fixed(g) => ModelParams::new(n, m, g),
            Self::AlphaOverM(a) => ModelParams::with_alpha(n, m, a),
            Self::Sparse => ModelParams::sparse(n, m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSize {
    pub n: usize,
    pub m: usize,
}

/// Which limit law the empirical degree pmfs are compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    Vanishing,
    /// `beta = m / n` of the cell.
    #[default]
    Balanced,
    AttributeRich,
}

impl RegimeChoice {
    pub fn regime(self, params: &ModelParams) -> Regime {
        match self {
            Self::Vanishing => Regime::Vanishing,
            Self::Balanced => Regime::Balanced { beta: params.beta() },
            Self::AttributeRich => Regime::AttributeRich,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeOptions {
    #[serde(default)]
    pub regime: RegimeChoice,
    #[serde(default = "default_r_max")]
    pub r_max: usize,
}

fn default_r_max() -> usize {
    60
}

impl Default for DegreeOptions {
    fn default() -> Self {
        Self { regime: RegimeChoice::default(), r_max: default_r_max() }
    }
}

/// A full Monte Carlo experiment: the grid is `sizes × gamma`, size-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub sizes: Vec<GridSize>,
    pub gamma: Vec<GammaRule>,
    pub nodes: NodeWeightConfig,
    pub z: WeightDist,
    pub kernel: ReciprocityKernel,
    pub replicates: u32,
    pub master_seed: u64,
    pub measurements: Vec<Measurement>,
    pub ego_policy: EgoPolicy,
    pub sampling: SamplingPath,
    pub degree: DegreeOptions,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        let bad = |s: String| Err(EstimatorError::InvalidSpec(s));
        if self.replicates == 0 {
            return bad("replicates must be >= 1".into());
        }
        if self.sizes.is_empty() || self.gamma.is_empty() {
            return bad("sweep grids must be non-empty".into());
        }
        if self.measurements.is_empty() {
            return bad("at least one measurement is required".into());
        }
        for s in &self.sizes {
            if s.n == 0 || s.m == 0 {
                return bad(format!("n = {} and m = {} must be >= 1", s.n, s.m));
            }
            if s.n > u32::MAX as usize || s.m > u32::MAX as usize {
                return bad("node and attribute counts must fit in 32 bits".into());
            }
        }
        for g in &self.gamma {
            if let GammaRule::Fixed(v) | GammaRule::AlphaOverM(v) = *g {
                if !(v.is_finite() && v > 0.0) {
                    return bad(format!("gamma rule {g:?} needs a positive finite value"));
                }
            }
        }
        self.nodes.validate().map_err(|e| EstimatorError::InvalidSpec(e.to_string()))?;
        self.z.validate().map_err(|e| EstimatorError::InvalidSpec(e.to_string()))?;
        if self.z.can_emit_zero() {
            return bad("attribute weights must be strictly positive".into());
        }
        self.kernel.validate().map_err(|e| EstimatorError::InvalidSpec(e.to_string()))?;
        Ok(())
    }

    pub fn measures(&self, m: Measurement) -> bool {
        self.measurements.contains(&m)
    }

    /// `(cell index, size, gamma rule)` in output order.
    pub fn cells(&self) -> Vec<(usize, GridSize, GammaRule)> {
        self.sizes
            .iter()
            .flat_map(|&s| self.gamma.iter().map(move |&g| (s, g)))
            .enumerate()
            .map(|(i, (s, g))| (i, s, g))
            .collect()
    }

    pub fn cell_key(&self, cell: usize) -> StreamKey {
        StreamKey::from_seed(self.master_seed).derive(StreamTag::Cell, cell as u64)
    }

    pub fn replicate_key(&self, cell: usize, replicate: u32) -> StreamKey {
        self.cell_key(cell).derive(StreamTag::Replicate, replicate as u64)
    }
}

/// One realized model instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub weights: WeightSample,
    pub bipartite: BipartiteDigraph,
    pub digraph: Digraph,
}

/// Weights → bipartite graph → projection for one stream key.
pub fn generate_instance(
    params: &ModelParams,
    nodes: &NodeWeightConfig,
    z: &WeightDist,
    kernel: ReciprocityKernel,
    sampling: SamplingPath,
    key: StreamKey,
) -> Result<Instance, GenerateError> {
    let weights = WeightSample::draw(nodes, z, params.n(), params.m(), key)?;
    let bipartite = sample_bipartite(params, &weights, kernel, key, sampling)?;
    let digraph = project(&bipartite);
    Ok(Instance { weights, bipartite, digraph })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeComparison {
    pub direction: Direction,
    pub regime: Regime,
    pub histogram: DegreeHistogram,
    pub empirical: Vec<f64>,
    pub limit: Option<LimitPmf>,
    pub tv: Option<f64>,
    pub zero_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct TheoryRefs {
    pub dicc: Option<f64>,
    pub trcc: Option<f64>,
    /// Mean over replicates of the ego-conditional limit.
    pub local_dicc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub cell: usize,
    pub n: usize,
    pub m: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma_rule: GammaRule,
    pub replicates: u32,
    pub seed: u64,
    pub completed: bool,
    pub dicc: Option<CoefficientEstimate>,
    pub trcc: Option<CoefficientEstimate>,
    pub local_dicc: Option<CoefficientEstimate>,
    pub ego_policy: EgoPolicy,
    pub out_degree: Option<DegreeComparison>,
    pub in_degree: Option<DegreeComparison>,
    pub theory: TheoryRefs,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub master_seed: u64,
    pub replicates: u32,
    /// The empirical transitivity ratio is taken over ordered distinct triples.
    pub trcc_estimator: String,
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    pub fn all_completed(&self) -> bool {
        self.cells.iter().all(|c| c.completed)
    }
}

struct ReplicateOutcome {
    report: Option<MotifReport>,
    local: Option<(Ratio, f64)>,
    out_hist: Option<DegreeHistogram>,
    in_hist: Option<DegreeHistogram>,
}

fn run_replicate(
    spec: &ExperimentSpec,
    params: &ModelParams,
    key: StreamKey,
) -> Result<ReplicateOutcome, GenerateError> {
    let inst = generate_instance(params, &spec.nodes, &spec.z, spec.kernel, spec.sampling, key)?;
    let d = &inst.digraph;
    let report = (spec.measures(Measurement::Dicc) || spec.measures(Measurement::Trcc)).then(|| motif_report(d));
    let local = spec.measures(Measurement::LocalDicc).then(|| {
        let ego = spec.ego_policy.select(d);
        let ratio = dicc_local(d, ego).expect("ego is in range");
        (ratio, inst.weights.xy()[ego].1)
    });
    Ok(ReplicateOutcome {
        report,
        local,
        out_hist: spec.measures(Measurement::OutPmf).then(|| DegreeHistogram::of(d, Direction::Out)),
        in_hist: spec.measures(Measurement::InPmf).then(|| DegreeHistogram::of(d, Direction::In)),
    })
}

fn compare_degrees(
    spec: &ExperimentSpec,
    params: &ModelParams,
    direction: Direction,
    histogram: DegreeHistogram,
    diagnostics: &mut Vec<String>,
) -> DegreeComparison {
    let regime = spec.degree.regime.regime(params);
    let limit_params = LimitDegreeParams { regime, nodes: spec.nodes, z: spec.z, role: direction };
    let empirical = histogram.pmf();
    let limit = match limit_outdegree_pmf(&limit_params, spec.degree.r_max) {
        Ok(l) => Some(l),
        Err(e) => {
            diagnostics.push(format!("{direction:?}-degree limit unavailable: {e}"));
            None
        }
    };
    let tv = limit.as_ref().and_then(|l| total_variation(&empirical, &l.pmf).ok());
    DegreeComparison { direction, regime, zero_fraction: empirical[0], histogram, empirical, limit, tv }
}

fn run_cell(spec: &ExperimentSpec, cell: usize, size: GridSize, rule: GammaRule) -> CellResult {
    let seed = spec.cell_key(cell).raw();
    let mut diagnostics = Vec::new();
    let params = match rule.params(size.n, size.m) {
        Ok(p) => p,
        Err(e) => {
            return CellResult {
                cell,
                n: size.n,
                m: size.m,
                gamma: f64::NAN,
                alpha: f64::NAN,
                beta: size.m as f64 / size.n as f64,
                gamma_rule: rule,
                replicates: spec.replicates,
                seed,
                completed: false,
                dicc: None,
                trcc: None,
                local_dicc: None,
                ego_policy: spec.ego_policy,
                out_degree: None,
                in_degree: None,
                theory: TheoryRefs::default(),
                diagnostics: vec![e.to_string()],
            }
        }
    };

    let outcomes: Vec<Result<ReplicateOutcome, GenerateError>> = (0..spec.replicates)
        .into_par_iter()
        .map(|r| run_replicate(spec, &params, spec.replicate_key(cell, r)))
        .collect();

    let mut base = CellResult {
        cell,
        n: size.n,
        m: size.m,
        gamma: params.gamma(),
        alpha: params.alpha(),
        beta: params.beta(),
        gamma_rule: rule,
        replicates: spec.replicates,
        seed,
        completed: true,
        dicc: None,
        trcc: None,
        local_dicc: None,
        ego_policy: spec.ego_policy,
        out_degree: None,
        in_degree: None,
        theory: TheoryRefs::default(),
        diagnostics: Vec::new(),
    };

    if let Some((r, err)) = outcomes.iter().enumerate().find_map(|(r, o)| o.as_ref().err().map(|e| (r, e))) {
        base.completed = false;
        base.diagnostics.push(format!("replicate {r} aborted: {err}"));
        return base;
    }
    let outcomes: Vec<ReplicateOutcome> = outcomes.into_iter().map(Result::unwrap).collect();

    let mom = MomentSet::from_distributions(&spec.nodes, &spec.z);
    if spec.measures(Measurement::Dicc) {
        let parts: Vec<Ratio> = outcomes.iter().map(|o| o.report.unwrap().dicc_ratio()).collect();
        base.dicc = Some(CoefficientEstimate::from_parts(&parts));
        match dicc_limit(params.alpha(), &mom) {
            Ok(v) => base.theory.dicc = Some(v),
            Err(e) => diagnostics.push(format!("dicc limit unavailable: {e}")),
        }
    }
    if spec.measures(Measurement::Trcc) {
        let parts: Vec<Ratio> = outcomes.iter().map(|o| o.report.unwrap().trcc_ratio()).collect();
        base.trcc = Some(CoefficientEstimate::from_parts(&parts));
        if rule == GammaRule::Sparse {
            base.theory.trcc = match spec.kernel {
                ReciprocityKernel::IndependentProduct => Some(trcc_limit_independent()),
                ReciprocityKernel::EpsilonMin { epsilon } => match trcc_limit_eps_min(params.beta(), epsilon, &mom) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        diagnostics.push(format!("trcc limit unavailable: {e}"));
                        None
                    }
                },
            };
        }
    }
    if spec.measures(Measurement::LocalDicc) {
        let parts: Vec<Ratio> = outcomes.iter().map(|o| o.local.unwrap().0).collect();
        base.local_dicc = Some(CoefficientEstimate::from_parts(&parts));
        let refs: Result<Vec<f64>, _> = outcomes
            .iter()
            .map(|o| dicc_local_limit_ego(params.alpha(), o.local.unwrap().1, &mom))
            .collect();
        match refs {
            Ok(v) => base.theory.local_dicc = Some(v.iter().sum::<f64>() / v.len() as f64),
            Err(e) => diagnostics.push(format!("local dicc limit unavailable: {e}")),
        }
    }
    for (direction, wanted) in [(Direction::Out, Measurement::OutPmf), (Direction::In, Measurement::InPmf)] {
        if !spec.measures(wanted) {
            continue;
        }
        let mut pooled = DegreeHistogram::default();
        for o in &outcomes {
            let h = match direction {
                Direction::Out => o.out_hist.as_ref(),
                Direction::In => o.in_hist.as_ref(),
            };
            pooled.merge(h.expect("histogram recorded"));
        }
        let cmp = compare_degrees(spec, &params, direction, pooled, &mut diagnostics);
        match direction {
            Direction::Out => base.out_degree = Some(cmp),
            Direction::In => base.in_degree = Some(cmp),
        }
    }
    base.diagnostics = diagnostics;
    base
}

/// Runs every grid cell. The result depends only on `spec`: replicate `r`
/// of cell `c` draws from the stream `(master_seed, c, r)` and all
/// aggregation happens in replicate order after the parallel phase.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, EstimatorError> {
    spec.validate()?;
    let cells = spec
        .cells()
        .into_iter()
        .map(|(cell, size, rule)| run_cell(spec, cell, size, rule))
        .collect();
    Ok(ExperimentResult {
        master_seed: spec.master_seed,
        replicates: spec.replicates,
        trcc_estimator: "ordered_distinct_triples".to_string(),
        cells,
    })
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    spec: &ExperimentSpec,
    threads: usize,
) -> Result<ExperimentResult, EstimatorError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| EstimatorError::ThreadPool(e.to_string()))?;
    pool.install(|| run_experiment(spec))
}
