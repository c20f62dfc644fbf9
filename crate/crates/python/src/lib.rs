//! Python bindings: `import diclique`.

use diclique::estimators::{self, ExperimentSpec};
use diclique::generator::{self, ModelParams, ReciprocityKernel, SamplingPath};
use diclique::io::{self, GraphFile};
use diclique::motifs::{self, MotifReport};
use diclique::projection::{self, Digraph};
use diclique::rng::{StreamKey, StreamTag};
use diclique::theory::{self, DegreeRole, LimitDegreeParams, MomentSet, Regime};
use diclique::weights::{Coupling, NodeWeightConfig, WeightDist, WeightSample};
use diclique::BipartiteDigraph;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Parses a snake_case enum name such as `"comonotone"` or `"in"`.
fn parse_name<T: serde::de::DeserializeOwned>(what: &str, name: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|_| PyValueError::new_err(format!("unknown {what} `{name}`")))
}

#[pyclass(name = "WeightDist", module = "diclique", frozen, from_py_object)]
#[derive(Clone)]
struct PyWeightDist(WeightDist);

#[pymethods]
impl PyWeightDist {
    #[staticmethod]
    fn constant(value: f64) -> PyResult<Self> {
        WeightDist::constant(value).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn exponential(rate: f64) -> PyResult<Self> {
        WeightDist::exponential(rate).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn pareto(scale: f64, tail_index: f64) -> PyResult<Self> {
        WeightDist::pareto(scale, tail_index).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn two_point(v1: f64, v2: f64, prob_v1: f64) -> PyResult<Self> {
        WeightDist::two_point(v1, v2, prob_v1).map(Self).map_err(value_err)
    }

    /// `E W^order`; `inf` when divergent.
    fn moment(&self, order: u32) -> f64 {
        self.0.moment(order)
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn quantile(&self, u: f64) -> f64 {
        self.0.quantile(u)
    }

    /// `size` i.i.d. draws from the stream of `seed`.
    fn sample(&self, size: usize, seed: u64) -> Vec<f64> {
        let key = StreamKey::from_seed(seed).derive(StreamTag::Auxiliary, 0);
        (0..size as u64).map(|i| self.0.quantile(key.uniform_at(i))).collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("serializable")
    }

    fn __repr__(&self) -> String {
        format!("WeightDist({})", self.to_json())
    }
}

#[pyclass(name = "ReciprocityKernel", module = "diclique", frozen, from_py_object)]
#[derive(Clone)]
struct PyKernel(ReciprocityKernel);

#[pymethods]
impl PyKernel {
    #[staticmethod]
    fn independent_product() -> Self {
        Self(ReciprocityKernel::IndependentProduct)
    }

    #[staticmethod]
    fn epsilon_min(epsilon: f64) -> PyResult<Self> {
        ReciprocityKernel::epsilon_min(epsilon).map(Self).map_err(value_err)
    }

    fn joint_probability(&self, x: f64, y: f64, z: f64, gamma: f64) -> f64 {
        generator::joint_probability(self.0, x, y, z, gamma)
    }

    fn __repr__(&self) -> String {
        format!("ReciprocityKernel({})", serde_json::to_string(&self.0).expect("serializable"))
    }
}

/// `(p, q)` demand and supply probabilities.
#[pyfunction]
fn link_probabilities(x: f64, y: f64, z: f64, gamma: f64) -> (f64, f64) {
    generator::link_probabilities(x, y, z, gamma)
}

/// Whether `max(p + q - 1, 0) <= r <= min(p, q)`.
#[pyfunction]
fn validate_kernel(p: f64, q: f64, r: f64) -> bool {
    generator::validate_kernel(p, q, r).is_ok()
}

#[pyclass(name = "MotifReport", module = "diclique", frozen, get_all)]
struct PyMotifReport {
    diclique_ordered: u128,
    open_ordered: u128,
    path2_ordered: u128,
    transitive_ordered: u128,
    dicc: Option<f64>,
    trcc: Option<f64>,
}

impl From<MotifReport> for PyMotifReport {
    fn from(r: MotifReport) -> Self {
        Self {
            diclique_ordered: r.diclique_ordered,
            open_ordered: r.open_ordered,
            path2_ordered: r.path2_ordered,
            transitive_ordered: r.transitive_ordered,
            dicc: r.dicc,
            trcc: r.trcc,
        }
    }
}

#[pymethods]
impl PyMotifReport {
    fn __repr__(&self) -> String {
        format!(
            "MotifReport(diclique_ordered={}, open_ordered={}, path2_ordered={}, transitive_ordered={}, dicc={:?}, trcc={:?})",
            self.diclique_ordered, self.open_ordered, self.path2_ordered, self.transitive_ordered, self.dicc, self.trcc
        )
    }
}

#[pyclass(name = "Digraph", module = "diclique", frozen)]
struct PyDigraph(Digraph);

#[pymethods]
impl PyDigraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Digraph::from_edges(n, &edges).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        match io::parse_graph(text).map_err(value_err)? {
            GraphFile::Digraph(d) => Ok(Self(d)),
            GraphFile::Bipartite(h) => Ok(Self(projection::project(&h))),
        }
    }

    fn to_text(&self) -> String {
        io::write_digraph(&self.0)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().collect()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.0.has_edge(u, v)
    }

    fn out_neighbors(&self, i: usize) -> PyResult<Vec<u32>> {
        self.0.out_degree(i).map_err(value_err)?;
        Ok(self.0.out_neighbors(i).to_vec())
    }

    fn in_neighbors(&self, i: usize) -> PyResult<Vec<u32>> {
        self.0.in_degree(i).map_err(value_err)?;
        Ok(self.0.in_neighbors(i).to_vec())
    }

    fn out_degree(&self, i: usize) -> PyResult<usize> {
        self.0.out_degree(i).map_err(value_err)
    }

    fn in_degree(&self, i: usize) -> PyResult<usize> {
        self.0.in_degree(i).map_err(value_err)
    }

    fn motif_report(&self) -> PyMotifReport {
        motifs::motif_report(&self.0).into()
    }

    fn dicc(&self) -> Option<f64> {
        motifs::dicc_global(&self.0).0
    }

    fn trcc(&self) -> Option<f64> {
        motifs::trcc_global(&self.0).0
    }

    /// `(numerator, denominator, value)`; `value` is `None` when undefined.
    fn dicc_local(&self, ego: usize) -> PyResult<(u128, u128, Option<f64>)> {
        let r = motifs::dicc_local(&self.0, ego).map_err(value_err)?;
        Ok((r.numerator, r.denominator, r.value()))
    }

    #[pyo3(signature = (direction = "out"))]
    fn degree_pmf(&self, direction: &str) -> PyResult<Vec<f64>> {
        Ok(estimators::empirical_degree_pmf(&self.0, parse_name("direction", direction)?))
    }

    fn __repr__(&self) -> String {
        format!("Digraph(n={}, edges={})", self.0.n(), self.0.edge_count())
    }
}

#[pyclass(name = "BipartiteDigraph", module = "diclique", frozen)]
struct PyBipartite(BipartiteDigraph);

#[pymethods]
impl PyBipartite {
    /// `demand` holds `(actor, attribute)` pairs, `supply` holds `(attribute, actor)` pairs.
    #[new]
    fn new(n: usize, m: usize, demand: Vec<(usize, usize)>, supply: Vec<(usize, usize)>) -> PyResult<Self> {
        BipartiteDigraph::from_links(n, m, &demand, &supply).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        match io::parse_graph(text).map_err(value_err)? {
            GraphFile::Bipartite(h) => Ok(Self(h)),
            GraphFile::Digraph(_) => Err(PyValueError::new_err("expected a bipartite file")),
        }
    }

    fn to_text(&self) -> String {
        io::write_bipartite(&self.0)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    fn demand_links(&self) -> Vec<(usize, usize)> {
        self.0.demand_links().collect()
    }

    fn supply_links(&self) -> Vec<(usize, usize)> {
        self.0.supply_links().collect()
    }

    fn project(&self) -> PyDigraph {
        PyDigraph(projection::project(&self.0))
    }

    fn __repr__(&self) -> String {
        format!(
            "BipartiteDigraph(n={}, m={}, demand={}, supply={})",
            self.0.n(),
            self.0.m(),
            self.0.demand_count(),
            self.0.supply_count()
        )
    }
}

/// `(xy, z)` weight vectors.
type Weights = (Vec<(f64, f64)>, Vec<f64>);

fn node_config(x: &PyWeightDist, y: &PyWeightDist, coupling: &str) -> PyResult<NodeWeightConfig> {
    NodeWeightConfig::new(x.0, y.0, parse_name::<Coupling>("coupling", coupling)?).map_err(value_err)
}

/// Samples one instance; returns `(bipartite, projection)`.
#[pyfunction]
#[pyo3(signature = (n, m, gamma, x, y, z, kernel = None, seed = 0, coupling = "independent", sampling = "direct"))]
#[allow(clippy::too_many_arguments)]
fn generate(
    py: Python<'_>,
    n: usize,
    m: usize,
    gamma: f64,
    x: PyRef<'_, PyWeightDist>,
    y: PyRef<'_, PyWeightDist>,
    z: PyRef<'_, PyWeightDist>,
    kernel: Option<PyRef<'_, PyKernel>>,
    seed: u64,
    coupling: &str,
    sampling: &str,
) -> PyResult<(PyBipartite, PyDigraph)> {
    let params = ModelParams::new(n, m, gamma).map_err(value_err)?;
    let nodes = node_config(&x, &y, coupling)?;
    let kernel = kernel.map_or(ReciprocityKernel::IndependentProduct, |k| k.0);
    let path: SamplingPath = parse_name("sampling path", sampling)?;
    let z = z.0;
    let inst = py
        .detach(|| estimators::generate_instance(&params, &nodes, &z, kernel, path, StreamKey::from_seed(seed)))
        .map_err(value_err)?;
    Ok((PyBipartite(inst.bipartite), PyDigraph(inst.digraph)))
}

/// Sampled weights `(xy, z)` for one seed, as used by [`generate`].
#[pyfunction]
#[pyo3(signature = (n, m, x, y, z, seed = 0, coupling = "independent"))]
fn sample_weights(
    n: usize,
    m: usize,
    x: PyRef<'_, PyWeightDist>,
    y: PyRef<'_, PyWeightDist>,
    z: PyRef<'_, PyWeightDist>,
    seed: u64,
    coupling: &str,
) -> PyResult<Weights> {
    let nodes = node_config(&x, &y, coupling)?;
    let w = WeightSample::draw(&nodes, &z.0, n, m, StreamKey::from_seed(seed)).map_err(value_err)?;
    Ok((w.xy().to_vec(), w.z().to_vec()))
}

#[pyclass(name = "MomentSet", module = "diclique", frozen, get_all, from_py_object)]
#[derive(Clone)]
struct PyMomentSet {
    x: [f64; 3],
    y: [f64; 3],
    z: [f64; 4],
    cross_xy: f64,
    cross_min: f64,
}

impl PyMomentSet {
    fn inner(&self) -> MomentSet {
        MomentSet { x: self.x, y: self.y, z: self.z, cross_xy: self.cross_xy, cross_min: self.cross_min }
    }
}

impl From<MomentSet> for PyMomentSet {
    fn from(m: MomentSet) -> Self {
        Self { x: m.x, y: m.y, z: m.z, cross_xy: m.cross_xy, cross_min: m.cross_min }
    }
}

#[pymethods]
impl PyMomentSet {
    #[new]
    fn new(x: [f64; 3], y: [f64; 3], z: [f64; 4], cross_xy: f64, cross_min: f64) -> PyResult<Self> {
        let m = MomentSet { x, y, z, cross_xy, cross_min };
        m.check_consistency().map_err(value_err)?;
        Ok(m.into())
    }

    #[staticmethod]
    fn unit() -> Self {
        MomentSet::unit().into()
    }

    #[staticmethod]
    #[pyo3(signature = (x, y, z, coupling = "independent"))]
    fn from_distributions(
        x: PyRef<'_, PyWeightDist>,
        y: PyRef<'_, PyWeightDist>,
        z: PyRef<'_, PyWeightDist>,
        coupling: &str,
    ) -> PyResult<Self> {
        Ok(MomentSet::from_distributions(&node_config(&x, &y, coupling)?, &z.0).into())
    }

    fn __repr__(&self) -> String {
        format!(
            "MomentSet(x={:?}, y={:?}, z={:?}, cross_xy={}, cross_min={})",
            self.x, self.y, self.z, self.cross_xy, self.cross_min
        )
    }
}

#[pyfunction]
fn dicc_limit(alpha: f64, moments: PyRef<'_, PyMomentSet>) -> PyResult<f64> {
    theory::dicc_limit(alpha, &moments.inner()).map_err(value_err)
}

#[pyfunction]
fn dicc_local_limit_ego(alpha: f64, y3: f64, moments: PyRef<'_, PyMomentSet>) -> PyResult<f64> {
    theory::dicc_local_limit_ego(alpha, y3, &moments.inner()).map_err(value_err)
}

#[pyfunction]
fn dicc_pair_limit(alpha: f64, x1: f64, y3: f64, z: [f64; 4]) -> PyResult<f64> {
    theory::dicc_pair_limit(alpha, x1, y3, &z).map_err(value_err)
}

#[pyfunction]
fn trcc_limit_independent() -> f64 {
    theory::trcc_limit_independent()
}

#[pyfunction]
fn trcc_limit_eps_min(beta: f64, epsilon: f64, moments: PyRef<'_, PyMomentSet>) -> PyResult<f64> {
    theory::trcc_limit_eps_min(beta, epsilon, &moments.inner()).map_err(value_err)
}

#[allow(clippy::too_many_arguments)]
fn limit_params(
    regime: &str,
    x: &PyWeightDist,
    y: &PyWeightDist,
    z: &PyWeightDist,
    beta: Option<f64>,
    role: &str,
    coupling: &str,
) -> PyResult<LimitDegreeParams> {
    let regime = match (regime, beta) {
        ("vanishing", _) => Regime::Vanishing,
        ("attribute_rich", _) => Regime::AttributeRich,
        ("balanced", Some(beta)) => Regime::Balanced { beta },
        ("balanced", None) => return Err(PyValueError::new_err("the balanced regime needs beta")),
        (other, _) => return Err(PyValueError::new_err(format!("unknown regime `{other}`"))),
    };
    Ok(LimitDegreeParams {
        regime,
        nodes: node_config(x, y, coupling)?,
        z: z.0,
        role: parse_name::<DegreeRole>("role", role)?,
    })
}

/// Limit degree pmf on `0..=r_max`; returns `(pmf, tail_mass)`.
#[pyfunction]
#[pyo3(signature = (regime, x, y, z, beta = None, role = "out", r_max = 60, coupling = "independent"))]
#[allow(clippy::too_many_arguments)]
fn limit_outdegree_pmf(
    regime: &str,
    x: PyRef<'_, PyWeightDist>,
    y: PyRef<'_, PyWeightDist>,
    z: PyRef<'_, PyWeightDist>,
    beta: Option<f64>,
    role: &str,
    r_max: usize,
    coupling: &str,
) -> PyResult<(Vec<f64>, f64)> {
    let params = limit_params(regime, &x, &y, &z, beta, role, coupling)?;
    let l = theory::limit_outdegree_pmf(&params, r_max).map_err(value_err)?;
    Ok((l.pmf, l.tail_mass))
}

/// `size` draws from the limit degree law.
#[pyfunction]
#[pyo3(signature = (regime, x, y, z, size, seed = 0, beta = None, role = "out", coupling = "independent"))]
#[allow(clippy::too_many_arguments)]
fn sample_limit_outdegree(
    regime: &str,
    x: PyRef<'_, PyWeightDist>,
    y: PyRef<'_, PyWeightDist>,
    z: PyRef<'_, PyWeightDist>,
    size: usize,
    seed: u64,
    beta: Option<f64>,
    role: &str,
    coupling: &str,
) -> PyResult<Vec<u64>> {
    let params = limit_params(regime, &x, &y, &z, beta, role, coupling)?;
    let mut rng = StreamKey::from_seed(seed).derive(StreamTag::Limit, 0).sequential();
    (0..size)
        .map(|_| theory::sample_limit_outdegree(&params, &mut rng).map_err(value_err))
        .collect()
}

#[pyfunction]
fn total_variation(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    estimators::total_variation(&p, &q).map_err(value_err)
}

/// Runs an experiment described by a JSON spec and returns the JSON result.
#[pyfunction]
#[pyo3(signature = (spec_json, threads = None))]
fn run_experiment(py: Python<'_>, spec_json: &str, threads: Option<usize>) -> PyResult<String> {
    let spec: ExperimentSpec = serde_json::from_str(spec_json).map_err(value_err)?;
    let result = py
        .detach(|| match threads {
            Some(k) => estimators::run_experiment_with_threads(&spec, k),
            None => estimators::run_experiment(&spec),
        })
        .map_err(value_err)?;
    Ok(serde_json::to_string(&result).expect("serializable"))
}

#[pymodule]
#[pyo3(name = "diclique")]
fn py_diclique(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeightDist>()?;
    m.add_class::<PyKernel>()?;
    m.add_class::<PyMotifReport>()?;
    m.add_class::<PyDigraph>()?;
    m.add_class::<PyBipartite>()?;
    m.add_class::<PyMomentSet>()?;
    m.add_function(wrap_pyfunction!(link_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(validate_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_weights, m)?)?;
    m.add_function(wrap_pyfunction!(dicc_limit, m)?)?;
    m.add_function(wrap_pyfunction!(dicc_local_limit_ego, m)?)?;
    m.add_function(wrap_pyfunction!(dicc_pair_limit, m)?)?;
    m.add_function(wrap_pyfunction!(trcc_limit_independent, m)?)?;
    m.add_function(wrap_pyfunction!(trcc_limit_eps_min, m)?)?;
    m.add_function(wrap_pyfunction!(limit_outdegree_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(sample_limit_outdegree, m)?)?;
    m.add_function(wrap_pyfunction!(total_variation, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
