//! Random intersection digraphs built from an actor/attribute fitness model,
//! exact diclique and transitive-closure clustering counts, and the limit
//! laws they are compared against.
//!
//! Pipeline: [`weights`] → [`generator`] (bipartite demand/supply graph) →
//! [`projection`] (actor digraph) → [`motifs`] / [`estimators`], with
//! reference values from [`theory`].

pub mod estimators;
pub mod generator;
pub mod io;
pub mod motifs;
pub mod projection;
pub mod quadrature;
pub mod rng;
pub mod theory;
pub mod weights;

pub use estimators::{
    empirical_degree_pmf, run_experiment, run_experiment_with_threads, total_variation, Direction,
    ExperimentResult, ExperimentSpec,
};
pub use generator::{
    joint_probability, link_probabilities, sample_bipartite, validate_kernel, BipartiteDigraph, ModelParams,
    ReciprocityKernel, SamplingPath,
};
pub use motifs::{brute_force_report, dicc_global, dicc_local, motif_report, trcc_global, MotifReport, Ratio};
pub use projection::{project, Digraph};
pub use rng::StreamKey;
pub use theory::MomentSet;
pub use weights::{Coupling, NodeWeightConfig, WeightDist, WeightSample};
