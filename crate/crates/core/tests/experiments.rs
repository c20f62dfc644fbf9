use diclique::estimators::{
    empirical_degree_pmf, run_experiment, run_experiment_with_threads, total_variation, DegreeOptions, Direction,
    EgoPolicy, EstimatorError, ExperimentSpec, GammaRule, GridSize, Measurement,
};
use diclique::generator::{ReciprocityKernel, SamplingPath};
use diclique::motifs::motif_report;
use diclique::projection::Digraph;
use diclique::rng::StreamKey;
use diclique::weights::{Coupling, NodeWeightConfig, WeightDist};
use rand::Rng;

fn spec(sizes: Vec<GridSize>, gamma: Vec<GammaRule>, replicates: u32) -> ExperimentSpec {
    let c = WeightDist::constant(1.0).unwrap();
    ExperimentSpec {
        sizes,
        gamma,
        nodes: NodeWeightConfig::new(c, c, Coupling::Independent).unwrap(),
        z: c,
        kernel: ReciprocityKernel::IndependentProduct,
        replicates,
        master_seed: 2024,
        measurements: vec![Measurement::Dicc, Measurement::Trcc],
        ego_policy: EgoPolicy::MaxInDegree,
        sampling: SamplingPath::Direct,
        degree: DegreeOptions::default(),
    }
}

#[test]
fn uniform_quadruple_frequency_matches_dicc() {
    let n = 10;
    let mut rng = StreamKey::from_seed(31).sequential();
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v).collect();
    let edges: Vec<(usize, usize)> = edges.into_iter().filter(|_| rng.random::<f64>() < 0.45).collect();
    let d = Digraph::from_edges(n, &edges).unwrap();
    let dicc = motif_report(&d).dicc.unwrap();

    let (mut open, mut closed) = (0u64, 0u64);
    for _ in 0..1_000_000 {
        let mut q = [0usize; 4];
        for s in 0..4 {
            q[s] = loop {
                let v = rng.random_range(0..n);
                if !q[..s].contains(&v) {
                    break v;
                }
            };
        }
        let [i1, i2, i3, i4] = q;
        if d.has_edge(i1, i3) && d.has_edge(i1, i4) && d.has_edge(i2, i3) {
            open += 1;
            closed += d.has_edge(i2, i4) as u64;
        }
    }
    let freq = closed as f64 / open as f64;
    let se = (dicc * (1.0 - dicc) / open as f64).sqrt();
    assert!((freq - dicc).abs() <= 4.0 * se, "{freq} vs {dicc} (se {se})");
}

#[test]
fn saturated_cell() {
    let mut s = spec(vec![GridSize { n: 4, m: 4 }], vec![GammaRule::Fixed(1.0)], 1);
    s.measurements.push(Measurement::LocalDicc);
    let res = run_experiment(&s).unwrap();
    let cell = &res.cells[0];
    assert!(cell.completed);
    assert_eq!(cell.dicc.as_ref().unwrap().pooled, Some(1.0));
    assert_eq!(cell.trcc.as_ref().unwrap().pooled, Some(1.0));
}

#[test]
fn pooled_lies_between_replicate_extremes() {
    let s = spec(
        vec![GridSize { n: 60, m: 60 }, GridSize { n: 150, m: 100 }],
        vec![GammaRule::AlphaOverM(0.5), GammaRule::AlphaOverM(2.0), GammaRule::Sparse],
        12,
    );
    for cell in run_experiment(&s).unwrap().cells {
        for est in [cell.dicc.unwrap(), cell.trcc.unwrap()] {
            if let Some(p) = est.pooled {
                let (lo, hi) = (est.replicate_min.unwrap(), est.replicate_max.unwrap());
                assert!(lo <= p && p <= hi, "{p} outside [{lo}, {hi}]");
            }
        }
    }
}

#[test]
fn doubling_replicates_shrinks_standard_error() {
    let sizes = vec![GridSize { n: 200, m: 200 }, GridSize { n: 300, m: 300 }];
    let gamma = vec![
        GammaRule::AlphaOverM(0.5),
        GammaRule::AlphaOverM(1.0),
        GammaRule::AlphaOverM(2.0),
        GammaRule::AlphaOverM(3.0),
    ];
    let mut ratios = Vec::new();
    for seed in 0..3 {
        let mut small = spec(sizes.clone(), gamma.clone(), 25);
        small.master_seed = seed;
        let mut large = small.clone();
        large.replicates = 50;
        let (a, b) = (run_experiment(&small).unwrap(), run_experiment(&large).unwrap());
        for (ca, cb) in a.cells.iter().zip(&b.cells) {
            let sa = ca.dicc.as_ref().unwrap().std_error.unwrap();
            let sb = cb.dicc.as_ref().unwrap().std_error.unwrap();
            ratios.push(sb / sa);
        }
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let target = std::f64::consts::FRAC_1_SQRT_2;
    assert!((mean - target).abs() <= 0.15, "mean ratio {mean}");
}

#[test]
fn results_independent_of_thread_count() {
    let mut s = spec(
        vec![GridSize { n: 120, m: 90 }],
        vec![GammaRule::Sparse, GammaRule::AlphaOverM(1.0)],
        6,
    );
    s.measurements = vec![
        Measurement::Dicc,
        Measurement::Trcc,
        Measurement::LocalDicc,
        Measurement::OutPmf,
        Measurement::InPmf,
    ];
    let reference = serde_json::to_string(&run_experiment_with_threads(&s, 1).unwrap()).unwrap();
    for threads in [2, 8] {
        let again = serde_json::to_string(&run_experiment_with_threads(&s, threads).unwrap()).unwrap();
        assert_eq!(again, reference, "{threads} threads");
    }
    assert_eq!(serde_json::to_string(&run_experiment(&s).unwrap()).unwrap(), reference);
}

#[test]
fn invalid_specs_are_rejected() {
    let s = spec(vec![GridSize { n: 4, m: 4 }], vec![GammaRule::Sparse], 0);
    assert!(matches!(run_experiment(&s), Err(EstimatorError::InvalidSpec(_))));
    let s = spec(vec![], vec![GammaRule::Sparse], 1);
    assert!(matches!(run_experiment(&s), Err(EstimatorError::InvalidSpec(_))));
}

#[test]
fn kernel_violation_marks_cell_incomplete() {
    let mut s = spec(vec![GridSize { n: 5, m: 5 }], vec![GammaRule::Fixed(2.0), GammaRule::Fixed(0.01)], 2);
    s.kernel = ReciprocityKernel::epsilon_min(0.5).unwrap();
    let res = run_experiment(&s).unwrap();
    assert!(!res.cells[0].completed);
    assert!(res.cells[0].dicc.is_none());
    assert!(!res.cells[0].diagnostics.is_empty());
    assert!(res.cells[1].completed);
    assert!(!res.all_completed());
}

#[test]
fn degree_pmf_examples() {
    assert_eq!(empirical_degree_pmf(&Digraph::empty(4), Direction::Out), vec![1.0]);
    let k3 = Digraph::complete(3);
    assert_eq!(empirical_degree_pmf(&k3, Direction::Out), vec![0.0, 0.0, 1.0]);
    assert_eq!(empirical_degree_pmf(&k3, Direction::In), vec![0.0, 0.0, 1.0]);
    let star = Digraph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
    assert_eq!(empirical_degree_pmf(&star, Direction::Out), vec![2.0 / 3.0, 0.0, 1.0 / 3.0]);
}

#[test]
fn total_variation_examples() {
    assert_eq!(total_variation(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
    assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
    assert_eq!(total_variation(&[0.5, 0.5], &[1.0]).unwrap(), 0.5);
    assert!(total_variation(&[-0.1, 1.1], &[1.0]).is_err());
}
