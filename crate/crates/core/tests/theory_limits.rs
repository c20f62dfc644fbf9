use diclique::estimators::total_variation;
use diclique::rng::StreamKey;
use diclique::theory::{
    dicc_limit, dicc_pair_limit, limit_outdegree_pmf, sample_limit_outdegree, trcc_limit_eps_min, DegreeRole,
    LimitDegreeParams, MomentSet, Regime,
};
use diclique::weights::{Coupling, NodeWeightConfig, WeightDist};
use rand_distr::{Distribution, Poisson};

fn poisson_oracle(lambda: f64, len: usize) -> Vec<f64> {
    let mut pmf = Vec::with_capacity(len);
    let mut term = (-lambda).exp();
    for r in 0..len {
        pmf.push(term);
        term *= lambda / (r + 1) as f64;
    }
    pmf
}

fn histogram(draws: impl Iterator<Item = u64>, len: usize) -> Vec<f64> {
    let mut counts = vec![0u64; len];
    let mut total = 0u64;
    for d in draws {
        total += 1;
        if (d as usize) < len {
            counts[d as usize] += 1;
        }
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

fn unit_nodes() -> NodeWeightConfig {
    let c = WeightDist::constant(1.0).unwrap();
    NodeWeightConfig::new(c, c, Coupling::Independent).unwrap()
}

#[test]
fn attribute_rich_sampler_matches_poisson() {
    let params = LimitDegreeParams {
        regime: Regime::AttributeRich,
        nodes: unit_nodes(),
        z: WeightDist::constant(1.0).unwrap(),
        role: DegreeRole::Out,
    };
    let mut rng = StreamKey::from_seed(1).sequential();
    let emp = histogram((0..1_000_000).map(|_| sample_limit_outdegree(&params, &mut rng).unwrap()), 40);
    let tv = total_variation(&emp, &poisson_oracle(1.0, 40)).unwrap();
    assert!(tv <= 0.005, "TV {tv}");
    let pmf = limit_outdegree_pmf(&params, 40).unwrap().pmf;
    assert!((pmf[0] - (-1.0f64).exp()).abs() < 1e-12);
}

#[test]
fn balanced_sampler_matches_pmf() {
    let params = LimitDegreeParams {
        regime: Regime::Balanced { beta: 1.0 },
        nodes: unit_nodes(),
        z: WeightDist::two_point(0.5, 2.0, 0.6).unwrap(),
        role: DegreeRole::Out,
    };
    let limit = limit_outdegree_pmf(&params, 80).unwrap();
    let mut rng = StreamKey::from_seed(2).sequential();
    let emp = histogram((0..1_000_000).map(|_| sample_limit_outdegree(&params, &mut rng).unwrap()), 81);
    let tv = total_variation(&emp, &limit.pmf).unwrap();
    assert!(tv <= 0.01, "TV {tv}");
}

#[test]
fn balanced_unit_weights_zero_mass() {
    let params = LimitDegreeParams {
        regime: Regime::Balanced { beta: 1.0 },
        nodes: unit_nodes(),
        z: WeightDist::constant(1.0).unwrap(),
        role: DegreeRole::Out,
    };
    let pmf = limit_outdegree_pmf(&params, 60).unwrap().pmf;
    let expected = (-(1.0 - (-1.0f64).exp())).exp();
    assert!((pmf[0] - expected).abs() < 1e-12, "{} vs {expected}", pmf[0]);
    assert!((pmf[0] - 0.531).abs() < 1e-3);
}

#[test]
fn size_biased_draws_match_explicit_pmf() {
    // L2 mixed Poisson with rate c Z, Z two-point.
    let z = WeightDist::two_point(0.5, 3.0, 0.7).unwrap();
    let c = 1.4;
    let len = 60;
    let mut l2 = vec![0.0; len + 1];
    for (value, prob) in [(0.5, 0.7), (3.0, 0.3)] {
        for (acc, p) in l2.iter_mut().zip(poisson_oracle(c * value, len + 1)) {
            *acc += prob * p;
        }
    }
    let mean: f64 = l2.iter().enumerate().map(|(r, p)| r as f64 * p).sum();
    let explicit: Vec<f64> = (0..len).map(|r| (r + 1) as f64 * l2[r + 1] / mean).collect();

    let mut rng = StreamKey::from_seed(3).sequential();
    let draws = (0..1_000_000).map(|_| {
        let zb = z.sample_size_biased(&mut rng).unwrap();
        Poisson::new(c * zb).unwrap().sample(&mut rng) as u64
    });
    let tv = total_variation(&histogram(draws, len), &explicit).unwrap();
    assert!(tv <= 0.01, "TV {tv}");
}

#[test]
fn pmfs_are_normalized() {
    let dists = [
        WeightDist::constant(1.0).unwrap(),
        WeightDist::exponential(1.0).unwrap(),
        WeightDist::pareto(1.0, 3.5).unwrap(),
        WeightDist::two_point(0.5, 2.0, 0.5).unwrap(),
    ];
    for regime in [Regime::Vanishing, Regime::Balanced { beta: 0.7 }, Regime::AttributeRich] {
        for x in dists {
            for z in dists {
                for role in [DegreeRole::Out, DegreeRole::In] {
                    let nodes = NodeWeightConfig::new(x, dists[3], Coupling::Independent).unwrap();
                    let params = LimitDegreeParams { regime, nodes, z, role };
                    let l = limit_outdegree_pmf(&params, 120).unwrap();
                    assert!(l.pmf.iter().all(|&p| p >= 0.0));
                    let sum: f64 = l.pmf.iter().sum();
                    assert!((sum + l.tail_mass - 1.0).abs() < 1e-9, "{params:?}: {sum} + {}", l.tail_mass);
                }
            }
        }
    }
}

#[test]
fn in_degree_swaps_roles() {
    let nodes = NodeWeightConfig::new(
        WeightDist::constant(2.0).unwrap(),
        WeightDist::exponential(1.0).unwrap(),
        Coupling::Independent,
    )
    .unwrap();
    let swapped = NodeWeightConfig::new(nodes.y, nodes.x, Coupling::Independent).unwrap();
    let z = WeightDist::two_point(0.5, 2.0, 0.5).unwrap();
    for regime in [Regime::Balanced { beta: 2.0 }, Regime::AttributeRich] {
        let inn = limit_outdegree_pmf(&LimitDegreeParams { regime, nodes, z, role: DegreeRole::In }, 50).unwrap();
        let out = limit_outdegree_pmf(&LimitDegreeParams { regime, nodes: swapped, z, role: DegreeRole::Out }, 50)
            .unwrap();
        assert_eq!(inn, out);
    }
}

fn moment_sets() -> Vec<MomentSet> {
    let e = WeightDist::exponential(1.0).unwrap();
    let p = WeightDist::pareto(1.0, 5.0).unwrap();
    let t = WeightDist::two_point(0.5, 2.0, 0.5).unwrap();
    vec![
        MomentSet::unit(),
        MomentSet::from_distributions(&NodeWeightConfig::new(e, p, Coupling::Independent).unwrap(), &t),
        MomentSet::from_distributions(&NodeWeightConfig::new(t, e, Coupling::Comonotone).unwrap(), &p),
    ]
}

#[test]
fn dicc_limit_decreasing_in_alpha() {
    for mom in moment_sets() {
        let values: Vec<f64> = (0..=40).map(|i| dicc_limit(0.1 * i as f64, &mom).unwrap()).collect();
        assert_eq!(values[0], 1.0);
        assert!(values.iter().all(|&v| v > 0.0 && v <= 1.0));
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{mom:?}");
    }
}

#[test]
fn unit_moments_reduce_to_square() {
    let mom = MomentSet::unit();
    for alpha in [0.25, 0.5, 1.0, 4.0, 16.0] {
        let expected = 1.0 / ((1.0 + alpha) * (1.0 + alpha));
        assert!((dicc_limit(alpha, &mom).unwrap() - expected).abs() < 1e-14);
    }
    assert!(dicc_limit(1e3, &mom).unwrap() < 1e-3);
}

#[test]
fn pair_limit_factorizes_for_constant_attributes() {
    for zc in [0.5f64, 1.0, 2.0] {
        let z = [zc, zc * zc, zc.powi(3), zc.powi(4)];
        for x1 in [0.1, 0.5, 1.0, 2.0, 5.0] {
            for y3 in [0.2, 0.7, 1.0, 3.0, 10.0] {
                for alpha in [0.25, 1.0, 4.0] {
                    let got = dicc_pair_limit(alpha, x1, y3, &z).unwrap();
                    let expected = 1.0 / ((1.0 + alpha * zc * x1) * (1.0 + alpha * zc * y3));
                    assert!((got - expected).abs() <= 1e-12, "z {zc} x1 {x1} y3 {y3} alpha {alpha}");
                }
            }
        }
    }
}

#[test]
fn transitivity_limit_examples() {
    let mom = MomentSet::unit();
    let cases = [(1.0, 1.0, 0.5), (1.0, 0.5, 1.0 / 3.0), (4.0, 1.0, 1.0 / 3.0)];
    for (beta, eps, expected) in cases {
        assert!((trcc_limit_eps_min(beta, eps, &mom).unwrap() - expected).abs() < 1e-14);
    }
    let zero_min = MomentSet { cross_min: 0.0, ..mom };
    assert!(trcc_limit_eps_min(1.0, 1.0, &zero_min).is_err());
}
