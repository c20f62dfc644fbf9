//! Exact diclique (bi-fan) and transitive-closure counts.
//!
//! All counts are over ordered tuples of pairwise distinct nodes. Because a
//! [`Digraph`] has no self-loops, most distinctness constraints hold
//! automatically; the remaining overlaps are removed in closed form:
//!
//! * dicliques: `sum over i1 != i2 of c (c - 1)`, `c = |N+(i1) ∩ N+(i2)|`;
//! * open bi-fans: `sum over edges a -> c of (d-(c) - 1)(d+(a) - 1)` minus the
//!   choices with `i2 = i4`, which are exactly the transitive triples;
//! * 2-paths: `sum over b of d-(b) d+(b) - |N-(b) ∩ N+(b)|`;
//! * transitive triples: `sum over edges a -> c of |N+(a) ∩ N-(c)|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::projection::{Digraph, GraphError};

/// Largest graph accepted by the exhaustive counter.
pub const BRUTE_FORCE_MAX_NODES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MotifError {
    #[error("brute-force counting is limited to {BRUTE_FORCE_MAX_NODES} nodes, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Exact ratio of two counts. Undefined when the denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Ratio {
    pub numerator: u128,
    pub denominator: u128,
}

impl Ratio {
    pub fn new(numerator: u128, denominator: u128) -> Self {
        Self { numerator, denominator }
    }

    pub fn value(&self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }
}

impl std::ops::Add for Ratio {
    type Output = Ratio;

    fn add(self, rhs: Ratio) -> Ratio {
        Ratio::new(self.numerator + rhs.numerator, self.denominator + rhs.denominator)
    }
}

/// Raw motif counts and the two global coefficients (`None` = undefined).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotifReport {
    pub diclique_ordered: u128,
    pub open_ordered: u128,
    pub path2_ordered: u128,
    pub transitive_ordered: u128,
    pub dicc: Option<f64>,
    pub trcc: Option<f64>,
}

impl MotifReport {
    pub fn from_counts(diclique: u128, open: u128, path2: u128, transitive: u128) -> Self {
        Self {
            diclique_ordered: diclique,
            open_ordered: open,
            path2_ordered: path2,
            transitive_ordered: transitive,
            dicc: Ratio::new(diclique, open).value(),
            trcc: Ratio::new(transitive, path2).value(),
        }
    }

    pub fn dicc_ratio(&self) -> Ratio {
        Ratio::new(self.diclique_ordered, self.open_ordered)
    }

    pub fn trcc_ratio(&self) -> Ratio {
        Ratio::new(self.transitive_ordered, self.path2_ordered)
    }

    /// Same counts, ignoring the derived floating point fields.
    pub fn same_counts(&self, other: &MotifReport) -> bool {
        self.diclique_ordered == other.diclique_ordered
            && self.open_ordered == other.open_ordered
            && self.path2_ordered == other.path2_ordered
            && self.transitive_ordered == other.transitive_ordered
    }
}

fn intersection_size(a: &[u32], b: &[u32]) -> u128 {
    let (mut i, mut j, mut count) = (0, 0, 0u128);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// `sum over i1 != i2 of c (c - 1)` with `c` the number of shared out-neighbours.
fn count_dicliques(d: &Digraph) -> u128 {
    let n = d.n();
    (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::<u32>::new()),
            |(shared, touched), i1| {
                for &i3 in d.out_neighbors(i1) {
                    for &i2 in d.in_neighbors(i3 as usize) {
                        if i2 as usize == i1 {
                            continue;
                        }
                        if shared[i2 as usize] == 0 {
                            touched.push(i2);
                        }
                        shared[i2 as usize] += 1;
                    }
                }
                let mut total = 0u128;
                for &i2 in touched.iter() {
                    let c = shared[i2 as usize] as u128;
                    total += c * (c - 1);
                    shared[i2 as usize] = 0;
                }
                touched.clear();
                total
            },
        )
        .sum()
}

fn count_transitive(d: &Digraph) -> u128 {
    (0..d.n())
        .into_par_iter()
        .map(|a| {
            d.out_neighbors(a)
                .iter()
                .map(|&c| intersection_size(d.out_neighbors(a), d.in_neighbors(c as usize)))
                .sum::<u128>()
        })
        .sum()
}

fn count_path2(d: &Digraph) -> u128 {
    (0..d.n())
        .map(|b| {
            let (inn, out) = (d.in_neighbors(b), d.out_neighbors(b));
            inn.len() as u128 * out.len() as u128 - intersection_size(inn, out)
        })
        .sum()
}

/// Sum over edges `a -> c` of `(d-(c) - 1)(d+(a) - 1)`.
fn count_open_with_overlaps(d: &Digraph) -> u128 {
    (0..d.n())
        .map(|a| {
            let out_a = d.out_neighbors(a);
            let fan = (out_a.len() as u128).saturating_sub(1);
            out_a
                .iter()
                .map(|&c| (d.in_neighbors(c as usize).len() as u128 - 1) * fan)
                .sum::<u128>()
        })
        .sum()
}

/// All four counts and both global coefficients.
pub fn motif_report(d: &Digraph) -> MotifReport {
    let transitive = count_transitive(d);
    let open = count_open_with_overlaps(d) - transitive;
    MotifReport::from_counts(count_dicliques(d), open, count_path2(d), transitive)
}

/// Global diclique clustering coefficient.
pub fn dicc_global(d: &Digraph) -> (Option<f64>, MotifReport) {
    let report = motif_report(d);
    (report.dicc, report)
}

/// Transitive closure coefficient over ordered distinct triples.
pub fn trcc_global(d: &Digraph) -> (Option<f64>, MotifReport) {
    let report = motif_report(d);
    (report.trcc, report)
}

/// Local diclique counts around `ego`: ordered distinct triples
/// `(i1, i2, i4)` avoiding `ego` with `i1 -> ego`, `i1 -> i4`, `i2 -> ego`,
/// and in the numerator also `i2 -> i4`.
pub fn dicc_local(d: &Digraph, ego: usize) -> Result<Ratio, GraphError> {
    d.check(ego)?;
    let followers = d.in_neighbors(ego);
    let k = followers.len() as u128;
    if k < 2 {
        return Ok(Ratio::default());
    }
    let mut denominator = 0u128;
    let mut shared = std::collections::HashMap::<u32, u128>::new();
    for &i1 in followers {
        let out1 = d.out_neighbors(i1 as usize);
        denominator += (k - 1) * (out1.len() as u128 - 1) - intersection_size(followers, out1);
        for &i4 in out1 {
            if i4 as usize != ego {
                *shared.entry(i4).or_default() += 1;
            }
        }
    }
    let numerator = shared.values().map(|&c| c * c.saturating_sub(1)).sum();
    Ok(Ratio::new(numerator, denominator))
}

/// Exhaustive loops over ordered tuples; test oracle for small graphs.
pub fn brute_force_report(d: &Digraph) -> Result<MotifReport, MotifError> {
    let n = d.n();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(MotifError::TooLarge(n));
    }
    let adj: Vec<Vec<bool>> = (0..n).map(|u| (0..n).map(|v| d.has_edge(u, v)).collect()).collect();
    let (mut diclique, mut open, mut path2, mut transitive) = (0u128, 0u128, 0u128, 0u128);
    for a in 0..n {
        for b in 0..n {
            if b == a {
                continue;
            }
            for c in 0..n {
                if c == a || c == b {
                    continue;
                }
                if adj[a][b] && adj[b][c] {
                    path2 += 1;
                    if adj[a][c] {
                        transitive += 1;
                    }
                }
                for e in 0..n {
                    if e == a || e == b || e == c {
                        continue;
                    }
                    // (i1, i2, i3, i4) = (a, b, c, e)
                    if adj[a][c] && adj[a][e] && adj[b][c] {
                        open += 1;
                        if adj[b][e] {
                            diclique += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(MotifReport::from_counts(diclique, open, path2, transitive))
}
