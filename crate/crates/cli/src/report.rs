//! Tabular and JSON renderings of results. `null` marks undefined values.

use std::fmt::Write as _;

use diclique::estimators::{CellResult, CoefficientEstimate, DegreeComparison, ExperimentResult};
use diclique::motifs::{MotifReport, Ratio};
use diclique::theory::Regime;
use serde::Serialize;

pub fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x}"),
        _ => "null".to_string(),
    }
}

fn difference(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

pub const EXPERIMENT_COLUMNS: &[&str] = &[
    "cell",
    "n",
    "m",
    "gamma",
    "alpha",
    "beta",
    "replicates",
    "seed",
    "completed",
    "dicc",
    "dicc_se",
    "dicc_theory",
    "dicc_deviation",
    "dicc_numerator",
    "dicc_denominator",
    "trcc",
    "trcc_se",
    "trcc_theory",
    "trcc_deviation",
    "trcc_numerator",
    "trcc_denominator",
    "local_dicc",
    "local_dicc_se",
    "local_dicc_theory",
    "local_dicc_deviation",
    "ego_policy",
    "out_tv",
    "out_zero_fraction",
    "in_tv",
    "in_zero_fraction",
];

fn estimate_fields(row: &mut Vec<String>, est: Option<&CoefficientEstimate>, theory: Option<f64>, counts: bool) {
    let pooled = est.and_then(|e| e.pooled);
    row.push(num(pooled));
    row.push(num(est.and_then(|e| e.std_error)));
    row.push(num(theory));
    row.push(num(difference(pooled, theory)));
    if counts {
        row.push(est.map_or("null".into(), |e| e.numerator.to_string()));
        row.push(est.map_or("null".into(), |e| e.denominator.to_string()));
    }
}

fn experiment_row(c: &CellResult) -> Vec<String> {
    let mut row = vec![
        c.cell.to_string(),
        c.n.to_string(),
        c.m.to_string(),
        num(Some(c.gamma)),
        num(Some(c.alpha)),
        num(Some(c.beta)),
        c.replicates.to_string(),
        c.seed.to_string(),
        c.completed.to_string(),
    ];
    estimate_fields(&mut row, c.dicc.as_ref(), c.theory.dicc, true);
    estimate_fields(&mut row, c.trcc.as_ref(), c.theory.trcc, true);
    estimate_fields(&mut row, c.local_dicc.as_ref(), c.theory.local_dicc, false);
    row.push(serde_json::to_value(c.ego_policy).unwrap().as_str().unwrap().to_string());
    for d in [&c.out_degree, &c.in_degree] {
        row.push(num(d.as_ref().and_then(|d| d.tv)));
        row.push(num(d.as_ref().map(|d| d.zero_fraction)));
    }
    row
}

fn csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn experiment_csv(res: &ExperimentResult) -> String {
    csv(EXPERIMENT_COLUMNS, res.cells.iter().map(experiment_row))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn regime_name(r: &Regime) -> &'static str {
    match r {
        Regime::Vanishing => "vanishing",
        Regime::Balanced { .. } => "balanced",
        Regime::AttributeRich => "attribute_rich",
    }
}

fn direction_name(d: &DegreeComparison) -> String {
    serde_json::to_value(d.direction).unwrap().as_str().unwrap().to_string()
}

fn comparisons(res: &ExperimentResult) -> impl Iterator<Item = (&CellResult, &DegreeComparison)> {
    res.cells
        .iter()
        .flat_map(|c| [c.out_degree.as_ref(), c.in_degree.as_ref()].into_iter().flatten().map(move |d| (c, d)))
}

pub const DEGREE_SUMMARY_COLUMNS: &[&str] = &[
    "cell",
    "n",
    "m",
    "beta",
    "replicates",
    "completed",
    "direction",
    "regime",
    "pooled_nodes",
    "tv",
    "zero_fraction",
    "limit_tail_mass",
    "limit_truncation",
];

pub fn degree_summary_csv(res: &ExperimentResult) -> String {
    let rows = comparisons(res).map(|(c, d)| {
        vec![
            c.cell.to_string(),
            c.n.to_string(),
            c.m.to_string(),
            num(Some(c.beta)),
            c.replicates.to_string(),
            c.completed.to_string(),
            direction_name(d),
            regime_name(&d.regime).to_string(),
            d.histogram.total().to_string(),
            num(d.tv),
            num(Some(d.zero_fraction)),
            num(d.limit.as_ref().map(|l| l.tail_mass)),
            num(d.limit.as_ref().map(|l| l.mixing_truncation)),
        ]
    });
    csv(DEGREE_SUMMARY_COLUMNS, rows)
}

pub const DEGREE_PMF_COLUMNS: &[&str] = &["cell", "direction", "r", "empirical", "limit"];

pub fn degree_pmf_csv(res: &ExperimentResult) -> String {
    let mut out = DEGREE_PMF_COLUMNS.join(",");
    out.push('\n');
    for (c, d) in comparisons(res) {
        let limit = d.limit.as_ref().map(|l| l.pmf.as_slice()).unwrap_or(&[]);
        let len = d.empirical.len().max(limit.len());
        let dir = direction_name(d);
        for r in 0..len {
            let emp = d.empirical.get(r).copied().unwrap_or(0.0);
            writeln!(out, "{},{dir},{r},{},{}", c.cell, num(Some(emp)), num(limit.get(r).copied())).unwrap();
        }
    }
    out
}

/// Counts and coefficients of one graph, optionally with a local ratio.
#[derive(Clone, Debug, Serialize)]
pub struct CoeffReport {
    pub n: usize,
    pub edges: usize,
    #[serde(flatten)]
    pub motifs: MotifReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalReport {
    pub ego: usize,
    pub numerator: u128,
    pub denominator: u128,
    pub dicc: Option<f64>,
}

impl LocalReport {
    pub fn new(ego: usize, r: Ratio) -> Self {
        Self { ego, numerator: r.numerator, denominator: r.denominator, dicc: r.value() }
    }
}

pub const COEFF_COLUMNS: &[&str] = &[
    "n",
    "edges",
    "diclique_ordered",
    "open_ordered",
    "path2_ordered",
    "transitive_ordered",
    "dicc",
    "trcc",
    "ego",
    "local_numerator",
    "local_denominator",
    "local_dicc",
];

pub fn coeff_csv(r: &CoeffReport) -> String {
    let m = &r.motifs;
    let mut row = vec![
        r.n.to_string(),
        r.edges.to_string(),
        m.diclique_ordered.to_string(),
        m.open_ordered.to_string(),
        m.path2_ordered.to_string(),
        m.transitive_ordered.to_string(),
        num(m.dicc),
        num(m.trcc),
    ];
    match &r.local {
        Some(l) => row.extend([
            l.ego.to_string(),
            l.numerator.to_string(),
            l.denominator.to_string(),
            num(l.dicc),
        ]),
        None => row.extend(std::iter::repeat_n("null".to_string(), 4)),
    }
    csv(COEFF_COLUMNS, std::iter::once(row))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_plain_decimals() {
        assert_eq!(num(Some(0.25)), "0.25");
        assert_eq!(num(Some(1.0)), "1");
        assert_eq!(num(Some(1e-7)), "0.0000001");
        assert_eq!(num(None), "null");
        assert_eq!(num(Some(f64::NAN)), "null");
    }

    #[test]
    fn coeff_csv_has_fixed_columns() {
        let r = CoeffReport { n: 3, edges: 0, motifs: MotifReport::from_counts(0, 0, 0, 0), local: None };
        let text = coeff_csv(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0].split(',').count(), COEFF_COLUMNS.len());
        assert_eq!(lines[1], "3,0,0,0,0,0,null,null,null,null,null,null");
    }
}
