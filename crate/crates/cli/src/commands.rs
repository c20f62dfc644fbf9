use std::path::{Path, PathBuf};

use diclique::estimators::{generate_instance, run_experiment, ExperimentResult};
use diclique::io::{parse_graph, write_bipartite, write_digraph, GraphFile};
use diclique::motifs::{dicc_local, motif_report};
use diclique::projection::{project, Digraph};
use diclique::weights::WeightSample;
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::report::{self, CoeffReport, LocalReport};

/// Flags shared by every command; each overrides the matching config field.
#[derive(Clone, Debug, Default)]
pub struct GlobalOpts {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl GlobalOpts {
    fn format(&self, cfg: Option<&RunConfig>) -> Format {
        self.format.or_else(|| cfg.and_then(|c| c.output.format)).unwrap_or_default()
    }

    fn out_dir(&self, cfg: Option<&RunConfig>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.and_then(|c| c.output.dir.clone()))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn apply(&self, mut cfg: RunConfig) -> RunConfig {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg
    }

    /// Runs `f` on a pool of `threads` workers, or the global pool.
    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(0) => Err(CliError::Config("--threads must be >= 1".into())),
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Files written by one command, in write order.
#[derive(Debug, Default)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

impl Written {
    fn put(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn names(&self) -> Vec<String> {
        self.files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect()
    }

    fn meta(&mut self, dir: &Path, command: &str, body: serde_json::Value) -> Result<()> {
        let mut meta = json!({
            "tool": "diclique",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "outputs": self.names(),
        });
        if let (Some(m), serde_json::Value::Object(extra)) = (meta.as_object_mut(), body) {
            m.extend(extra);
        }
        self.put(dir, "meta.json", &report::to_json(&meta))
    }
}

fn read_graph(path: &Path) -> Result<GraphFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct WeightSummary {
    mean_x: f64,
    mean_y: f64,
    mean_z: f64,
    max_x: f64,
    max_y: f64,
    max_z: f64,
}

impl WeightSummary {
    fn of(w: &WeightSample) -> Self {
        let mean = |v: &mut dyn Iterator<Item = f64>, len: usize| v.sum::<f64>() / len.max(1) as f64;
        let max = |v: &mut dyn Iterator<Item = f64>| v.fold(0.0, f64::max);
        Self {
            mean_x: mean(&mut w.xy().iter().map(|p| p.0), w.n()),
            mean_y: mean(&mut w.xy().iter().map(|p| p.1), w.n()),
            mean_z: mean(&mut w.z().iter().copied(), w.m()),
            max_x: max(&mut w.xy().iter().map(|p| p.0)),
            max_y: max(&mut w.xy().iter().map(|p| p.1)),
            max_z: max(&mut w.z().iter().copied()),
        }
    }
}

/// Samples one instance (cell 0, replicate 0) and writes both graphs.
pub fn generate(config: &Path, opts: &GlobalOpts) -> Result<Written> {
    let cfg = opts.apply(RunConfig::load(config)?);
    let (size, rule) = cfg.single_cell()?;
    let params = rule.params(size.n, size.m).map_err(|e| CliError::Config(format!("config: {e}")))?;
    let spec = cfg.spec();
    let key = spec.replicate_key(0, 0);
    let inst = opts
        .install(|| generate_instance(&params, &spec.nodes, &spec.z, spec.kernel, spec.sampling, key))?
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let dir = opts.out_dir(Some(&cfg));
    let mut w = Written::default();
    w.put(&dir, "bipartite.txt", &write_bipartite(&inst.bipartite))?;
    w.put(&dir, "digraph.txt", &write_digraph(&inst.digraph))?;
    let body = json!({
        "seed": cfg.seed,
        "stream_key": key.raw(),
        "n": params.n(),
        "m": params.m(),
        "gamma": params.gamma(),
        "alpha": params.alpha(),
        "beta": params.beta(),
        "demand_links": inst.bipartite.demand_count(),
        "supply_links": inst.bipartite.supply_count(),
        "edges": inst.digraph.edge_count(),
        "weights": WeightSummary::of(&inst.weights),
        "config": cfg,
    });
    w.meta(&dir, "generate", body)?;
    Ok(w)
}

/// Projects a bipartite file onto the actors.
pub fn project_file(bipartite: &Path, opts: &GlobalOpts) -> Result<Written> {
    let h = match read_graph(bipartite)? {
        GraphFile::Bipartite(h) => h,
        GraphFile::Digraph(_) => {
            return Err(CliError::Config(format!("{}: expected a bipartite file", bipartite.display())))
        }
    };
    let d = opts.install(|| project(&h))?;
    let dir = opts.out_dir(None);
    let mut w = Written::default();
    w.put(&dir, "digraph.txt", &write_digraph(&d))?;
    let body = json!({
        "source": bipartite.file_name().map(|s| s.to_string_lossy().into_owned()),
        "n": h.n(),
        "m": h.m(),
        "demand_links": h.demand_count(),
        "supply_links": h.supply_count(),
        "edges": d.edge_count(),
    });
    w.meta(&dir, "generate", body)?;
    Ok(w)
}

pub fn coeff_report(d: &Digraph, ego: Option<usize>) -> Result<CoeffReport> {
    let local = match ego {
        None => None,
        Some(e) => Some(LocalReport::new(e, dicc_local(d, e).map_err(|err| CliError::Config(err.to_string()))?)),
    };
    Ok(CoeffReport { n: d.n(), edges: d.edge_count(), motifs: motif_report(d), local })
}

/// Motif counts of a graph file. A bipartite file is projected first.
/// Without `--out` the report goes to stdout.
pub fn coeffs(graph: &Path, ego: Option<usize>, opts: &GlobalOpts) -> Result<(Option<Written>, String)> {
    let d = match read_graph(graph)? {
        GraphFile::Digraph(d) => d,
        GraphFile::Bipartite(h) => project(&h),
    };
    let rep = opts.install(|| coeff_report(&d, ego))??;
    let format = opts.format(None);
    let Some(dir) = opts.out.clone() else {
        let text = if format.json() { report::to_json(&rep) } else { report::coeff_csv(&rep) };
        return Ok((None, text));
    };
    let mut w = Written::default();
    if format.csv() {
        w.put(&dir, "coeffs.csv", &report::coeff_csv(&rep))?;
    }
    if format.json() {
        w.put(&dir, "coeffs.json", &report::to_json(&rep))?;
    }
    let body = json!({ "source": graph.file_name().map(|s| s.to_string_lossy().into_owned()) });
    w.meta(&dir, "coeffs", body)?;
    Ok((Some(w), String::new()))
}

fn run(spec: &diclique::ExperimentSpec, opts: &GlobalOpts) -> Result<ExperimentResult> {
    opts.install(|| run_experiment(spec))?.map_err(|e| CliError::Config(format!("config: {e}")))
}

/// Outcome of a sweep: files plus whether every cell completed.
pub struct SweepOutcome {
    pub written: Written,
    pub result: ExperimentResult,
}

impl SweepOutcome {
    pub fn diagnostics(&self) -> Vec<String> {
        self.result
            .cells
            .iter()
            .flat_map(|c| c.diagnostics.iter().map(move |d| format!("cell {}: {d}", c.cell)))
            .collect()
    }
}

pub fn experiment(config: &Path, opts: &GlobalOpts) -> Result<SweepOutcome> {
    let cfg = opts.apply(RunConfig::load(config)?);
    let spec = cfg.spec();
    let result = run(&spec, opts)?;
    let dir = opts.out_dir(Some(&cfg));
    let format = opts.format(Some(&cfg));
    let mut w = Written::default();
    if format.csv() {
        w.put(&dir, "experiment.csv", &report::experiment_csv(&result))?;
    }
    if format.json() {
        w.put(&dir, "experiment.json", &report::to_json(&result))?;
    }
    w.meta(&dir, "experiment", json!({ "seed": cfg.seed, "config": cfg }))?;
    Ok(SweepOutcome { written: w, result })
}

pub fn degree_compare(config: &Path, opts: &GlobalOpts) -> Result<SweepOutcome> {
    let cfg = opts.apply(RunConfig::load(config)?);
    let spec = cfg.degree_spec();
    let result = run(&spec, opts)?;
    let dir = opts.out_dir(Some(&cfg));
    let format = opts.format(Some(&cfg));
    let mut w = Written::default();
    if format.csv() {
        w.put(&dir, "degree_summary.csv", &report::degree_summary_csv(&result))?;
        w.put(&dir, "degree_pmf.csv", &report::degree_pmf_csv(&result))?;
    }
    if format.json() {
        w.put(&dir, "degree.json", &report::to_json(&result))?;
    }
    w.meta(&dir, "degree-compare", json!({ "seed": cfg.seed, "config": cfg }))?;
    Ok(SweepOutcome { written: w, result })
}
