//! Batch runs described by a TOML spec, reported as an aligned table and CSV.
//!
//! ```toml
//! [[instance]]
//! id = "c5"
//! family = "cycle"
//! n = 5
//! modes = ["edge", "total"]
//! methods = ["exact"]
//!
//! [[instance]]
//! id = "rr64"
//! family = "random-regular"
//! n = 2000
//! d = 64
//! methods = ["pipeline"]
//! seeds = [1, 2, 3]
//! profile = "desk"
//! ```
//!
//! Random families are regenerated for every seed. `file` (graph6 or edge
//! list, relative to the spec) may replace `family`.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nsd_core::exact::{Solver, SolverConfig};
use nsd_core::graph::{parse_edge_list, parse_graph6};
use nsd_core::pipeline::{run, Profile};
use nsd_core::{verify_nsd, Graph, Mode};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::generators::{generate, Family};
use crate::repair::greedy_repair;

pub const CSV_HEADER: &str =
    "id,n,m,delta,mode,method,colours,abs_bound,rel_bound,verified,runtime_ms,restarts,seed";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("bad bench spec: {0}")]
    Spec(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Pipeline,
    GreedyFallback,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Pipeline => "pipeline",
            Method::GreedyFallback => "greedy-fallback",
        })
    }
}

fn ser_mode<S: Serializer>(m: &Mode, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(m)
}

fn de_mode<'de, D: Deserializer<'de>>(d: D) -> Result<Mode, D::Error> {
    let s = String::deserialize(d)?;
    Mode::from_str(&s).map_err(serde::de::Error::custom)
}

fn de_modes<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Mode>, D::Error> {
    let list = Vec::<String>::deserialize(d)?;
    list.iter()
        .map(|s| Mode::from_str(s).map_err(serde::de::Error::custom))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub id: String,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    #[serde(serialize_with = "ser_mode", deserialize_with = "de_mode")]
    pub mode: Mode,
    pub method: Method,
    /// Largest colour of the verified colouring; empty when the row failed.
    pub colours: Option<u64>,
    /// `Δ + ⌊95√Δ⌋`.
    pub abs_bound: u64,
    /// `m' + 4B`, pipeline rows only.
    pub rel_bound: Option<u64>,
    pub verified: bool,
    pub runtime_ms: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl BenchRow {
    /// Remark derived from the row's own values.
    pub fn note(&self) -> String {
        if !self.verified {
            return "failed".into();
        }
        let (slack, label) = match self.mode {
            Mode::Edge => (2, "Δ+2"),
            Mode::Total => (3, "Δ+3"),
        };
        match self.colours {
            Some(c) if self.method == Method::Exact && c > self.delta as u64 + slack => {
                format!("exceeds {label}")
            }
            _ => String::new(),
        }
    }
}

pub fn abs_bound(delta: usize) -> u64 {
    delta as u64 + (95.0 * (delta as f64).sqrt()).floor() as u64
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::Edge]
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub id: String,
    pub family: Option<String>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub d: Option<usize>,
    pub file: Option<PathBuf>,
    #[serde(default = "default_modes", deserialize_with = "de_modes")]
    pub modes: Vec<Mode>,
    pub methods: Vec<Method>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Preset name or path of a `key=value` profile file.
    pub profile: Option<String>,
    pub min_delta: Option<usize>,
    pub node_limit: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default)]
    pub instance: Vec<InstanceSpec>,
}

impl BenchSpec {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Spec(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf), BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.into(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::parse(&text)?, base))
    }
}

/// Reads a graph file, choosing graph6 for `.g6` files or single-token
/// contents and the edge-list format otherwise.
pub fn read_graph(path: &Path) -> Result<Graph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let trimmed = text.trim();
    let looks_g6 = path.extension().is_some_and(|x| x == "g6")
        || (!trimmed.is_empty()
            && !trimmed.contains(char::is_whitespace)
            && !trimmed.contains('='));
    let parsed = if looks_g6 {
        parse_graph6(trimmed)
    } else {
        parse_edge_list(&text, None)
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

pub fn resolve_profile(name: Option<&str>, base: &Path) -> Result<Profile, String> {
    let name = name.unwrap_or("desk");
    if let Some(p) = Profile::preset(name) {
        return Ok(p);
    }
    let path = base.join(name);
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("profile {}: {e}", path.display()))?;
    Profile::from_key_values(name, &text).map_err(|e| e.to_string())
}

struct Task<'a> {
    spec: &'a InstanceSpec,
    mode: Mode,
    method: Method,
    seed: u64,
}

/// One finished row plus the failure message, if the row failed.
pub type Outcome = (BenchRow, Option<String>);

fn instance_graph(spec: &InstanceSpec, seed: u64, base: &Path) -> Result<Graph, String> {
    match (&spec.family, &spec.file) {
        (Some(f), None) => {
            let family =
                Family::from_parts(f, spec.n, spec.p, spec.d).map_err(|e| e.to_string())?;
            generate(&family, seed).map_err(|e| e.to_string())
        }
        (None, Some(file)) => read_graph(&base.join(file)),
        _ => Err(format!(
            "instance {:?} needs exactly one of family or file",
            spec.id
        )),
    }
}

fn run_task(task: &Task<'_>, base: &Path) -> Outcome {
    let start = Instant::now();
    let mut row = BenchRow {
        id: task.spec.id.clone(),
        n: 0,
        m: 0,
        delta: 0,
        mode: task.mode,
        method: task.method,
        colours: None,
        abs_bound: 0,
        rel_bound: None,
        verified: false,
        runtime_ms: 0.0,
        restarts: 0,
        seed: task.seed,
    };
    let g = match instance_graph(task.spec, task.seed, base) {
        Ok(g) => g,
        Err(e) => return (row, Some(e)),
    };
    row.n = g.n();
    row.m = g.m();
    row.delta = g.max_degree();
    row.abs_bound = abs_bound(row.delta);
    let mut error = None;
    let colouring = match task.method {
        Method::Exact => {
            let mut config = SolverConfig::default();
            if let Some(limit) = task.spec.node_limit {
                config.node_limit = limit;
            }
            match Solver::new(config).chi_sigma(&g, task.mode) {
                Ok(r) => Some(r.witness),
                Err(e) => {
                    error = Some(e.to_string());
                    None
                }
            }
        }
        Method::Pipeline => match resolve_profile(task.spec.profile.as_deref(), base) {
            Err(e) => {
                error = Some(e);
                None
            }
            Ok(mut profile) => {
                if let Some(md) = task.spec.min_delta {
                    profile.min_delta = md;
                }
                match run(&g, task.mode, &profile, task.seed) {
                    Ok(out) => {
                        row.rel_bound = Some(out.trace.relative_bound);
                        row.restarts = out.trace.restarts();
                        Some(out.colouring)
                    }
                    Err(e) => {
                        if let Some(t) = e.trace() {
                            row.restarts = t.restarts();
                        }
                        error = Some(e.to_string());
                        None
                    }
                }
            }
        },
        Method::GreedyFallback => match greedy_repair(&g, task.mode, 200) {
            Some((c, sweeps)) => {
                row.restarts = sweeps;
                Some(c)
            }
            None => {
                error = Some("greedy repair did not converge".into());
                None
            }
        },
    };
    if let Some(c) = colouring {
        let report = verify_nsd(&g, &c);
        row.verified = report.pass;
        if report.pass {
            row.colours = Some(c.max_colour());
        } else {
            error = Some(format!(
                "colouring failed verification with {} conflicts",
                report.conflicts.len()
            ));
        }
    }
    row.runtime_ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    (row, error)
}

/// Runs every (instance, mode, method, seed) combination on at most `jobs`
/// threads. Rows come back in spec order.
pub fn bench(spec: &BenchSpec, base: &Path, jobs: usize) -> Vec<Outcome> {
    let tasks: Vec<Task<'_>> = spec
        .instance
        .iter()
        .flat_map(|inst| {
            inst.modes.iter().flat_map(move |&mode| {
                inst.methods.iter().flat_map(move |&method| {
                    inst.seeds.iter().map(move |&seed| Task {
                        spec: inst,
                        mode,
                        method,
                        seed,
                    })
                })
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| tasks.par_iter().map(|t| run_task(t, base)).collect())
}

fn opt<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

/// Aligned text table with the CSV columns plus a note column.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut cells: Vec<Vec<String>> = vec![CSV_HEADER
        .split(',')
        .map(String::from)
        .chain(["note".into()])
        .collect()];
    for r in rows {
        cells.push(vec![
            r.id.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.delta.to_string(),
            r.mode.to_string(),
            r.method.to_string(),
            opt(&r.colours),
            r.abs_bound.to_string(),
            opt(&r.rel_bound),
            r.verified.to_string(),
            r.runtime_ms.to_string(),
            r.restarts.to_string(),
            r.seed.to_string(),
            r.note(),
        ]);
    }
    let cols = cells[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|i| {
            cells
                .iter()
                .map(|row| row[i].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn write_csv<W: io::Write>(rows: &[BenchRow], w: W) -> Result<(), BenchError> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush().map_err(|e| BenchError::Csv(e.into()))?;
    Ok(())
}

pub fn read_csv<R: io::Read>(r: R) -> Result<Vec<BenchRow>, BenchError> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header.join(",") != CSV_HEADER {
        return Err(BenchError::Spec(format!(
            "unexpected CSV header {:?}",
            header.join(",")
        )));
    }
    rd.deserialize()
        .map(|r| r.map_err(BenchError::from))
        .collect()
}
