//! The `nsd` command line.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nsd_core::exact::{SolveError, Solver, SolverConfig};
use nsd_core::graph::{parse_edge_list, parse_graph6};
use nsd_core::pipeline::{run, PipelineError};
use nsd_core::{verify_nsd, Graph, Mode, TotalColouring};

use crate::bench::{bench, read_graph, render_table, resolve_profile, write_csv, BenchSpec};
use crate::generators::{generate, Family};
use crate::repair::greedy_repair;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INAPPLICABLE: i32 = 2;
pub const EXIT_STAGE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "nsd",
    version,
    about = "Neighbour sum distinguishing edge and total colourings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Edge,
    Total,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Edge => Mode::Edge,
            ModeArg::Total => Mode::Total,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphFormat {
    Auto,
    Graph6,
    Edges,
}

#[derive(Debug, clap::Args)]
struct GraphInput {
    /// Graph file (graph6 or edge list); `-` reads standard input.
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: GraphFormat,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact NSD index by exhaustive search.
    Solve {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum, default_value = "edge")]
        mode: ModeArg,
        #[arg(long)]
        node_limit: Option<u64>,
    },
    /// Randomized construction for graphs of large maximum degree.
    RunPipeline {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum, default_value = "edge")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `paper`, `desk`, or a `key=value` profile file.
        #[arg(long, default_value = "desk")]
        profile: String,
        #[arg(long)]
        min_delta: Option<usize>,
        /// Write the stage trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Below the degree threshold, colour with the exact solver (up to
        /// 8 vertices) or greedy repair instead of refusing.
        #[arg(long)]
        fallback: bool,
    },
    /// Check a colouring file against a graph.
    Verify {
        #[command(flatten)]
        input: GraphInput,
        colouring: PathBuf,
    },
    /// Print a generated graph.
    Generate {
        /// complete, cycle, path, star, gnp or random-regular.
        family: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "graph6")]
        format: GraphFormat,
    },
    /// Run a TOML bench spec; prints a table and optionally writes CSV.
    Bench {
        spec: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn load_graph(input: &GraphInput) -> Result<Graph, Failure> {
    let parsed = if input.graph == Path::new("-") {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
        match input.format {
            GraphFormat::Edges => parse_edge_list(&text, None).map_err(|e| e.to_string()),
            GraphFormat::Graph6 => parse_graph6(text.trim()).map_err(|e| e.to_string()),
            GraphFormat::Auto if text.trim().contains(char::is_whitespace) => {
                parse_edge_list(&text, None).map_err(|e| e.to_string())
            }
            GraphFormat::Auto => parse_graph6(text.trim()).map_err(|e| e.to_string()),
        }
    } else {
        match input.format {
            GraphFormat::Auto => read_graph(&input.graph),
            GraphFormat::Graph6 | GraphFormat::Edges => {
                let text = std::fs::read_to_string(&input.graph).map_err(|e| {
                    fail(
                        EXIT_USAGE,
                        format!("cannot read {}: {e}", input.graph.display()),
                    )
                })?;
                let r = if matches!(input.format, GraphFormat::Graph6) {
                    parse_graph6(text.trim())
                } else {
                    parse_edge_list(&text, None)
                };
                r.map_err(|e| format!("{}: {e}", input.graph.display()))
            }
        }
    };
    parsed.map_err(|e| fail(EXIT_USAGE, e))
}

fn solve(
    g: &Graph,
    mode: Mode,
    node_limit: Option<u64>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let mut config = SolverConfig::default();
    if let Some(l) = node_limit {
        config.node_limit = l;
    }
    match Solver::new(config).chi_sigma(g, mode) {
        Ok(r) => {
            let _ = writeln!(out, "chi={} nodes={}", r.k, r.nodes);
            let _ = out.write_all(r.witness.to_text(g).as_bytes());
            Ok(())
        }
        Err(e @ (SolveError::IsolatedEdge | SolveError::NoEdges)) => {
            Err(fail(EXIT_INAPPLICABLE, e.to_string()))
        }
        Err(e @ SolveError::NodeLimit { .. }) => Err(fail(EXIT_STAGE, e.to_string())),
        Err(e) => Err(fail(EXIT_USAGE, e.to_string())),
    }
}

fn fallback(
    g: &Graph,
    mode: Mode,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    if g.n() <= 8 {
        let _ = writeln!(err, "falling back to the exact solver");
        return solve(g, mode, None, out);
    }
    let _ = writeln!(err, "falling back to greedy repair");
    match greedy_repair(g, mode, 200) {
        Some((c, _)) => {
            let _ = out.write_all(c.to_text(g).as_bytes());
            Ok(())
        }
        None => Err(fail(EXIT_STAGE, "greedy repair did not converge")),
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            input,
            mode,
            node_limit,
        } => {
            let g = load_graph(&input)?;
            solve(&g, mode.into(), node_limit, out)
        }
        Command::RunPipeline {
            input,
            mode,
            seed,
            profile,
            min_delta,
            trace,
            fallback: use_fallback,
        } => {
            let g = load_graph(&input)?;
            let mode = Mode::from(mode);
            let mut profile =
                resolve_profile(Some(&profile), Path::new(".")).map_err(|e| fail(EXIT_USAGE, e))?;
            if let Some(md) = min_delta {
                profile.min_delta = md;
            }
            let write_trace = |t: &nsd_core::pipeline::StageTrace| -> Result<(), Failure> {
                if let Some(path) = &trace {
                    std::fs::write(path, t.to_string()).map_err(|e| {
                        fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display()))
                    })?;
                }
                Ok(())
            };
            match run(&g, mode, &profile, seed) {
                Ok(result) => {
                    write_trace(&result.trace)?;
                    let _ = out.write_all(result.colouring.to_text(&g).as_bytes());
                    Ok(())
                }
                Err(e @ PipelineError::DeltaTooSmall { .. }) if use_fallback => {
                    let _ = writeln!(err, "{e}");
                    fallback(&g, mode, out, err)
                }
                Err(e @ (PipelineError::IsolatedEdge | PipelineError::DeltaTooSmall { .. })) => {
                    Err(fail(EXIT_INAPPLICABLE, e.to_string()))
                }
                Err(e @ PipelineError::InvalidProfile(_)) => Err(fail(EXIT_USAGE, e.to_string())),
                Err(e) => {
                    if let Some(t) = e.trace() {
                        write_trace(t)?;
                    }
                    let code = match e {
                        PipelineError::StageFailure {
                            stage: nsd_core::pipeline::Stage::Verify,
                            ..
                        } => EXIT_VERIFY,
                        _ => EXIT_STAGE,
                    };
                    Err(fail(code, e.to_string()))
                }
            }
        }
        Command::Verify { input, colouring } => {
            let g = load_graph(&input)?;
            let text = std::fs::read_to_string(&colouring).map_err(|e| {
                fail(
                    EXIT_USAGE,
                    format!("cannot read {}: {e}", colouring.display()),
                )
            })?;
            let c = TotalColouring::from_text(&text, &g)
                .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            let report = verify_nsd(&g, &c);
            let _ = writeln!(
                out,
                "proper={} conflicts={} max_colour={}",
                report.properness.is_empty(),
                report.conflicts.len(),
                report.max_colour
            );
            for v in &report.properness {
                let _ = writeln!(out, "violation {v:?}");
            }
            for (u, v) in &report.conflicts {
                let _ = writeln!(out, "conflict {u} {v}");
            }
            if report.pass {
                let _ = writeln!(out, "pass");
                Ok(())
            } else {
                Err(fail(EXIT_VERIFY, "colouring is not a proper NSD colouring"))
            }
        }
        Command::Generate {
            family,
            n,
            p,
            d,
            seed,
            format,
        } => {
            let family = Family::from_parts(&family, n, p, d)
                .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            let g = generate(&family, seed).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            match format {
                GraphFormat::Edges => {
                    let _ = out.write_all(g.to_edge_list().as_bytes());
                }
                _ => {
                    let _ = writeln!(out, "{}", g.to_graph6());
                }
            }
            Ok(())
        }
        Command::Bench { spec, csv, jobs } => {
            let (spec, base) =
                BenchSpec::load(&spec).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            let outcomes = bench(&spec, &base, jobs);
            for (row, e) in &outcomes {
                if let Some(e) = e {
                    let _ = writeln!(
                        err,
                        "{} {} {} seed {}: {e}",
                        row.id, row.mode, row.method, row.seed
                    );
                }
            }
            let rows: Vec<_> = outcomes.into_iter().map(|(r, _)| r).collect();
            let _ = out.write_all(render_table(&rows).as_bytes());
            if let Some(path) = csv {
                let file = std::fs::File::create(&path).map_err(|e| {
                    fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display()))
                })?;
                write_csv(&rows, file).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            }
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
