//! The `pclf` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 negative combinatorial
//! answer (not path-complete, no comparison certificate), 3 solver found
//! nothing, 4 a certificate failed verification.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::comparison::{
    format_rational, solve_comparison_lp, verify_comparison_certificate, ComparisonCertificate,
    ComparisonOutcome,
};
use crate::corpus;
use crate::error::{Error, Result};
use crate::graphs::{build_observer, enumerate_co_complete_graphs, LabeledGraph};
use crate::lyapunov::{
    check_monotone_decrease, extract_clf, find_pclf, find_pclf_traced, gamma_bisect, random_state,
    random_word, simulate, verify_pclf, write_trajectory_csv, PclfFile, PclfSearch,
    SwitchingSystem, DEFAULT_MONOTONE_SLACK,
};
use crate::parallel::Execution;
use crate::sdp::{DiagnosticsCsv, SolverOptions, DEFAULT_MAX_ITERS, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;
pub const EXIT_UNVERIFIED: i32 = 4;

/// Verification tolerance for certificates read from files.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "pclf",
    version,
    about = "Path-complete Lyapunov analysis of switched linear systems"
)]
pub struct Cli {
    /// Emit reports as JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Completeness, co-completeness and path-completeness of a graph.
    Check { graph: PathBuf },
    /// Search a quadratic Lyapunov function for a graph at rate γ.
    Pclf(PclfArgs),
    /// Bracket the best rate γ reachable with quadratic forms on a graph.
    Gamma(GammaArgs),
    /// Simulate a trajectory and evaluate the min-max Lyapunov function along it.
    Clf(ClfArgs),
    /// Search a certificate that the premise graph is at least as conservative as the conclusion.
    Compare {
        premise: PathBuf,
        conclusion: PathBuf,
        /// Where to write the certificate (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a comparison certificate file exactly.
    VerifyCert {
        premise: PathBuf,
        conclusion: PathBuf,
        certificate: PathBuf,
    },
    /// Run the search on all 16 co-complete graphs with 2 nodes and 2 labels.
    Sweep16 {
        system: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Solve one graph at a time.
        #[arg(long)]
        sequential: bool,
    },
    /// Write the example graphs and systems into a directory.
    Corpus { dir: PathBuf },
}

#[derive(Args, Debug)]
struct PclfArgs {
    graph: PathBuf,
    system: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Solver residual tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Where to write the certificate (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration solver trace as CSV.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GammaArgs {
    graph: PathBuf,
    system: PathBuf,
    /// Relative bracket width.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Where to write the certificate at the upper end.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClfArgs {
    graph: PathBuf,
    pclf: PathBuf,
    system: PathBuf,
    /// Switching word, e.g. `21111` or `2,1,1`; repeated or cut to `--steps`.
    #[arg(long)]
    word: Option<String>,
    /// Initial state, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Trajectory length (default: the word's length, or 50 for a random word).
    #[arg(long)]
    steps: Option<usize>,
    /// Verification tolerance on the edge inequalities.
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
    tol: f64,
    /// Evaluate the functions even if they fail verification.
    #[arg(long)]
    skip_verify: bool,
    /// Where to write the CSV (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let display_only = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            if display_only {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_ERROR;
        }
    };
    let mut ctx = Context {
        json: cli.json,
        seed: cli.seed,
        out,
        err,
    };
    match ctx.dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_ERROR
        }
    }
}

struct Context<'a> {
    json: bool,
    seed: u64,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<LabeledGraph> {
    with_path(path, LabeledGraph::parse(&read(path)?))
}

fn load_system(path: &Path) -> Result<SwitchingSystem> {
    with_path(path, SwitchingSystem::from_json(&read(path)?))
}

fn parse_word(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("invalid word `{text}`"));
    if text.contains(',') {
        text.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect()
    } else {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect()
    }
}

fn parse_state(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("invalid state `{text}`")))
        })
        .collect()
}

fn edge_list(g: &LabeledGraph) -> String {
    g.edges()
        .iter()
        .map(|e| {
            format!(
                "{}-{}->{}",
                g.node_name(e.source),
                e.label,
                g.node_name(e.destination)
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl Context<'_> {
    fn dispatch(&mut self, command: Command) -> Result<i32> {
        match command {
            Command::Check { graph } => self.check(&graph),
            Command::Pclf(args) => self.pclf(args),
            Command::Gamma(args) => self.gamma(args),
            Command::Clf(args) => self.clf(args),
            Command::Compare {
                premise,
                conclusion,
                out,
            } => self.compare(&premise, &conclusion, out.as_deref()),
            Command::VerifyCert {
                premise,
                conclusion,
                certificate,
            } => self.verify_cert(&premise, &conclusion, &certificate),
            Command::Sweep16 {
                system,
                gamma,
                tol,
                sequential,
            } => {
                let exec = if sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                };
                self.sweep16(&system, gamma, tol, exec)
            }
            Command::Corpus { dir } => self.corpus(&dir),
        }
    }

    fn emit_json(&mut self, value: &Value) -> Result<()> {
        writeln!(self.out, "{}", serde_json::to_string_pretty(value)?)?;
        Ok(())
    }

    fn check(&mut self, path: &Path) -> Result<i32> {
        let g = load_graph(path)?;
        let obs = build_observer(&g);
        let path_complete = obs.is_complete();
        let names: Vec<String> = obs
            .nodes()
            .iter()
            .map(|n| n.display(&g).to_string())
            .collect();
        if self.json {
            let edges: Vec<Value> = obs
                .edges()
                .iter()
                .map(|e| json!([names[e.from], names[e.to], e.label]))
                .collect();
            self.emit_json(&json!({
                "nodes": g.num_nodes(),
                "edges": g.edges().len(),
                "labels": g.num_labels(),
                "complete": g.is_complete(),
                "co_complete": g.is_co_complete(),
                "path_complete": path_complete,
                "observer": { "nodes": names, "edges": edges },
            }))?;
        } else {
            writeln!(
                self.out,
                "nodes {}, edges {}, labels {}",
                g.num_nodes(),
                g.edges().len(),
                g.num_labels()
            )?;
            writeln!(self.out, "complete: {}", g.is_complete())?;
            writeln!(self.out, "co-complete: {}", g.is_co_complete())?;
            writeln!(self.out, "path-complete: {path_complete}")?;
            writeln!(
                self.out,
                "observer: {} nodes, {} edges",
                obs.nodes().len(),
                obs.edges().len()
            )?;
            for e in obs.edges() {
                writeln!(
                    self.out,
                    "  {} --{}--> {}",
                    names[e.from], e.label, names[e.to]
                )?;
            }
        }
        Ok(if path_complete {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        })
    }

    fn pclf(&mut self, args: PclfArgs) -> Result<i32> {
        let g = load_graph(&args.graph)?;
        let sys = load_system(&args.system)?;
        let opts = SolverOptions {
            tol: args.tol,
            max_iters: args.max_iters,
        };
        let search = match &args.diagnostics {
            Some(path) => {
                let mut csv = DiagnosticsCsv::new(std::io::BufWriter::new(fs::File::create(path)?));
                let mut io_error = None;
                let search = find_pclf_traced(&g, &sys, args.gamma, &opts, |r| {
                    if io_error.is_none() {
                        io_error = csv.record(r).err();
                    }
                })?;
                if let Some(e) = io_error {
                    return Err(e.into());
                }
                csv.into_inner().flush()?;
                search
            }
            None => find_pclf(&g, &sys, args.gamma, &opts)?,
        };
        let path_complete = crate::graphs::is_path_complete(&g);
        if !path_complete {
            writeln!(
                self.err,
                "warning: the graph is not path-complete; a solution does not prove stability"
            )?;
        }
        match search {
            PclfSearch::Found { pclf, residual } => {
                let file = pclf.to_file(Some(residual));
                if let Some(path) = &args.out {
                    fs::write(path, file.to_json())?;
                }
                if self.json {
                    self.emit_json(&json!({
                        "status": "found",
                        "gamma": args.gamma,
                        "residual": residual,
                        "path_complete": path_complete,
                        "certificate": serde_json::to_value(&file)?,
                    }))?;
                } else {
                    let summary = format!(
                        "found: gamma {}, verified residual {residual:e}",
                        args.gamma
                    );
                    if args.out.is_some() {
                        writeln!(self.out, "{summary}")?;
                    } else {
                        write!(self.out, "{}", file.to_json())?;
                        writeln!(self.err, "{summary}")?;
                    }
                }
                Ok(EXIT_OK)
            }
            PclfSearch::NotFound(nf) => {
                if self.json {
                    self.emit_json(&json!({
                        "status": "not_found",
                        "gamma": args.gamma,
                        "residual": nf.residual,
                        "lower_bound": nf.lower_bound,
                        "iterations": nf.iterations,
                    }))?;
                } else {
                    writeln!(
                        self.out,
                        "not found: gamma {}, residual {:e}, lower bound {:e}, iterations {}",
                        args.gamma, nf.residual, nf.lower_bound, nf.iterations
                    )?;
                }
                Ok(EXIT_NOT_FOUND)
            }
        }
    }

    fn gamma(&mut self, args: GammaArgs) -> Result<i32> {
        let g = load_graph(&args.graph)?;
        let sys = load_system(&args.system)?;
        let bracket = gamma_bisect(&g, &sys, args.tol, &SolverOptions::default())?;
        if let Some(path) = &args.out {
            fs::write(path, bracket.certificate.to_file(None).to_json())?;
        }
        if self.json {
            self.emit_json(&json!({
                "lo": bracket.lo,
                "hi": bracket.hi,
                "solves": bracket.solves,
                "certificate": args.out.as_ref().map(|p| p.display().to_string()),
            }))?;
        } else {
            writeln!(self.out, "gamma in [{:.6}, {:.6}]", bracket.lo, bracket.hi)?;
            if let Some(path) = &args.out {
                writeln!(
                    self.out,
                    "certificate at {:.6}: {}",
                    bracket.hi,
                    path.display()
                )?;
            }
        }
        Ok(EXIT_OK)
    }

    fn clf(&mut self, args: ClfArgs) -> Result<i32> {
        let g = load_graph(&args.graph)?;
        let sys = load_system(&args.system)?;
        let file = with_path(&args.pclf, PclfFile::from_json(&read(&args.pclf)?))?;
        let p = with_path(&args.pclf, file.to_pclf(&g))?;
        let report = verify_pclf(&p, &sys, args.tol)?;
        if !report.ok && !args.skip_verify {
            writeln!(
                self.err,
                "certificate failed verification: residual {:e} exceeds {:e}",
                report.residual, args.tol
            )?;
            return Ok(EXIT_UNVERIFIED);
        }
        let clf = extract_clf(&p, false)?;

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let word = match (&args.word, args.steps) {
            (Some(w), steps) => {
                let pattern = parse_word(w)?;
                match steps {
                    Some(n) if pattern.is_empty() && n > 0 => {
                        return Err(Error::InvalidArgument("cannot repeat an empty word".into()))
                    }
                    Some(n) => pattern.iter().copied().cycle().take(n).collect(),
                    None => pattern,
                }
            }
            (None, steps) => random_word(&mut rng, sys.num_modes(), steps.unwrap_or(50)),
        };
        let x0 = match &args.x0 {
            Some(text) => parse_state(text)?,
            None => random_state(&mut rng, sys.dim()),
        };
        let traj = simulate(&sys, &word, &x0)?;
        let monotone = check_monotone_decrease(&clf, &traj, DEFAULT_MONOTONE_SLACK)?;

        let mut csv = Vec::new();
        write_trajectory_csv(&mut csv, &clf, &traj)?;
        let summary_to_out = args.out.is_some();
        match &args.out {
            Some(path) => fs::write(path, &csv)?,
            None => self.out.write_all(&csv)?,
        }
        let summary = if self.json {
            serde_json::to_string_pretty(&json!({
                "verified": report.ok,
                "residual": report.residual,
                "steps": word.len(),
                "monotone": monotone.monotone,
                "first_violation": monotone.first_violation,
            }))?
        } else {
            let mut s = format!("monotone: {}", monotone.monotone);
            if let Some(t) = monotone.first_violation {
                s.push_str(&format!(" (first increase at t={t})"));
            }
            if !report.ok {
                s.push_str(&format!(
                    "\nverified: false (residual {:e})",
                    report.residual
                ));
            }
            s
        };
        if summary_to_out {
            writeln!(self.out, "{summary}")?;
        } else {
            writeln!(self.err, "{summary}")?;
        }
        Ok(EXIT_OK)
    }

    fn compare(&mut self, premise: &Path, conclusion: &Path, out: Option<&Path>) -> Result<i32> {
        let g = load_graph(premise)?;
        let g2 = load_graph(conclusion)?;
        match solve_comparison_lp(&g, &g2)? {
            ComparisonOutcome::Certificate(cert) => {
                let text = cert.to_json();
                if let Some(path) = out {
                    fs::write(path, format!("{text}\n"))?;
                }
                if self.json {
                    let value: Value = serde_json::from_str(&text)?;
                    self.emit_json(&json!({ "result": "certificate", "certificate": value }))?;
                } else if let Some(path) = out {
                    writeln!(self.out, "certificate written to {}", path.display())?;
                } else {
                    writeln!(self.out, "{text}")?;
                }
                Ok(EXIT_OK)
            }
            ComparisonOutcome::Infeasible(w) => {
                if self.json {
                    let support: Vec<Value> = w
                        .support()
                        .into_iter()
                        .map(|(c, y)| json!({ "constraint": c, "multiplier": format_rational(y) }))
                        .collect();
                    self.emit_json(&json!({ "result": "none", "witness": support }))?;
                } else {
                    writeln!(self.out, "none")?;
                    writeln!(self.err, "infeasibility witness:")?;
                    for (c, y) in w.support() {
                        writeln!(self.err, "  {} × {c}", format_rational(y))?;
                    }
                }
                Ok(EXIT_NEGATIVE)
            }
        }
    }

    fn verify_cert(&mut self, premise: &Path, conclusion: &Path, cert: &Path) -> Result<i32> {
        let g = load_graph(premise)?;
        let g2 = load_graph(conclusion)?;
        let cert = with_path(cert, ComparisonCertificate::from_json(&read(cert)?))?;
        let valid = verify_comparison_certificate(&g, &g2, &cert)?;
        if self.json {
            self.emit_json(&json!({ "valid": valid }))?;
        } else {
            writeln!(self.out, "{}", if valid { "valid" } else { "invalid" })?;
        }
        Ok(if valid { EXIT_OK } else { EXIT_UNVERIFIED })
    }

    fn sweep16(&mut self, path: &Path, gamma: f64, tol: f64, exec: Execution) -> Result<i32> {
        let sys = load_system(path)?;
        if sys.num_modes() != 2 {
            return Err(Error::InvalidArgument(format!(
                "the sweep needs a 2-mode system, got {} modes",
                sys.num_modes()
            )));
        }
        let rows = sweep(&sys, gamma, tol, exec)?;
        let feasible = rows.iter().filter(|r| r.found).count();
        if self.json {
            let graphs: Vec<Value> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    json!({
                        "index": i + 1,
                        "edges": r.graph.edges().iter().map(|e| json!([r.graph.node_name(e.source), r.graph.node_name(e.destination), e.label])).collect::<Vec<_>>(),
                        "path_complete": r.path_complete,
                        "found": r.found,
                        "residual": r.residual,
                    })
                })
                .collect();
            self.emit_json(&json!({ "gamma": gamma, "graphs": graphs, "feasible": feasible, "total": rows.len() }))?;
        } else {
            for (i, r) in rows.iter().enumerate() {
                writeln!(
                    self.out,
                    "{:>2}  {:<40} {:<9} residual {:e}",
                    i + 1,
                    edge_list(&r.graph),
                    if r.found { "found" } else { "not found" },
                    r.residual
                )?;
            }
            writeln!(
                self.out,
                "feasible at gamma {gamma}: {feasible}/{}",
                rows.len()
            )?;
        }
        Ok(EXIT_OK)
    }

    fn corpus(&mut self, dir: &Path) -> Result<i32> {
        for path in corpus::write_corpus(dir)? {
            writeln!(self.out, "{}", path.display())?;
        }
        Ok(EXIT_OK)
    }
}

/// One row of the sixteen-graph sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub graph: LabeledGraph,
    pub path_complete: bool,
    pub found: bool,
    /// Verified residual when found, last iterate's residual otherwise.
    pub residual: f64,
}

/// Solves every co-complete graph on 2 nodes and 2 labels at rate `gamma`.
pub fn sweep(
    sys: &SwitchingSystem,
    gamma: f64,
    tol: f64,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    let graphs = enumerate_co_complete_graphs(2, 2)?;
    let opts = SolverOptions {
        tol,
        ..SolverOptions::default()
    };
    exec.map(&graphs, |g| {
        let search = find_pclf(g, sys, gamma, &opts)?;
        let (found, residual) = match &search {
            PclfSearch::Found { residual, .. } => (true, *residual),
            PclfSearch::NotFound(nf) => (false, nf.residual),
        };
        Ok(SweepRow {
            graph: g.clone(),
            path_complete: crate::graphs::is_path_complete(g),
            found,
            residual,
        })
    })
    .into_iter()
    .collect()
}
