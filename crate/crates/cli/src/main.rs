//! `rigidity`: command-line driver for the reconstruction toolkit.
//!
//! Exit codes: 0 success, 2 inconsistent input, 3 the algorithm reported
//! failure, 64 usage error or malformed input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rigidity_core::clique::{extract_clique, max_nonadjacent_codegree, meets_edge_threshold};
use rigidity_core::constructions::{
    blow_up, gen_incidence_c4free, gen_planted_circle, gen_planted_line, gen_t, gen_tree_ambiguity, PlantedKind,
};
use rigidity_core::determination::closure;
use rigidity_core::io;
use rigidity_core::monotone::{pair_coverage, threshold_sweep};
use rigidity_core::reconstruction::{algorithm1_with_rounds, correct_distances, isometry_match, CorrectionOutcome};
use rigidity_core::rng::derive_seed;
use rigidity_core::{sample_measurements, Error, Graph, Scalar, Space};

/// Seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 20_240_601;

const EXIT_INCONSISTENT: u8 = 2;
const EXIT_FAILED: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "rigidity", version, about = "Reconstruct point sets on the line and circle from partial distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Close a measurement file under local determination.
    Close {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "line")]
        space: Space,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Extract a verified clique from an edge list.
    Clique {
        #[arg(long)]
        input: PathBuf,
        /// Bound on common neighbours of non-adjacent pairs; measured when
        /// omitted.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Embed randomly measured points on the line.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Repair a full distance table with corrupted entries.
    Correct {
        #[arg(long)]
        input: PathBuf,
        /// Assumed fraction of corrupted pairs per vertex.
        #[arg(long, default_value = "0")]
        c: Scalar,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monotone-path threshold sweep; CSV on stdout.
    Threshold {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        eps_list: Vec<Scalar>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Fraction of random graphs joining all far pairs by monotone paths.
    Coverage {
        #[arg(long)]
        n: usize,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Generate graphs, configurations and measurement files.
    Gen {
        #[arg(long)]
        kind: GenKind,
        /// Prime order of the projective plane (incidence, blowup).
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Blow-up factor.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Base graph for tgraph: an edge-list file (default K_3).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of tgraph iterations.
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        /// Scale of the tree ambiguity instance.
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        per_side: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value = "line")]
        space: Space,
        #[arg(long, default_value = "uniform")]
        planted: PlantedKind,
        /// Pair probability for `sample`.
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Plant, sample, reconstruct and compare with the planted points.
    Demo {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long = "C", default_value_t = 20.0)]
        c: f64,
        #[arg(long, default_value = "uniform")]
        planted: PlantedKind,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Incidence,
    Blowup,
    Tgraph,
    TreeAmbiguity,
    Planted,
    /// Sample a measurement file from a configuration file (`--input`).
    Sample,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InconsistentInput { .. } => EXIT_INCONSISTENT,
            _ => EXIT_USAGE,
        };
        let message = match e {
            Error::InconsistentInput { i, j } => format!("measurements are inconsistent at pair ({}, {})", i + 1, j + 1),
            other => other.to_string(),
        };
        Failure { code, message }
    }
}

type CliResult = Result<u8, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_file<T>(path: &Path, parse: impl Fn(&str) -> rigidity_core::Result<T>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Close { input, space, output } => {
            let m = parse_file(&input, io::parse_measurements)?;
            let closed = closure(&m, space)?;
            eprintln!("{} measured, {} inferred", m.len(), closed.added());
            emit(output.as_deref(), &io::write_measurements(closed.determined()))?;
            Ok(0)
        }
        Command::Clique { input, k, seed, output } => {
            let g = parse_file(&input, io::parse_edge_list)?;
            let k = k.unwrap_or_else(|| max_nonadjacent_codegree(&g));
            let cert = extract_clique(&g, k, seed);
            let hypothesis = max_nonadjacent_codegree(&g) <= k && meets_edge_threshold(g.n(), g.edge_count(), k);
            eprintln!("clique of size {} (k = {k}, size guarantee applies: {hypothesis})", cert.clique.len());
            emit(output.as_deref(), &io::write_certificate(&cert))?;
            Ok(0)
        }
        Command::Reconstruct { input, seed, max_rounds, output } => {
            let m = parse_file(&input, io::parse_measurements)?;
            let res = algorithm1_with_rounds(&m, seed, max_rounds)?;
            match res.emb {
                Some(emb) => {
                    eprintln!("SUCCESS after {} round(s)", res.iterations_used);
                    emit(output.as_deref(), &io::write_embedding(&emb))?;
                    Ok(0)
                }
                None => {
                    eprintln!("FAILED after {} round(s): {:?}", res.iterations_used, res.diagnostics);
                    Ok(EXIT_FAILED)
                }
            }
        }
        Command::Correct { input, c, output } => {
            if c >= Scalar::ratio(1, 4) {
                eprintln!("warning: c = {c} is outside the regime c < 1/4 where recovery is guaranteed");
            }
            let dp = parse_file(&input, io::parse_measurements)?;
            match correct_distances(&dp)? {
                CorrectionOutcome::Corrected { distances, rejected } => {
                    eprintln!("{rejected} reported values rejected and re-derived");
                    emit(output.as_deref(), &io::write_measurements(&distances))?;
                    Ok(0)
                }
                CorrectionOutcome::Undetermined { undetermined, rejected } => {
                    eprintln!("FAILED: {rejected} values rejected, {undetermined} pairs could not be re-derived");
                    Ok(EXIT_FAILED)
                }
                CorrectionOutcome::Inconsistent { i, j, rejected } => {
                    eprintln!("FAILED: {rejected} values rejected, accepted values conflict at ({}, {})", i + 1, j + 1);
                    Ok(EXIT_FAILED)
                }
            }
        }
        Command::Threshold { n, eps_list, trials, seed } => {
            let sweep = threshold_sweep(n, &eps_list, trials, seed)?;
            let mut out = String::from("epsilon,p,successes,trials,fraction\n");
            for pt in &sweep.points {
                if pt.clipped {
                    eprintln!("warning: p for epsilon {} clipped to {}", pt.epsilon, pt.p);
                }
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    pt.epsilon,
                    pt.p,
                    pt.successes,
                    pt.trials,
                    pt.fraction().to_decimal_string(6)
                );
            }
            emit(None, &out)?;
            Ok(0)
        }
        Command::Coverage { n, c, trials, seed } => {
            let res = pair_coverage(n, c, trials, seed)?;
            let out = format!(
                "n,C,p,successes,trials,fraction\n{n},{c},{},{},{},{}\n",
                res.p,
                res.successes,
                res.trials,
                res.fraction().to_decimal_string(6)
            );
            emit(None, &out)?;
            Ok(0)
        }
        Command::Gen { kind, q, k, input, iterations, t, per_side, n, space, planted, p, seed, output } => {
            let text = match kind {
                GenKind::Incidence => io::write_edge_list(&gen_incidence_c4free(q)?),
                GenKind::Blowup => io::write_edge_list(&blow_up(&gen_incidence_c4free(q)?, k)?),
                GenKind::Tgraph => {
                    let mut g = match &input {
                        Some(path) => parse_file(path, io::parse_edge_list)?,
                        None => Graph::complete(3),
                    };
                    if iterations > 6 {
                        return Err(usage("at most 6 iterations are supported"));
                    }
                    for _ in 0..iterations {
                        g = gen_t(&g);
                    }
                    io::write_edge_list(&g)
                }
                GenKind::TreeAmbiguity => {
                    let inst = gen_tree_ambiguity(t, per_side)?;
                    let size = inst.n();
                    let mut out = format!("# tree ambiguity, scale {t}, {per_side} points per side\n");
                    for (name, d) in [("R1", &inst.r1), ("R2", &inst.r2)] {
                        let _ = writeln!(out, "{name} {size}");
                        for i in 0..size {
                            for j in i + 1..size {
                                let _ = writeln!(out, "{} {} {}", i + 1, j + 1, d[i][j]);
                            }
                        }
                    }
                    let _ = writeln!(out, "MEASURED {}", inst.measured.len());
                    for (i, j) in &inst.measured {
                        let _ = writeln!(out, "{} {}", i + 1, j + 1);
                    }
                    out
                }
                GenKind::Planted => {
                    let cfg = match space {
                        Space::Line => gen_planted_line(n, planted, seed)?,
                        Space::Circle => gen_planted_circle(n, seed)?,
                    };
                    io::write_config(&cfg)
                }
                GenKind::Sample => {
                    let path = input.as_ref().ok_or_else(|| usage("`gen --kind sample` needs --input <config>"))?;
                    let cfg = parse_file(path, io::parse_config)?;
                    io::write_measurements(&sample_measurements(&cfg, p, seed)?)
                }
            };
            emit(output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Demo { n, c, planted, seed } => {
            let cfg = gen_planted_line(n, planted, derive_seed(seed, 0))?;
            let p = (c * (n as f64).ln() / n as f64).min(1.0);
            let m = sample_measurements(&cfg, p, derive_seed(seed, 1))?;
            println!("planted {n} {planted} points, p = {p:.6}, {} measured pairs", m.len());
            let res = algorithm1_with_rounds(&m, derive_seed(seed, 2), None)?;
            match res.emb {
                Some(emb) => {
                    let matches = isometry_match(cfg.positions(), &emb)?;
                    println!("SUCCESS after {} round(s)", res.iterations_used);
                    println!("isometry: {}", if matches { "match" } else { "mismatch" });
                    Ok(if matches { 0 } else { EXIT_FAILED })
                }
                None => {
                    println!("FAILED after {} round(s)", res.iterations_used);
                    println!("isometry: n/a");
                    Ok(EXIT_FAILED)
                }
            }
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("RIGIDITY_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| usage(format!("RIGIDITY_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| usage(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = configure_threads().and_then(|()| run(cli.command));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
