//! `onebit` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::checks::{run_check, Check, CheckParams};
use super::io::{self, sidecar, Manifest};
use super::{run_sweep, trial_seed, ExperimentConfig, Task};
use crate::error::Error;
use crate::geometry::{
    cell_assignment, partition_refines, sample_sphere_cap, tessellate, SignalSetSpec, REPORT_MARGIN_DIVISOR,
};
use crate::lp::ToleranceConfig;
use crate::measurement::{gen_ensemble, gen_gaussian_ensemble, gen_sparse_signal, Distribution, MagnitudeModel};
use crate::recovery::{recover, recovery_error};
use crate::rng::derive_seed;

#[derive(Debug, Parser)]
#[command(name = "onebit", version, about = "One-bit compressed sensing by linear programming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a signal, a measurement matrix and its sign pattern
    Gen(Common),
    /// Recover a direction from generated or user-supplied measurements
    Recover(RecoverArgs),
    /// Monte Carlo recovery sweep over measurement counts
    Sweep(Common),
    /// Sampled hyperplane tessellation report over nested row prefixes
    Tessellate(TessellateArgs),
    /// Run a named statistical or geometric check
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Ambient dimension
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity level
    #[arg(long)]
    s: Option<usize>,
    /// Measurement counts, comma separated
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Distribution::Gaussian)]
    dist: Distribution,
    #[arg(long, value_enum, default_value_t = MagnitudeModel::UnitGaussian)]
    mag: MagnitudeModel,
    /// Output path (a directory for `gen`)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    tol_feas: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_opt: f64,
}

#[derive(Debug, Args)]
struct RecoverArgs {
    #[command(flatten)]
    common: Common,
    /// Measurement matrix file, one row per line
    #[arg(long, requires = "signs")]
    matrix: Option<PathBuf>,
    /// Sign pattern file, one of -1, 0, 1 per line
    #[arg(long, requires = "matrix")]
    signs: Option<PathBuf>,
    /// True signal file, used only to report the error
    #[arg(long)]
    signal: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TessellateArgs {
    #[command(flatten)]
    common: Common,
    /// Number of sampled points
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Separation margin, defaults to delta / 30
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    check: Check,
    #[arg(long)]
    samples: Option<usize>,
    /// Deviation threshold for the concentration checks
    #[arg(long)]
    t: Option<f64>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::SparsityOutOfRange { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other),
        }
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns 0 on success, 1 on experiment failure and 2 on usage errors.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Gen(c) => gen(&c),
        Command::Recover(a) => recover_cmd(&a),
        Command::Sweep(c) => sweep(&c),
        Command::Tessellate(a) => tessellate_cmd(&a),
        Command::Verify(a) => verify(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn config(task: Task, c: &Common, default_m: &[usize], default_trials: usize) -> std::result::Result<ExperimentConfig, Failure> {
    let tolerances = ToleranceConfig { feasibility: c.tol_feas, optimality: c.tol_opt, ..ToleranceConfig::default() };
    if !(c.tol_feas > 0.0) || !(c.tol_opt > 0.0) {
        return Err(Failure::Usage("tolerances must be positive".into()));
    }
    let config = ExperimentConfig {
        task,
        n: c.n.unwrap_or(128),
        s: c.s.unwrap_or(4),
        m_list: if c.m.is_empty() { default_m.to_vec() } else { c.m.clone() },
        trials: c.trials.unwrap_or(default_trials),
        seed: c.seed,
        distribution: c.dist,
        magnitude_model: c.mag,
        delta: c.delta.unwrap_or(0.5),
        tolerances,
        output_path: c.out.as_ref().map(|p| p.display().to_string()),
    };
    config.validate()?;
    Ok(config)
}

fn write_manifest(
    out: &Path,
    command: &str,
    config: &ExperimentConfig,
    seeds: Vec<u64>,
    outputs: Vec<String>,
) -> std::result::Result<(), Failure> {
    Manifest::new(command, config, seeds, outputs).write(&sidecar(out, "manifest.json"))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match out {
        Some(path) => io::write_text(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(Error::from)?;
        }
    }
    Ok(())
}

fn gen(c: &Common) -> CliResult {
    let cfg = config(Task::Gen, c, &[256], 1)?;
    let dir = c.out.clone().ok_or_else(|| Failure::Usage("gen needs --out <dir>".into()))?;
    let m = cfg.m_list[0];
    let seed = trial_seed(cfg.seed, m, 0);
    let x = gen_sparse_signal(cfg.n, cfg.s, derive_seed(seed, &[0]), cfg.magnitude_model)?;
    let a = gen_ensemble(m, cfg.n, derive_seed(seed, &[1]), cfg.distribution)?;
    let y = a.measure(&x)?;
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    let files = [
        ("signal.txt", io::format_signal(&x)),
        ("matrix.txt", io::format_matrix(&a)),
        ("signs.txt", io::format_signs(&y)),
    ];
    for (name, text) in &files {
        io::write_text(&dir.join(name), text)?;
    }
    Manifest::new("gen", &cfg, vec![seed], files.iter().map(|(n, _)| n.to_string()).collect())
        .write(&dir.join("manifest.json"))?;
    println!("wrote n = {}, m = {m}, s = {} to {}", cfg.n, cfg.s, dir.display());
    Ok(0)
}

fn recover_cmd(args: &RecoverArgs) -> CliResult {
    let c = &args.common;
    let cfg = config(Task::Recover, c, &[256], 1)?;
    let mut seeds = Vec::new();
    let (a, y, truth) = match (&args.matrix, &args.signs) {
        (Some(mp), Some(sp)) => {
            let truth = args.signal.as_deref().map(io::read_signal).transpose()?;
            (io::read_matrix(mp)?, io::read_signs(sp)?, truth)
        }
        _ => {
            let m = cfg.m_list[0];
            let seed = trial_seed(cfg.seed, m, 0);
            seeds.push(seed);
            let x = gen_sparse_signal(cfg.n, cfg.s, derive_seed(seed, &[0]), cfg.magnitude_model)?;
            let a = gen_ensemble(m, cfg.n, derive_seed(seed, &[1]), cfg.distribution)?;
            let y = a.measure(&x)?;
            (a, y, Some(x))
        }
    };
    let result = recover(&a, &y, &cfg.tolerances)?;
    println!("m = {}, n = {}", a.rows(), a.cols());
    println!("objective = {:.9e}, iterations = {}", result.solver.objective_value, result.solver.iterations);
    println!("l1/l2 of solution = {:.6}", result.l1_over_l2);
    println!(
        "certificate: |T| = {}, |Omega| = {}, cardinality_ok = {}, kernel residual = {:.3e}",
        result.certificate.support.len(),
        result.certificate.active_rows.len(),
        result.certificate.cardinality_ok,
        result.certificate.kernel_residual
    );
    let mut header = String::from("index,x_hat,direction");
    if let Some(x) = &truth {
        println!("recovery error = {:.6}", recovery_error(&result.direction, x)?);
        header.push_str(",x_true");
    }
    if let Some(out) = &c.out {
        let mut text = header + "\n";
        for i in 0..a.cols() {
            text.push_str(&format!(
                "{i},{},{}",
                io::fmt_sci(result.x_hat.as_slice()[i]),
                io::fmt_sci(result.direction.as_slice()[i])
            ));
            if let Some(x) = &truth {
                text.push_str(&format!(",{}", io::fmt_sci(x.as_slice()[i])));
            }
            text.push('\n');
        }
        io::write_text(out, &text)?;
        write_manifest(out, "recover", &cfg, seeds, vec![out.display().to_string()])?;
    }
    Ok(0)
}

fn sweep(c: &Common) -> CliResult {
    let cfg = config(Task::Sweep, c, &[100, 200, 400], 10)?;
    let outcome = run_sweep(&cfg)?;
    emit(c.out.as_deref(), &outcome.to_csv())?;
    if let Some(out) = &c.out {
        let timing = sidecar(out, "timing.csv");
        io::write_text(&timing, &outcome.timing_csv())?;
        let seeds = outcome.rows.iter().map(|r| r.seed).collect();
        write_manifest(out, "sweep", &cfg, seeds, vec![out.display().to_string(), timing.display().to_string()])?;
    }
    let failed = outcome.rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} of {} trials failed", outcome.rows.len());
    }
    Ok(if outcome.all_failed() { 1 } else { 0 })
}

fn tessellate_cmd(args: &TessellateArgs) -> CliResult {
    let c = &args.common;
    let mut cfg = config(Task::Tessellate, c, &[50, 100, 200, 400], 1)?;
    if c.n.is_none() {
        cfg.n = 32;
    }
    if c.s.is_none() {
        cfg.s = 2;
    }
    if cfg.s > cfg.n {
        return Err(Failure::Usage(format!("s = {} exceeds n = {}", cfg.s, cfg.n)));
    }
    let mut ms = cfg.m_list.clone();
    ms.sort_unstable();
    let margin = args.margin.unwrap_or(cfg.delta / REPORT_MARGIN_DIVISOR);
    let spec = SignalSetSpec::effectively_sparse(cfg.n, cfg.s as f64)?;
    let points_seed = derive_seed(cfg.seed, &[0]);
    let matrix_seed = derive_seed(cfg.seed, &[1]);
    let points = sample_sphere_cap(&spec, args.samples, points_seed)?;
    let a = gen_gaussian_ensemble(*ms.last().unwrap_or(&0), cfg.n, matrix_seed)?;

    let mut text = String::from(
        "m,delta,margin,sampled_points,nonempty_cells,max_cell_diameter_lb,far_pairs,min_separation,\
unseparated_pairs,refines_previous\n",
    );
    let mut previous: Option<Vec<usize>> = None;
    for &m in &ms {
        let prefix = a.prefix(m);
        let cells = cell_assignment(&points, &prefix);
        let refines = previous.as_ref().is_none_or(|p| partition_refines(&cells, p));
        let r = tessellate(&points, &prefix, cfg.delta, margin);
        text.push_str(&format!(
            "{m},{},{},{},{},{},{},{},{},{refines}\n",
            io::fmt_sci(r.delta),
            io::fmt_sci(r.margin),
            r.sampled_points,
            r.nonempty_cells,
            io::fmt_sci(r.max_cell_diameter_lb),
            r.separation_stats.len(),
            r.min_separation().map_or("NA".into(), |v| v.to_string()),
            r.unseparated_pairs(),
        ));
        previous = Some(cells);
    }
    emit(c.out.as_deref(), &text)?;
    if let Some(out) = &c.out {
        write_manifest(out, "tessellate", &cfg, vec![points_seed, matrix_seed], vec![out.display().to_string()])?;
    }
    Ok(0)
}

fn verify(args: &VerifyArgs) -> CliResult {
    let c = &args.common;
    let params = CheckParams {
        n: c.n,
        s: c.s,
        m: c.m.clone(),
        trials: c.trials,
        samples: args.samples,
        t: args.t,
        delta: c.delta,
        seed: c.seed,
    };
    let report = run_check(args.check, &params)?;
    let mut text = String::new();
    for line in &report.lines {
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(if report.passed { "PASS\n" } else { "FAIL\n" });
    emit(c.out.as_deref(), &text)?;
    if c.out.is_some() {
        print!("{text}");
    }
    Ok(if report.passed { 0 } else { 1 })
}
