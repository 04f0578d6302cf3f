//! `platelab` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 numerical
//! failure (indefinite system, no convergence, nothing found), 4 I/O.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use platelab::geometry::{eventually_contains, hausdorff_distance, ConvexDomain};
use platelab::io::{field_csv, read_domain, scan_csv, write_atomic, write_domain, write_json};
use platelab::plate::{assemble, discretize, solve_plate};
use platelab::positivity::estimate_gamma_f;
use platelab::search::{diagnostics, optimize, symmetry_report, AdmissibleClassSpec, SearchConfig};
use platelab::spectral::{buckling_load_with, BucklingOptions, IterationScheme, START_SEED};
use platelab::ErrorKind;
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::{parse_bump, ExperimentConfig};

#[derive(Parser)]
#[command(name = "platelab", version, about = "Clamped plates under tension: solves, buckling loads, positivity thresholds and shape search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the plate equation at one tension.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        load: LoadArgs,
        /// Tension γ (default 0).
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
    },
    /// Compute the discrete buckling load and its eigenvector.
    Buckling {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
    },
    /// Estimate the positivity threshold γ_f.
    GammaF {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        load: LoadArgs,
        #[command(flatten)]
        positivity: PositivityArgs,
    },
    /// Search the admissible class for a domain minimizing γ_f.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        load: LoadArgs,
        #[command(flatten)]
        positivity: PositivityArgs,
        #[arg(long)]
        iterations: Option<usize>,
        /// Vertex count K of every proposal.
        #[arg(long)]
        vertices: Option<usize>,
        #[arg(long)]
        sigma0: Option<f64>,
        #[arg(long)]
        t0: Option<f64>,
        /// Target area c₁ (default: area of the start domain).
        #[arg(long)]
        area: Option<f64>,
    },
    /// Geometry diagnostics on domain files.
    Diag {
        #[command(flatten)]
        common: CommonArgs,
        /// Report the Hausdorff distance between --domain and this domain.
        #[arg(long)]
        other: Option<PathBuf>,
        /// Domain files of a sequence converging to --domain.
        #[arg(long, num_args = 1..)]
        sequence: Option<Vec<PathBuf>>,
        /// Compact subset K for the eventual-containment check.
        #[arg(long)]
        compact: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
#[group(multiple = false)]
struct LoadArgs {
    /// Constant load f ≡ A.
    #[arg(long, value_name = "A")]
    f_const: Option<f64>,
    /// Gaussian bump A·exp(−|x−(x0,y0)|²/(2s²)).
    #[arg(long, value_name = "x0,y0,s,A", value_parser = parse_bump, allow_hyphen_values = true)]
    f_bump: Option<[f64; 4]>,
    /// CSV of grid samples with header i,j,f.
    #[arg(long, value_name = "PATH")]
    f_grid: Option<PathBuf>,
}

#[derive(Args)]
struct PositivityArgs {
    #[arg(long)]
    gamma_max: Option<f64>,
    #[arg(long)]
    scan_points: Option<usize>,
    #[arg(long)]
    tol_pos: Option<f64>,
    #[arg(long)]
    bisection_tol: Option<f64>,
    /// Judge positivity on all nodes instead of nodes at least 2h deep.
    #[arg(long)]
    raw_min: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Inverse,
    LocallyOptimal,
}

impl SchemeArg {
    fn name(self) -> &'static str {
        match self {
            SchemeArg::Inverse => "inverse",
            SchemeArg::LocallyOptimal => "locally_optimal",
        }
    }
}

impl CommonArgs {
    fn flags(&self) -> ExperimentConfig {
        ExperimentConfig {
            domain: self.domain.clone(),
            h: self.h,
            out: self.out.clone(),
            seed: self.seed,
            ..Default::default()
        }
    }
}

impl LoadArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.f_const = self.f_const;
        c.f_bump = self.f_bump;
        c.f_grid = self.f_grid.clone();
    }
}

impl PositivityArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.gamma_max = self.gamma_max;
        c.scan_points = self.scan_points;
        c.tol_pos = self.tol_pos;
        c.bisection_tol = self.bisection_tol;
        c.raw_min = self.raw_min.then_some(true);
    }
}

/// Merged configuration plus the subcommand name.
fn resolve(command: &Command) -> Result<(&'static str, ExperimentConfig)> {
    let (name, common) = match command {
        Command::Solve { common, .. } => ("solve", common),
        Command::Buckling { common, .. } => ("buckling", common),
        Command::GammaF { common, .. } => ("gamma-f", common),
        Command::Optimize { common, .. } => ("optimize", common),
        Command::Diag { common, .. } => ("diag", common),
    };
    let mut flags = common.flags();
    match command {
        Command::Solve { load, gamma, .. } => {
            load.apply(&mut flags);
            flags.gamma = *gamma;
        }
        Command::Buckling { scheme, .. } => flags.scheme = scheme.map(|s| s.name().to_owned()),
        Command::GammaF { load, positivity, .. } => {
            load.apply(&mut flags);
            positivity.apply(&mut flags);
        }
        Command::Optimize {
            load,
            positivity,
            iterations,
            vertices,
            sigma0,
            t0,
            area,
            ..
        } => {
            load.apply(&mut flags);
            positivity.apply(&mut flags);
            flags.iterations = *iterations;
            flags.vertices = *vertices;
            flags.sigma0 = *sigma0;
            flags.t0 = *t0;
            flags.area = *area;
        }
        Command::Diag {
            other,
            sequence,
            compact,
            ..
        } => {
            flags.other = other.clone();
            flags.sequence = sequence.clone();
            flags.compact = compact.clone();
        }
    }
    let base = match &common.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    let mut merged = base.overlay(flags);
    merged.seed.get_or_insert(0);
    Ok((name, merged))
}

#[derive(Serialize)]
struct InputRecord {
    path: PathBuf,
    sha256: String,
}

#[derive(Serialize)]
struct Versions {
    platelab: &'static str,
    platelab_cli: &'static str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    versions: Versions,
    /// Seed of the single generator used by the shape search.
    seed: u64,
    /// Fixed seed of the buckling start vector.
    buckling_start_seed: u64,
    /// Hash of the parameters and the contents of every input file.
    inputs_hash: String,
    inputs: Vec<InputRecord>,
    config: &'a ExperimentConfig,
    outputs: Vec<String>,
}

/// Collects output files and finishes the run with a manifest.
struct Run<'a> {
    command: &'a str,
    config: &'a ExperimentConfig,
    dir: PathBuf,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    fn new(command: &'a str, config: &'a ExperimentConfig) -> Result<Self> {
        let dir = config.out_dir()?.to_path_buf();
        std::fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Run {
            command,
            config,
            dir,
            outputs: Vec::new(),
        })
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        write_json(&self.dir.join(name), value)?;
        self.outputs.push(name.to_owned());
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        write_atomic(&self.dir.join(name), body.as_bytes())?;
        self.outputs.push(name.to_owned());
        Ok(())
    }

    fn domain(&mut self, name: &str, d: &ConvexDomain) -> Result<()> {
        write_domain(&self.dir.join(name), d)?;
        self.outputs.push(name.to_owned());
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        // A config file that reproduces this run when passed back via --config.
        self.json("config.json", self.config)?;
        let mut inputs = Vec::new();
        let mut all = Sha256::new();
        let mut params = self.config.clone();
        params.out = None;
        all.update(self.command.as_bytes());
        all.update(serde_json::to_vec(&params)?);
        for path in self.config.input_files() {
            let bytes = std::fs::read(&path).with_context(|| format!("cannot read {}", path.display()))?;
            let digest = hex::encode(Sha256::digest(&bytes));
            all.update(digest.as_bytes());
            inputs.push(InputRecord { path, sha256: digest });
        }
        let manifest = Manifest {
            command: self.command,
            versions: Versions {
                platelab: platelab::VERSION,
                platelab_cli: env!("CARGO_PKG_VERSION"),
            },
            seed: self.config.seed.unwrap_or(0),
            buckling_start_seed: START_SEED,
            inputs_hash: hex::encode(all.finalize()),
            inputs,
            config: self.config,
            outputs: self.outputs.clone(),
        };
        write_json(&self.dir.join("manifest.json"), &manifest)?;
        Ok(())
    }
}

fn read_domain_arg(path: &Path) -> Result<ConvexDomain> {
    read_domain(path).with_context(|| format!("invalid domain file {}", path.display()))
}

fn cmd_solve(cfg: &ExperimentConfig) -> Result<()> {
    let d = read_domain_arg(cfg.domain_path()?)?;
    let h = cfg.grid_h()?;
    let load = cfg.load()?;
    let gamma = cfg.gamma.unwrap_or(0.0);
    let mut run = Run::new("solve", cfg)?;
    let ops = assemble(discretize(&d, h)?);
    let report = solve_plate(&ops, gamma, &load)?;
    run.json("report.json", &report)?;
    run.text("field.csv", &field_csv(ops.grid(), &report.u))?;
    println!(
        "solve: gamma={gamma} center={:.6e} min={:.3e} residual={:.1e} -> {}",
        report.center_value,
        report.min_u,
        report.residual,
        run.dir.display()
    );
    run.finish()
}

fn cmd_buckling(cfg: &ExperimentConfig) -> Result<()> {
    let d = read_domain_arg(cfg.domain_path()?)?;
    let h = cfg.grid_h()?;
    let scheme = match cfg.scheme.as_deref() {
        None | Some("locally_optimal") => IterationScheme::LocallyOptimal,
        Some("inverse") => IterationScheme::Inverse,
        Some(s) => bail!("unknown scheme {s:?}; expected inverse or locally_optimal"),
    };
    let mut run = Run::new("buckling", cfg)?;
    let ops = assemble(discretize(&d, h)?);
    let opts = BucklingOptions {
        scheme,
        ..BucklingOptions::default()
    };
    let res = buckling_load_with(&ops, &opts)?;
    run.json("buckling.json", &res)?;
    run.text("eigenvector.csv", &field_csv(ops.grid(), &res.eigenvector))?;
    println!(
        "buckling: mu1={:.10e} residual={:.1e} iterations={} -> {}",
        res.mu1,
        res.residual,
        res.iterations,
        run.dir.display()
    );
    run.finish()
}

fn cmd_gamma_f(cfg: &ExperimentConfig) -> Result<()> {
    let d = read_domain_arg(cfg.domain_path()?)?;
    let h = cfg.grid_h()?;
    let load = cfg.load()?;
    let pos = cfg.positivity()?;
    let mut run = Run::new("gamma-f", cfg)?;
    let rep = estimate_gamma_f(&d, &load, h, &pos)?;
    run.json("gamma_f.json", &rep)?;
    run.text("scan.csv", &scan_csv(&rep.scan))?;
    match rep.gamma_star {
        Some(g) => println!("gamma-f: gamma_star={g:.6e} mu1={:.6e} -> {}", rep.mu1, run.dir.display()),
        None => println!("gamma-f: no positive suffix up to gamma_max -> {}", run.dir.display()),
    }
    run.finish()
}

#[derive(Serialize)]
struct OptimizeSummary {
    best_iter: usize,
    incumbent_gamma_star: Option<f64>,
    incumbent_mu1: Option<f64>,
    accepted: usize,
    iterations: usize,
    diagnostics_skipped: Option<String>,
    symmetry_skipped: Option<String>,
}

fn cmd_optimize(cfg: &ExperimentConfig) -> Result<()> {
    let start = read_domain_arg(cfg.domain_path()?)?;
    let h = cfg.grid_h()?;
    let load = cfg.load()?;
    let area = cfg.area.unwrap_or_else(|| start.area());
    let spec = AdmissibleClassSpec::new(start.ball_radius(), area)?;
    let mut sc = SearchConfig::new(spec, h);
    sc.positivity = cfg.positivity()?;
    sc.seed = cfg.seed.unwrap_or(0);
    sc.start = Some(start);
    if let Some(n) = cfg.iterations {
        sc.iterations = n;
    }
    if let Some(k) = cfg.vertices {
        sc.vertex_count = k;
    }
    sc.sigma0 = cfg.sigma0;
    sc.t0 = cfg.t0;

    let mut run = Run::new("optimize", cfg)?;
    let trace = optimize(&sc, &load)?;
    run.text("trace.jsonl", &trace.to_json_lines()?)?;
    run.json("search_config.json", &trace.config)?;
    if let Some(d) = &trace.incumbent().domain {
        run.domain("incumbent.json", d)?;
    }
    let diagnostics_skipped = match diagnostics(&trace) {
        Ok(diag) => {
            run.json("diagnostics.json", &diag)?;
            None
        }
        Err(e) => Some(e.to_string()),
    };
    let symmetry_skipped = match symmetry_report(&trace, &load) {
        Ok(sym) => {
            run.json("symmetry.json", &sym)?;
            None
        }
        Err(e) => Some(e.to_string()),
    };
    let inc = trace.incumbent();
    let summary = OptimizeSummary {
        best_iter: inc.iter,
        incumbent_gamma_star: inc.gamma_star,
        incumbent_mu1: inc.mu1,
        accepted: trace.accepted().count(),
        iterations: trace.iterates.len() - 1,
        diagnostics_skipped,
        symmetry_skipped,
    };
    run.json("optimize.json", &summary)?;
    println!(
        "optimize: {} iterations, {} accepted, incumbent gamma_star={:?} at iter {} -> {}",
        summary.iterations,
        summary.accepted,
        summary.incumbent_gamma_star,
        summary.best_iter,
        run.dir.display()
    );
    run.finish()
}

#[derive(Serialize)]
struct DiagReport {
    hausdorff_distance: Option<f64>,
    /// 1-based index from which every sequence element contains the compact set.
    eventually_contains: Option<Option<usize>>,
}

fn cmd_diag(cfg: &ExperimentConfig) -> Result<()> {
    let d = read_domain_arg(cfg.domain_path()?)?;
    let containment = match (&cfg.sequence, &cfg.compact) {
        (Some(seq), Some(k)) => Some((seq, k)),
        (None, None) => None,
        _ => bail!("--sequence and --compact must be given together"),
    };
    if cfg.other.is_none() && containment.is_none() {
        bail!("nothing to do; pass --other and/or --sequence with --compact");
    }
    let mut run = Run::new("diag", cfg)?;
    let hausdorff = match &cfg.other {
        Some(p) => Some(hausdorff_distance(&d, &read_domain_arg(p)?)),
        None => None,
    };
    let eventually = match containment {
        Some((seq, k)) => {
            let domains = seq.iter().map(|p| read_domain_arg(p)).collect::<Result<Vec<_>>>()?;
            let k = read_domain_arg(k)?;
            Some(eventually_contains(&domains, &d, &k)?)
        }
        None => None,
    };
    let report = DiagReport {
        hausdorff_distance: hausdorff,
        eventually_contains: eventually,
    };
    run.json("diag.json", &report)?;
    if let Some(v) = hausdorff {
        println!("diag: d_H={v:.12e}");
    }
    if let Some(m0) = eventually {
        match m0 {
            Some(m) => println!("diag: eventually contains from m0={m}"),
            None => println!("diag: last element does not contain K"),
        }
    }
    run.finish()
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(pe) = cause.downcast_ref::<platelab::Error>() {
            return match pe.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::Io => 4,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
        if let Some(je) = cause.downcast_ref::<serde_json::Error>() {
            return if je.is_io() { 4 } else { 2 };
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    let (name, cfg) = resolve(&cli.command)?;
    match name {
        "solve" => cmd_solve(&cfg),
        "buckling" => cmd_buckling(&cfg),
        "gamma-f" => cmd_gamma_f(&cfg),
        "optimize" => cmd_optimize(&cfg),
        _ => cmd_diag(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
