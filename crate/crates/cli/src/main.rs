//! `chaoslab` command-line driver.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a run
//! errors, 2 for an invalid configuration.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chaoslab::fbm::{write_paths, SamplingMethod};
use chaoslab::gaussian::hermite::Normalization;
use chaoslab::suites::{self, SuiteConfig, SuiteReport};
use chaoslab::variations::WeightFunction;
use chaoslab::Error;

#[derive(Parser)]
#[command(name = "chaoslab", version = env!("CARGO_PKG_VERSION"), about = "Seeded verification suites for Hermite variations of fBm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized checks of the Malliavin-calculus identities.
    Identities(Common),
    /// fBm grid inequalities, sampler checks and path export.
    Fbm(Common),
    /// Weighted Hermite variation, correction and decomposition.
    Variation(Common),
    /// Compare G_n against its mixed Gaussian limit.
    LimitTest(Common),
    /// Exact fourth moments and the Berry-Esseen comparison.
    BerryEsseen(Common),
    /// The Brownian example F_n = sqrt(n) ∫ t^n W dW.
    ExampleBrownian(Common),
    /// Tables of rho, sigma^2 and the regime map.
    Constants(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON config; command-line flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json, samples.csv and paths.fbm.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long = "H")]
    hurst: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `poly:c0,c1,..`, `cos:a,b` or `expq:c`.
    #[arg(long)]
    weight: Option<WeightFunction>,
    /// `monic` or `scaled`.
    #[arg(long)]
    normalization: Option<Normalization>,
    /// Normalization of the limit constants (limit-test).
    #[arg(long)]
    constants_normalization: Option<Normalization>,
    /// `cholesky` or `circulant`.
    #[arg(long)]
    method: Option<SamplingMethod>,
    /// Record the decomposition of G_n (variation).
    #[arg(long)]
    decompose: bool,
    #[arg(long)]
    n_fine: Option<usize>,
    #[arg(long)]
    instances: Option<usize>,
    /// KS significance level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Write sampled paths to paths.fbm (fbm).
    #[arg(long)]
    export_paths: bool,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load_config(common: &Common) -> Result<SuiteConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => SuiteConfig::default(),
    };
    macro_rules! apply {
        ($($field:ident => $target:ident),*) => {
            $(if let Some(v) = common.$field.clone() { cfg.$target = v; })*
        };
    }
    apply!(q => q, hurst => hurst, n => n, m => m, seed => seed, weight => weight,
        normalization => normalization, n_fine => n_fine, instances => instances, alpha => alpha);
    if common.method.is_some() {
        cfg.method = common.method;
    }
    if common.constants_normalization.is_some() {
        cfg.constants_normalization = common.constants_normalization;
    }
    cfg.decompose |= common.decompose;
    cfg.export_paths |= common.export_paths;
    cfg.validate()?;
    Ok(cfg)
}

fn write_outputs(report: &SuiteReport, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report.to_json() + "\n")?;
    if let Some(csv) = &report.samples_csv {
        fs::write(dir.join("samples.csv"), csv)?;
    }
    if let Some(batch) = &report.paths {
        let file = fs::File::create(dir.join("paths.fbm"))?;
        write_paths(batch, BufWriter::new(file)).map_err(std::io::Error::other)?;
    }
    Ok(())
}

fn run(command: Command) -> Result<bool, Failure> {
    let (suite, common): (fn(&SuiteConfig) -> chaoslab::Result<SuiteReport>, Common) = match command {
        Command::Identities(c) => (suites::identities, c),
        Command::Fbm(c) => (suites::fbm, c),
        Command::Variation(c) => (suites::variation, c),
        Command::LimitTest(c) => (suites::limit_test, c),
        Command::BerryEsseen(c) => (suites::berry_esseen, c),
        Command::ExampleBrownian(c) => (suites::example_brownian, c),
        Command::Constants(c) => (suites::constants, c),
    };
    let cfg = load_config(&common)?;
    let report = suite(&cfg)?;
    for check in &report.checks {
        let tag = if check.passed() { "pass" } else { "FAIL" };
        eprintln!("{tag:>4}  {:<32} {:.4e} (threshold {:.4e})", check.name, check.statistic, check.threshold);
    }
    match &common.out {
        Some(dir) => {
            write_outputs(&report, dir).map_err(|e| Failure::Run(format!("{}: {e}", dir.display())))?;
            eprintln!("wrote {}", dir.join("report.json").display());
        }
        None => println!("{}", report.to_json()),
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("CHAOSLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // Results do not depend on the pool size; this only caps CPU use.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("invalid configuration: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
