use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nte_core::study::{run_study, Study, StudyConfig};

#[derive(Parser)]
#[command(name = "nte", version, about = "Diffusive-limit transport studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ε sweep of ‖u − U₀‖ and the remainder norms (also runs configured
    /// oracle studies)
    Converge(Common),
    /// Half-space decay and far-field stability
    Milne(Common),
    /// Source and boundary-data norms over the ε sweep
    Sources(Common),
    /// Characteristic paths and hollow-region masks
    Characteristics(Common),
    /// Weak-formulation terms, Green identity and the constant-data run
    KernelCheck(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; every key is optional
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output` in the configuration
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl Command {
    fn parts(&self) -> (&Common, &'static [Study]) {
        match self {
            Command::Converge(c) => (c, &[Study::Convergence, Study::Oracle]),
            Command::Milne(c) => (c, &[Study::Milne]),
            Command::Sources(c) => (c, &[Study::Sources]),
            Command::Characteristics(c) => (c, &[Study::Characteristics]),
            Command::KernelCheck(c) => (c, &[Study::KernelCheck, Study::Exactness]),
        }
    }
}

fn run(cli: Cli) -> nte_core::Result<bool> {
    let (common, owned) = cli.command.parts();
    let mut cfg = match &common.config {
        Some(p) => StudyConfig::load(p)?,
        None => StudyConfig::default(),
    };
    let picked: Vec<Study> = cfg.studies.iter().copied().filter(|s| owned.contains(s)).collect();
    cfg.studies = if picked.is_empty() { vec![owned[0]] } else { picked };
    if let Some(out) = &common.out {
        cfg.output = out.clone();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build_global()
        .map_err(|e| nte_core::Error::Config(e.to_string()))?;
    let report = run_study(&cfg)?;
    for b in &report.bands {
        let range = format!(
            "[{}, {}]",
            b.band.min.map_or("-inf".into(), |v| v.to_string()),
            b.band.max.map_or("inf".into(), |v| v.to_string())
        );
        println!(
            "{} slope {:<22} {:>8.4} in {range}",
            if b.pass { "PASS" } else { "FAIL" },
            b.band.quantity,
            b.slope
        );
    }
    for c in &report.checks {
        println!(
            "{} {:<16} {} = {:.3e} {} {:.3e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.study,
            c.name,
            c.value,
            c.relation,
            c.limit
        );
    }
    for w in &report.warnings {
        println!("WARN {w}");
    }
    println!("report written to {}", cfg.output.join("report.json").display());
    Ok(report.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
