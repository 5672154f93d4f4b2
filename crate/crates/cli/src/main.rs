use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sunchain_cli::config::{ExperimentConfig, OutputFormat, Overrides};
use sunchain_cli::run::{execute, to_json, write_outputs, Command, RunError, MANIFEST_SCHEMA};
use sunchain_cli::selftest::{run_selftest, CheckOutcome};
use sunchain_core::ModeOrder;

/// Exact-diagonalization checks of level ordering in SU(N) Hubbard chains.
#[derive(Parser)]
#[command(name = "sunchain", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every check and exit nonzero on any failure.
    Verify(RunArgs),
    /// Compute diagram energies and write the tables without gating on checks.
    Spectrum(RunArgs),
    /// Exhaustive invariant suite on small chains.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write manifest.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, hide = true, default_value = "flavor-major", value_parser = parse_order)]
        mode_order: ModeOrder,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    flavors: Option<usize>,
    #[arg(long)]
    particles: Option<usize>,
    /// Record wall time in the manifest (makes manifests differ between runs).
    #[arg(long)]
    timing: bool,
}

fn parse_order(s: &str) -> Result<ModeOrder, String> {
    match s {
        "flavor-major" => Ok(ModeOrder::FlavorMajor),
        "site-major" => Ok(ModeOrder::SiteMajor),
        other => Err(format!("unknown mode order {other:?}")),
    }
}

fn run(args: RunArgs, command: Command) -> Result<bool, RunError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    cfg.apply(&Overrides {
        sites: args.sites,
        flavors: args.flavors,
        particles: args.particles,
        seed: args.seed,
        out_dir: args.out_dir,
        format: args.format,
    });
    let out = execute(&cfg, command, args.timing)?;
    let dir = cfg.outputs.dir.clone().unwrap_or_else(|| PathBuf::from("sunchain-out"));
    for d in &out.report.draws {
        for r in &d.spectra {
            println!(
                "draw {} M={}: lowest diagram {} (multiplicity {}), {} comparable pairs, {} violations",
                d.index,
                r.particles,
                r.ground.lowest_diagram,
                r.ground.multiplicity,
                r.comparable_pairs,
                r.violations.len()
            );
        }
        for s in &d.sectors {
            println!(
                "draw {} sector {}: E0 = {}",
                d.index, s.summary.sector, s.summary.energies[0]
            );
        }
        if command == Command::Verify {
            for f in &d.failures {
                println!("draw {}: FAILED {f}", d.index);
            }
        }
    }
    for path in write_outputs(&out, &dir, cfg.outputs.format)? {
        println!("wrote {}", path.display());
    }
    if command == Command::Verify {
        for (name, c) in &out.report.checks {
            println!(
                "{name}: {} passed, {} failed, {} indeterminate",
                c.passed, c.failed, c.indeterminate
            );
        }
        println!("{}", if out.report.passed { "all checks passed" } else { "checks FAILED" });
    }
    Ok(command == Command::Spectrum || out.report.passed)
}

#[derive(Serialize)]
struct SelftestManifest {
    schema: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    mode_order: ModeOrder,
    checks: Vec<CheckOutcome>,
    passed: bool,
}

fn selftest(seed: u64, out_dir: Option<PathBuf>, order: ModeOrder) -> Result<bool, RunError> {
    let checks = run_selftest(order, seed);
    for c in &checks {
        match &c.detail {
            None => println!("ok    {} ({} cases)", c.name, c.cases),
            Some(d) => println!("FAIL  {}: {d}", c.name),
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    if let Some(dir) = out_dir {
        let manifest = SelftestManifest {
            schema: MANIFEST_SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: "selftest",
            seed,
            mode_order: order,
            checks,
            passed,
        };
        std::fs::create_dir_all(&dir)
            .and_then(|_| std::fs::write(dir.join("manifest.json"), to_json(&manifest)))
            .map_err(|source| RunError::Io { path: dir.clone(), source })?;
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot size worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Cmd::Verify(a) => run(a, Command::Verify),
        Cmd::Spectrum(a) => run(a, Command::Spectrum),
        Cmd::Selftest { seed, out_dir, mode_order } => selftest(seed, out_dir, mode_order),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
