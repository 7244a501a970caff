use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use muskat_core::format::fmt_f64;
use muskat_core::MuskatError;
use muskat_cli::sweep::summary_csv;
use muskat_cli::{exit, load_scenario, run_batch, run_scenario, run_suite, snapshot_at, Batch};

/// Numerical laboratory for the two-phase Muskat interface problem.
#[derive(Parser)]
#[command(name = "muskat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for quadrature and sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the noise component of the initial data.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (file path or builtin name) and write its artifacts.
    Run { config: String },
    /// Run a batch of scenarios and print the summary table.
    Sweep { batch: PathBuf },
    /// Run a verification suite: operators, equivalence, linear, principles, convergence, all.
    Verify { suite: String },
    /// Write the interface at time `t` as `x,f` CSV.
    Snapshot {
        config: String,
        #[arg(long)]
        t: f64,
    },
}

fn fail(e: &MuskatError) -> i32 {
    eprintln!("error: {e}");
    match e {
        MuskatError::Config { .. } | MuskatError::Io(_) => exit::CONFIG,
        MuskatError::StepDiverged { .. } => exit::DIVERGED,
        _ => exit::CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    }
    let code = match &cli.command {
        Command::Run { config } => cmd_run(config, &cli),
        Command::Sweep { batch } => cmd_sweep(batch, &cli),
        Command::Verify { suite } => cmd_verify(suite, &cli),
        Command::Snapshot { config, t } => cmd_snapshot(config, *t, &cli),
    };
    ExitCode::from(code as u8)
}

fn cmd_run(config: &str, cli: &Cli) -> i32 {
    let scenario = match load_scenario(config, cli.seed) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| scenario.output_dir.clone())
        .unwrap_or_else(|| Path::new("out").join(&scenario.name));
    match run_scenario(&scenario, Some(&out)) {
        Ok(o) => {
            println!("{}: {}", scenario.name, o.summary.status.as_str());
            for (name, v) in &o.monitors {
                let margin = v.worst_margin.map(fmt_f64).unwrap_or_else(|| "-".into());
                println!("  {name}: {:?} (worst margin {margin})", v.status);
            }
            if let Some(d) = &o.summary.divergence {
                println!("  diverged at {d}");
            }
            println!("  artifacts: {}", out.display());
            o.exit_code()
        }
        Err(e) => fail(&e),
    }
}

fn cmd_sweep(path: &Path, cli: &Cli) -> i32 {
    let batch = match Batch::load(path, cli.seed) {
        Ok(b) => b,
        Err(e) => return fail(&e),
    };
    let rows = run_batch(&batch, cli.out.as_deref());
    let table = summary_csv(&batch, &rows);
    if let Some(out) = &cli.out {
        if let Err(e) = std::fs::create_dir_all(out).and_then(|_| std::fs::write(out.join("summary.csv"), &table)) {
            return fail(&e.into());
        }
    }
    print!("{table}");
    exit::OK
}

fn cmd_verify(suite: &str, cli: &Cli) -> i32 {
    let report = match run_suite(suite) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(out) = &cli.out {
        let file = out.join(format!("verify_{suite}.json"));
        if let Err(e) = std::fs::create_dir_all(out).and_then(|_| std::fs::write(&file, &json)) {
            return fail(&e.into());
        }
    }
    println!("{json}");
    if report.passed {
        exit::OK
    } else {
        exit::MONITOR_FAIL
    }
}

fn cmd_snapshot(config: &str, t: f64, cli: &Cli) -> i32 {
    let scenario = match load_scenario(config, cli.seed) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let f = match snapshot_at(&scenario, t) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let result = match &cli.out {
        Some(out) => std::fs::create_dir_all(out)
            .map_err(MuskatError::from)
            .and_then(|_| f.save_csv(&out.join(format!("{}_t{}.csv", scenario.name, fmt_f64(t))))),
        None => f.write_csv(std::io::stdout().lock()).map_err(MuskatError::from),
    };
    match result {
        Ok(()) => exit::OK,
        Err(e) => fail(&e),
    }
}
