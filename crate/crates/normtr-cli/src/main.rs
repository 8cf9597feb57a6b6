//! `normtr`: run, sweep, and verify trust-region first-order methods over
//! plug-in norm geometries.
//!
//! Exit codes: 0 success, 1 runtime or check failure, 2 configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use normtr::harness::{run, RunRecord};
use normtr::verify::{run_suite, Suite};

use normtr_cli::config::{self, Resolved};
use normtr_cli::output::{self, RunEntry, SummaryDoc, SweepRow};
use normtr_cli::svg;

/// Output-directory override honored when `--out-dir` is absent.
const OUT_DIR_ENV: &str = "NORMTR_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "normtr",
    version,
    about = "Trust-region first-order methods over plug-in norm geometries"
)]
struct Cli {
    /// Output directory (falls back to $NORMTR_OUT_DIR, then the config
    /// file's out_dir, then ./normtr-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Maximum parallel runs (0 or omitted: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Offset added to every seed in the config.
    #[arg(long, global = true, default_value_t = 0)]
    seed_offset: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the runs described by a JSON experiment file.
    Run {
        /// Path to the experiment JSON.
        config: PathBuf,
    },
    /// Run a built-in invariant suite and print its pass/fail table.
    Verify {
        /// One of: geometry, trstep, lemmas, theorems, all.
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
    /// Re-run an experiment over a grid of values for one parameter.
    Sweep {
        /// Path to the experiment JSON.
        config: PathBuf,
        /// Which knob the grid varies.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepParam {
    Eta,
    Alpha,
    Beta,
    Sigma,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::Eta => "eta",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
            SweepParam::Sigma => "sigma",
        }
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::from_str(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: could not size the worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    match &cli.command {
        Command::Run { config } => cmd_run(config, &cli),
        Command::Verify { suite } => cmd_verify(*suite),
        Command::Sweep { config, param, values } => cmd_sweep(config, *param, values, &cli),
    }
}

/// Reads, parses, and resolves an experiment file. Any failure here is a
/// configuration error (exit 2).
fn load(path: &Path, seed_offset: u64) -> Result<Resolved, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let experiment = config::parse_config(&text)?;
    config::resolve(&experiment, seed_offset)
}

fn out_dir_for(cli: &Cli, from_config: Option<&Path>) -> PathBuf {
    if let Some(d) = &cli.out_dir {
        return d.clone();
    }
    if let Ok(d) = std::env::var(OUT_DIR_ENV) {
        if !d.is_empty() {
            return PathBuf::from(d);
        }
    }
    from_config.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("normtr-out"))
}

fn config_error(msg: &str) -> ExitCode {
    eprintln!("config error: {msg}");
    ExitCode::from(2)
}

fn runtime_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

/// Executes every seeded run in parallel, preserving seed order.
fn execute_runs(resolved: &Resolved, sigma: f64) -> normtr::Result<Vec<RunRecord>> {
    resolved
        .seeds
        .par_iter()
        .map(|&seed| run(&resolved.optimizer, &resolved.problem, sigma, &resolved.x0, seed))
        .collect()
}

fn print_warnings(records: &[RunRecord], prefix: &str) {
    let mut seen = Vec::new();
    for rec in records {
        for w in &rec.warnings {
            if !seen.contains(w) {
                eprintln!("warning{prefix}: {w}");
                seen.push(w.clone());
            }
        }
    }
}

fn residual_series(records: &[RunRecord]) -> Vec<svg::Series> {
    records
        .iter()
        .map(|rec| svg::Series {
            label: format!("seed {}", rec.seed),
            points: rec.rows.iter().map(|row| (row.k, row.residual)).collect(),
        })
        .collect()
}

fn cmd_run(config_path: &Path, cli: &Cli) -> ExitCode {
    let resolved = match load(config_path, cli.seed_offset) {
        Ok(r) => r,
        Err(e) => return config_error(&e),
    };
    let dir = out_dir_for(cli, resolved.experiment.out_dir.as_deref());
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return runtime_error(&format!("creating {}: {e}", dir.display()));
    }
    let records = match execute_runs(&resolved, resolved.sigma) {
        Ok(r) => r,
        Err(e) => return runtime_error(&e.to_string()),
    };
    print_warnings(&records, "");

    let mut entries = Vec::with_capacity(records.len());
    for rec in &records {
        let name = format!("run_seed{:04}.csv", rec.seed);
        if let Err(e) = output::write_run_csv(&dir.join(&name), rec) {
            return runtime_error(&format!("{e:#}"));
        }
        entries.push(RunEntry {
            seed: rec.seed,
            csv: name,
            summary: rec.summary.clone(),
            warnings: rec.warnings.clone(),
        });
    }

    let plot = "residual.svg";
    if let Err(e) = std::fs::write(dir.join(plot), svg::residual_chart(&residual_series(&records)))
    {
        return runtime_error(&format!("writing {plot}: {e}"));
    }

    let doc = SummaryDoc {
        experiment: resolved.experiment.clone(),
        optimizer: resolved.optimizer,
        sigma: resolved.sigma,
        schedule: resolved.schedule_record.clone(),
        runs: entries,
        plot: plot.to_string(),
    };
    if let Err(e) = output::write_summary(&dir.join("summary.json"), &doc) {
        return runtime_error(&format!("{e:#}"));
    }

    println!("wrote {} runs, summary.json, {plot} to {}", records.len(), dir.display());
    ExitCode::SUCCESS
}

fn cmd_verify(suite: Suite) -> ExitCode {
    match run_suite(suite) {
        Ok(report) => {
            print!("{}", report.render());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                let failing: Vec<&str> =
                    report.lines.iter().filter(|l| !l.passed).map(|l| l.name).collect();
                eprintln!("failed checks: {}", failing.join(", "));
                ExitCode::from(1)
            }
        }
        Err(e) => runtime_error(&e.to_string()),
    }
}

fn cmd_sweep(config_path: &Path, param: SweepParam, values: &[f64], cli: &Cli) -> ExitCode {
    if values.is_empty() {
        return config_error("--values must list at least one value");
    }
    let resolved = match load(config_path, cli.seed_offset) {
        Ok(r) => r,
        Err(e) => return config_error(&e),
    };

    // Build one (optimizer, sigma) variant per grid value and validate all
    // of them before running anything.
    let mut variants = Vec::with_capacity(values.len());
    for &v in values {
        let mut optimizer = resolved.optimizer;
        let mut sigma = resolved.sigma;
        match param {
            SweepParam::Eta => optimizer.eta = v,
            SweepParam::Alpha => optimizer.alpha = v,
            SweepParam::Beta => optimizer.beta = v,
            SweepParam::Sigma => sigma = v,
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return config_error(&format!("sigma = {v} must be finite and >= 0"));
        }
        if let Err(e) = optimizer.validate() {
            return config_error(&format!("{} = {v}: {e}", param.name()));
        }
        variants.push((v, optimizer, sigma));
    }

    let dir = out_dir_for(cli, resolved.experiment.out_dir.as_deref());
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return runtime_error(&format!("creating {}: {e}", dir.display()));
    }

    // Cartesian product of grid values and seeds, run in parallel, results
    // kept in (value, seed) order.
    let tasks: Vec<(usize, u64)> = variants
        .iter()
        .enumerate()
        .flat_map(|(i, _)| resolved.seeds.iter().map(move |&s| (i, s)))
        .collect();
    let results: normtr::Result<Vec<RunRecord>> = tasks
        .par_iter()
        .map(|&(i, seed)| {
            let (_, optimizer, sigma) = &variants[i];
            run(optimizer, &resolved.problem, *sigma, &resolved.x0, seed)
        })
        .collect();
    let records = match results {
        Ok(r) => r,
        Err(e) => return runtime_error(&e.to_string()),
    };

    let per_value = resolved.seeds.len();
    let mut rows = Vec::new();
    for (i, &(value, ..)) in variants.iter().enumerate() {
        let group = &records[i * per_value..(i + 1) * per_value];
        print_warnings(group, &format!(" [{}={value}]", param.name()));
        let mut gap_sum = Some(0.0);
        for rec in group {
            rows.push(SweepRow {
                param: param.name(),
                value,
                seed: rec.seed.to_string(),
                min_residual: rec.summary.min_residual,
                final_f: rec.summary.final_f,
                final_gap: rec.summary.final_gap,
            });
            gap_sum = match (gap_sum, rec.summary.final_gap) {
                (Some(acc), Some(g)) => Some(acc + g),
                _ => None,
            };
        }
        let n = per_value as f64;
        rows.push(SweepRow {
            param: param.name(),
            value,
            seed: "mean".to_string(),
            min_residual: group.iter().map(|r| r.summary.min_residual).sum::<f64>() / n,
            final_f: group.iter().map(|r| r.summary.final_f).sum::<f64>() / n,
            final_gap: gap_sum.map(|s| s / n),
        });
    }

    let path = dir.join("sweep.csv");
    if let Err(e) = output::write_sweep_csv(&path, &rows) {
        return runtime_error(&format!("{e:#}"));
    }
    println!(
        "wrote {} runs over {} values of {} to {}",
        records.len(),
        values.len(),
        param.name(),
        path.display()
    );
    ExitCode::SUCCESS
}
