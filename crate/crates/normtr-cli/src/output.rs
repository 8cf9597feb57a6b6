//! Result persistence: per-run CSV files, the summary JSON document, and
//! the sweep aggregation CSV. Floats are written in Rust's shortest
//! round-trip form ('.' decimal, no locale), so re-reading an output file
//! reproduces the in-memory values exactly.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use normtr::harness::{IterationRow, RunRecord, RunSummary};
use normtr::optim::OptimizerConfig;

use crate::config::{ExperimentConfig, ScheduleRecord};

pub const RUN_CSV_HEADER: [&str; 6] = ["k", "F", "residual", "x_norm", "momentum_err", "wall_ms"];

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Writes one run's per-iteration rows.
pub fn write_run_csv(path: &Path, record: &RunRecord) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(RUN_CSV_HEADER)?;
    for row in &record.rows {
        w.write_record([
            row.k.to_string(),
            fmt(row.f),
            fmt(row.residual),
            fmt(row.x_norm),
            row.momentum_err.map(fmt).unwrap_or_default(),
            fmt(row.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a run CSV back into iteration rows.
pub fn read_run_csv(path: &Path) -> Result<Vec<IterationRow>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i)
                .with_context(|| format!("column {i} missing"))?
                .parse::<f64>()
                .with_context(|| format!("column {i} is not a number"))
        };
        let momentum = match rec.get(4) {
            Some("") | None => None,
            Some(s) => Some(s.parse::<f64>().context("momentum_err is not a number")?),
        };
        rows.push(IterationRow {
            k: rec.get(0).context("k missing")?.parse()?,
            f: field(1)?,
            residual: field(2)?,
            x_norm: field(3)?,
            momentum_err: momentum,
            wall_ms: field(5)?,
        });
    }
    Ok(rows)
}

/// One run's entry in the summary document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub seed: u64,
    pub csv: String,
    pub summary: RunSummary,
    pub warnings: Vec<String>,
}

/// The `summary.json` document written next to the run CSVs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryDoc {
    /// The experiment file as parsed.
    pub experiment: ExperimentConfig,
    /// The fully resolved optimizer configuration the runs used.
    pub optimizer: OptimizerConfig,
    pub sigma: f64,
    /// Constants behind a schedule-derived configuration, when one was used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleRecord>,
    pub runs: Vec<RunEntry>,
    /// File name of the residual plot.
    pub plot: String,
}

pub fn write_summary(path: &Path, doc: &SummaryDoc) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<SummaryDoc> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

/// One sweep data point: a (parameter value, seed) run, or the seed-mean
/// aggregate when `seed` is "mean".
pub struct SweepRow {
    pub param: &'static str,
    pub value: f64,
    pub seed: String,
    pub min_residual: f64,
    pub final_f: f64,
    pub final_gap: Option<f64>,
}

pub const SWEEP_CSV_HEADER: [&str; 6] =
    ["param", "value", "seed", "min_residual", "final_f", "final_gap"];

/// Writes the aggregated sweep table: per-seed rows first, then one mean row
/// per parameter value.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        w.write_record([
            row.param.to_string(),
            fmt(row.value),
            row.seed.clone(),
            fmt(row.min_residual),
            fmt(row.final_f),
            row.final_gap.map(fmt).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use normtr::geometry::{NormGeometry, NormKind};
    use normtr::harness::run;
    use normtr::optim::{OptimizerConfig, Variant};
    use normtr::point::ParamPoint;
    use normtr::problems::make_quadratic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_record() -> RunRecord {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let problem = make_quadratic(3, 2.0, &mut rng).unwrap();
        let geometry = NormGeometry::new(NormKind::Euclidean, problem.shape()).unwrap();
        let mut config = OptimizerConfig::new(Variant::Momentum, geometry, 0.05, 12);
        config.alpha = 0.5;
        run(&config, &problem, 0.3, &ParamPoint::zeros(problem.shape()), 7).unwrap()
    }

    #[test]
    fn run_csv_round_trips_exactly() {
        let record = sample_record();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        write_run_csv(&path, &record).unwrap();
        let rows = read_run_csv(&path).unwrap();
        assert_eq!(rows, record.rows);
    }

    #[test]
    fn momentum_column_is_empty_for_deterministic_variants() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let problem = make_quadratic(3, 2.0, &mut rng).unwrap();
        let geometry = NormGeometry::new(NormKind::Euclidean, problem.shape()).unwrap();
        let config = OptimizerConfig::new(Variant::DetTr, geometry, 0.05, 5);
        let record =
            run(&config, &problem, 0.0, &ParamPoint::zeros(problem.shape()), 0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        write_run_csv(&path, &record).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let second_line = text.lines().nth(1).unwrap();
        assert_eq!(second_line.split(',').count(), 6);
        assert_eq!(second_line.split(',').nth(4), Some(""));
        let rows = read_run_csv(&path).unwrap();
        assert!(rows.iter().all(|r| r.momentum_err.is_none()));
    }
}
