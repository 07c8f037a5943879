use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::metrics::{compute_metrics, BoxStats, EpisodeRecord, MetricsReport};
use super::tasks::{read_task_endpoints, write_tasks_csv};
use crate::env::{EpisodeTrace, NavEnv, TaskSpec};
use crate::geo::Region;
use crate::navigator::Navigator;
use crate::seed::rng_for;
use crate::{Error, Result};

pub const TABLE_CSV_HEADER: &str = "method,SR,TL_m,SPL,TNT_steps";
pub const METRICS_CSV_HEADER: &str = "method,episodes,successes,SR,TL_success_m,TL_all_m,SPL,TNT_success_steps,smoothness_success_deg,MAE_success_rad,RMSE_success_rad,lambda_dev_success_rad,NE_all_m";
pub const DISTRIBUTION_CSV_HEADER: &str = "method,task_id,value";
pub const BOXPLOT_CSV_HEADER: &str =
    "method,metric,n,min,q1,median,q3,max,whisker_lo,whisker_hi,outliers";

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub name: String,
    pub report: MetricsReport,
    pub traces: Vec<EpisodeTrace>,
}

/// Runs every navigator on every task. Tasks fan out over worker threads
/// with per-task generators `(task.seed, method name)`; results keep task
/// order, so the outcome does not depend on scheduling.
pub fn run_benchmark(
    navigators: &[Box<dyn Navigator>],
    tasks: &[TaskSpec],
    env: &NavEnv,
) -> Result<Vec<MethodResult>> {
    navigators
        .iter()
        .map(|nav| {
            let traces = tasks
                .par_iter()
                .map(|task| {
                    let mut env = env.clone();
                    let mut rng = rng_for(task.seed, nav.name());
                    nav.run_episode(&mut env, *task, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            let report = if traces.is_empty() {
                MetricsReport::empty()
            } else {
                compute_metrics(&traces)?
            };
            Ok(MethodResult {
                name: nav.name().to_string(),
                report,
                traces,
            })
        })
        .collect()
}

/// Per-episode metric columns exported as distributions. Success-only
/// metrics skip failed episodes.
pub const DISTRIBUTION_METRICS: [&str; 7] = [
    "TL_m",
    "TNT_steps",
    "smoothness_deg",
    "MAE_rad",
    "RMSE_rad",
    "lambda_dev_rad",
    "NE_m",
];

fn metric_value(metric: &str, r: &EpisodeRecord) -> Option<f64> {
    let ok = |v: Option<f64>| if r.success { v } else { None };
    match metric {
        "TL_m" => ok(Some(r.path_m)),
        "TNT_steps" => ok(Some(r.steps as f64)),
        "smoothness_deg" => ok(Some(r.smoothness_deg)),
        "MAE_rad" => ok(r.mae_heading),
        "RMSE_rad" => ok(r.rmse_heading),
        "lambda_dev_rad" => ok(r.lambda_deviation),
        "NE_m" => Some(r.final_distance_m),
        _ => None,
    }
}

pub fn write_table_csv<W: Write>(results: &[MethodResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TABLE_CSV_HEADER}")?;
    for m in results {
        let r = &m.report;
        writeln!(out, "{},{},{},{},{}", m.name, r.sr, r.tl, r.spl, r.tnt)?;
    }
    Ok(())
}

pub fn write_metrics_csv<W: Write>(results: &[MethodResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{METRICS_CSV_HEADER}")?;
    for m in results {
        let r = &m.report;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            m.name,
            r.episodes,
            r.successes,
            r.sr,
            r.tl,
            r.tl_all,
            r.spl,
            r.tnt,
            r.smoothness_deg,
            r.mae_heading,
            r.rmse_heading,
            r.lambda_deviation,
            r.ne
        )?;
    }
    Ok(())
}

pub fn write_distribution_csv<W: Write>(
    results: &[MethodResult],
    metric: &str,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{DISTRIBUTION_CSV_HEADER}")?;
    for m in results {
        for r in &m.report.records {
            if let Some(v) = metric_value(metric, r) {
                writeln!(out, "{},{},{v}", m.name, r.task_id)?;
            }
        }
    }
    Ok(())
}

pub fn write_boxplot_csv<W: Write>(results: &[MethodResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{BOXPLOT_CSV_HEADER}")?;
    for m in results {
        for metric in DISTRIBUTION_METRICS {
            let values: Vec<f64> = m
                .report
                .records
                .iter()
                .filter_map(|r| metric_value(metric, r))
                .collect();
            let Some(b) = BoxStats::from_values(&values) else {
                continue;
            };
            let outliers: Vec<String> = b.outliers.iter().map(f64::to_string).collect();
            writeln!(
                out,
                "{},{metric},{},{},{},{},{},{},{},{},{}",
                m.name,
                b.n,
                b.min,
                b.q1,
                b.median,
                b.q3,
                b.max,
                b.whisker_lo,
                b.whisker_hi,
                outliers.join(";")
            )?;
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn trace_path(dir: &Path, method: &str, task_id: usize) -> std::path::PathBuf {
    dir.join("traces").join(method).join(format!("task_{task_id:03}.csv"))
}

/// Writes `tasks.csv`, `table.csv`, `metrics.csv`, `boxplot.csv`, one
/// `dist_<metric>.csv` per distribution metric and every trace under
/// `traces/<method>/`.
pub fn write_benchmark(dir: &Path, results: &[MethodResult], tasks: &[TaskSpec], region: &Region) -> Result<()> {
    write_file(&dir.join("tasks.csv"), |w| write_tasks_csv(tasks, region, w))?;
    write_file(&dir.join("table.csv"), |w| write_table_csv(results, w))?;
    write_file(&dir.join("metrics.csv"), |w| write_metrics_csv(results, w))?;
    write_file(&dir.join("boxplot.csv"), |w| write_boxplot_csv(results, w))?;
    for metric in DISTRIBUTION_METRICS {
        write_file(&dir.join(format!("dist_{metric}.csv")), |w| {
            write_distribution_csv(results, metric, w)
        })?;
    }
    for m in results {
        for (k, t) in m.traces.iter().enumerate() {
            write_file(&trace_path(dir, &m.name, k), |w| t.write_csv(w))?;
        }
    }
    Ok(())
}

/// Recomputes every method's metrics from a directory written by
/// [`write_benchmark`]. Methods come back in `table.csv` order.
pub fn replay_benchmark(dir: &Path) -> Result<Vec<MethodResult>> {
    let tasks_path = dir.join("tasks.csv");
    let endpoints = read_task_endpoints(BufReader::new(
        File::open(&tasks_path).map_err(|e| Error::io(&tasks_path, e))?,
    ))?;
    let table_path = dir.join("table.csv");
    let table = fs::read_to_string(&table_path).map_err(|e| Error::io(&table_path, e))?;
    let methods: Vec<String> = table
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').next())
        .filter(|m| !m.is_empty())
        .map(String::from)
        .collect();
    let mut out = Vec::new();
    for name in methods {
        let mut traces = Vec::with_capacity(endpoints.len());
        for (k, &(origin, target)) in endpoints.iter().enumerate() {
            let path = trace_path(dir, &name, k);
            let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
            traces.push(EpisodeTrace::read_csv(BufReader::new(file), origin, target)?);
        }
        let report = if traces.is_empty() {
            MetricsReport::empty()
        } else {
            compute_metrics(&traces)?
        };
        out.push(MethodResult {
            name,
            report,
            traces,
        });
    }
    Ok(out)
}
