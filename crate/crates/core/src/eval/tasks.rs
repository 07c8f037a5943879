use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::TaskSpec;
use crate::geo::{planar_distance, Region};
use crate::seed::rng_for;
use crate::{Error, Result};

/// Rejection-sampling budget per task.
pub const MAX_ATTEMPTS: usize = 10_000;

/// Origin/destination separation band and epoch used to draw tasks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskDistribution {
    pub min_separation_m: f64,
    pub max_separation_m: f64,
    pub epoch: f64,
}

impl Default for TaskDistribution {
    fn default() -> Self {
        Self {
            min_separation_m: 300_000.0,
            max_separation_m: 500_000.0,
            epoch: 2020.0,
        }
    }
}

impl TaskDistribution {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.min_separation_m > 0.0) {
            v.push(format!(
                "tasks.min_separation_m = {} must be > 0",
                self.min_separation_m
            ));
        }
        if !(self.max_separation_m > self.min_separation_m) {
            v.push(format!(
                "tasks.max_separation_m = {} must exceed min_separation_m = {}",
                self.max_separation_m, self.min_separation_m
            ));
        }
        if !self.epoch.is_finite() {
            v.push("tasks.epoch must be finite".into());
        }
        v
    }

    /// One task with origin and destination uniform over `region` and
    /// separation inside the band.
    pub fn sample<R: Rng + ?Sized>(&self, region: &Region, seed: u64, rng: &mut R) -> Result<TaskSpec> {
        let frame = region.frame();
        for _ in 0..MAX_ATTEMPTS {
            let origin = region.sample(rng);
            let destination = region.sample(rng);
            let d = planar_distance(&frame, &origin, &destination);
            if d >= self.min_separation_m && d <= self.max_separation_m {
                return Ok(TaskSpec {
                    origin,
                    destination,
                    epoch: self.epoch,
                    seed,
                });
            }
        }
        Err(Error::Region(format!(
            "region too small: no origin/destination pair {}–{} m apart after {MAX_ATTEMPTS} draws",
            self.min_separation_m, self.max_separation_m
        )))
    }
}

/// `count` tasks, deterministic in `seed`. Each task carries its own
/// derived seed for per-task randomness during evaluation.
pub fn generate_tasks(
    region: &Region,
    count: usize,
    dist: &TaskDistribution,
    seed: u64,
) -> Result<Vec<TaskSpec>> {
    region.validate()?;
    let v = dist.violations();
    if !v.is_empty() {
        return Err(Error::Config(v));
    }
    let mut rng = rng_for(seed, "tasks");
    (0..count)
        .map(|k| {
            let task_seed = crate::seed::derive_seed(seed, &format!("task/{k}"));
            dist.sample(region, task_seed, &mut rng)
        })
        .collect()
}

pub const TASKS_CSV_HEADER: &str =
    "task_id,origin_lat,origin_lon,dest_lat,dest_lon,origin_x_m,origin_y_m,dest_x_m,dest_y_m,separation_m,epoch,seed";

pub fn write_tasks_csv<W: Write>(tasks: &[TaskSpec], region: &Region, mut out: W) -> std::io::Result<()> {
    let frame = region.frame();
    writeln!(out, "{TASKS_CSV_HEADER}")?;
    for (k, t) in tasks.iter().enumerate() {
        let (ox, oy) = frame.to_local(&t.origin);
        let (dx, dy) = frame.to_local(&t.destination);
        writeln!(
            out,
            "{k},{},{},{},{},{ox},{oy},{dx},{dy},{},{},{}",
            t.origin.latitude,
            t.origin.longitude,
            t.destination.latitude,
            t.destination.longitude,
            (dx - ox).hypot(dy - oy),
            t.epoch,
            t.seed
        )?;
    }
    Ok(())
}

/// `(origin_xy, target_xy)` per row of a file written by
/// [`write_tasks_csv`].
pub fn read_task_endpoints<R: BufRead>(input: R) -> Result<Vec<((f64, f64), (f64, f64))>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if i == 0 {
            if line.trim() != TASKS_CSV_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: "unexpected tasks header".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 12 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 12 columns, found {}", cols.len()),
            });
        }
        let num = |k: usize| -> Result<f64> {
            cols[k].trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad number {:?}", cols[k]),
            })
        };
        out.push(((num(5)?, num(6)?), (num(7)?, num(8)?)));
    }
    Ok(out)
}
