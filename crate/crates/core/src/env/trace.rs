use std::io::{BufRead, Write};

use crate::{Error, Result};

pub const TRACE_CSV_HEADER: &str =
    "step,lat,lon,x_m,y_m,theta_rad,L_m,psi_rad,F,reward,lambda_prime_rad,done,success";

/// One row per pose: row 0 is the origin after reset, row `j` the pose
/// after the `j`-th action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub lat: f64,
    pub lon: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub theta_rad: f64,
    pub l_m: f64,
    pub psi_rad: f64,
    pub f: f64,
    pub reward: f64,
    pub lambda_prime_rad: f64,
    pub done: bool,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub origin_xy: (f64, f64),
    pub target_xy: (f64, f64),
    /// Objective threshold used for this episode.
    pub threshold: f64,
    /// Some objective denominator hit the floor during the episode.
    pub objective_floored: bool,
    pub rows: Vec<TraceRow>,
}

impl EpisodeTrace {
    pub fn new(origin_xy: (f64, f64), target_xy: (f64, f64), threshold: f64) -> Self {
        Self {
            origin_xy,
            target_xy,
            threshold,
            objective_floored: false,
            rows: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn success(&self) -> bool {
        self.rows.last().is_some_and(|r| r.success)
    }

    pub fn total_reward(&self) -> f64 {
        self.rows.iter().map(|r| r.reward).sum()
    }

    pub fn final_xy(&self) -> (f64, f64) {
        self.rows
            .last()
            .map(|r| (r.x_m, r.y_m))
            .unwrap_or(self.origin_xy)
    }

    /// Writes the rows; floats use shortest round-trip formatting so a
    /// reload reproduces them exactly.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{TRACE_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.step,
                r.lat,
                r.lon,
                r.x_m,
                r.y_m,
                r.theta_rad,
                r.l_m,
                r.psi_rad,
                r.f,
                r.reward,
                r.lambda_prime_rad,
                u8::from(r.done),
                u8::from(r.success)
            )?;
        }
        Ok(())
    }

    /// Reads rows written by [`write_csv`](Self::write_csv). Origin and
    /// target come from the task list, the threshold is not stored.
    pub fn read_csv<R: BufRead>(
        input: R,
        origin_xy: (f64, f64),
        target_xy: (f64, f64),
    ) -> Result<Self> {
        let mut trace = EpisodeTrace::new(origin_xy, target_xy, f64::NAN);
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            if i == 0 {
                if line.trim() != TRACE_CSV_HEADER {
                    return Err(Error::Parse {
                        line: 1,
                        message: "unexpected trace header".into(),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 13 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 13 columns, found {}", cols.len()),
                });
            }
            let num = |k: usize| -> Result<f64> {
                cols[k].trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad number {:?}", cols[k]),
                })
            };
            let flag = |k: usize| -> Result<bool> {
                match cols[k].trim() {
                    "1" | "true" => Ok(true),
                    "0" | "false" => Ok(false),
                    other => Err(Error::Parse {
                        line: line_no,
                        message: format!("bad flag {other:?}"),
                    }),
                }
            };
            trace.rows.push(TraceRow {
                step: cols[0].trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad step {:?}", cols[0]),
                })?,
                lat: num(1)?,
                lon: num(2)?,
                x_m: num(3)?,
                y_m: num(4)?,
                theta_rad: num(5)?,
                l_m: num(6)?,
                psi_rad: num(7)?,
                f: num(8)?,
                reward: num(9)?,
                lambda_prime_rad: num(10)?,
                done: flag(11)?,
                success: flag(12)?,
            });
        }
        Ok(trace)
    }
}
