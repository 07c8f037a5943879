use std::f64::consts::PI;

use crate::env::EpisodeTrace;
use crate::field::wrap_pi;
use crate::{Error, Result};

/// Per-episode quantities behind the aggregate metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub task_id: usize,
    pub success: bool,
    pub steps: usize,
    /// Straight-line origin-to-target distance.
    pub shortest_m: f64,
    /// Realised path length.
    pub path_m: f64,
    /// Mean interior angle between consecutive moving segments; 180° for
    /// a single segment.
    pub smoothness_deg: f64,
    /// Heading vs bearing-to-target over steps that have a previous
    /// segment; `None` for episodes shorter than two steps.
    pub mae_heading: Option<f64>,
    pub rmse_heading: Option<f64>,
    /// Mean `|θ − λ′|` over the same steps.
    pub lambda_deviation: Option<f64>,
    /// Final distance to the target.
    pub final_distance_m: f64,
}

impl EpisodeRecord {
    pub fn from_trace(task_id: usize, trace: &EpisodeTrace) -> Self {
        let rows = &trace.rows;
        let (tx, ty) = trace.target_xy;
        let (ox, oy) = trace.origin_xy;
        let mut path = 0.0;
        for w in rows.windows(2) {
            path += (w[1].x_m - w[0].x_m).hypot(w[1].y_m - w[0].y_m);
        }

        let headings: Vec<f64> = rows[1.min(rows.len())..]
            .iter()
            .filter(|r| r.l_m > 0.0)
            .map(|r| r.theta_rad)
            .collect();
        let smoothness_deg = if headings.len() < 2 {
            180.0
        } else {
            let sum: f64 = headings
                .windows(2)
                .map(|w| 180.0 - wrap_pi(w[1] - w[0]).abs().to_degrees())
                .sum();
            sum / (headings.len() - 1) as f64
        };

        let mut abs_sum = 0.0;
        let mut sq_sum = 0.0;
        let mut lambda_sum = 0.0;
        let mut n = 0usize;
        for j in 2..rows.len() {
            let prev = &rows[j - 1];
            let bearing = (ty - prev.y_m).atan2(tx - prev.x_m);
            let dev = angle_gap(rows[j].theta_rad, bearing);
            abs_sum += dev;
            sq_sum += dev * dev;
            lambda_sum += angle_gap(rows[j].theta_rad, rows[j].lambda_prime_rad);
            n += 1;
        }
        let mean = |s: f64| (n > 0).then(|| s / n as f64);
        let (fx, fy) = trace.final_xy();
        Self {
            task_id,
            success: trace.success(),
            steps: trace.steps(),
            shortest_m: (tx - ox).hypot(ty - oy),
            path_m: path,
            smoothness_deg,
            mae_heading: mean(abs_sum),
            rmse_heading: mean(sq_sum).map(f64::sqrt),
            lambda_deviation: mean(lambda_sum),
            final_distance_m: (tx - fx).hypot(ty - fy),
        }
    }

    /// `S·d / max(p, d)`.
    pub fn spl_term(&self) -> f64 {
        if self.success {
            self.shortest_m / self.path_m.max(self.shortest_m)
        } else {
            0.0
        }
    }
}

/// `|a − b|` wrapped into `[0, π]`.
fn angle_gap(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs().min(PI)
}

/// Aggregate metrics. TL, TNT, smoothness and the heading errors average
/// successful episodes only (NaN when there are none); `tl_all` and NE
/// average every episode.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub episodes: usize,
    pub successes: usize,
    pub sr: f64,
    pub tl: f64,
    pub tl_all: f64,
    pub spl: f64,
    pub tnt: f64,
    pub smoothness_deg: f64,
    pub mae_heading: f64,
    pub rmse_heading: f64,
    pub lambda_deviation: f64,
    pub ne: f64,
    pub records: Vec<EpisodeRecord>,
}

fn mean_of(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

impl MetricsReport {
    /// Report for a method that ran no tasks: zero counts, NaN means.
    pub fn empty() -> Self {
        Self {
            episodes: 0,
            successes: 0,
            sr: f64::NAN,
            tl: f64::NAN,
            tl_all: f64::NAN,
            spl: f64::NAN,
            tnt: f64::NAN,
            smoothness_deg: f64::NAN,
            mae_heading: f64::NAN,
            rmse_heading: f64::NAN,
            lambda_deviation: f64::NAN,
            ne: f64::NAN,
            records: Vec::new(),
        }
    }

    pub fn from_records(records: Vec<EpisodeRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Usage("metrics need at least one episode".into()));
        }
        let n = records.len() as f64;
        let ok = || records.iter().filter(|r| r.success);
        let successes = ok().count();
        Ok(Self {
            episodes: records.len(),
            successes,
            sr: successes as f64 / n,
            tl: mean_of(ok().map(|r| r.path_m)),
            tl_all: mean_of(records.iter().map(|r| r.path_m)),
            spl: records.iter().map(EpisodeRecord::spl_term).sum::<f64>() / n,
            tnt: mean_of(ok().map(|r| r.steps as f64)),
            smoothness_deg: mean_of(ok().map(|r| r.smoothness_deg)),
            mae_heading: mean_of(ok().filter_map(|r| r.mae_heading)),
            rmse_heading: mean_of(ok().filter_map(|r| r.rmse_heading)),
            lambda_deviation: mean_of(ok().filter_map(|r| r.lambda_deviation)),
            ne: mean_of(records.iter().map(|r| r.final_distance_m)),
            records,
        })
    }
}

/// Metrics over `traces`, the `k`-th trace belonging to task `k`.
pub fn compute_metrics(traces: &[EpisodeTrace]) -> Result<MetricsReport> {
    MetricsReport::from_records(
        traces
            .iter()
            .enumerate()
            .map(|(k, t)| EpisodeRecord::from_trace(k, t))
            .collect(),
    )
}

/// Quartiles, Tukey whiskers (1.5 IQR) and outliers of one distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
}

/// Linearly interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BoxStats {
    /// `None` for an empty sample; NaN values are dropped.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let q1 = quantile(&v, 0.25);
        let q3 = quantile(&v, 0.75);
        let iqr = q3 - q1;
        let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let inside = || v.iter().copied().filter(|&x| x >= lo_fence && x <= hi_fence);
        Some(Self {
            n: v.len(),
            min: v[0],
            q1,
            median: quantile(&v, 0.5),
            q3,
            max: v[v.len() - 1],
            whisker_lo: inside().fold(f64::INFINITY, f64::min),
            whisker_hi: inside().fold(f64::NEG_INFINITY, f64::max),
            outliers: v
                .iter()
                .copied()
                .filter(|&x| x < lo_fence || x > hi_fence)
                .collect(),
        })
    }
}
