//! IGRF coefficient files and spherical-harmonic synthesis of the internal
//! field on a spherical Earth.

use super::{FieldSource, FieldVector};
use crate::geo::GeoPosition;
use crate::{Error, Result};

/// Reference radius of the IGRF expansion, km.
pub const EARTH_RADIUS_KM: f64 = 6371.2;

/// Years past the last epoch over which secular variation may extrapolate.
const SV_HORIZON_YEARS: f64 = 5.0;

/// Positions closer than this to a pole (degrees) are nudged away from it.
const POLE_OFFSET_DEG: f64 = 1e-6;

const IGRF13_TEXT: &str = include_str!("../../data/igrf13coeffs.txt");

/// Schmidt semi-normalised Gauss coefficients for a sequence of epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    epochs: Vec<f64>,
    max_degree: usize,
    /// `g[epoch][idx(n, m)]`, nT.
    g: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
    /// nT/year, applies after the final epoch. `None` when the file has no
    /// secular-variation column.
    sv: Option<(Vec<f64>, Vec<f64>)>,
}

#[inline]
fn idx(n: usize, m: usize) -> usize {
    n * (n + 1) / 2 + m - 1
}

fn coeff_count(max_degree: usize) -> usize {
    max_degree * (max_degree + 3) / 2
}

impl CoefficientSet {
    /// The 13th-generation IGRF bundled with the crate (1900–2020, SV to 2025).
    pub fn igrf13() -> Self {
        parse_coefficients(IGRF13_TEXT).expect("bundled IGRF-13 table parses")
    }

    /// Builds a set from explicit tables; `g`/`h` are per-epoch rows of
    /// `(n, m, g, h)` quadruples.
    pub fn from_terms(
        epochs: Vec<f64>,
        terms: &[Vec<(usize, usize, f64, f64)>],
        sv: Option<Vec<(usize, usize, f64, f64)>>,
    ) -> Result<Self> {
        if terms.len() != epochs.len() {
            return Err(Error::Format("one term table per epoch required".into()));
        }
        let max_degree = terms
            .iter()
            .flatten()
            .chain(sv.iter().flatten())
            .map(|t| t.0)
            .max()
            .unwrap_or(0);
        if max_degree == 0 {
            return Err(Error::Format("no coefficient rows".into()));
        }
        let len = coeff_count(max_degree);
        let fill = |rows: &[(usize, usize, f64, f64)]| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut g = vec![0.0; len];
            let mut h = vec![0.0; len];
            for &(n, m, gv, hv) in rows {
                check_degree_order(n, m, 0)?;
                g[idx(n, m)] = gv;
                h[idx(n, m)] = if m == 0 { 0.0 } else { hv };
            }
            Ok((g, h))
        };
        let mut g = Vec::new();
        let mut h = Vec::new();
        for rows in terms {
            let (gg, hh) = fill(rows)?;
            g.push(gg);
            h.push(hh);
        }
        let sv = sv.map(|rows| fill(&rows)).transpose()?;
        let set = Self {
            epochs,
            max_degree,
            g,
            h,
            sv,
        };
        set.check_epochs()?;
        Ok(set)
    }

    fn check_epochs(&self) -> Result<()> {
        if self.epochs.is_empty() {
            return Err(Error::Format("no epochs".into()));
        }
        if self.epochs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Format("epochs must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn epochs(&self) -> &[f64] {
        &self.epochs
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn has_secular_variation(&self) -> bool {
        self.sv.is_some()
    }

    /// `g(n, m)` at the tabulated epoch with index `epoch_index`.
    pub fn g(&self, epoch_index: usize, n: usize, m: usize) -> f64 {
        self.g[epoch_index][idx(n, m)]
    }

    pub fn h(&self, epoch_index: usize, n: usize, m: usize) -> f64 {
        self.h[epoch_index][idx(n, m)]
    }

    pub fn sv_g(&self, n: usize, m: usize) -> Option<f64> {
        self.sv.as_ref().map(|(g, _)| g[idx(n, m)])
    }

    pub fn sv_h(&self, n: usize, m: usize) -> Option<f64> {
        self.sv.as_ref().map(|(_, h)| h[idx(n, m)])
    }

    pub fn epoch_range(&self) -> (f64, f64) {
        let last = *self.epochs.last().expect("non-empty epochs");
        let hi = if self.sv.is_some() {
            last + SV_HORIZON_YEARS
        } else {
            last
        };
        (self.epochs[0], hi)
    }

    /// Copy keeping only degrees `1..=max_degree`.
    pub fn truncated(&self, max_degree: usize) -> Self {
        let max_degree = max_degree.clamp(1, self.max_degree);
        let len = coeff_count(max_degree);
        Self {
            epochs: self.epochs.clone(),
            max_degree,
            g: self.g.iter().map(|v| v[..len].to_vec()).collect(),
            h: self.h.iter().map(|v| v[..len].to_vec()).collect(),
            sv: self
                .sv
                .as_ref()
                .map(|(g, h)| (g[..len].to_vec(), h[..len].to_vec())),
        }
    }

    /// Gauss coefficients at `epoch`: linear between tabulated epochs,
    /// secular variation past the last one.
    pub fn coefficients_at(&self, epoch: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let (lo, hi) = self.epoch_range();
        if !(epoch >= lo && epoch <= hi) {
            return Err(Error::EpochOutOfRange {
                epoch,
                min: lo,
                max: hi,
            });
        }
        let last = self.epochs.len() - 1;
        if epoch >= self.epochs[last] {
            let dt = epoch - self.epochs[last];
            return Ok(match &self.sv {
                Some((sg, sh)) if dt > 0.0 => (
                    self.g[last].iter().zip(sg).map(|(a, s)| a + s * dt).collect(),
                    self.h[last].iter().zip(sh).map(|(a, s)| a + s * dt).collect(),
                ),
                _ => (self.g[last].clone(), self.h[last].clone()),
            });
        }
        let k = self.epochs.partition_point(|&e| e <= epoch) - 1;
        let w = (epoch - self.epochs[k]) / (self.epochs[k + 1] - self.epochs[k]);
        let lerp = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect()
        };
        Ok((
            lerp(&self.g[k], &self.g[k + 1]),
            lerp(&self.h[k], &self.h[k + 1]),
        ))
    }

    pub fn evaluate(&self, pos: &GeoPosition, epoch: f64) -> Result<FieldVector> {
        let (g, h) = self.coefficients_at(epoch)?;
        Ok(synthesize(self.max_degree, &g, &h, pos))
    }
}

impl FieldSource for CoefficientSet {
    fn name(&self) -> &str {
        "igrf"
    }

    fn vector(&self, pos: &GeoPosition, epoch: f64) -> Result<FieldVector> {
        self.evaluate(pos, epoch)
    }
}

/// Field vector of `coeffs` at `pos` and `epoch`.
pub fn evaluate_field(coeffs: &CoefficientSet, pos: &GeoPosition, epoch: f64) -> Result<FieldVector> {
    coeffs.evaluate(pos, epoch)
}

fn check_degree_order(n: usize, m: usize, line: usize) -> Result<()> {
    if n == 0 || m > n {
        return Err(Error::Parse {
            line,
            message: format!("invalid degree/order n={n} m={m}"),
        });
    }
    Ok(())
}

/// Internal-field synthesis. Returns north, east, down in nT.
fn synthesize(max_degree: usize, g: &[f64], h: &[f64], pos: &GeoPosition) -> FieldVector {
    let mut lat = pos.latitude;
    if lat > 90.0 - POLE_OFFSET_DEG {
        lat = 90.0 - POLE_OFFSET_DEG;
    } else if lat < -90.0 + POLE_OFFSET_DEG {
        lat = -90.0 + POLE_OFFSET_DEG;
    }
    let theta = (90.0 - lat).to_radians();
    let phi = pos.longitude.to_radians();
    let (st, ct) = theta.sin_cos();
    let ratio = EARTH_RADIUS_KM / (EARTH_RADIUS_KM + pos.altitude_km);

    // Schmidt semi-normalised P(n,m)(cos θ) and dP/dθ, flat index n(n+1)/2+m.
    let size = (max_degree + 1) * (max_degree + 2) / 2;
    let at = |n: usize, m: usize| n * (n + 1) / 2 + m;
    let mut p = vec![0.0; size];
    let mut dp = vec![0.0; size];
    p[0] = 1.0;
    for n in 1..=max_degree {
        let nf = n as f64;
        for m in 0..=n {
            let mf = m as f64;
            if m == n {
                let k = if n == 1 {
                    1.0
                } else {
                    ((2.0 * nf - 1.0) / (2.0 * nf)).sqrt()
                };
                let prev = at(n - 1, n - 1);
                p[at(n, m)] = k * st * p[prev];
                dp[at(n, m)] = k * (ct * p[prev] + st * dp[prev]);
            } else {
                let a = 2.0 * nf - 1.0;
                let b = (((nf - 1.0) * (nf - 1.0)) - mf * mf).sqrt();
                let c = (nf * nf - mf * mf).sqrt();
                let prev = at(n - 1, m);
                let (p2, dp2) = if n >= 2 && m <= n - 2 {
                    (p[at(n - 2, m)], dp[at(n - 2, m)])
                } else {
                    (0.0, 0.0)
                };
                p[at(n, m)] = (a * ct * p[prev] - b * p2) / c;
                dp[at(n, m)] = (a * (ct * dp[prev] - st * p[prev]) - b * dp2) / c;
            }
        }
    }

    let cos_m: Vec<f64> = (0..=max_degree).map(|m| (m as f64 * phi).cos()).collect();
    let sin_m: Vec<f64> = (0..=max_degree).map(|m| (m as f64 * phi).sin()).collect();

    let (mut br, mut bt, mut bp) = (0.0, 0.0, 0.0);
    let mut rn = ratio * ratio;
    for n in 1..=max_degree {
        rn *= ratio; // (a/r)^(n+2)
        let nf = n as f64;
        let (mut sr, mut stt, mut sp) = (0.0, 0.0, 0.0);
        for m in 0..=n {
            let gi = g[idx(n, m)];
            let hi = h[idx(n, m)];
            let cs = gi * cos_m[m] + hi * sin_m[m];
            sr += cs * p[at(n, m)];
            stt += cs * dp[at(n, m)];
            sp += m as f64 * (gi * sin_m[m] - hi * cos_m[m]) * p[at(n, m)];
        }
        br += (nf + 1.0) * rn * sr;
        bt -= rn * stt;
        bp += rn * sp;
    }
    bp /= st;

    FieldVector {
        bx: -bt,
        by: bp,
        bz: -br,
    }
}

/// Parses the official IGRF text layout: `#` comments, a `c/s deg ord ...`
/// label row, an epochs header `g/h n m <epoch...> [SV label]`, then rows
/// `g|h n m <value per epoch...> [sv]`. Degrees or orders absent from the
/// file are stored as zero.
pub fn parse_coefficients(text: &str) -> Result<CoefficientSet> {
    let mut epochs: Option<(Vec<f64>, bool)> = None;
    let mut rows: Vec<(usize, bool, usize, usize, Vec<f64>, Option<f64>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "c/s" => continue,
            "g/h" => {
                if tokens.len() < 4 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "epochs header lists no epochs".into(),
                    });
                }
                let cols = &tokens[3..];
                let mut parsed = Vec::with_capacity(cols.len());
                let mut has_sv = false;
                for (k, tok) in cols.iter().enumerate() {
                    match tok.parse::<f64>() {
                        Ok(v) => parsed.push(v),
                        Err(_) if k == cols.len() - 1 && k > 0 => has_sv = true,
                        Err(_) => {
                            return Err(Error::Parse {
                                line: line_no,
                                message: format!("bad epoch label {tok:?}"),
                            })
                        }
                    }
                }
                epochs = Some((parsed, has_sv));
            }
            "g" | "h" => {
                let Some((eps, has_sv)) = &epochs else {
                    return Err(Error::Format(format!(
                        "missing epochs header before coefficient row at line {line_no}"
                    )));
                };
                let expected = 3 + eps.len() + usize::from(*has_sv);
                if tokens.len() != expected {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected {expected} tokens, found {}", tokens.len()),
                    });
                }
                let int = |tok: &str| {
                    tok.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("non-integer degree/order {tok:?}"),
                    })
                };
                let n = int(tokens[1])?;
                let m = int(tokens[2])?;
                check_degree_order(n, m, line_no)?;
                let mut values = Vec::with_capacity(expected - 3);
                for tok in &tokens[3..] {
                    values.push(tok.parse::<f64>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("non-numeric value {tok:?}"),
                    })?);
                }
                let sv = if *has_sv { values.pop() } else { None };
                let is_h = tokens[0] == "h";
                if is_h && m == 0 && (values.iter().any(|&v| v != 0.0) || sv.unwrap_or(0.0) != 0.0)
                {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "h(n,0) must be zero".into(),
                    });
                }
                rows.push((line_no, is_h, n, m, values, sv));
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unexpected row label {other:?}"),
                })
            }
        }
    }

    let Some((epochs, has_sv)) = epochs else {
        return Err(Error::Format("missing epochs header".into()));
    };
    if rows.is_empty() {
        return Err(Error::Format("no coefficient rows".into()));
    }
    let max_degree = rows.iter().map(|r| r.2).max().unwrap_or(0);
    let len = coeff_count(max_degree);
    let mut g = vec![vec![0.0; len]; epochs.len()];
    let mut h = vec![vec![0.0; len]; epochs.len()];
    let mut sv = has_sv.then(|| (vec![0.0; len], vec![0.0; len]));
    for (_, is_h, n, m, values, s) in rows {
        let table = if is_h { &mut h } else { &mut g };
        for (e, v) in values.into_iter().enumerate() {
            table[e][idx(n, m)] = v;
        }
        if let (Some((sg, sh)), Some(s)) = (sv.as_mut(), s) {
            if is_h {
                sh[idx(n, m)] = s;
            } else {
                sg[idx(n, m)] = s;
            }
        }
    }
    let set = CoefficientSet {
        epochs,
        max_degree,
        g,
        h,
        sv,
    };
    set.check_epochs()?;
    Ok(set)
}
