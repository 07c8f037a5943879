//! Geomagnetic field evaluation.
//!
//! A [`FieldSource`] yields the north/east/down field vector at a position
//! and epoch. The IGRF [`CoefficientSet`] is the production source; the
//! analytic [`LinearField`] and [`DipoleField`] sit behind the same trait for
//! tests and desk-scale experiments.

mod igrf;
mod synthetic;

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use igrf::{evaluate_field, parse_coefficients, CoefficientSet, EARTH_RADIUS_KM};
pub use synthetic::{DipoleField, LinearField};

use crate::geo::{GeoPosition, LocalFrame, Region, METERS_PER_DEGREE};
use crate::{Error, Result};

/// Finite-difference step for horizontal gradients, metres.
pub const DEFAULT_GRADIENT_STEP_M: f64 = 1000.0;

/// North (`bx`), east (`by`) and vertically-down (`bz`) components in nT.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldVector {
    pub fn magnitude(&self) -> f64 {
        (self.bx * self.bx + self.by * self.by + self.bz * self.bz).sqrt()
    }
}

/// The seven scalar descriptors of the local field. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomagneticElements {
    pub b_f: f64,
    pub b_h: f64,
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
    /// Declination, east of north.
    pub d: f64,
    /// Inclination, positive downward.
    pub i: f64,
}

impl GeomagneticElements {
    pub fn get(&self, element: Element) -> f64 {
        match element {
            Element::D => self.d,
            Element::I => self.i,
            Element::BH => self.b_h,
            Element::BF => self.b_f,
            Element::Bx => self.bx,
            Element::By => self.by,
            Element::Bz => self.bz,
        }
    }

    /// `(D, I, B_H)`, the triple the navigator observes.
    pub fn nav_triple(&self) -> [f64; 3] {
        [self.d, self.i, self.b_h]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Element {
    D,
    I,
    BH,
    BF,
    Bx,
    By,
    Bz,
}

impl Element {
    /// The three parameters used for navigation, in state order.
    pub const NAV: [Element; 3] = [Element::D, Element::I, Element::BH];

    pub fn is_angle(self) -> bool {
        matches!(self, Element::D | Element::I)
    }

    pub fn label(self) -> &'static str {
        match self {
            Element::D => "D",
            Element::I => "I",
            Element::BH => "BH",
            Element::BF => "BF",
            Element::Bx => "Bx",
            Element::By => "By",
            Element::Bz => "Bz",
        }
    }
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "D" => Element::D,
            "I" => Element::I,
            "BH" | "B_H" => Element::BH,
            "BF" | "B_F" | "F" => Element::BF,
            "BX" | "X" => Element::Bx,
            "BY" | "Y" => Element::By,
            "BZ" | "Z" => Element::Bz,
            _ => return Err(Error::Usage(format!("unknown geomagnetic element {s:?}"))),
        })
    }
}

/// Horizontal gradient in parameter units per metre (`gx` east, `gy` north).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GradientVector {
    pub gx: f64,
    pub gy: f64,
}

impl GradientVector {
    pub fn new(gx: f64, gy: f64) -> Self {
        Self { gx, gy }
    }

    pub fn norm_sq(&self) -> f64 {
        self.gx * self.gx + self.gy * self.gy
    }
}

pub trait FieldSource: Send + Sync {
    fn name(&self) -> &str;

    fn vector(&self, pos: &GeoPosition, epoch: f64) -> Result<FieldVector>;

    fn elements(&self, pos: &GeoPosition, epoch: f64) -> Result<GeomagneticElements> {
        elements_from_vector(&self.vector(pos, epoch)?)
    }
}

impl<T: FieldSource + ?Sized> FieldSource for std::sync::Arc<T> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn vector(&self, pos: &GeoPosition, epoch: f64) -> Result<FieldVector> {
        (**self).vector(pos, epoch)
    }

    fn elements(&self, pos: &GeoPosition, epoch: f64) -> Result<GeomagneticElements> {
        (**self).elements(pos, epoch)
    }
}

/// Decomposes a field vector into the seven elements.
///
/// Declination uses `atan2(by, bx)` so the sign of the east component is
/// kept; inclination uses `atan2(bz, b_h)`.
pub fn elements_from_vector(v: &FieldVector) -> Result<GeomagneticElements> {
    if !(v.bx.is_finite() && v.by.is_finite() && v.bz.is_finite()) {
        return Err(Error::NonFinite(format!("field vector {v:?}")));
    }
    let b_h = v.bx.hypot(v.by);
    let b_f = b_h.hypot(v.bz);
    if b_f == 0.0 {
        return Err(Error::DegenerateField("zero field vector".into()));
    }
    Ok(GeomagneticElements {
        b_f,
        b_h,
        bx: v.bx,
        by: v.by,
        bz: v.bz,
        d: v.by.atan2(v.bx),
        i: v.bz.atan2(b_h),
    })
}

/// Wraps an angle difference into `(-pi, pi]`.
pub(crate) fn wrap_pi(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a % TAU;
    if r <= -PI {
        r += TAU;
    } else if r > PI {
        r -= TAU;
    }
    r
}

fn element_difference(element: Element, a: f64, b: f64) -> f64 {
    if element == Element::D {
        wrap_pi(a - b)
    } else {
        a - b
    }
}

/// Central-difference gradients of several elements from one four-point
/// stencil `step_m` metres east/west/north/south of `pos`. Metres are
/// converted with `frame`'s per-degree factors, so the result is expressed in
/// that frame's planar axes.
pub fn gradients(
    field: &dyn FieldSource,
    pos: &GeoPosition,
    epoch: f64,
    elements: &[Element],
    frame: &LocalFrame,
    step_m: f64,
) -> Result<Vec<GradientVector>> {
    if !(step_m > 0.0 && step_m.is_finite()) {
        return Err(Error::Usage(format!("gradient step {step_m} must be positive")));
    }
    let dlat = step_m / METERS_PER_DEGREE;
    let dlon = step_m / frame.meters_per_deg_lon();
    if pos.latitude + dlat > 90.0 || pos.latitude - dlat < -90.0 {
        return Err(Error::Position(format!(
            "gradient stencil at latitude {} crosses a pole",
            pos.latitude
        )));
    }
    let shifted = |dla: f64, dlo: f64| GeoPosition {
        latitude: pos.latitude + dla,
        longitude: crate::geo::normalize_longitude(pos.longitude + dlo),
        altitude_km: pos.altitude_km,
    };
    let east = field.elements(&shifted(0.0, dlon), epoch)?;
    let west = field.elements(&shifted(0.0, -dlon), epoch)?;
    let north = field.elements(&shifted(dlat, 0.0), epoch)?;
    let south = field.elements(&shifted(-dlat, 0.0), epoch)?;
    let two_h = 2.0 * step_m;
    Ok(elements
        .iter()
        .map(|&e| GradientVector {
            gx: element_difference(e, east.get(e), west.get(e)) / two_h,
            gy: element_difference(e, north.get(e), south.get(e)) / two_h,
        })
        .collect())
}

/// Gradient of a single element; see [`gradients`].
pub fn gradient(
    field: &dyn FieldSource,
    pos: &GeoPosition,
    epoch: f64,
    element: Element,
    frame: &LocalFrame,
    step_m: f64,
) -> Result<GradientVector> {
    Ok(gradients(field, pos, epoch, &[element], frame, step_m)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub latitude: f64,
    pub longitude: f64,
    pub elements: GeomagneticElements,
}

/// Samples `n_lat × n_lon` nodes over `region`, corners included. Row-major:
/// latitude ascending in the outer loop, longitude ascending inside.
pub fn sample_grid(
    field: &dyn FieldSource,
    region: &Region,
    n_lat: usize,
    n_lon: usize,
    epoch: f64,
) -> Result<Vec<GridNode>> {
    region.validate()?;
    if n_lat < 2 || n_lon < 2 {
        return Err(Error::Usage("resolution must be ≥ 2".into()));
    }
    let mut nodes = Vec::with_capacity(n_lat * n_lon);
    for r in 0..n_lat {
        let lat = region.lat_min + (region.lat_max - region.lat_min) * r as f64 / (n_lat - 1) as f64;
        for c in 0..n_lon {
            let lon =
                region.lon_min + (region.lon_max - region.lon_min) * c as f64 / (n_lon - 1) as f64;
            let pos = GeoPosition::new(lat, lon)?;
            nodes.push(GridNode {
                latitude: lat,
                longitude: lon,
                elements: field.elements(&pos, epoch)?,
            });
        }
    }
    Ok(nodes)
}

pub const GRID_CSV_HEADER: &str = "lat,lon,D_deg,I_deg,BH_nT,BF_nT";

pub fn write_grid_csv<W: Write>(nodes: &[GridNode], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{GRID_CSV_HEADER}")?;
    for n in nodes {
        writeln!(
            out,
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            n.latitude,
            n.longitude,
            n.elements.d.to_degrees(),
            n.elements.i.to_degrees(),
            n.elements.b_h,
            n.elements.b_f
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn el(bx: f64, by: f64, bz: f64) -> GeomagneticElements {
        elements_from_vector(&FieldVector { bx, by, bz }).unwrap()
    }

    #[test]
    fn element_decomposition_examples() {
        let e = el(1.0, 0.0, 0.0);
        assert_eq!((e.d, e.i, e.b_h, e.b_f), (0.0, 0.0, 1.0, 1.0));
        let e = el(0.0, 1.0, 0.0);
        assert_relative_eq!(e.d, FRAC_PI_2);
        assert_eq!(e.i, 0.0);
        let e = el(1.0, 0.0, 1.0);
        assert_relative_eq!(e.i, FRAC_PI_4);
        assert_relative_eq!(e.b_f, SQRT_2);
        assert_relative_eq!(e.b_h, 1.0);
    }

    #[test]
    fn declination_keeps_west_sign() {
        assert!(el(1.0, -0.5, 0.2).d < 0.0);
    }

    #[test]
    fn zero_vector_is_degenerate() {
        let err = elements_from_vector(&FieldVector {
            bx: 0.0,
            by: 0.0,
            bz: 0.0,
        });
        assert!(matches!(err, Err(Error::DegenerateField(_))));
    }

    #[test]
    fn linear_hook_gradient_is_exact() {
        let frame = LocalFrame::new(-5.0, 165.0);
        // B_H = 30000 + x (nT), other elements constant.
        let field = LinearField::new(
            frame,
            [0.1, -0.3, 30_000.0],
            [
                GradientVector::default(),
                GradientVector::default(),
                GradientVector::new(1.0, 0.0),
            ],
        );
        let pos = frame.to_geo(12_345.0, -6_789.0);
        let g = gradient(&field, &pos, 2020.0, Element::BH, &frame, DEFAULT_GRADIENT_STEP_M)
            .unwrap();
        assert_relative_eq!(g.gx, 1.0, max_relative = 1e-9);
        assert!(g.gy.abs() < 1e-9);
    }

    #[test]
    fn stencil_across_pole_is_rejected() {
        let field = DipoleField::new(-29_404.8);
        let pos = GeoPosition::new(89.999_99, 0.0).unwrap();
        let frame = LocalFrame::new(89.0, 0.0);
        assert!(gradient(&field, &pos, 2020.0, Element::I, &frame, 1000.0).is_err());
    }

    #[test]
    fn grid_rejects_single_point_resolution() {
        let field = DipoleField::new(-29_404.8);
        let err = sample_grid(&field, &Region::PAPER, 1, 5, 2020.0).unwrap_err();
        assert!(err.to_string().contains("resolution must be ≥ 2"));
    }

    #[test]
    fn element_names_parse() {
        assert_eq!("bh".parse::<Element>().unwrap(), Element::BH);
        assert_eq!("I".parse::<Element>().unwrap(), Element::I);
        assert!("Q".parse::<Element>().is_err());
    }
}
