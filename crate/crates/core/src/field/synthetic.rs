//! Analytic fields for tests and desk-scale training.

use super::{FieldSource, FieldVector, GeomagneticElements, GradientVector};
use crate::geo::{GeoPosition, LocalFrame};
use crate::{Error, Result};

use super::igrf::EARTH_RADIUS_KM;

/// Field whose `(D, I, B_H)` vary linearly with the planar coordinates of a
/// fixed [`LocalFrame`]. The vector is reconstructed from those three
/// elements, so every element identity holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField {
    frame: LocalFrame,
    base: [f64; 3],
    slopes: [GradientVector; 3],
}

impl LinearField {
    /// `base` is `(D rad, I rad, B_H nT)` at the frame anchor, `slopes` the
    /// matching per-metre gradients.
    pub fn new(frame: LocalFrame, base: [f64; 3], slopes: [GradientVector; 3]) -> Self {
        Self {
            frame,
            base,
            slopes,
        }
    }

    /// Desk-scale field loosely patterned on the equatorial western Pacific:
    /// D ≈ 8.5°, I ≈ −21°, B_H ≈ 35 400 nT, with gradients pointing in three
    /// distinct directions.
    pub fn desk(frame: LocalFrame) -> Self {
        Self::new(
            frame,
            [8.5f64.to_radians(), (-21.0f64).to_radians(), 35_400.0],
            [
                GradientVector::new(2.0e-8, 1.5e-8),
                GradientVector::new(-5.0e-8, 4.8e-7),
                GradientVector::new(3.0e-4, -4.0e-4),
            ],
        )
    }

    pub fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    pub fn slopes(&self) -> &[GradientVector; 3] {
        &self.slopes
    }

    /// `(D, I, B_H)` at planar coordinates of the field's frame.
    pub fn triple_at_xy(&self, x: f64, y: f64) -> [f64; 3] {
        let mut out = self.base;
        for (o, g) in out.iter_mut().zip(&self.slopes) {
            *o += g.gx * x + g.gy * y;
        }
        out
    }

    fn compose(d: f64, i: f64, b_h: f64) -> Result<GeomagneticElements> {
        if b_h <= 0.0 || i.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::DegenerateField(format!(
                "linear field left its valid domain (I={i}, B_H={b_h})"
            )));
        }
        let bx = b_h * d.cos();
        let by = b_h * d.sin();
        let bz = b_h * i.tan();
        Ok(GeomagneticElements {
            b_f: b_h / i.cos(),
            b_h,
            bx,
            by,
            bz,
            d,
            i,
        })
    }
}

impl FieldSource for LinearField {
    fn name(&self) -> &str {
        "linear"
    }

    fn vector(&self, pos: &GeoPosition, epoch: f64) -> Result<FieldVector> {
        let e = self.elements(pos, epoch)?;
        Ok(FieldVector {
            bx: e.bx,
            by: e.by,
            bz: e.bz,
        })
    }

    fn elements(&self, pos: &GeoPosition, _epoch: f64) -> Result<GeomagneticElements> {
        let (x, y) = self.frame.to_local(pos);
        let [d, i, b_h] = self.triple_at_xy(x, y);
        Self::compose(d, i, b_h)
    }
}

/// Geocentric axial dipole with a single Gauss coefficient `g10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleField {
    pub g10: f64,
}

impl DipoleField {
    pub fn new(g10: f64) -> Self {
        Self { g10 }
    }
}

impl FieldSource for DipoleField {
    fn name(&self) -> &str {
        "dipole"
    }

    fn vector(&self, pos: &GeoPosition, _epoch: f64) -> Result<FieldVector> {
        let theta = (90.0 - pos.latitude).to_radians();
        let k = (EARTH_RADIUS_KM / (EARTH_RADIUS_KM + pos.altitude_km)).powi(3);
        Ok(FieldVector {
            bx: -self.g10 * theta.sin() * k,
            by: 0.0,
            bz: -2.0 * self.g10 * theta.cos() * k,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::elements_from_vector;
    use approx::assert_relative_eq;

    #[test]
    fn linear_elements_are_consistent_with_vector() {
        let frame = LocalFrame::new(-5.0, 165.0);
        let f = LinearField::desk(frame);
        let p = frame.to_geo(40_000.0, -25_000.0);
        let e = f.elements(&p, 2020.0).unwrap();
        let back = elements_from_vector(&f.vector(&p, 2020.0).unwrap()).unwrap();
        assert_relative_eq!(e.d, back.d, max_relative = 1e-12);
        assert_relative_eq!(e.i, back.i, max_relative = 1e-12);
        assert_relative_eq!(e.b_h, back.b_h, max_relative = 1e-12);
        assert_relative_eq!(e.b_f, back.b_f, max_relative = 1e-12);
    }
}
