//! Positions, regions and the local equirectangular frame used to map the
//! vehicle's planar coordinates onto latitude/longitude.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Metres per degree of latitude (and of longitude at the equator).
pub const METERS_PER_DEGREE: f64 = 111_320.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPosition {
    /// Degrees north, `[-90, 90]`.
    pub latitude: f64,
    /// Degrees east, `(-180, 180]`.
    pub longitude: f64,
    /// Kilometres above the reference sphere.
    #[serde(default)]
    pub altitude_km: f64,
}

impl GeoPosition {
    /// Validates latitude and folds longitude into `(-180, 180]`.
    pub fn new(latitude: f64, longitude: f64) -> Result<Self> {
        Self::with_altitude(latitude, longitude, 0.0)
    }

    pub fn with_altitude(latitude: f64, longitude: f64, altitude_km: f64) -> Result<Self> {
        if !latitude.is_finite() || !longitude.is_finite() || !altitude_km.is_finite() {
            return Err(Error::Position(format!(
                "non-finite coordinate ({latitude}, {longitude}, {altitude_km})"
            )));
        }
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(Error::Position(format!(
                "latitude {latitude} outside [-90, 90]"
            )));
        }
        Ok(Self {
            latitude,
            longitude: normalize_longitude(longitude),
            altitude_km,
        })
    }
}

pub fn normalize_longitude(lon: f64) -> f64 {
    let mut l = lon % 360.0;
    if l <= -180.0 {
        l += 360.0;
    } else if l > 180.0 {
        l -= 360.0;
    }
    l
}

/// Equirectangular tangent frame: `x` metres east and `y` metres north of
/// the anchor, with the longitude scale frozen at the anchor latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub anchor_lat: f64,
    pub anchor_lon: f64,
    meters_per_deg_lon: f64,
}

impl LocalFrame {
    pub fn new(anchor_lat: f64, anchor_lon: f64) -> Self {
        Self {
            anchor_lat,
            anchor_lon,
            meters_per_deg_lon: METERS_PER_DEGREE * anchor_lat.to_radians().cos(),
        }
    }

    pub fn at(pos: &GeoPosition) -> Self {
        Self::new(pos.latitude, pos.longitude)
    }

    pub fn meters_per_deg_lat(&self) -> f64 {
        METERS_PER_DEGREE
    }

    pub fn meters_per_deg_lon(&self) -> f64 {
        self.meters_per_deg_lon
    }

    pub fn to_local(&self, pos: &GeoPosition) -> (f64, f64) {
        let dlon = normalize_longitude(pos.longitude - self.anchor_lon);
        (
            dlon * self.meters_per_deg_lon,
            (pos.latitude - self.anchor_lat) * METERS_PER_DEGREE,
        )
    }

    /// Inverse of [`to_local`](Self::to_local); the latitude is clamped to
    /// the poles so far-away points still produce a position.
    pub fn to_geo(&self, x: f64, y: f64) -> GeoPosition {
        let lat = (self.anchor_lat + y / METERS_PER_DEGREE).clamp(-90.0, 90.0);
        GeoPosition {
            latitude: lat,
            longitude: normalize_longitude(self.anchor_lon + x / self.meters_per_deg_lon),
            altitude_km: 0.0,
        }
    }
}

/// Latitude/longitude rectangle, `lon_min < lon_max` (no antimeridian wrap).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl Region {
    /// The evaluation area north of Australia: 10°S–0°N, 160°E–170°E.
    pub const PAPER: Region = Region {
        lat_min: -10.0,
        lat_max: 0.0,
        lon_min: 160.0,
        lon_max: 170.0,
    };

    /// Square region of side `side_m` metres centred on `(lat, lon)`.
    pub fn square(center_lat: f64, center_lon: f64, side_m: f64) -> Self {
        let half_lat = 0.5 * side_m / METERS_PER_DEGREE;
        let half_lon = 0.5 * side_m / (METERS_PER_DEGREE * center_lat.to_radians().cos());
        Self {
            lat_min: center_lat - half_lat,
            lat_max: center_lat + half_lat,
            lon_min: center_lon - half_lon,
            lon_max: center_lon + half_lon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.lat_min, self.lat_max, self.lon_min, self.lon_max];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Region("non-finite bound".into()));
        }
        if self.lat_min < -90.0 || self.lat_max > 90.0 {
            return Err(Error::Region(format!(
                "latitude span [{}, {}] crosses a pole",
                self.lat_min, self.lat_max
            )));
        }
        if self.lat_min >= self.lat_max || self.lon_min >= self.lon_max {
            return Err(Error::Region(format!("empty region {self:?}")));
        }
        if self.lon_max - self.lon_min > 360.0 {
            return Err(Error::Region("longitude span exceeds 360 degrees".into()));
        }
        Ok(())
    }

    pub fn center(&self) -> GeoPosition {
        GeoPosition {
            latitude: 0.5 * (self.lat_min + self.lat_max),
            longitude: normalize_longitude(0.5 * (self.lon_min + self.lon_max)),
            altitude_km: 0.0,
        }
    }

    /// Frame anchored at the region centre.
    pub fn frame(&self) -> LocalFrame {
        let c = self.center();
        LocalFrame::new(c.latitude, c.longitude)
    }

    pub fn contains(&self, pos: &GeoPosition) -> bool {
        let lon = self.unwrap_lon(pos.longitude);
        (self.lat_min..=self.lat_max).contains(&pos.latitude)
            && (self.lon_min..=self.lon_max).contains(&lon)
    }

    fn unwrap_lon(&self, lon: f64) -> f64 {
        // Regions may be given with lon_max > 180; bring lon into the same turn.
        let mut l = lon;
        while l < self.lon_min - 1e-9 {
            l += 360.0;
        }
        while l > self.lon_max + 1e-9 && l - 360.0 >= self.lon_min - 1e-9 {
            l -= 360.0;
        }
        l
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GeoPosition {
        let lat = rng.random_range(self.lat_min..=self.lat_max);
        let lon = rng.random_range(self.lon_min..=self.lon_max);
        GeoPosition {
            latitude: lat,
            longitude: normalize_longitude(lon),
            altitude_km: 0.0,
        }
    }
}

/// Straight-line distance in the region's tangent frame.
pub fn planar_distance(frame: &LocalFrame, a: &GeoPosition, b: &GeoPosition) -> f64 {
    let (ax, ay) = frame.to_local(a);
    let (bx, by) = frame.to_local(b);
    (bx - ax).hypot(by - ay)
}
