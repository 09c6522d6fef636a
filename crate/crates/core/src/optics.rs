//! Ultraviolet delivery-power arithmetic: lamp aging, surface and bulk
//! losses, geometric projection and fiber attenuation.

use serde::Deserialize;

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::units;

/// A free-space optical delivery path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalPath {
    /// Source intensity at the reference distance, mW/cm².
    pub source_intensity: f64,
    /// Multiplier on the fresh-lamp intensity actually used, in [0, 1).
    pub aging_fraction: f64,
    /// Number of air/glass surfaces crossed.
    pub surfaces: u32,
    /// Reflection loss per surface, fraction in [0, 1).
    pub surface_loss: f64,
    /// Total bulk path, mm.
    pub bulk_path_mm: f64,
    /// Absorption per mm of bulk, fraction in [0, 1).
    pub bulk_loss_per_mm: f64,
    /// Projected aperture diameter, cm.
    pub aperture_diameter_cm: f64,
}

impl OpticalPath {
    pub fn validate(&self) -> Result<()> {
        ensure_nonnegative(self.source_intensity, "source_intensity")?;
        for (v, name) in [
            (self.aging_fraction, "aging_fraction"),
            (self.surface_loss, "surface_loss"),
            (self.bulk_loss_per_mm, "bulk_loss_per_mm"),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} must lie in [0,1), got {v}")));
            }
        }
        ensure_nonnegative(self.bulk_path_mm, "bulk_path_mm")?;
        ensure_positive(self.aperture_diameter_cm, "aperture_diameter_cm")?;
        Ok(())
    }

    /// Lumped transmission of the path's surfaces and bulk.
    pub fn transmission(&self) -> Result<f64> {
        self.validate()?;
        transmission(
            self.surfaces,
            self.surface_loss,
            self.bulk_path_mm,
            self.bulk_loss_per_mm,
        )
    }
}

/// Lamp intensity after `hours` of operation, mW/cm²: output decays
/// linearly to 70% over the first 2000 hours, then stabilizes.
pub fn aged_intensity(i0: f64, hours: f64) -> Result<f64> {
    ensure_nonnegative(i0, "i0")?;
    ensure_nonnegative(hours, "hours")?;
    let factor = if hours >= 2000.0 {
        0.70
    } else {
        1.0 - 0.30 * hours / 2000.0
    };
    Ok(i0 * factor)
}

/// Compound transmission of `n` surfaces at loss `r` each plus `l` mm of
/// bulk at loss `a` per mm: `(1−r)ⁿ · (1−a)ˡ`.
pub fn transmission(n: u32, r: f64, l: f64, a: f64) -> Result<f64> {
    for (v, name) in [(r, "surface loss"), (a, "bulk loss")] {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} must lie in [0,1), got {v}")));
        }
    }
    ensure_nonnegative(l, "path length")?;
    Ok((1.0 - r).powi(n as i32) * (1.0 - a).powf(l))
}

/// Optical power projected through the path, mW:
/// `π (d/2)² · intensity · aging · transmission`.
pub fn delivered_power(path: &OpticalPath) -> Result<f64> {
    let t = path.transmission()?;
    let radius = path.aperture_diameter_cm / 2.0;
    Ok(std::f64::consts::PI * radius * radius * path.source_intensity * path.aging_fraction * t)
}

/// Fiber attenuation over `length_m` meters at `atten_db_per_km`, dB.
pub fn fiber_loss(atten_db_per_km: f64, length_m: f64) -> Result<f64> {
    ensure_nonnegative(atten_db_per_km, "attenuation")?;
    ensure_nonnegative(length_m, "length")?;
    Ok(atten_db_per_km * length_m / 1000.0)
}

/// A catalogued element of the delivery hardware.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PathElement {
    pub key: String,
    pub function: String,
    pub detail: String,
}

/// The shipped ultraviolet fixtures: delivery path, light pipe, hardware.
#[derive(Debug, Clone, PartialEq)]
pub struct UvFixture {
    pub path: OpticalPath,
    pub path_provenance: String,
    /// Light-pipe attenuation, dB/km.
    pub pipe_attenuation: f64,
    /// Light-pipe length, m.
    pub pipe_length: f64,
    pub pipe_provenance: String,
    pub elements: Vec<PathElement>,
}

#[derive(Deserialize)]
struct RawPath {
    provenance: String,
    source_intensity: String,
    aging_fraction: f64,
    surfaces: u32,
    surface_loss: String,
    bulk_path: String,
    bulk_loss: String,
    aperture_diameter: String,
}

#[derive(Deserialize)]
struct RawPipe {
    provenance: String,
    attenuation: String,
    length: String,
}

#[derive(Deserialize)]
struct RawUv {
    path_254nm: RawPath,
    light_pipe_385nm: RawPipe,
    #[serde(default)]
    element: Vec<PathElement>,
}

const EMBEDDED_UV: &str = include_str!("../data/uv_path.toml");

impl UvFixture {
    /// The fixture shipped with the crate.
    pub fn embedded() -> UvFixture {
        UvFixture::from_toml_str(EMBEDDED_UV).expect("embedded uv fixture parses")
    }

    pub fn from_toml_str(text: &str) -> Result<UvFixture> {
        let raw: RawUv =
            toml::from_str(text).map_err(|e| Error::Parse(format!("uv fixture: {e}")))?;
        let p = raw.path_254nm;
        let path = OpticalPath {
            source_intensity: units::mw_per_cm2(&p.source_intensity)?,
            aging_fraction: p.aging_fraction,
            surfaces: p.surfaces,
            surface_loss: units::percent_fraction(&p.surface_loss)?,
            bulk_path_mm: units::meters(&p.bulk_path)? * 1e3,
            bulk_loss_per_mm: units::fraction_per_mm(&p.bulk_loss)?,
            aperture_diameter_cm: units::meters(&p.aperture_diameter)? * 1e2,
        };
        path.validate()?;
        Ok(UvFixture {
            path,
            path_provenance: p.provenance,
            pipe_attenuation: units::db_per_km(&raw.light_pipe_385nm.attenuation)?,
            pipe_length: units::meters(&raw.light_pipe_385nm.length)?,
            pipe_provenance: raw.light_pipe_385nm.provenance,
            elements: raw.element,
        })
    }
}
