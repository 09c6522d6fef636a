//! Physical constants, dB conversions, concentration tags and the
//! unit-suffixed quantity parser used by scenario files.
//!
//! Scenario files spell every physical quantity as `"<number> <unit>"`
//! (`"80 us"`, `"31.34 GHz"`). Bare numbers are rejected for physical
//! fields; only dimensionless fields (Q factors, pole counts, transition
//! amplitudes) may be plain numbers. Mixed-unit source data makes silent
//! unit bugs the dominant failure mode, so conversions happen in exactly
//! one place: here.

use crate::error::{Error, Result};

/// Physical constants used across the crate.
pub mod consts {
    /// Vacuum permeability, H/m.
    pub const MU0: f64 = 4e-7 * std::f64::consts::PI;
    /// Planck constant, J·s.
    pub const PLANCK: f64 = 6.62607015e-34;
    /// Boltzmann constant, J/K.
    pub const BOLTZMANN: f64 = 1.380649e-23;
    /// Free-spin ESR field-to-frequency conversion factor, Hz per tesla.
    pub const FREE_SPIN_GAMMA: f64 = 28e9;
    /// Al site density of corundum, sites/m³.
    ///
    /// Density 3.98 g/cm³, molar mass 101.96 g/mol, two Al per formula
    /// unit: 2 · 3.98/101.96 · N_A · 10⁶ = 4.70e28.
    pub const AL_SITE_DENSITY: f64 = 4.70e28;
}

/// dBm → watts. 0 dBm = 1 mW exactly.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// Watts → dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// dB → power ratio.
pub fn db_to_power_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// dB → amplitude ratio.
pub fn db_to_amplitude_ratio(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Unit tag for a dopant concentration.
///
/// `Ppm`/`Ppb` are number fractions; `WtPercent` is a mass fraction. The
/// two families are not interconvertible without material data, so
/// [`Concentration::ratio`] refuses to mix them; cross-family conversion
/// requires an explicit factor via [`Concentration::convert_with_factor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcUnit {
    WtPercent,
    Ppm,
    Ppb,
}

impl ConcUnit {
    /// Scale from tagged value to plain fraction within its family.
    fn scale(self) -> f64 {
        match self {
            ConcUnit::WtPercent => 1e-2,
            ConcUnit::Ppm => 1e-6,
            ConcUnit::Ppb => 1e-9,
        }
    }

    fn family(self) -> &'static str {
        match self {
            ConcUnit::WtPercent => "mass",
            ConcUnit::Ppm | ConcUnit::Ppb => "number",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ConcUnit::WtPercent => "wt%",
            ConcUnit::Ppm => "ppm",
            ConcUnit::Ppb => "ppb",
        }
    }
}

/// A unit-tagged dopant concentration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concentration {
    pub value: f64,
    pub unit: ConcUnit,
}

impl Concentration {
    pub fn new(value: f64, unit: ConcUnit) -> Result<Self> {
        crate::error::ensure_positive(value, "concentration")?;
        Ok(Concentration { value, unit })
    }

    /// The concentration as a plain fraction within its unit family.
    pub fn as_fraction(&self) -> f64 {
        self.value * self.unit.scale()
    }

    /// Ratio `self / other`. Errors when the unit families differ.
    pub fn ratio(&self, other: &Concentration) -> Result<f64> {
        if self.unit.family() != other.unit.family() {
            return Err(Error::UnitMismatch(format!(
                "cannot form ratio of {} and {} concentrations without a conversion factor",
                self.unit.label(),
                other.unit.label()
            )));
        }
        Ok(self.as_fraction() / other.as_fraction())
    }

    /// Cross-family conversion with an explicit, caller-supplied factor
    /// (target fraction per source fraction), e.g. a density/molar-mass
    /// ratio when moving between wt% and atomic ppm.
    pub fn convert_with_factor(&self, to: ConcUnit, factor: f64) -> Result<Concentration> {
        crate::error::ensure_positive(factor, "conversion factor")?;
        let fraction = self.as_fraction() * factor;
        Concentration::new(fraction / to.scale(), to)
    }
}

impl std::fmt::Display for Concentration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.value, self.unit.label())
    }
}

fn split_quantity(s: &str) -> Result<(f64, String)> {
    let mut parts = s.split_whitespace();
    let num = parts
        .next()
        .ok_or_else(|| Error::Parse(format!("empty quantity '{s}'")))?;
    let unit: Vec<&str> = parts.collect();
    if unit.is_empty() {
        return Err(Error::Parse(format!(
            "quantity '{s}' has no unit suffix; physical fields must be written as '<number> <unit>'"
        )));
    }
    let value: f64 = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad number in quantity '{s}'")))?;
    Ok((value, unit.join(" ")))
}

fn lookup(s: &str, table: &[(&str, f64)], what: &str) -> Result<f64> {
    let (value, unit) = split_quantity(s)?;
    for (name, scale) in table {
        if unit == *name {
            return Ok(value * scale);
        }
    }
    let valid: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
    Err(Error::Parse(format!(
        "unknown {what} unit '{unit}' in '{s}' (expected one of: {})",
        valid.join(", ")
    )))
}

/// Parse a duration, returning seconds.
pub fn seconds(s: &str) -> Result<f64> {
    lookup(
        s,
        &[
            ("s", 1.0),
            ("ms", 1e-3),
            ("us", 1e-6),
            ("μs", 1e-6),
            ("µs", 1e-6),
            ("ns", 1e-9),
        ],
        "time",
    )
}

/// Parse a frequency, returning hertz.
pub fn hertz(s: &str) -> Result<f64> {
    lookup(
        s,
        &[
            ("Hz", 1.0),
            ("kHz", 1e3),
            ("MHz", 1e6),
            ("GHz", 1e9),
            ("THz", 1e12),
            ("mHz", 1e-3),
        ],
        "frequency",
    )
}

/// Parse a temperature, returning kelvin.
pub fn kelvin(s: &str) -> Result<f64> {
    lookup(s, &[("K", 1.0), ("mK", 1e-3)], "temperature")
}

/// Parse a power, returning watts. Accepts watt multiples and dBm.
pub fn watts(s: &str) -> Result<f64> {
    let (value, unit) = split_quantity(s)?;
    if unit == "dBm" {
        return Ok(dbm_to_watts(value));
    }
    lookup(
        s,
        &[
            ("W", 1.0),
            ("mW", 1e-3),
            ("uW", 1e-6),
            ("μW", 1e-6),
            ("µW", 1e-6),
            ("nW", 1e-9),
            ("pW", 1e-12),
        ],
        "power",
    )
}

/// Parse a volume, returning m³.
pub fn volume_m3(s: &str) -> Result<f64> {
    lookup(s, &[("m3", 1.0), ("cm3", 1e-6), ("mm3", 1e-9)], "volume")
}

/// Parse a length, returning meters.
pub fn meters(s: &str) -> Result<f64> {
    lookup(
        s,
        &[("m", 1.0), ("cm", 1e-2), ("mm", 1e-3), ("km", 1e3)],
        "length",
    )
}

/// Parse a gain/loss in dB.
pub fn db(s: &str) -> Result<f64> {
    lookup(s, &[("dB", 1.0)], "gain")
}

/// Parse a level relative to carrier, dBc.
pub fn dbc(s: &str) -> Result<f64> {
    lookup(s, &[("dBc", 1.0), ("dB", 1.0)], "relative level")
}

/// Parse an angle, returning radians.
pub fn radians(s: &str) -> Result<f64> {
    lookup(
        s,
        &[
            ("rad", 1.0),
            ("deg", std::f64::consts::PI / 180.0),
            ("°", std::f64::consts::PI / 180.0),
        ],
        "angle",
    )
}

/// Parse a detector sensitivity, returning V/W.
pub fn volts_per_watt(s: &str) -> Result<f64> {
    lookup(
        s,
        &[
            ("V/W", 1.0),
            ("mV/uW", 1e3),
            ("mV/μW", 1e3),
            ("mV/µW", 1e3),
            ("mV/mW", 1.0),
        ],
        "sensitivity",
    )
}

/// Parse an actuator phase swing, returning degrees per volt.
pub fn degrees_per_volt(s: &str) -> Result<f64> {
    lookup(s, &[("deg/V", 1.0), ("°/V", 1.0)], "phase swing")
}

/// Parse a residual-AM coefficient, dB per volt.
pub fn db_per_volt(s: &str) -> Result<f64> {
    lookup(s, &[("dB/V", 1.0)], "residual a.m.")
}

/// Parse a frequency pull, returning Hz per degree.
pub fn hz_per_degree(s: &str) -> Result<f64> {
    lookup(
        s,
        &[("Hz/deg", 1.0), ("kHz/deg", 1e3), ("MHz/deg", 1e6)],
        "frequency pull",
    )
}

/// Parse a thermal curvature, returning Hz/K².
pub fn hz_per_kelvin2(s: &str) -> Result<f64> {
    lookup(
        s,
        &[("Hz/K2", 1.0), ("Hz/K^2", 1.0), ("Hz/K²", 1.0)],
        "curvature",
    )
}

/// Parse an integrator gain, returning 1/s.
pub fn per_second(s: &str) -> Result<f64> {
    lookup(s, &[("1/s", 1.0), ("/s", 1.0)], "rate")
}

/// Parse a surface intensity, returning mW/cm².
pub fn mw_per_cm2(s: &str) -> Result<f64> {
    lookup(
        s,
        &[("mW/cm2", 1.0), ("mW/cm²", 1.0), ("W/cm2", 1e3)],
        "intensity",
    )
}

/// Parse a fiber attenuation, returning dB per km.
pub fn db_per_km(s: &str) -> Result<f64> {
    lookup(s, &[("dB/km", 1.0), ("dB/m", 1e3)], "attenuation")
}

/// Parse a percentage, returning a plain fraction.
pub fn percent_fraction(s: &str) -> Result<f64> {
    lookup(s, &[("%", 1e-2)], "percentage")
}

/// Parse a per-mm loss, returning fraction per mm.
pub fn fraction_per_mm(s: &str) -> Result<f64> {
    lookup(s, &[("%/mm", 1e-2), ("/mm", 1.0)], "per-mm loss")
}

/// Parse a unit-tagged concentration.
pub fn concentration(s: &str) -> Result<Concentration> {
    let (value, unit) = split_quantity(s)?;
    let unit = match unit.as_str() {
        "wt%" => ConcUnit::WtPercent,
        "ppm" => ConcUnit::Ppm,
        "ppb" => ConcUnit::Ppb,
        other => {
            return Err(Error::Parse(format!(
                "unknown concentration unit '{other}' in '{s}' (expected wt%, ppm or ppb)"
            )))
        }
    };
    Concentration::new(value, unit)
}
