//! Spin-ensemble broadening, saturation and concentration scaling, plus the
//! relaxation-time catalog assembled from the ESR literature.
//!
//! The key relation is the intensity-broadened linewidth of a homogeneous
//! spin packet,
//!
//! ```text
//! Δf = sqrt(1 + S²) / (π T₂),      S = χ sqrt(T₁ T₂)
//! ```
//!
//! where `χ` is the Rabi frequency and `S` the dimensionless degree of
//! saturation. At `S = 0` this reduces to the unsaturated homogeneous
//! linewidth `1/(π T₂)`; for `S ≫ 1` it grows linearly with drive.

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::units::Concentration;

/// Relaxation time constants for one spin species at one concentration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationParams {
    /// Spin-lattice relaxation time, seconds.
    pub t1: f64,
    /// Homogeneous (transverse) relaxation time, seconds.
    pub t2: f64,
    /// Inhomogeneous dephasing time, seconds.
    pub t2_star: f64,
    /// Spectral-diffusion time, seconds, when known.
    pub t_d: Option<f64>,
}

impl RelaxationParams {
    pub fn new(t1: f64, t2: f64, t2_star: f64, t_d: Option<f64>) -> Result<Self> {
        ensure_positive(t1, "t1")?;
        ensure_positive(t2, "t2")?;
        ensure_positive(t2_star, "t2_star")?;
        if let Some(td) = t_d {
            ensure_positive(td, "t_d")?;
        }
        Ok(RelaxationParams { t1, t2, t2_star, t_d })
    }

    /// Ordering violations (`t2* ≤ t2 ≤ t1` expected). Catalog data may
    /// legitimately violate this, so violations warn rather than reject.
    pub fn ordering_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.t2_star > self.t2 {
            w.push(format!("t2_star ({}) exceeds t2 ({})", self.t2_star, self.t2));
        }
        if self.t2 > self.t1 {
            w.push(format!("t2 ({}) exceeds t1 ({})", self.t2, self.t1));
        }
        w
    }
}

/// Saturation state of a driven transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationState {
    /// Degree of saturation (dimensionless intensity).
    pub s: f64,
    /// Rabi frequency, Hz.
    pub chi: f64,
    /// Intensity-broadened linewidth, Hz.
    pub delta_f: f64,
}

impl SaturationState {
    /// Evaluates the saturation chain for a drive `chi` against (T₁, T₂).
    pub fn evaluate(chi: f64, t1: f64, t2: f64) -> Result<Self> {
        let s = saturation(chi, t1, t2)?;
        let delta_f = intensity_broadened_linewidth(s, t2)?;
        Ok(SaturationState { s, chi, delta_f })
    }
}

/// Unsaturated homogeneous linewidth `1/(π T₂)` in Hz.
pub fn homogeneous_linewidth(t2: f64) -> Result<f64> {
    ensure_positive(t2, "t2")?;
    Ok(1.0 / (std::f64::consts::PI * t2))
}

/// Scales a reference T₂ to a new concentration via `T₂ ∝ 1/sqrt(conc)`.
///
/// Both concentrations must carry the same unit family; cross-family
/// scaling needs an explicit conversion first.
pub fn scale_t2(t2_ref: f64, conc_ref: &Concentration, conc: &Concentration) -> Result<f64> {
    ensure_positive(t2_ref, "t2_ref")?;
    let ratio = conc_ref.ratio(conc)?;
    Ok(t2_ref * ratio.sqrt())
}

/// Degree of saturation `S = χ sqrt(T₁ T₂)`.
pub fn saturation(chi: f64, t1: f64, t2: f64) -> Result<f64> {
    ensure_nonnegative(chi, "chi")?;
    ensure_positive(t1, "t1")?;
    ensure_positive(t2, "t2")?;
    Ok(chi * (t1 * t2).sqrt())
}

/// Intensity-broadened linewidth `sqrt(1 + S²)/(π T₂)` in Hz.
pub fn intensity_broadened_linewidth(s: f64, t2: f64) -> Result<f64> {
    ensure_nonnegative(s, "s")?;
    ensure_positive(t2, "t2")?;
    Ok((1.0 + s * s).sqrt() / (std::f64::consts::PI * t2))
}

/// Whether two modes share the same inverted population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeRelation {
    /// Far enough apart to oscillate independently.
    Coexist,
    /// Close enough to compete for the same inversion.
    Compete,
}

impl std::fmt::Display for ModeRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeRelation::Coexist => write!(f, "coexist"),
            ModeRelation::Compete => write!(f, "compete"),
        }
    }
}

/// Classifies a mode pair by separation against the effective homogeneous
/// linewidth. A tie counts as competition, the conservative call for
/// oscillator design.
pub fn classify_mode_pair(separation: f64, delta_f_eff: f64) -> Result<ModeRelation> {
    ensure_positive(separation, "separation")?;
    ensure_positive(delta_f_eff, "delta_f_eff")?;
    if separation <= delta_f_eff {
        Ok(ModeRelation::Compete)
    } else {
        Ok(ModeRelation::Coexist)
    }
}

/// Fraction of the inhomogeneous line that participates in maser action.
///
/// Spectral diffusion lets an ion visit `1 + T₁/T_d` packet widths before
/// it decays, so the participating fraction is modeled as
/// `min(1, (f_hom/f_inhom) · (1 + T₁/T_d))`: without diffusion only one
/// packet contributes; when `T_d ≪ T₁` the whole line becomes accessible.
pub fn participation_fraction(params: &RelaxationParams, f_inhom: f64, f_hom: f64) -> Result<f64> {
    ensure_positive(f_inhom, "f_inhom")?;
    ensure_positive(f_hom, "f_hom")?;
    if f_hom > f_inhom {
        return Err(Error::Domain(format!(
            "f_hom ({f_hom}) must not exceed f_inhom ({f_inhom})"
        )));
    }
    let t_d = params.t_d.ok_or_else(|| {
        Error::MissingData(
            "spectral-diffusion time t_d not set; supply the catalog value \
             (spectral_diffusion: 14 us)"
                .to_string(),
        )
    })?;
    Ok(((f_hom / f_inhom) * (1.0 + params.t1 / t_d)).min(1.0))
}

/// Physical property tags for catalog entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(non_camel_case_types)]
pub enum CatalogProperty {
    T1,
    T2,
    T2star,
    SqrtT1T2,
    T2_Al27_frozen_core,
    T2_Al27_bulk,
    CrossRelax,
    SpectralDiffusion,
    InhomogLinewidth,
}

impl CatalogProperty {
    pub const ALL: [CatalogProperty; 9] = [
        CatalogProperty::T1,
        CatalogProperty::T2,
        CatalogProperty::T2star,
        CatalogProperty::SqrtT1T2,
        CatalogProperty::T2_Al27_frozen_core,
        CatalogProperty::T2_Al27_bulk,
        CatalogProperty::CrossRelax,
        CatalogProperty::SpectralDiffusion,
        CatalogProperty::InhomogLinewidth,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CatalogProperty::T1 => "T1",
            CatalogProperty::T2 => "T2",
            CatalogProperty::T2star => "T2star",
            CatalogProperty::SqrtT1T2 => "sqrtT1T2",
            CatalogProperty::T2_Al27_frozen_core => "T2_Al27_frozen_core",
            CatalogProperty::T2_Al27_bulk => "T2_Al27_bulk",
            CatalogProperty::CrossRelax => "cross_relax",
            CatalogProperty::SpectralDiffusion => "spectral_diffusion",
            CatalogProperty::InhomogLinewidth => "inhomog_linewidth",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.label() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = Self::ALL.iter().map(|p| p.label()).collect();
                Error::Parse(format!(
                    "unknown catalog property '{s}' (valid: {})",
                    valid.join(", ")
                ))
            })
    }
}

/// One literature measurement of a relaxation property.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub property: CatalogProperty,
    pub technique: String,
    pub material: String,
    pub concentration: Option<Concentration>,
    /// SI value: seconds for times, Hz for linewidths.
    pub value: f64,
    pub value_unit: String,
    pub uncertainty: Option<f64>,
    /// Citation key.
    pub source: String,
}

/// The relaxation-time catalog. Entries are returned verbatim; any
/// interpolation between concentrations goes through [`scale_t2`]
/// explicitly, never silently.
#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

const EMBEDDED_CATALOG: &str = include_str!("../data/relaxation_catalog.csv");

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn embedded() -> Catalog {
        Catalog::from_csv_str(EMBEDDED_CATALOG).expect("embedded catalog parses")
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Parses the catalog CSV format:
    /// `property,technique,material,concentration,conc_unit,value,value_unit,uncertainty,source`.
    pub fn from_csv_str(text: &str) -> Result<Catalog> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for record in reader.records() {
            let rec = record.map_err(|e| Error::Parse(format!("catalog csv: {e}")))?;
            if rec.len() != 9 {
                return Err(Error::Parse(format!(
                    "catalog row has {} fields, expected 9",
                    rec.len()
                )));
            }
            let property = CatalogProperty::parse(&rec[0])?;
            let concentration = match (&rec[3], &rec[4]) {
                ("", "") => None,
                (v, u) => {
                    Some(crate::units::concentration(&format!("{v} {u}"))?)
                }
            };
            let value: f64 = rec[5]
                .parse()
                .map_err(|_| Error::Parse(format!("bad catalog value '{}'", &rec[5])))?;
            ensure_positive(value, "catalog value")?;
            let uncertainty = if rec[7].is_empty() {
                None
            } else {
                let u: f64 = rec[7]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad uncertainty '{}'", &rec[7])))?;
                ensure_nonnegative(u, "catalog uncertainty")?;
                Some(u)
            };
            entries.push(CatalogEntry {
                property,
                technique: rec[1].to_string(),
                material: rec[2].to_string(),
                concentration,
                value,
                value_unit: rec[6].to_string(),
                uncertainty,
                source: rec[8].to_string(),
            });
        }
        Ok(Catalog { entries })
    }

    /// Writes the catalog back to its CSV format.
    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "property",
            "technique",
            "material",
            "concentration",
            "conc_unit",
            "value",
            "value_unit",
            "uncertainty",
            "source",
        ])
        .expect("write header");
        for e in &self.entries {
            let (cv, cu) = match &e.concentration {
                Some(c) => (c.value.to_string(), c.unit.label().to_string()),
                None => (String::new(), String::new()),
            };
            let unc = e.uncertainty.map(|u| u.to_string()).unwrap_or_default();
            w.write_record([
                e.property.label(),
                &e.technique,
                &e.material,
                &cv,
                &cu,
                &e.value.to_string(),
                &e.value_unit,
                &unc,
                &e.source,
            ])
            .expect("write record");
        }
        String::from_utf8(w.into_inner().expect("flush csv")).expect("utf8 csv")
    }

    /// Returns entries matching the property, optional material substring
    /// (case-insensitive) and optional concentration (same unit family,
    /// equal fraction to 1e-9 relative).
    pub fn query(
        &self,
        property: CatalogProperty,
        material: Option<&str>,
        concentration: Option<&Concentration>,
    ) -> Vec<&CatalogEntry> {
        self.entries
            .iter()
            .filter(|e| e.property == property)
            .filter(|e| match material {
                Some(m) => e.material.to_lowercase().contains(&m.to_lowercase()),
                None => true,
            })
            .filter(|e| match (concentration, &e.concentration) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(want), Some(have)) => match want.ratio(have) {
                    Ok(r) => (r - 1.0).abs() <= 1e-9,
                    Err(_) => false,
                },
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{concentration, ConcUnit};
    use approx::assert_relative_eq;

    #[test]
    fn homogeneous_linewidth_examples() {
        assert_relative_eq!(
            homogeneous_linewidth(80e-6).unwrap(),
            3978.8735772973832,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            homogeneous_linewidth(1.0 / std::f64::consts::PI).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        // 10 ns dephasing puts the inhomogeneous width at 31.83 MHz, the
        // upper edge of the 27 ± 5 MHz band seen in X-band ESR.
        let lw = homogeneous_linewidth(10e-9).unwrap();
        assert_relative_eq!(lw, 31.830988618379068e6, max_relative = 1e-12);
        assert!((22e6..=32e6).contains(&lw));
    }

    #[test]
    fn homogeneous_linewidth_rejects_nonpositive() {
        assert!(homogeneous_linewidth(0.0).is_err());
        assert!(homogeneous_linewidth(-1.0).is_err());
    }

    #[test]
    fn scale_t2_examples() {
        let ruby = concentration("0.005 wt%").unwrap();
        let denser = concentration("0.02 wt%").unwrap();
        assert_relative_eq!(
            scale_t2(1.5e-6, &ruby, &denser).unwrap(),
            0.75e-6,
            max_relative = 1e-12
        );
        // identity
        let c = concentration("50 ppm").unwrap();
        assert_relative_eq!(scale_t2(80e-6, &c, &c).unwrap(), 80e-6, max_relative = 1e-12);
        // 4x concentration halves t2
        let c4 = Concentration::new(200.0, ConcUnit::Ppm).unwrap();
        assert_relative_eq!(scale_t2(80e-6, &c, &c4).unwrap(), 40e-6, max_relative = 1e-12);
    }

    #[test]
    fn scale_t2_rejects_mixed_units() {
        let a = concentration("0.005 wt%").unwrap();
        let b = concentration("50 ppm").unwrap();
        assert!(matches!(scale_t2(1.5e-6, &a, &b), Err(Error::UnitMismatch(_))));
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturation(0.0, 7e-3, 80e-6).unwrap(), 0.0);
        let t1 = 3e-3_f64;
        let t2 = 5e-5_f64;
        let chi = 1.0 / (t1 * t2).sqrt();
        assert_relative_eq!(saturation(chi, t1, t2).unwrap(), 1.0, max_relative = 1e-12);
        // chi = 1.98 MHz against sqrt(T1 T2) = 4.6 us
        let s = saturation(1.98e6, 4.6e-6, 4.6e-6).unwrap();
        assert_relative_eq!(s, 1.98e6 * 4.6e-6, max_relative = 1e-12);
        assert!((s - 9.1).abs() < 0.05);
        assert!(saturation(-1.0, t1, t2).is_err());
    }

    #[test]
    fn broadened_linewidth_examples() {
        assert_relative_eq!(
            intensity_broadened_linewidth(0.0, 80e-6).unwrap(),
            homogeneous_linewidth(80e-6).unwrap(),
            max_relative = 1e-15
        );
        // s from chi = 1.98 MHz, t1 = 7 ms, t2 = 80 us
        assert_relative_eq!(
            intensity_broadened_linewidth(1482.0, 80e-6).unwrap(),
            5.896691983954561e6,
            max_relative = 1e-12
        );
        // sqrt(1+3) = 2 exactly
        let t2 = 1.7e-4;
        assert_relative_eq!(
            intensity_broadened_linewidth(3f64.sqrt(), t2).unwrap(),
            2.0 / (std::f64::consts::PI * t2),
            max_relative = 1e-15
        );
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_mode_pair(8e6, 5.90e6).unwrap(),
            ModeRelation::Coexist
        );
        assert_eq!(
            classify_mode_pair(10e3, 5.90e6).unwrap(),
            ModeRelation::Compete
        );
        // declared tie-break
        assert_eq!(classify_mode_pair(1e6, 1e6).unwrap(), ModeRelation::Compete);
    }

    #[test]
    fn participation_examples() {
        // no-diffusion limit: t1/t_d -> 0
        let p = RelaxationParams::new(1e-9, 80e-6, 10e-9, Some(1e3)).unwrap();
        let f = participation_fraction(&p, 31.8e6, 4e3).unwrap();
        assert_relative_eq!(f, 4e3 / 31.8e6, max_relative = 1e-6);
        // clamp at 1 when f_hom == f_inhom
        let p = RelaxationParams::new(7e-3, 80e-6, 10e-9, Some(14e-6)).unwrap();
        assert_eq!(participation_fraction(&p, 4e3, 4e3).unwrap(), 1.0);
        // worked example: t1 = 7 ms, t_d = 14 us, 4 kHz inside 31.8 MHz
        let f = participation_fraction(&p, 31.8e6, 4e3).unwrap();
        assert_relative_eq!(f, 0.0630188679245283, max_relative = 1e-12);
        assert!((f - 0.063).abs() < 5e-4);
    }

    #[test]
    fn participation_requires_t_d() {
        let p = RelaxationParams::new(7e-3, 80e-6, 10e-9, None).unwrap();
        let err = participation_fraction(&p, 31.8e6, 4e3).unwrap_err();
        assert!(err.to_string().contains("14 us"));
    }

    #[test]
    fn participation_rejects_inverted_widths() {
        let p = RelaxationParams::new(7e-3, 80e-6, 10e-9, Some(14e-6)).unwrap();
        assert!(participation_fraction(&p, 4e3, 31.8e6).is_err());
    }

    #[test]
    fn relaxation_ordering_warns() {
        let p = RelaxationParams::new(1e-6, 80e-6, 10e-9, None).unwrap();
        assert_eq!(p.ordering_warnings().len(), 1);
        let ok = RelaxationParams::new(7e-3, 80e-6, 10e-9, None).unwrap();
        assert!(ok.ordering_warnings().is_empty());
    }

    #[test]
    fn catalog_queries() {
        let cat = Catalog::embedded();
        let fifty = concentration("50 ppm").unwrap();
        let t1 = cat.query(CatalogProperty::T1, Some("Fe3+"), Some(&fifty));
        assert_eq!(t1.len(), 1);
        assert_relative_eq!(t1[0].value, 7e-3, max_relative = 1e-12);
        assert_eq!(t1[0].uncertainty, Some(2e-3));

        let core = cat.query(CatalogProperty::T2_Al27_frozen_core, None, None);
        assert_eq!(core.len(), 1);
        assert_relative_eq!(core[0].value, 1e-3, max_relative = 1e-12);

        let td = cat.query(CatalogProperty::SpectralDiffusion, None, None);
        assert_eq!(td.len(), 1);
        assert_relative_eq!(td[0].value, 14e-6, max_relative = 1e-12);
    }

    #[test]
    fn catalog_unknown_property_lists_valid() {
        let err = CatalogProperty::parse("T9").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("spectral_diffusion"));
        assert!(msg.contains("inhomog_linewidth"));
    }

    #[test]
    fn catalog_round_trips_bit_identically() {
        let cat = Catalog::embedded();
        let once = cat.to_csv_string();
        let reloaded = Catalog::from_csv_str(&once).unwrap();
        assert_eq!(cat.entries(), reloaded.entries());
        assert_eq!(once, reloaded.to_csv_string());
        for (a, b) in cat.entries().iter().zip(reloaded.entries()) {
            assert!(a.value.to_bits() == b.value.to_bits());
            assert_eq!(
                a.uncertainty.map(f64::to_bits),
                b.uncertainty.map(f64::to_bits)
            );
            assert_eq!(a.source, b.source);
        }
    }
}
