//! Pump-loop gain/loss budget, DC power budget, bandpass filter response
//! models and pump-mode selection.
//!
//! Filters use an ideal lumped prototype (the physical iris geometry is
//! out of scope) calibrated so the response is exactly `-insertion_loss`
//! at center and exactly 3 dB lower at `center ± bandwidth/2`. The
//! oscillation criterion for mode selection is net chain gain above
//! threshold with loop phase assumed adjustable (the real loop carries
//! two manual phase shifters).

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};

/// DC supply of a powered component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcPower {
    pub volts: f64,
    pub amps: f64,
}

/// A flat gain/loss stage at the carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    pub name: String,
    /// Gain at carrier, dB; negative values are losses.
    pub gain_db: f64,
    pub dc_power: Option<DcPower>,
}

impl ComponentSpec {
    pub fn new(name: impl Into<String>, gain_db: f64, dc_power: Option<DcPower>) -> Result<Self> {
        if !gain_db.is_finite() {
            return Err(Error::Domain(format!("gain_db must be finite, got {gain_db}")));
        }
        if let Some(dc) = dc_power {
            ensure_nonnegative(dc.volts, "volts")?;
            ensure_nonnegative(dc.amps, "amps")?;
        }
        Ok(ComponentSpec { name: name.into(), gain_db, dc_power })
    }
}

/// Prototype shape of a bandpass filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterShape {
    Butterworth,
    Chebyshev { ripple_db: f64 },
}

/// An ideal n-pole bandpass filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandpassFilter {
    /// Center frequency, Hz.
    pub center: f64,
    /// Full −3 dB bandwidth, Hz.
    pub bandwidth_3db: f64,
    pub poles: u32,
    /// Insertion loss at center, dB (≥ 0).
    pub insertion_loss_db: f64,
    pub shape: FilterShape,
}

impl BandpassFilter {
    pub fn new(
        center: f64,
        bandwidth_3db: f64,
        poles: u32,
        insertion_loss_db: f64,
        shape: FilterShape,
    ) -> Result<Self> {
        ensure_positive(center, "center")?;
        ensure_positive(bandwidth_3db, "bandwidth_3db")?;
        if bandwidth_3db >= center {
            return Err(Error::Domain(format!(
                "bandwidth ({bandwidth_3db}) must be below center ({center})"
            )));
        }
        if !(1..=12).contains(&poles) {
            return Err(Error::Domain(format!("poles must be 1..=12, got {poles}")));
        }
        ensure_nonnegative(insertion_loss_db, "insertion_loss_db")?;
        if let FilterShape::Chebyshev { ripple_db } = shape {
            ensure_positive(ripple_db, "ripple_db")?;
        }
        Ok(BandpassFilter { center, bandwidth_3db, poles, insertion_loss_db, shape })
    }
}

/// Chebyshev polynomial of the first kind.
fn chebyshev_t(n: u32, x: f64) -> f64 {
    let xa = x.abs();
    let t = if xa <= 1.0 {
        (n as f64 * xa.acos()).cos()
    } else {
        (n as f64 * xa.acosh()).cosh()
    };
    // odd orders are odd functions; squared use below makes this moot
    if x < 0.0 && n % 2 == 1 {
        -t
    } else {
        t
    }
}

/// Prototype attenuation above the center response, dB, at normalized
/// detuning `x = |f - center| / (bandwidth/2)`. Calibrated to 0 dB at
/// `x = 0` and exactly 3 dB at `x = 1`.
fn prototype_attenuation(shape: FilterShape, poles: u32, x: f64) -> f64 {
    let half_power = 10f64.powf(0.3) - 1.0; // 3 dB as a power ratio minus one
    match shape {
        FilterShape::Butterworth => {
            let kc = half_power.powf(1.0 / (2.0 * poles as f64));
            10.0 * (1.0 + (x * kc).powi(2 * poles as i32)).log10()
        }
        FilterShape::Chebyshev { ripple_db } => {
            let eps2 = 10f64.powf(ripple_db / 10.0) - 1.0;
            let t0 = chebyshev_t(poles, 0.0);
            let center_db = 10.0 * (1.0 + eps2 * t0 * t0).log10();
            // band-edge argument where the response sits 3 dB under center
            let target = (10f64.powf(0.3) * (1.0 + eps2 * t0 * t0) - 1.0) / eps2;
            let s = (target.sqrt().acosh() / poles as f64).cosh();
            let t = chebyshev_t(poles, x * s);
            10.0 * (1.0 + eps2 * t * t).log10() - center_db
        }
    }
}

/// Filter response at `f`, dB (negative = loss).
pub fn filter_response(filter: &BandpassFilter, f: f64) -> Result<f64> {
    ensure_positive(f, "f")?;
    let x = (f - filter.center).abs() / (filter.bandwidth_3db / 2.0);
    Ok(-filter.insertion_loss_db - prototype_attenuation(filter.shape, filter.poles, x))
}

/// One ledger row of a signal chain: a flat stage, optionally with an
/// attached filter response, plus free-text provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainElement {
    pub component: ComponentSpec,
    pub filter: Option<BandpassFilter>,
    pub comment: String,
}

impl ChainElement {
    /// Contribution at `f`, dB.
    pub fn gain_at(&self, f: f64) -> Result<f64> {
        let mut g = self.component.gain_db;
        if let Some(filter) = &self.filter {
            g += filter_response(filter, f)?;
        }
        Ok(g)
    }
}

/// Ordered gain/loss ledger of a loop or signal path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignalChain {
    pub elements: Vec<ChainElement>,
}

const EMBEDDED_BOM: &str = include_str!("../data/pump_loop_bom.csv");

impl SignalChain {
    /// The pump-loop bill of materials shipped with the crate.
    pub fn embedded_pump_loop() -> SignalChain {
        SignalChain::from_csv_str(EMBEDDED_BOM).expect("embedded BOM parses")
    }

    /// Parses the BOM CSV format:
    /// `name,gain_db,volts,amps,filter_center_hz,filter_bw_hz,poles,il_db,comment`.
    /// Rows with filter columns become filter stages (default Butterworth
    /// prototype; other shapes are set through the API).
    pub fn from_csv_str(text: &str) -> Result<SignalChain> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let mut elements = Vec::new();
        for record in reader.records() {
            let rec = record.map_err(|e| Error::Parse(format!("bom csv: {e}")))?;
            if rec.len() != 9 {
                return Err(Error::Parse(format!(
                    "bom row has {} fields, expected 9",
                    rec.len()
                )));
            }
            let parse_opt = |field: &str, what: &str| -> Result<Option<f64>> {
                if field.is_empty() {
                    Ok(None)
                } else {
                    field
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::Parse(format!("bad {what} '{field}'")))
                }
            };
            let gain_db: f64 = rec[1]
                .parse()
                .map_err(|_| Error::Parse(format!("bad gain_db '{}'", &rec[1])))?;
            let volts = parse_opt(&rec[2], "volts")?;
            let amps = parse_opt(&rec[3], "amps")?;
            let dc_power = match (volts, amps) {
                (Some(v), Some(a)) => Some(DcPower { volts: v, amps: a }),
                (None, None) => None,
                _ => {
                    return Err(Error::Parse(format!(
                        "row '{}' must give both volts and amps or neither",
                        &rec[0]
                    )))
                }
            };
            let center = parse_opt(&rec[4], "filter_center_hz")?;
            let bw = parse_opt(&rec[5], "filter_bw_hz")?;
            let poles = if rec[6].is_empty() {
                None
            } else {
                Some(rec[6].parse::<u32>().map_err(|_| {
                    Error::Parse(format!("bad pole count '{}'", &rec[6]))
                })?)
            };
            let il = parse_opt(&rec[7], "il_db")?;
            let filter = match (center, bw, poles, il) {
                (Some(c), Some(b), Some(p), Some(i)) => {
                    Some(BandpassFilter::new(c, b, p, i, FilterShape::Butterworth)?)
                }
                (None, None, None, None) => None,
                _ => {
                    return Err(Error::Parse(format!(
                        "row '{}' must give all four filter columns or none",
                        &rec[0]
                    )))
                }
            };
            elements.push(ChainElement {
                component: ComponentSpec::new(rec[0].to_string(), gain_db, dc_power)?,
                filter,
                comment: rec[8].to_string(),
            });
        }
        Ok(SignalChain { elements })
    }

    pub fn has_filter(&self) -> bool {
        self.elements.iter().any(|e| e.filter.is_some())
    }
}

/// Net chain gain at `f`: the plain dB sum of every stage plus filter
/// responses. An empty chain is 0 dB.
pub fn chain_gain(chain: &SignalChain, f: f64) -> Result<f64> {
    let mut total = 0.0;
    for e in &chain.elements {
        total += e.gain_at(f)?;
    }
    Ok(total)
}

/// Total DC consumption, W: `Σ volts · amps` over powered components.
pub fn dc_power_budget(chain: &SignalChain) -> f64 {
    let mut total = 0.0;
    for e in &chain.elements {
        if let Some(dc) = e.component.dc_power {
            total += dc.volts * dc.amps;
        }
    }
    total
}

/// A pump-mode candidate that clears the oscillation threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedMode {
    pub f: f64,
    pub gain_db: f64,
}

/// Ranks candidate pump frequencies by net chain gain, keeping those above
/// `threshold_db` (net gain > 0 dB is the oscillation criterion, phase
/// assumed adjustable). The result is a stable-sorted subset of the input.
pub fn select_pump_modes(
    candidates: &[f64],
    chain: &SignalChain,
    threshold_db: f64,
) -> Result<Vec<SelectedMode>> {
    if !chain.has_filter() {
        return Err(Error::Domain(
            "mode selection needs a chain with at least one filter".into(),
        ));
    }
    let mut selected = Vec::new();
    for &f in candidates {
        let gain_db = chain_gain(chain, f)?;
        if gain_db > threshold_db {
            selected.push(SelectedMode { f, gain_db });
        }
    }
    selected.sort_by(|a, b| b.gain_db.partial_cmp(&a.gain_db).expect("finite gains"));
    Ok(selected)
}
