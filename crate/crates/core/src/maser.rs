//! Three-level zero-field maser rate model: thermal populations, pump
//! saturation, oscillation threshold, output power and concentration
//! inference.
//!
//! The model is deliberately minimal and fully documented so the
//! concentration inference is auditable:
//!
//! * ideal pump saturation equalizes the populations of levels 1 and 3;
//! * the threshold inverted-ion density comes from a gain-equals-loss
//!   condition (collective cooperativity of one): a spin with free-spin
//!   amplitude `a` couples to the mode's vacuum field
//!   `B_vac = sqrt(μ₀ h f / (2 V_eff))` at rate
//!   `g = π γ a B_vac` (rad/s), photons decay at `κ = 2π f / Q`, and
//!   oscillation starts when `N V · 2 g² T₂ ≥ κ`. Both `f` and `V_eff`
//!   cancel, leaving
//!
//!   ```text
//!   N_th = 2 C_th / (π μ₀ h γ² a² Q_L T₂)       (ions/m³)
//!   ```
//!
//!   which scales as `1/Q_L` and as the homogeneous linewidth `1/(π T₂)`.
//!   `C_th` is an adjustable model constant, default 1.
//! * above threshold each excess inverted ion delivers one signal photon
//!   per `2 T₁`: `P = (N_active Δn − N_th) · h f_s · V_eff / (2 T₁)`,
//!   clamped at zero. `N_active Δn` is compared against `N_th` (both are
//!   inverted-ion densities), so masing cuts off where the thermal
//!   inversion `Δn(T)` no longer sustains the threshold.
//!
//! Every model constant lives in the configuration and is printed in
//! reports; the inference is reproducible, not claimed exact.

use crate::cavity::WgMode;
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::units::consts::{AL_SITE_DENSITY, BOLTZMANN, FREE_SPIN_GAMMA, MU0, PLANCK};
use crate::units::{ConcUnit, Concentration};

/// Zero-field level scheme: signal on 1↔2, idler on 2↔3, pump on 1↔3.
///
/// Energy ordering E₁ < E₂ < E₃ is forced by `f_pump = f_signal + f_idler`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelSystem {
    /// Signal transition (1↔2), Hz.
    pub f_signal: f64,
    /// Idler transition (2↔3), Hz.
    pub f_idler: f64,
    /// Pump transition (1↔3), Hz.
    pub f_pump: f64,
}

impl ThreeLevelSystem {
    pub fn new(f_signal: f64, f_idler: f64, f_pump: f64) -> Result<Self> {
        ensure_positive(f_signal, "f_signal")?;
        ensure_positive(f_idler, "f_idler")?;
        ensure_positive(f_pump, "f_pump")?;
        if (f_pump - (f_signal + f_idler)).abs() > 1.0 {
            return Err(Error::Domain(format!(
                "f_pump ({f_pump}) must equal f_signal + f_idler ({}) within 1 Hz",
                f_signal + f_idler
            )));
        }
        Ok(ThreeLevelSystem { f_signal, f_idler, f_pump })
    }

    /// Builds the scheme from measured signal and pump frequencies,
    /// deriving the idler.
    pub fn from_signal_and_pump(f_signal: f64, f_pump: f64) -> Result<Self> {
        ensure_positive(f_signal, "f_signal")?;
        ensure_positive(f_pump, "f_pump")?;
        if f_pump <= f_signal {
            return Err(Error::Domain(format!(
                "f_pump ({f_pump}) must exceed f_signal ({f_signal})"
            )));
        }
        ThreeLevelSystem::new(f_signal, f_pump - f_signal, f_pump)
    }
}

/// Adjustable constants of the maser model, printed in reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConstants {
    /// Multiplier on the gain-equals-loss threshold density.
    pub threshold_constant: f64,
    /// Signal-transition amplitude in free-spin units.
    pub signal_amplitude: f64,
}

impl Default for ModelConstants {
    fn default() -> Self {
        ModelConstants { threshold_constant: 1.0, signal_amplitude: 1.0 }
    }
}

/// Full configuration of the maser model.
#[derive(Debug, Clone, PartialEq)]
pub struct MaserConfig {
    pub system: ThreeLevelSystem,
    pub signal_mode: WgMode,
    /// Operating temperature, K.
    pub temperature: f64,
    /// Substitutional active-ion density, ions/m³.
    pub ion_density: f64,
    /// Spin-lattice relaxation time, s.
    pub t1: f64,
    /// Homogeneous relaxation time of the signal transition, s.
    pub t2: f64,
    /// Fraction of ions participating in maser action, in (0, 1].
    pub participation: f64,
    pub constants: ModelConstants,
    /// Optional T₁(T) table `(kelvin, seconds)`, linearly interpolated and
    /// clamped at its ends. Absent, T₁ is treated as constant.
    pub t1_table: Option<Vec<(f64, f64)>>,
}

impl MaserConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.temperature, "temperature")?;
        ensure_nonnegative(self.ion_density, "ion_density")?;
        ensure_positive(self.t1, "t1")?;
        ensure_positive(self.t2, "t2")?;
        if !(self.participation > 0.0 && self.participation <= 1.0) {
            return Err(Error::Domain(format!(
                "participation must lie in (0, 1], got {}",
                self.participation
            )));
        }
        if let Some(table) = &self.t1_table {
            if table.is_empty() {
                return Err(Error::Domain("t1 table must not be empty".into()));
            }
            for w in table.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(Error::Domain("t1 table temperatures must increase".into()));
                }
            }
            for (t, t1) in table {
                ensure_positive(*t, "t1 table temperature")?;
                ensure_positive(*t1, "t1 table value")?;
            }
        }
        Ok(())
    }

    /// T₁ at temperature `t`: table interpolation when present, else the
    /// constant value.
    pub fn t1_at(&self, t: f64) -> f64 {
        match &self.t1_table {
            None => self.t1,
            Some(table) => {
                if t <= table[0].0 {
                    return table[0].1;
                }
                if t >= table[table.len() - 1].0 {
                    return table[table.len() - 1].1;
                }
                for w in table.windows(2) {
                    if t >= w[0].0 && t <= w[1].0 {
                        let frac = (t - w[0].0) / (w[1].0 - w[0].0);
                        return w[0].1 + frac * (w[1].1 - w[0].1);
                    }
                }
                self.t1
            }
        }
    }

    fn at_temperature(&self, t: f64) -> MaserConfig {
        let mut c = self.clone();
        c.temperature = t;
        c
    }
}

/// Thermal (Boltzmann) level populations `(n₁, n₂, n₃)`, summing to 1.
///
/// Energies are `E₁ = 0`, `E₂ = h f_signal`, `E₃ = h f_pump`.
pub fn boltzmann_populations(system: &ThreeLevelSystem, temperature: f64) -> Result<(f64, f64, f64)> {
    ensure_positive(temperature, "temperature")?;
    let kt = BOLTZMANN * temperature;
    let z2 = (-PLANCK * system.f_signal / kt).exp();
    let z3 = (-PLANCK * system.f_pump / kt).exp();
    let z = 1.0 + z2 + z3;
    Ok((1.0 / z, z2 / z, z3 / z))
}

/// Per-ion inversion `Δn = n₂' − n₁'` after ideal pump saturation, which
/// equalizes levels 1 and 3 (`n₁' = n₃' = (n₁ + n₃)/2`) and leaves level 2
/// untouched.
///
/// For this level scheme (idler above signal) the result is positive over
/// the operating range and falls off as `1/T`; deep below ~2 K the thermal
/// weight of level 1 wins and the saturated inversion turns negative.
pub fn saturated_inversion(system: &ThreeLevelSystem, temperature: f64) -> Result<f64> {
    let (n1, n2, n3) = boltzmann_populations(system, temperature)?;
    Ok(n2 - 0.5 * (n1 + n3))
}

/// Threshold inverted-ion density for oscillation, ions/m³.
///
/// See the module docs for the closed form; it depends only on the loaded
/// Q and T₂ (frequency and mode volume cancel), scaling as `1/Q_L` and
/// linearly with the homogeneous linewidth. `t1` and `f_signal` are
/// accepted and validated for interface stability with rate-limited
/// threshold models, but do not enter the default gain-equals-loss form.
pub fn threshold_inversion_density(
    signal_mode: &WgMode,
    t1: f64,
    t2: f64,
    f_signal: f64,
    constants: &ModelConstants,
) -> Result<f64> {
    ensure_positive(t1, "t1")?;
    ensure_positive(t2, "t2")?;
    ensure_positive(f_signal, "f_signal")?;
    ensure_positive(constants.threshold_constant, "threshold_constant")?;
    ensure_positive(constants.signal_amplitude, "signal_amplitude")?;
    let a = constants.signal_amplitude;
    let gamma2 = FREE_SPIN_GAMMA * FREE_SPIN_GAMMA;
    Ok(2.0 * constants.threshold_constant
        / (std::f64::consts::PI * MU0 * PLANCK * gamma2 * a * a * signal_mode.q_loaded * t2))
}

/// Steady-state maser output power, W, clamped at zero below threshold.
///
/// With the pump saturated the inverted density is
/// `N_active · Δn(T)` with `N_active = ion_density · participation`; the
/// excess over [`threshold_inversion_density`] radiates
/// `h f_s V_eff / (2 T₁)` each. Without pump saturation the thermal
/// inversion `n₂ − n₁` is negative and the output is zero.
pub fn output_power(config: &MaserConfig, pump_saturated: bool) -> Result<f64> {
    config.validate()?;
    let dn = if pump_saturated {
        saturated_inversion(&config.system, config.temperature)?
    } else {
        let (n1, n2, _) = boltzmann_populations(&config.system, config.temperature)?;
        n2 - n1
    };
    if dn <= 0.0 {
        return Ok(0.0);
    }
    let t1 = config.t1_at(config.temperature);
    let n_th = threshold_inversion_density(
        &config.signal_mode,
        t1,
        config.t2,
        config.system.f_signal,
        &config.constants,
    )?;
    let n_active = config.ion_density * config.participation;
    let excess = n_active * dn - n_th;
    if excess <= 0.0 {
        return Ok(0.0);
    }
    Ok(excess * PLANCK * config.system.f_signal * config.signal_mode.v_eff / (2.0 * t1))
}

/// Result of inverting the output-power model for concentration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationEstimate {
    /// Atomic concentration against the Al site density, ppb.
    pub ppb: f64,
    /// Ion density, ions/m³.
    pub ion_density: f64,
    /// True when the input power was zero and the value is the
    /// threshold-equivalent upper bound rather than an inferred value.
    pub upper_bound: bool,
}

/// Infers the active-ion concentration from a measured output power,
/// ignoring `config.ion_density`.
///
/// Zero input power yields the threshold-equivalent concentration as an
/// upper bound. Atomic ppb is taken against the Al site density of
/// corundum (4.70e28 m⁻³).
pub fn infer_concentration(p_out: f64, config: &MaserConfig) -> Result<ConcentrationEstimate> {
    ensure_nonnegative(p_out, "p_out")?;
    config.validate()?;
    let dn = saturated_inversion(&config.system, config.temperature)?;
    if dn <= 0.0 {
        return Err(Error::Numeric(format!(
            "saturated inversion is non-positive ({dn}) at {} K; model not invertible",
            config.temperature
        )));
    }
    let t1 = config.t1_at(config.temperature);
    let n_th = threshold_inversion_density(
        &config.signal_mode,
        t1,
        config.t2,
        config.system.f_signal,
        &config.constants,
    )?;
    let n_inverted = n_th
        + 2.0 * t1 * p_out / (PLANCK * config.system.f_signal * config.signal_mode.v_eff);
    let ion_density = n_inverted / (dn * config.participation);
    Ok(ConcentrationEstimate {
        ppb: ion_density / AL_SITE_DENSITY * 1e9,
        ion_density,
        upper_bound: p_out == 0.0,
    })
}

/// Ratio of a chemically assayed concentration to an ESR-inferred one:
/// how much of the assayed iron is invisible to the maser.
pub fn dark_matter_ratio(assay: &Concentration, inferred_ppb: f64) -> Result<f64> {
    ensure_positive(inferred_ppb, "inferred_ppb")?;
    let inferred = Concentration::new(inferred_ppb, ConcUnit::Ppb)?;
    assay.ratio(&inferred)
}

/// Outcome flag of [`masing_range_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeFlag {
    /// A cutoff temperature was bracketed and bisected.
    Cutoff,
    /// Output is positive across the whole band; returns `t_max`.
    MasesThroughout,
    /// Output is zero across the whole band; returns `t_min`.
    NoMasing,
}

/// Highest masing temperature with its outcome flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasingRange {
    pub temperature: f64,
    pub flag: RangeFlag,
}

/// Bisects for the highest temperature at which [`output_power`] stays
/// positive, deterministic to 0.01 K. Without a sign change the band edge
/// comes back flagged.
pub fn masing_range_check(config: &MaserConfig, t_min: f64, t_max: f64) -> Result<MasingRange> {
    ensure_positive(t_min, "t_min")?;
    if t_min >= t_max {
        return Err(Error::Domain(format!(
            "t_min ({t_min}) must be below t_max ({t_max})"
        )));
    }
    let mases = |t: f64| -> Result<bool> {
        Ok(output_power(&config.at_temperature(t), true)? > 0.0)
    };
    let lo_mases = mases(t_min)?;
    let hi_mases = mases(t_max)?;
    match (lo_mases, hi_mases) {
        (true, true) => Ok(MasingRange { temperature: t_max, flag: RangeFlag::MasesThroughout }),
        (false, false) => Ok(MasingRange { temperature: t_min, flag: RangeFlag::NoMasing }),
        (false, true) => Err(Error::Numeric(
            "output power rises with temperature; no upper masing edge in band".into(),
        )),
        (true, false) => {
            let (mut lo, mut hi) = (t_min, t_max);
            while hi - lo > 0.01 {
                let mid = 0.5 * (lo + hi);
                if mases(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(MasingRange { temperature: 0.5 * (lo + hi), flag: RangeFlag::Cutoff })
        }
    }
}
